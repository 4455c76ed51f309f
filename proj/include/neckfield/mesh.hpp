#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "neckfield/geometry.hpp"

namespace neckfield {

enum class BoundaryTag : std::uint8_t { Outer = 0, Inclusion1 = 1, Inclusion2 = 2, Axis = 3, Flat = 4 };

const char* tag_name(BoundaryTag tag);
BoundaryTag tag_from_name(const std::string& name);

/// Boundary edge oriented with the domain on its left.
struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::Outer;
};

/// Conforming triangulation. Triangles are positively oriented.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundaryEdges;
  int axisWeightExponent = 0;

  double area(int t) const;
  Vec2 centroid(int t) const;
  /// Nodes touched by at least one boundary edge with the given tag, sorted.
  std::vector<int> boundary_nodes(BoundaryTag tag) const;
};

/// Mesh export: header "nodes N elements M edges K" followed by node rows
/// "x y", element rows "a b c" and edge rows "a b tag". Meshes with a
/// nonzero axis weight carry a trailing "axis_weight P" on the header line.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

/// Shortest-path distance along mesh edges from the seed nodes.
std::vector<double> graph_distance(const Mesh& mesh, const std::vector<int>& seeds);

/// Triangle lookup for point evaluation of nodal fields.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);

  /// Triangle containing p (with a relative tolerance), or nullopt.
  std::optional<int> locate(Vec2 p) const;
  /// Barycentric coordinates of p in triangle t.
  std::array<double, 3> barycentric(int t, Vec2 p) const;
  /// Linear interpolation of a nodal field; throws std::out_of_range outside the mesh.
  double interpolate(const std::vector<double>& nodal, Vec2 p) const;

 private:
  struct Box {
    double x0, y0, x1, y1;
  };
  struct Node {
    Box box;
    int left = -1;
    int right = -1;
    int first = 0;
    int count = 0;
  };

  int build(int first, int count);
  bool inside(int t, Vec2 p) const;

  const Mesh* mesh_;
  std::vector<int> order_;
  std::vector<Box> boxes_;
  std::vector<Node> tree_;
};

}  // namespace neckfield
