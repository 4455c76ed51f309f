#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "neckfield/geometry.hpp"
#include "neckfield/mesh.hpp"

namespace neckfield::detail {

/// Boundary piece used to place split points exactly on the true curve. Arc
/// parameters are angles; points are computed relative to a pole point so that
/// coordinates near the pole carry no cancellation error.
struct BoundaryCurve {
  enum class Kind { Arc, Line };
  Kind kind = Kind::Line;
  BoundaryTag tag = BoundaryTag::Outer;
  bool internal = false;  // constraint that is not part of the final boundary
  Vec2 center;
  double radius = 0.0;
  double pole_angle = 0.0;
  Vec2 pole;
  Vec2 p0, p1;

  Vec2 at(double s) const;
  /// Length element per unit parameter.
  double speed() const;
};

struct InputSegment {
  int a = 0;
  int b = 0;
  int curve = 0;
  double sa = 0.0;
  double sb = 0.0;
};

struct Pslg {
  std::vector<BoundaryCurve> curves;
  std::vector<Vec2> vertices;
  std::vector<InputSegment> segments;  // oriented with the domain on the left
  std::vector<Vec2> holes;             // extra points outside the domain inserted first
};

using SizeField = std::function<double(Vec2)>;

struct RefineResult {
  Mesh mesh;
  std::vector<int> internal_edge_nodes;  // node pairs of internal constraints, flattened
};

/// Constrained Delaunay triangulation of the PSLG followed by refinement until
/// every triangle has circumradius/shortest-edge <= sqrt(2) and
/// circumdiameter <= size(centroid).
RefineResult refine(const Pslg& pslg, const SizeField& size, std::size_t max_vertices);

}  // namespace neckfield::detail
