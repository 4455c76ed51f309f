#include "neckfield/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace neckfield {

const char* tag_name(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Outer: return "outer";
    case BoundaryTag::Inclusion1: return "inclusion1";
    case BoundaryTag::Inclusion2: return "inclusion2";
    case BoundaryTag::Axis: return "axis";
    case BoundaryTag::Flat: return "flat";
  }
  return "unknown";
}

BoundaryTag tag_from_name(const std::string& name) {
  for (auto t : {BoundaryTag::Outer, BoundaryTag::Inclusion1, BoundaryTag::Inclusion2,
                 BoundaryTag::Axis, BoundaryTag::Flat})
    if (name == tag_name(t)) return t;
  throw std::invalid_argument("unknown boundary tag '" + name + "'");
}

double Mesh::area(int t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross(nodes[tri[1]] - nodes[tri[0]], nodes[tri[2]] - nodes[tri[0]]);
}

Vec2 Mesh::centroid(int t) const {
  const auto& tri = triangles[t];
  const Vec2 s = nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]];
  return {s.x / 3.0, s.y / 3.0};
}

std::vector<int> Mesh::boundary_nodes(BoundaryTag tag) const {
  std::vector<int> out;
  for (const auto& e : boundaryEdges) {
    if (e.tag != tag) continue;
    out.push_back(e.a);
    out.push_back(e.b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "nodes " << mesh.nodes.size() << " elements " << mesh.triangles.size() << " edges "
      << mesh.boundaryEdges.size();
  if (mesh.axisWeightExponent != 0) out << " axis_weight " << mesh.axisWeightExponent;
  out << '\n';
  char buf[64];
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundaryEdges)
    out << e.a << ' ' << e.b << ' ' << tag_name(e.tag) << '\n';
}

Mesh read_mesh(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("mesh file is empty");
  std::istringstream header(line);
  std::string w1, w2, w3;
  std::size_t n = 0, m = 0, k = 0;
  header >> w1 >> n >> w2 >> m >> w3 >> k;
  if (!header || w1 != "nodes" || w2 != "elements" || w3 != "edges")
    throw std::runtime_error("malformed mesh header: " + line);
  Mesh mesh;
  std::string extra;
  if (header >> extra) {
    if (extra != "axis_weight" || !(header >> mesh.axisWeightExponent))
      throw std::runtime_error("malformed mesh header: " + line);
  }
  mesh.nodes.resize(n);
  for (auto& p : mesh.nodes) {
    std::string xs, ys;
    if (!(in >> xs >> ys)) throw std::runtime_error("truncated node section");
    p = {std::strtod(xs.c_str(), nullptr), std::strtod(ys.c_str(), nullptr)};
  }
  mesh.triangles.resize(m);
  for (auto& t : mesh.triangles)
    if (!(in >> t[0] >> t[1] >> t[2])) throw std::runtime_error("truncated element section");
  mesh.boundaryEdges.resize(k);
  for (auto& e : mesh.boundaryEdges) {
    std::string tag;
    if (!(in >> e.a >> e.b >> tag)) throw std::runtime_error("truncated edge section");
    e.tag = tag_from_name(tag);
  }
  for (const auto& t : mesh.triangles)
    for (int v : t)
      if (v < 0 || static_cast<std::size_t>(v) >= n)
        throw std::runtime_error("element references a missing node");
  return mesh;
}

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
  const int nt = static_cast<int>(mesh.triangles.size());
  order_.resize(nt);
  boxes_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    order_[t] = t;
    const auto& tri = mesh.triangles[t];
    Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int v : tri) {
      b.x0 = std::min(b.x0, mesh.nodes[v].x);
      b.y0 = std::min(b.y0, mesh.nodes[v].y);
      b.x1 = std::max(b.x1, mesh.nodes[v].x);
      b.y1 = std::max(b.y1, mesh.nodes[v].y);
    }
    boxes_[t] = b;
  }
  tree_.reserve(2 * static_cast<std::size_t>(nt) / 4 + 8);
  if (nt > 0) build(0, nt);
}

int MeshLocator::build(int first, int count) {
  Node node;
  node.box = boxes_[order_[first]];
  for (int i = first; i < first + count; ++i) {
    const Box& b = boxes_[order_[i]];
    node.box.x0 = std::min(node.box.x0, b.x0);
    node.box.y0 = std::min(node.box.y0, b.y0);
    node.box.x1 = std::max(node.box.x1, b.x1);
    node.box.y1 = std::max(node.box.y1, b.y1);
  }
  const int id = static_cast<int>(tree_.size());
  tree_.push_back(node);
  if (count <= 8) {
    tree_[id].first = first;
    tree_[id].count = count;
    return id;
  }
  const bool split_x = (node.box.x1 - node.box.x0) >= (node.box.y1 - node.box.y0);
  auto key = [&](int t) {
    const Box& b = boxes_[t];
    return split_x ? b.x0 + b.x1 : b.y0 + b.y1;
  };
  const int half = count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + first + half,
                   order_.begin() + first + count,
                   [&](int a, int b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
  const int l = build(first, half);
  const int r = build(first + half, count - half);
  tree_[id].left = l;
  tree_[id].right = r;
  return id;
}

std::array<double, 3> MeshLocator::barycentric(int t, Vec2 p) const {
  const auto& tri = mesh_->triangles[t];
  const Vec2 a = mesh_->nodes[tri[0]], b = mesh_->nodes[tri[1]], c = mesh_->nodes[tri[2]];
  const double det = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / det;
  const double l2 = cross(b - a, p - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}

bool MeshLocator::inside(int t, Vec2 p) const {
  const auto l = barycentric(t, p);
  constexpr double tol = -1e-10;
  return l[0] >= tol && l[1] >= tol && l[2] >= tol;
}

std::optional<int> MeshLocator::locate(Vec2 p) const {
  if (tree_.empty()) return std::nullopt;
  std::vector<int> stack{0};
  std::optional<int> best;
  double best_score = -std::numeric_limits<double>::infinity();
  while (!stack.empty()) {
    const Node& node = tree_[stack.back()];
    stack.pop_back();
    const Box& b = node.box;
    const double pad = 1e-12 * (1.0 + std::max(std::abs(p.x), std::abs(p.y)));
    if (p.x < b.x0 - pad || p.x > b.x1 + pad || p.y < b.y0 - pad || p.y > b.y1 + pad) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int t = order_[i];
        const auto l = barycentric(t, p);
        const double score = std::min({l[0], l[1], l[2]});
        if (score >= 0.0) return t;
        if (score > best_score) {
          best_score = score;
          best = t;
        }
      }
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  if (best && inside(*best, p)) return best;
  return std::nullopt;
}

double MeshLocator::interpolate(const std::vector<double>& nodal, Vec2 p) const {
  const auto t = locate(p);
  if (!t) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "point (%.6g, %.6g) lies outside the mesh", p.x, p.y);
    throw std::out_of_range(buf);
  }
  const auto l = barycentric(*t, p);
  const auto& tri = mesh_->triangles[*t];
  return l[0] * nodal[tri[0]] + l[1] * nodal[tri[1]] + l[2] * nodal[tri[2]];
}

std::vector<double> graph_distance(const Mesh& mesh, const std::vector<int>& seeds) {
  const int n = static_cast<int>(mesh.nodes.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      adj[t[i]].push_back(t[(i + 1) % 3]);
      adj[t[(i + 1) % 3]].push_back(t[i]);
    }
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int s : seeds) {
    dist[s] = 0.0;
    queue.push({0.0, s});
  }
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (int w : adj[v]) {
      const double nd = d + norm(mesh.nodes[w] - mesh.nodes[v]);
      if (nd < dist[w]) {
        dist[w] = nd;
        queue.push({nd, w});
      }
    }
  }
  return dist;
}

}  // namespace neckfield
