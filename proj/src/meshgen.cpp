#include "neckfield/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "delaunay.hpp"
#include "neckfield/errors.hpp"

namespace neckfield {

using detail::BoundaryCurve;
using detail::InputSegment;
using detail::Pslg;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxArcAngle = 0.05;  // radians per boundary segment
constexpr double kBoundaryFraction = 0.8;
constexpr double kEquilateralArea = 0.3247595264191645;  // area per circumdiameter^2

BoundaryCurve arc(BoundaryTag tag, Vec2 center, double radius, double pole_angle, Vec2 pole) {
  BoundaryCurve c;
  c.kind = BoundaryCurve::Kind::Arc;
  c.tag = tag;
  c.center = center;
  c.radius = radius;
  c.pole_angle = pole_angle;
  c.pole = pole;
  return c;
}

BoundaryCurve line(BoundaryTag tag, Vec2 p0, Vec2 p1, bool internal = false) {
  BoundaryCurve c;
  c.kind = BoundaryCurve::Kind::Line;
  c.tag = tag;
  c.p0 = p0;
  c.p1 = p1;
  c.internal = internal;
  return c;
}

class PslgBuilder {
 public:
  explicit PslgBuilder(const detail::SizeField& size) : size_(size) {}

  int vertex(Vec2 p) {
    pslg_.vertices.push_back(p);
    return static_cast<int>(pslg_.vertices.size()) - 1;
  }

  /// Discretizes curve parameters s0 -> s1 between existing vertices va, vb.
  void chain(const BoundaryCurve& curve, double s0, double s1, int va, int vb) {
    const int cid = static_cast<int>(pslg_.curves.size());
    pslg_.curves.push_back(curve);
    constexpr int kSamples = 20000;
    std::vector<double> s(kSamples + 1), cum(kSamples + 1, 0.0);
    auto density = [&](double t) {
      double h = kBoundaryFraction * size_(curve.at(t));
      if (curve.kind == BoundaryCurve::Kind::Arc) h = std::min(h, kMaxArcAngle * curve.radius);
      return std::abs(s1 - s0) * curve.speed() / h;
    };
    // samples cluster quadratically at both ends, where junctions and poles sit
    double prev_density = 0.0;
    for (int k = 0; k <= kSamples; ++k) {
      const double u = 0.5 * (1.0 - std::cos(kPi * k / kSamples));
      s[k] = s0 + (s1 - s0) * u;
      const double d = density(s[k]);
      if (k > 0) {
        const double du = 0.5 * (std::cos(kPi * (k - 1) / kSamples) - std::cos(kPi * k / kSamples));
        cum[k] = cum[k - 1] + 0.5 * (d + prev_density) * du;
      }
      prev_density = d;
    }
    const int pieces = std::max(1, static_cast<int>(std::ceil(cum[kSamples])));
    int prev = va;
    double prev_s = s0;
    int k = 0;
    for (int j = 1; j < pieces; ++j) {
      const double target = cum[kSamples] * j / pieces;
      while (cum[k + 1] < target) ++k;
      const double f = (target - cum[k]) / (cum[k + 1] - cum[k]);
      const double sj = s[k] + f * (s[k + 1] - s[k]);
      const int v = vertex(curve.at(sj));
      pslg_.segments.push_back({prev, v, cid, prev_s, sj});
      prev = v;
      prev_s = sj;
    }
    pslg_.segments.push_back({prev, vb, cid, prev_s, s1});
  }

  void hole(Vec2 p) { pslg_.holes.push_back(p); }
  Pslg& pslg() { return pslg_; }

 private:
  const detail::SizeField& size_;
  Pslg pslg_;
};

void check_inputs(const DomainSpec& domain, const NeckProfile& profile,
                  const GradingPolicy& policy) {
  domain.validate();
  profile.validate();
  policy.validate();
  if (std::abs(profile.eps - domain.eps()) > 1e-12 * std::max(1.0, profile.eps))
    throw std::invalid_argument("profile gap does not match the domain");
  if (profile.eps < 1e-7)
    throw MeshRefusal("gap eps=" + std::to_string(profile.eps) +
                          " is below the supported floor 1e-7",
                      estimate_elements(domain, profile, policy));
}

Mesh finish(detail::RefineResult result, int weight) {
  result.mesh.axisWeightExponent = weight;
  return std::move(result.mesh);
}

// Lower half {y <= eps/2} of a symmetric domain mirrored across the midplane.
Mesh mirrored_mesh(const Mesh& half, const std::vector<int>& midplane_nodes, double eps) {
  Mesh out;
  const int n = static_cast<int>(half.nodes.size());
  std::vector<char> on_mid(n, 0);
  for (int v : midplane_nodes) on_mid[v] = 1;
  std::vector<int> mirror(n);
  out.nodes = half.nodes;
  for (int v = 0; v < n; ++v) {
    if (on_mid[v]) {
      mirror[v] = v;
      continue;
    }
    mirror[v] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(reflect_midplane(half.nodes[v], eps));
  }
  out.triangles = half.triangles;
  for (const auto& t : half.triangles) out.triangles.push_back({mirror[t[0]], mirror[t[2]], mirror[t[1]]});
  out.boundaryEdges = half.boundaryEdges;
  for (const auto& e : half.boundaryEdges) {
    BoundaryTag tag = e.tag;
    if (tag == BoundaryTag::Inclusion2) tag = BoundaryTag::Inclusion1;
    out.boundaryEdges.push_back({mirror[e.b], mirror[e.a], tag});
  }
  out.axisWeightExponent = half.axisWeightExponent;
  return out;
}

}  // namespace

void GradingPolicy::validate() const {
  if (!(theta > 0.0 && theta <= 0.5)) throw ConfigError("mesh.theta must lie in (0, 0.5]");
  if (!(h_max > 0.0)) throw ConfigError("mesh.h_max must be positive");
  if (band < 0.0) throw ConfigError("mesh.band must be nonnegative");
  if (!(h_boundary > 0.0)) throw ConfigError("mesh.h_boundary must be positive");
  if (!(grade > 0.0 && grade <= 1.0)) throw ConfigError("mesh.grade must lie in (0, 1]");
  if (max_elements == 0) throw ConfigError("mesh.max_elements must be positive");
}

double mesh_size(const DomainSpec& domain, const NeckProfile& profile, const GradingPolicy& policy,
                 Vec2 p) {
  double h = policy.h_max;
  for (const auto& c : domain.inclusions) {
    const double d = std::max(0.0, norm(p - c.center) - c.radius);
    h = std::min(h, policy.h_boundary + policy.grade * d);
  }
  const double band = policy.band_for(profile);
  const double xc = std::clamp(p.x, -band, band);
  const double lo = profile.f2.value(std::abs(xc));
  const double hi = profile.eps + profile.f1.value(std::abs(xc));
  const double dx = std::abs(p.x - xc);
  const double dy = p.y < lo ? lo - p.y : (p.y > hi ? p.y - hi : 0.0);
  const double gap = hi - lo;
  h = std::min(h, policy.theta * gap + policy.grade * std::hypot(dx, dy));
  return h;
}

std::size_t estimate_elements(const DomainSpec& domain, const NeckProfile& profile,
                              const GradingPolicy& policy) {
  const double band = policy.band_for(profile);
  const bool axi = domain.mode == DomainMode::Axisymmetric;
  // neck: elements of diameter theta*delta stacked across a gap delta
  constexpr int kSteps = 4000;
  double neck = 0.0;
  for (int i = 0; i < kSteps; ++i) {
    const double x = band * (i + 0.5) / kSteps;
    const double delta = profile.eps + profile.f1.value(x) - profile.f2.value(x);
    neck += (band / kSteps) / delta;
  }
  if (!axi) neck *= 2.0;
  neck /= kEquilateralArea * policy.theta * policy.theta;
  const double share = axi ? 0.5 : 1.0;
  double rings = 0.0;
  for (const auto& c : domain.inclusions)
    rings += share * 2.0 * kPi * c.radius / (kEquilateralArea * policy.grade * policy.h_boundary);
  const double far = domain_area(domain) / (kEquilateralArea * policy.h_max * policy.h_max);
  return static_cast<std::size_t>(2.0 * (neck + rings + far));
}

double domain_area(const DomainSpec& domain) {
  double a = kPi * domain.outer.radius * domain.outer.radius;
  for (const auto& c : domain.inclusions) a -= kPi * c.radius * c.radius;
  return domain.mode == DomainMode::Axisymmetric ? 0.5 * a : a;
}

Mesh build_mesh(const DomainSpec& domain, const NeckProfile& profile, const GradingPolicy& policy) {
  check_inputs(domain, profile, policy);
  const std::size_t estimate = estimate_elements(domain, profile, policy);
  if (estimate > policy.max_elements)
    throw MeshRefusal("estimated " + std::to_string(estimate) + " elements exceeds the limit " +
                          std::to_string(policy.max_elements),
                      estimate);

  const Circle& outer = domain.outer;
  const Circle& d1 = domain.inclusions[0];
  const Circle& d2 = domain.inclusions[1];
  const bool axi = domain.mode == DomainMode::Axisymmetric;
  const double gap_mid = 0.5 * (d1.center.y - d1.radius + d2.center.y + d2.radius);
  const bool symmetric = d1.radius == d2.radius && outer.center.x == 0.0 &&
                         std::abs(outer.center.y - gap_mid) <= 1e-15 * (1.0 + outer.radius);
  const int weight = domain.weight_exponent();
  const std::size_t budget = 4 * policy.max_elements + 1000;

  const detail::SizeField size = [&](Vec2 p) { return mesh_size(domain, profile, policy, p); };
  PslgBuilder b(size);

  const Vec2 top1{0.0, d1.center.y + d1.radius};
  const Vec2 pole1{0.0, d1.center.y - d1.radius};
  const Vec2 pole2{0.0, d2.center.y + d2.radius};
  const Vec2 bottom2{0.0, d2.center.y - d2.radius};
  const Vec2 outer_bottom{0.0, outer.center.y - outer.radius};
  const Vec2 outer_top{0.0, outer.center.y + outer.radius};
  const BoundaryCurve outer_arc =
      arc(BoundaryTag::Outer, outer.center, outer.radius, -0.5 * kPi, outer_bottom);
  const BoundaryCurve arc1 = arc(BoundaryTag::Inclusion1, d1.center, d1.radius, -0.5 * kPi, pole1);
  const BoundaryCurve arc2 = arc(BoundaryTag::Inclusion2, d2.center, d2.radius, 0.5 * kPi, pole2);

  if (symmetric) {
    const double ym = outer.center.y;
    const Vec2 right{outer.center.x + outer.radius, ym};
    const Vec2 left{outer.center.x - outer.radius, ym};
    const Vec2 mid{0.0, ym};
    if (axi) {
      const int vb = b.vertex(outer_bottom), vr = b.vertex(right), vm = b.vertex(mid);
      const int vp = b.vertex(pole2), vq = b.vertex(bottom2);
      b.chain(outer_arc, -0.5 * kPi, 0.0, vb, vr);
      b.chain(line(BoundaryTag::Axis, right, mid, true), 0.0, 1.0, vr, vm);
      b.chain(line(BoundaryTag::Axis, mid, pole2), 0.0, 1.0, vm, vp);
      b.chain(arc2, 0.5 * kPi, -0.5 * kPi, vp, vq);
      b.chain(line(BoundaryTag::Axis, bottom2, outer_bottom), 0.0, 1.0, vq, vb);
      b.hole(d2.center);
    } else {
      const int vl = b.vertex(left), vr = b.vertex(right);
      b.chain(outer_arc, -kPi, 0.0, vl, vr);
      b.chain(line(BoundaryTag::Outer, right, left, true), 0.0, 1.0, vr, vl);
      const int vp = b.vertex(pole2), vq = b.vertex(bottom2);
      b.chain(arc2, 0.5 * kPi, -0.5 * kPi, vp, vq);
      b.chain(arc2, -0.5 * kPi, -1.5 * kPi, vq, vp);
      b.hole(d2.center);
    }
    auto result = detail::refine(b.pslg(), size, budget);
    std::vector<int> mid_nodes = result.internal_edge_nodes;
    Mesh half = finish(std::move(result), weight);
    Mesh full = mirrored_mesh(half, mid_nodes, 2.0 * ym);
    return full;
  }

  if (axi) {
    const int vt = b.vertex(outer_top), v1t = b.vertex(top1), v1p = b.vertex(pole1);
    const int v2p = b.vertex(pole2), v2b = b.vertex(bottom2), vb = b.vertex(outer_bottom);
    b.chain(line(BoundaryTag::Axis, outer_top, top1), 0.0, 1.0, vt, v1t);
    b.chain(arc1, 0.5 * kPi, -0.5 * kPi, v1t, v1p);
    b.chain(line(BoundaryTag::Axis, pole1, pole2), 0.0, 1.0, v1p, v2p);
    b.chain(arc2, 0.5 * kPi, -0.5 * kPi, v2p, v2b);
    b.chain(line(BoundaryTag::Axis, bottom2, outer_bottom), 0.0, 1.0, v2b, vb);
    b.chain(outer_arc, -0.5 * kPi, 0.5 * kPi, vb, vt);
  } else {
    const int vb = b.vertex(outer_bottom), vt = b.vertex(outer_top);
    b.chain(outer_arc, -0.5 * kPi, 0.5 * kPi, vb, vt);
    b.chain(outer_arc, 0.5 * kPi, 1.5 * kPi, vt, vb);
    const int v1p = b.vertex(pole1), v1t = b.vertex(top1);
    b.chain(arc1, -0.5 * kPi, -1.5 * kPi, v1p, v1t);
    b.chain(arc1, 0.5 * kPi, -0.5 * kPi, v1t, v1p);
    const int v2p = b.vertex(pole2), v2b = b.vertex(bottom2);
    b.chain(arc2, 0.5 * kPi, -0.5 * kPi, v2p, v2b);
    b.chain(arc2, -0.5 * kPi, -1.5 * kPi, v2b, v2p);
  }
  b.hole(d1.center);
  b.hole(d2.center);
  return finish(detail::refine(b.pslg(), size, budget), weight);
}

Mesh build_halfdisk_mesh(double radius, double h) {
  if (!(radius > 0.0) || !(h > 0.0)) throw std::invalid_argument("half-disk needs radius, h > 0");
  const detail::SizeField size = [h](Vec2) { return h; };
  PslgBuilder b(size);
  const Vec2 left{-radius, 0.0}, right{radius, 0.0};
  const int vl = b.vertex(left), vr = b.vertex(right);
  b.chain(line(BoundaryTag::Flat, left, right), 0.0, 1.0, vl, vr);
  b.chain(arc(BoundaryTag::Outer, {0.0, 0.0}, radius, 0.0, right), 0.0, kPi, vr, vl);
  const std::size_t budget = static_cast<std::size_t>(20.0 * radius * radius / (h * h)) + 1000;
  return finish(detail::refine(b.pslg(), size, budget), 0);
}

double circumradius(Vec2 a, Vec2 b, Vec2 c) {
  const double la = norm(b - c), lb = norm(c - a), lc = norm(a - b);
  return la * lb * lc / (2.0 * std::abs(cross(b - a, c - a)));
}

namespace {

void measure_shapes(const Mesh& mesh, MeshQuality& q) {
  q.min_angle_deg = 180.0;
  q.max_angle_deg = 0.0;
  q.max_aspect = 0.0;
  q.total_area = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 p[3] = {mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
    for (int i = 0; i < 3; ++i) {
      const Vec2 u = p[(i + 1) % 3] - p[i];
      const Vec2 w = p[(i + 2) % 3] - p[i];
      const double ang = std::atan2(std::abs(cross(u, w)), dot(u, w)) * 180.0 / kPi;
      q.min_angle_deg = std::min(q.min_angle_deg, ang);
      q.max_angle_deg = std::max(q.max_angle_deg, ang);
    }
    const double area = mesh.area(static_cast<int>(t));
    q.total_area += area;
    const double la = norm(p[1] - p[2]), lb = norm(p[2] - p[0]), lc = norm(p[0] - p[1]);
    const double inradius = 2.0 * area / (la + lb + lc);
    q.max_aspect = std::max(q.max_aspect, circumradius(p[0], p[1], p[2]) / (2.0 * inradius));
  }
  q.min_angle_ok = q.min_angle_deg >= 20.0;

  // boundary loops: connected components of the boundary edge graph
  std::map<int, int> parent;
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : mesh.boundaryEdges) {
    parent.try_emplace(e.a, e.a);
    parent.try_emplace(e.b, e.b);
    parent[find(e.a)] = find(e.b);
  }
  int loops = 0;
  for (auto& [v, p] : parent)
    if (find(v) == v) ++loops;
  q.boundary_loops = loops;
}

}  // namespace

MeshQuality mesh_quality(const Mesh& mesh) {
  MeshQuality q;
  measure_shapes(mesh, q);
  return q;
}

MeshQuality mesh_quality(const Mesh& mesh, const NeckProfile& profile, double band) {
  MeshQuality q;
  measure_shapes(mesh, q);
  q.histogram_edges = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 1.0};
  q.neck_histogram.assign(q.histogram_edges.size(), 0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec2 g = mesh.centroid(static_cast<int>(t));
    if (std::abs(g.x) > band) continue;
    const double lo = profile.f2.value(std::abs(g.x));
    const double hi = profile.eps + profile.f1.value(std::abs(g.x));
    if (g.y < lo || g.y > hi) continue;
    const auto& tri = mesh.triangles[t];
    const double ratio =
        2.0 * circumradius(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]) / (hi - lo);
    q.max_neck_ratio = std::max(q.max_neck_ratio, ratio);
    std::size_t bin = q.histogram_edges.size() - 1;
    for (std::size_t i = 1; i < q.histogram_edges.size(); ++i)
      if (ratio < q.histogram_edges[i]) {
        bin = i - 1;
        break;
      }
    ++q.neck_histogram[bin];
  }
  return q;
}

int neck_crossing_count(const Mesh& mesh, const NeckProfile& profile, double xp) {
  const double lo = profile.f2.value(std::abs(xp));
  const double hi = profile.eps + profile.f1.value(std::abs(xp));
  const double tol = 1e-9 * (hi - lo);
  // the segment is cut into pieces at every point where a mesh edge meets it
  std::vector<double> cuts;
  for (const auto& tri : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = mesh.nodes[tri[i]], b = mesh.nodes[tri[(i + 1) % 3]];
      if ((a.x - xp) * (b.x - xp) > 0.0) continue;
      if (a.x == b.x) {
        if (a.x != xp) continue;
        cuts.push_back(a.y);
        cuts.push_back(b.y);
      } else {
        cuts.push_back(a.y + (xp - a.x) / (b.x - a.x) * (b.y - a.y));
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  int pieces = 1;
  double last = lo;
  for (double y : cuts) {
    if (y <= lo + tol || y >= hi - tol) continue;
    if (y - last > tol) {
      ++pieces;
      last = y;
    }
  }
  return pieces;
}

}  // namespace neckfield
