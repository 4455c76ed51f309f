#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "neckfield/errors.hpp"
#include "neckfield/meshgen.hpp"

using namespace neckfield;

namespace {

struct Built {
  DomainSpec domain;
  NeckProfile profile;
  Mesh mesh;
};

Built symmetric(double eps, double theta = 0.25, DomainMode mode = DomainMode::Planar) {
  Built b;
  b.domain = symmetric_domain(eps, mode, mode == DomainMode::Planar ? 2 : 3);
  b.profile = profile_from_domain(b.domain, 0.25);
  GradingPolicy policy;
  policy.theta = theta;
  b.mesh = build_mesh(b.domain, b.profile, policy);
  return b;
}

const Built& shared_mesh() {
  static const Built b = symmetric(1e-2);
  return b;
}

Mesh single_triangle(Vec2 a, Vec2 b, Vec2 c) {
  Mesh m;
  m.nodes = {a, b, c};
  m.triangles = {{0, 1, 2}};
  m.boundaryEdges = {{0, 1, BoundaryTag::Outer}, {1, 2, BoundaryTag::Outer}, {2, 0, BoundaryTag::Outer}};
  return m;
}

}  // namespace

TEST_CASE("neck is resolved by several elements at the contact point") {
  const Built& b = shared_mesh();
  CHECK(neck_crossing_count(b.mesh, b.profile, 0.0) >= 4);
}

TEST_CASE("a single inclusion is rejected") {
  DomainSpec d = symmetric_domain(1e-2);
  const NeckProfile p = profile_from_domain(d, 0.25);
  d.inclusions.pop_back();
  CHECK_THROWS_AS(build_mesh(d, p, GradingPolicy{}), std::invalid_argument);
}

TEST_CASE("doubling theta roughly halves the elements across the neck") {
  // averaged over the band: a single probe on the symmetry axis runs along edges
  for (double eps : {1e-2, 1e-3}) {
    const Built fine = symmetric(eps, 0.125);
    const Built coarse = symmetric(eps, 0.25);
    double nf = 0.0, nc = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double xp = 0.25 * i / 20.0;
      nf += neck_crossing_count(fine.mesh, fine.profile, xp);
      nc += neck_crossing_count(coarse.mesh, coarse.profile, xp);
    }
    CHECK(nf / nc >= 2.0 / 1.5);
    CHECK(nf / nc <= 2.0 * 1.5);
  }
}

TEST_CASE("quality of elementary triangles") {
  const double h = std::sqrt(3.0) / 2.0;
  CHECK(mesh_quality(single_triangle({0, 0}, {1, 0}, {0.5, h})).min_angle_deg ==
        doctest::Approx(60.0));
  Mesh square;
  square.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  square.triangles = {{0, 1, 2}, {0, 2, 3}};
  const MeshQuality q = mesh_quality(square);
  CHECK(q.min_angle_deg == doctest::Approx(45.0));
  CHECK(q.max_angle_deg == doctest::Approx(90.0));
  CHECK(q.total_area == doctest::Approx(1.0));
}

TEST_CASE("generated meshes satisfy the mesh invariants") {
  for (const Built* bp : {&shared_mesh()}) {
    const Mesh& m = bp->mesh;
    const MeshQuality q = mesh_quality(m, bp->profile, 2.0 * bp->profile.R);
    CHECK(q.min_angle_deg >= 20.0);
    CHECK(q.min_angle_ok);
    CHECK(q.boundary_loops == 3);
    CHECK(q.max_neck_ratio <= 0.25 * (1.0 + 1e-9));
    CHECK(std::abs(q.total_area - domain_area(bp->domain)) <= 1e-3 * domain_area(bp->domain));

    // orientation
    for (std::size_t t = 0; t < m.triangles.size(); ++t) CHECK_MESSAGE(m.area(int(t)) > 0.0, t);

    // conformity: interior edges twice, boundary edges once
    std::map<std::pair<int, int>, int> count;
    for (const auto& tri : m.triangles)
      for (int k = 0; k < 3; ++k) {
        const int a = tri[k], c = tri[(k + 1) % 3];
        ++count[{std::min(a, c), std::max(a, c)}];
      }
    std::set<std::pair<int, int>> boundary;
    for (const auto& e : m.boundaryEdges) boundary.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
    int bad = 0;
    for (const auto& [edge, n] : count) bad += n != (boundary.count(edge) ? 1 : 2);
    CHECK(bad == 0);
    CHECK(boundary.size() == m.boundaryEdges.size());

    // Euler characteristic of a disk with two holes
    const long v = long(m.nodes.size()), e = long(count.size()), f = long(m.triangles.size());
    CHECK(v - e + f == -1);

    // boundary nodes on their circles
    const Circle* circle[3] = {&bp->domain.outer, &bp->domain.inclusions[0], &bp->domain.inclusions[1]};
    double worst = 0.0;
    for (const auto& edge : m.boundaryEdges) {
      const Circle& c = *circle[int(edge.tag)];
      for (int v2 : {edge.a, edge.b})
        worst = std::max(worst, std::abs(norm(m.nodes[v2] - c.center) - c.radius) / c.radius);
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("axisymmetric meshes cover the meridian half with an axis tag") {
  const Built b = symmetric(1e-2, 0.25, DomainMode::Axisymmetric);
  CHECK(b.mesh.axisWeightExponent == 1);
  const MeshQuality q = mesh_quality(b.mesh);
  CHECK(q.boundary_loops == 1);
  CHECK(q.min_angle_deg >= 20.0);
  CHECK(!b.mesh.boundary_nodes(BoundaryTag::Axis).empty());
  for (const auto& p : b.mesh.nodes) CHECK(p.x >= 0.0);
  CHECK(std::abs(q.total_area - domain_area(b.domain)) <= 1e-3 * domain_area(b.domain));
}

TEST_CASE("refining the boundary moves the area toward the exact value") {
  const DomainSpec d = symmetric_domain(0.05);
  const NeckProfile p = profile_from_domain(d, 0.25);
  const double exact = std::numbers::pi * (36.0 - 2.0);
  CHECK(domain_area(d) == doctest::Approx(exact));
  double previous = 0.0;
  for (double h : {0.8, 0.4, 0.2, 0.1}) {
    GradingPolicy policy;
    policy.h_max = h;
    const double area = mesh_quality(build_mesh(d, p, policy)).total_area;
    CHECK(area < exact);
    CHECK(area > previous);
    previous = area;
  }
  CHECK(std::abs(previous - exact) <= 1e-4 * exact);
}

TEST_CASE("mesh export round-trips bit-exactly") {
  const Mesh& m = shared_mesh().mesh;
  std::stringstream first;
  write_mesh(first, m);
  CHECK(first.str().rfind("nodes " + std::to_string(m.nodes.size()) + " elements ", 0) == 0);
  const Mesh back = read_mesh(first);
  std::stringstream second;
  write_mesh(second, back);
  CHECK(first.str() == second.str());
  REQUIRE(back.nodes.size() == m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    CHECK(back.nodes[i].x == m.nodes[i].x);
    CHECK(back.nodes[i].y == m.nodes[i].y);
  }
}

TEST_CASE("mesh generation is deterministic") {
  const Built again = symmetric(1e-2);
  std::stringstream a, b;
  write_mesh(a, shared_mesh().mesh);
  write_mesh(b, again.mesh);
  CHECK(a.str() == b.str());
}

TEST_CASE("element guard refuses oversized meshes") {
  const DomainSpec d = symmetric_domain(1e-3);
  const NeckProfile p = profile_from_domain(d, 0.25);
  GradingPolicy policy;
  policy.max_elements = 1000;
  try {
    build_mesh(d, p, policy);
    FAIL("expected a refusal");
  } catch (const MeshRefusal& e) {
    CHECK(e.estimated_elements() > 1000);
  }
}

TEST_CASE("grading policy validation") {
  GradingPolicy p;
  p.theta = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.theta = 0.6;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.theta = 0.5;
  p.h_max = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("half-disk mesh") {
  const Mesh m = build_halfdisk_mesh(1.0, 0.05);
  const MeshQuality q = mesh_quality(m);
  CHECK(q.min_angle_deg >= 20.0);
  CHECK(q.total_area == doctest::Approx(std::numbers::pi / 2.0).epsilon(2e-3));
  for (int v : m.boundary_nodes(BoundaryTag::Flat)) CHECK(m.nodes[v].y == 0.0);
  for (int v : m.boundary_nodes(BoundaryTag::Outer))
    CHECK(norm(m.nodes[v]) == doctest::Approx(1.0).epsilon(1e-12));
}
