#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "neckfield/errors.hpp"
#include "neckfield/geometry.hpp"

using namespace neckfield;

namespace {

NeckProfile circles(double eps, double R = 0.25) {
  NeckProfile p;
  p.eps = eps;
  p.R = R;
  p.kappa = NeckProfile::derive_kappa(p.f1, p.f2, R);
  return p;
}

NeckProfile parabolas(double eps) {
  NeckProfile p;
  p.eps = eps;
  p.f1 = CurveSpec::even_polynomial({0.5});
  p.f2 = CurveSpec::even_polynomial({-0.5});
  p.R = 0.25;
  p.kappa = 0.5;
  return p;
}

// 1 - sqrt(1 - x^2) without cancellation
double sag(double x) { return x * x / (1.0 + std::sqrt(1.0 - x * x)); }

}  // namespace

TEST_CASE("gap at the contact point equals eps") {
  for (double eps : {1e-1, 1e-4, 1e-7}) CHECK(gap_delta(circles(eps), 0.0) == eps);
}

TEST_CASE("gap between unit circles at x' = 0.1") {
  const double got = gap_delta(circles(0.01), 0.1);
  CHECK(got == doctest::Approx(0.01 + 2.0 * sag(0.1)).epsilon(1e-14));
  CHECK(got == doctest::Approx(0.0200251).epsilon(1e-6));
}

TEST_CASE("gap scales linearly with the profile") {
  const NeckProfile base = parabolas(0.02);
  NeckProfile scaled = base;
  const double t = 3.0;
  scaled.f1 = base.f1.scaled(t);
  scaled.f2 = base.f2.scaled(t);
  scaled.eps = t * base.eps;
  for (double xp : {0.0, 0.05, -0.2, 0.4})
    CHECK(gap_delta(scaled, xp) == doctest::Approx(t * gap_delta(base, xp)).epsilon(1e-14));
}

TEST_CASE("gap rejects offsets beyond 2R") {
  CHECK_THROWS_AS(gap_delta(circles(0.01), 0.51), std::domain_error);
  CHECK_NOTHROW(gap_delta(circles(0.01), 0.5));
}

TEST_CASE("eta is eps plus |x'|^2") {
  CHECK(eta(circles(0.01), 0.0) == 0.01);
  NeckProfile p = circles(0.01);
  p.eps = 0.0;
  CHECK(eta(p, 0.2) == doctest::Approx(0.04).epsilon(1e-15));
}

TEST_CASE("eta and gap are comparable on unit circles") {
  double lo = 1e300, hi = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-4, 1e-6})
    for (int i = 0; i <= 1000; ++i) {
      const double xp = 0.25 * i / 1000.0;
      const NeckProfile p = circles(eps);
      const double r = eta(p, xp) / gap_delta(p, xp);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  CHECK(lo >= 0.5);
  CHECK(hi <= 1.01);
}

TEST_CASE("Hessian bound for parabolas is exactly 2") {
  CHECK(hessian_sup(parabolas(0.01)) == 2.0);
  CHECK(hessian_sup(parabolas(0.01), 3) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("Hessian bound for unit circles with R = 1/2") {
  const double want = 2.0 / std::pow(0.75, 1.5);
  CHECK(hessian_sup(circles(0.01, 0.5)) == doctest::Approx(want).epsilon(1e-12));
  CHECK(want == doctest::Approx(3.0792).epsilon(1e-4));
}

TEST_CASE("Hessian bound is linear in the profile and symmetric under swapping") {
  const NeckProfile p = circles(0.01);
  NeckProfile doubled = p;
  doubled.f1 = p.f1.scaled(2.0);
  doubled.f2 = p.f2.scaled(2.0);
  CHECK(hessian_sup(doubled) == doctest::Approx(2.0 * hessian_sup(p)).epsilon(1e-14));

  NeckProfile swapped = p;
  swapped.f1 = p.f2.negated();
  swapped.f2 = p.f1.negated();
  CHECK(hessian_sup(swapped) == hessian_sup(p));
}

TEST_CASE("gap stays positive for valid profiles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    NeckProfile p;
    p.eps = std::pow(10.0, -7.0 * u(rng));
    p.f1 = CurveSpec::circle(0.5 + 2.0 * u(rng), +1);
    p.f2 = CurveSpec::circle(0.5 + 2.0 * u(rng), -1);
    p.R = 0.2;
    p.kappa = NeckProfile::derive_kappa(p.f1, p.f2, p.R);
    REQUIRE_NOTHROW(p.validate());
    for (int i = -20; i <= 20; ++i) CHECK(gap_delta(p, 2.0 * p.R * i / 20.0) > 0.0);
  }
}

TEST_CASE("profile validation catches a flat gap and a short arc") {
  NeckProfile flat = parabolas(0.01);
  flat.f1 = CurveSpec::even_polynomial({0.0});
  flat.f2 = CurveSpec::even_polynomial({0.0});
  CHECK_THROWS_AS(flat.validate(), std::invalid_argument);
  CHECK_THROWS_AS(circles(0.01, 0.5).validate(), UnsupportedProfile);
}

TEST_CASE("symmetric domain mirrors inclusion 1 onto inclusion 2") {
  for (double eps : {0.1, 1e-3, 1e-6}) {
    const DomainSpec d = symmetric_domain(eps);
    REQUIRE(d.inclusions.size() == 2);
    const Vec2 c = reflect_midplane(d.inclusions[0].center, eps);
    CHECK(c.x == d.inclusions[1].center.x);
    CHECK(c.y == doctest::Approx(d.inclusions[1].center.y).epsilon(1e-15));
    CHECK(d.inclusions[0].radius == d.inclusions[1].radius);
    CHECK(d.outer.radius == 6.0);
    CHECK(d.outer.center.y == doctest::Approx(eps / 2.0));
    CHECK(d.eps() == doctest::Approx(eps).epsilon(1e-9));
  }
}

TEST_CASE("domain validation") {
  DomainSpec d = symmetric_domain(0.01);
  d.inclusions.pop_back();
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK_THROWS_AS(pair_domain(0.01, 1.0, 1.0, 2.5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(symmetric_domain(0.01, DomainMode::Axisymmetric, 2).validate(),
                  std::invalid_argument);
  CHECK(symmetric_domain(0.01, DomainMode::Axisymmetric, 3).weight_exponent() == 1);
}

TEST_CASE("odd boundary data vanishes on the midplane") {
  const BoundaryData b = odd_boundary_data(0.02);
  CHECK(b.phi({3.0, 0.01}) == 0.0);
  CHECK(b.phi({0.0, 1.01}) == doctest::Approx(1.0));
  CHECK(b.free_constants());
}
