#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "neckfield/geometry.hpp"
#include "neckfield/theory.hpp"

using namespace neckfield;

namespace {

NeckProfile parabolas(double eps, double scale = 1.0) {
  NeckProfile p;
  p.eps = eps;
  p.f1 = CurveSpec::even_polynomial({0.5 * scale});
  p.f2 = CurveSpec::even_polynomial({-0.5 * scale});
  p.R = 0.25;
  p.kappa = 0.5 * scale;
  return p;
}

NeckProfile circles(double eps, double R = 0.25) {
  NeckProfile p;
  p.eps = eps;
  p.R = R;
  p.kappa = NeckProfile::derive_kappa(p.f1, p.f2, R);
  return p;
}

// flattening map (x', x_n) -> (x', eta0 (2 x_n - eps - f1 - f2) / delta)
double flatten(const NeckProfile& p, double eta0, double xp, double xn) {
  const double r = std::abs(xp);
  return eta0 * (2.0 * xn - p.eps - p.f1.value(r) - p.f2.value(r)) / gap_delta(p, r);
}

}  // namespace

TEST_CASE("blow-up scale examples") {
  CHECK(rho_n(2, 0.01, 0.03) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(rho_n(4, 0.01, 0.03) == 1.0);
  CHECK(rho_n(5, 1e-6, 1e-8) == 1.0);
  CHECK(rho_n(3, 0.01, 0.03) == doctest::Approx(1.0 / std::abs(std::log(0.04))).epsilon(1e-14));
  CHECK(rho_n(3, 0.01, 0.03) == doctest::Approx(0.31067).epsilon(1e-5));
  CHECK_THROWS_AS(rho_n(3, 0.6, 0.5), std::domain_error);
  CHECK_THROWS_AS(rho_n(2, 0.0, 0.0), std::domain_error);
}

TEST_CASE("blow-up scale is monotone below 1/e") {
  for (int n : {2, 3}) {
    double previous = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double s = std::exp(-1.0) * std::pow(10.0, -8.0 * (200 - k) / 200.0);
      const double r = rho_n(n, 0.5 * s, 0.5 * s);
      CHECK(r >= previous);
      previous = r;
    }
  }
}

TEST_CASE("pointwise envelope") {
  CHECK(envelope(2, 0.01, 0.03, 0.0) == doctest::Approx(1.0 / 0.2).epsilon(1e-14));
  CHECK(envelope(4, 1e-2, 1e-2, 0.0) == doctest::Approx(50.0).epsilon(1e-14));
  for (int n : {2, 3, 4}) {
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 50; ++k) {
      const double e = envelope(n, 1e-3, 1e-4, 0.01 * k);
      CHECK(e <= previous);
      previous = e;
    }
  }
  const RatePrediction r = predict_rate(2, 1e-2, 1e-3);
  CHECK(r.rho == rho_n(2, 1e-2, 1e-3));
  CHECK(r.envelope(0.1) == envelope(2, 1e-2, 1e-3, 0.1));
}

TEST_CASE("Robin thresholds") {
  CHECK(gamma0(parabolas(0.01), 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(gamma0(circles(0.01, 0.5), 2) == doctest::Approx(2.0 / (3.0 * 3.0792)).epsilon(1e-4));
  CHECK(gamma0(circles(0.01, 0.5), 2) == doctest::Approx(0.2165).epsilon(1e-3));
  CHECK(gamma0(parabolas(0.01, 2.0), 2) == doctest::Approx(gamma0(parabolas(0.01), 2) / 2.0));
  NeckProfile flat = parabolas(0.01, 0.0);
  CHECK(std::isinf(gamma0(flat, 2)));
}

TEST_CASE("reduced-equation thresholds") {
  CHECK(gamma_tilde0(2.0, 1.0, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(gamma_tilde0(4.0, 1.0, 3) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
  CHECK(gamma_tilde0(3.0, 2.0, 2) == doctest::Approx(gamma_tilde0(3.0, 1.0, 2) / 2.0).epsilon(1e-15));
  for (double sigma : {0.5, 1.0, 2.0, 3.0, 6.0})
    for (int n : {2, 3, 5})
      CHECK(gamma_tilde0(sigma, 1.7, n) ==
            doctest::Approx(barrier_gamma(sigma / 2.0, 1.7, n)).epsilon(1e-14));
}

TEST_CASE("auxiliary linear profile") {
  const NeckProfile p = circles(0.02);
  for (double xp : {0.0, 0.1, -0.2}) {
    const double r = std::abs(xp);
    const double mid = 0.5 * (p.f1.value(r) + p.f2.value(r) + p.eps);
    CHECK(aux_w1({xp, mid}, p, 0.01).value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(aux_w1({xp, p.f2.value(r)}, p, 0.0).value == doctest::Approx(0.0));
    CHECK(aux_w1({xp, mid}, p, 0.01).gradient.y ==
          doctest::Approx(1.0 / (gap_delta(p, xp) + 0.02)).epsilon(1e-14));
  }
}

TEST_CASE("auxiliary gradient matches central differences") {
  const NeckProfile p = circles(0.01);
  const double gamma = 1e-3, h = 1e-6;
  for (int i = 0; i < 25; ++i) {
    const double xp = -0.24 + 0.02 * i;
    const double r = std::abs(xp);
    for (double t : {0.1, 0.5, 0.9}) {
      const double xn = p.f2.value(r) + t * gap_delta(p, xp);
      const AuxValue a = aux_w1({xp, xn}, p, gamma);
      const double dx = (aux_w1({xp + h, xn}, p, gamma).value - aux_w1({xp - h, xn}, p, gamma).value) / (2 * h);
      const double dn = (aux_w1({xp, xn + h}, p, gamma).value - aux_w1({xp, xn - h}, p, gamma).value) / (2 * h);
      const double scale = std::max(1.0, std::abs(a.gradient.y));
      CHECK(std::abs(a.gradient.x - dx) <= 1e-6 * scale);
      CHECK(std::abs(a.gradient.y - dn) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("barrier residual against nested finite differences") {
  const BarrierSpec spec{1.0, 1.0, 1.0, 0.0, 2};
  const double gamma = barrier_gamma(1.0, 1.0, 2);
  CHECK(gamma == doctest::Approx(1.0 / 6.0));
  // (d/dx)((eps + L x^2) (d/dx) eta^s) - eta^s / gamma with eta = eps/L + x^2
  auto power = [&](double x) { return std::pow(spec.epsTilde / spec.LambdaTilde + x * x, spec.sigmaTilde); };
  auto flux = [&](double x, double h) {
    return (spec.epsTilde + spec.LambdaTilde * x * x) * (power(x + h) - power(x - h)) / (2 * h);
  };
  for (double xp : {0.5, 0.2, 0.9}) {
    const double h = 1e-4;
    const double fd = (flux(xp + h, h) - flux(xp - h, h)) / (2 * h) - power(xp) / gamma;
    CHECK(std::abs(barrier_residual(spec, gamma, xp) - fd) <= 1e-6);
    CHECK(barrier_residual(spec, gamma, xp) <= 1e-12);
  }
  CHECK(barrier_residual(spec, 1e-300, 0.5) < -1e290);
}

TEST_CASE("subsolution conditions") {
  // s = 0.5, n = 2, gamma = 0.1: Laplacian (1/500)(0.5)(8) + 2 (0.1) / 3000
  const SubsolutionReport r = subsolution_check(2, 0.1, 0.1, {2.0, 1.5 + 0.05});
  CHECK(r.laplacian == doctest::Approx(0.008 + 0.2 / 3000.0).epsilon(1e-12));
  CHECK(r.laplacian == doctest::Approx(0.008067).epsilon(1e-4));
  CHECK(r.ok);

  for (double yp : {1.0, 2.5, 5.8})
    CHECK(subsolution_check(2, 0.25, 0.1, {yp, 1.125}).value == 0.0);

  // points on the upper half of the inclusion
  for (int k = 0; k < 10000; ++k) {
    const double t = 0.5 * std::numbers::pi * k / 9999.0;
    const SubsolutionReport s = subsolution_check(2, 0.1, 0.1, {std::sin(t), 1.05 + std::cos(t)});
    CHECK(s.onInclusion);
    CHECK(s.robinResidual <= 1e-12);
  }

  CHECK_THROWS_AS(subsolution_check(2, 0.1, 0.1, {0.0, 1.05}), std::domain_error);
  CHECK_THROWS_AS(subsolution_check(2, 0.1, 0.1, {2.0, 0.5}), std::domain_error);
  CHECK_THROWS_AS(subsolution_check(2, 0.1, 0.1, {7.0, 1.5}), std::domain_error);
}

TEST_CASE("flattened coefficients") {
  const NeckProfile p = circles(0.01);
  const auto a0 = transform_coeffs(p, {0.0}, {0.0, 0.0});
  CHECK(a0[0][0] == doctest::Approx(0.5).epsilon(1e-14));
  for (double yn : {-0.01, 0.0, 0.005}) {
    const auto a = transform_coeffs(p, {0.0}, {0.0, yn});
    CHECK(a[0][1] == 0.0);
    CHECK(a[1][0] == 0.0);
  }
  const NeckProfile q = circles(1e-3);
  const auto b = transform_coeffs(q, {0.1, 0.05}, {0.105, 0.05, 0.004});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(b[i][j] == b[j][i]);

  CHECK_THROWS_AS(transform_coeffs(p, {0.0}, {0.1, 0.0}), std::domain_error);
  CHECK_THROWS_AS(transform_coeffs(p, {0.0}, {0.0, 0.02}), std::domain_error);
  CHECK_THROWS_AS(transform_coeffs(p, {0.0, 0.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("flattened coefficients are the pushforward of the identity") {
  // a = J J^T / det J for the flattening map, Jacobian by central differences
  const NeckProfile p = circles(0.01);
  const double h = 1e-7;
  for (double x0 : {0.0, 0.1, 0.2}) {
    const double eta0 = eta(p, x0);
    for (double u : {-0.2, 0.0, 0.25})
      for (double v : {-0.9, 0.0, 0.6}) {
        const double yp = x0 + u * std::sqrt(eta0), yn = v * eta0;
        const double r = std::abs(yp);
        const double xn = 0.5 * (yn * gap_delta(p, yp) / eta0 + p.eps + p.f1.value(r) + p.f2.value(r));
        const double j10 = (flatten(p, eta0, yp + h, xn) - flatten(p, eta0, yp - h, xn)) / (2 * h);
        const double j11 = (flatten(p, eta0, yp, xn + h) - flatten(p, eta0, yp, xn - h)) / (2 * h);
        const auto a = transform_coeffs(p, {x0}, {yp, yn});
        CHECK(a[0][0] == doctest::Approx(1.0 / j11).epsilon(1e-6));
        CHECK(a[0][1] == doctest::Approx(j10 / j11).epsilon(1e-5).scale(1e-3));
        CHECK(a[1][1] == doctest::Approx((j10 * j10 + j11 * j11) / j11).epsilon(1e-6));
      }
  }
}

TEST_CASE("neck integral") {
  const NeckProfile p = parabolas(0.01);
  CHECK(neck_integral(p, 0.0, 0.25) == doctest::Approx(20.0 * std::atan(2.5)).epsilon(1e-10));
  CHECK(neck_integral(p, 0.0, 0.25) == doctest::Approx(23.81).epsilon(1e-3));
  const double g = 0.02, s = std::sqrt(0.01 + 2 * g);
  CHECK(neck_integral(p, g, 0.1) == doctest::Approx(2.0 / s * std::atan(0.1 / s)).epsilon(1e-10));
  CHECK(neck_integral(p, 1e12, 0.25) < 1e-12);
  CHECK_THROWS_AS(neck_integral(p, 0.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(neck_integral(p, 0.0, 0.0), std::invalid_argument);

  double lo = 1e300, hi = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5})
    for (double gamma : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const double v = neck_integral(circles(eps), gamma, 0.25) * rho_n(2, eps, gamma);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  CHECK(hi / lo <= 2.0);
}

TEST_CASE("property battery passes quickly and reports JSON") {
  const BatteryReport rep = run_theory_battery();
  for (const auto& c : rep.checks) CHECK_MESSAGE(c.passed, c.name, " measured ", c.measured);
  CHECK(rep.passed());
  CHECK(rep.checks.size() == 8);
  CHECK(rep.seconds <= 30.0);

  std::ostringstream out;
  write_battery_json(out, rep);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j.contains("checks"));
  CHECK(j["checks"].size() == rep.checks.size());
}
