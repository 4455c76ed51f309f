#include "neckfield/theory.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace neckfield {
namespace {

void check_dimension(int n) {
  if (n < 2) throw std::invalid_argument("dimension must be at least 2");
}

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// |S^k|, the surface measure of the unit k-sphere (|S^0| = 2).
double sphere_measure(int k) {
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

// f'(|x'|) x_i / |x'|, the Cartesian derivative of a radial graph.
double radial_partial(const CurveSpec& f, double r, double xi) {
  if (r == 0.0) return 0.0;
  return f.d1(r) * xi / r;
}

}  // namespace

double rho_n(int n, double eps, double gamma) {
  check_dimension(n);
  const double s = eps + gamma;
  if (!(s > 0.0)) throw std::domain_error("eps + gamma must be positive");
  if (n == 2) return std::sqrt(s);
  if (n == 3) {
    if (s >= 1.0) throw std::domain_error("eps + gamma must be below 1 in three dimensions");
    return 1.0 / std::abs(std::log(s));
  }
  return 1.0;
}

double envelope(int n, double eps, double gamma, double xp) {
  const double rho = rho_n(n, eps, gamma);
  const double q = gamma + eps + xp * xp;
  if (n == 2) return 1.0 / std::sqrt(q);
  if (n == 3) return rho / q;
  return 1.0 / q;
}

RatePrediction predict_rate(int n, double eps, double gamma) {
  return {n, eps, gamma, rho_n(n, eps, gamma)};
}

double gamma0(const NeckProfile& profile, int n) {
  const double h = hessian_sup(profile, n);
  if (h == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 / ((n + 1) * h);
}

double gamma_tilde0(double sigma, double LambdaTilde, int n) {
  if (!(sigma > 0.0) || !(LambdaTilde > 0.0))
    throw std::invalid_argument("sigma and Lambda must be positive");
  check_dimension(n);
  return 1.0 / (LambdaTilde * sigma * (n + 1 + 2.0 * positive_part(sigma / 2.0 - 1.0)));
}

double barrier_gamma(double sigmaTilde, double LambdaTilde, int n) {
  if (!(sigmaTilde > 0.0) || !(LambdaTilde > 0.0))
    throw std::invalid_argument("sigma and Lambda must be positive");
  check_dimension(n);
  const double s = sigmaTilde, L = LambdaTilde;
  return 1.0 / (2.0 * L * s * (n + 1) + 4.0 * L * s * positive_part(s - 1.0));
}

AuxValue aux_w1(Vec2 x, const NeckProfile& profile, double gamma) {
  const double r = std::abs(x.x);
  const double sgn = x.x < 0.0 ? -1.0 : 1.0;
  const double f2 = profile.f2.value(r);
  const double d1 = sgn * profile.f1.d1(r);
  const double d2 = sgn * profile.f2.d1(r);
  const double den = gap_delta(profile, r) + 2.0 * gamma;
  const double num = x.y - f2 + gamma;
  AuxValue out;
  out.value = num / den;
  out.gradient.x = (-d2 * den - num * (d1 - d2)) / (den * den);
  out.gradient.y = 1.0 / den;
  return out;
}

void BarrierSpec::validate() const {
  if (!(sigmaTilde > 0.0)) throw std::invalid_argument("barrier exponent must be positive");
  if (!(lambdaTilde > 0.0) || lambdaTilde > LambdaTilde)
    throw std::invalid_argument("barrier bounds need 0 < lambda <= Lambda");
  if (epsTilde < 0.0) throw std::invalid_argument("scaled gap must be nonnegative");
  check_dimension(n);
}

double barrier_residual(const BarrierSpec& spec, double gamma, double xp) {
  spec.validate();
  const double s = spec.sigmaTilde, L = spec.LambdaTilde;
  const double r2 = xp * xp;
  const double e = spec.epsTilde / L + r2;
  if (e == 0.0) return 0.0;
  const double es = std::pow(e, s);
  // 2 L s e^(s-1) (2 s r^2 + (n-1) e), written to stay finite for s < 1
  const double flux = 2.0 * L * s * es * (2.0 * s * r2 / e + (spec.n - 1));
  return flux - es / gamma;
}

SubsolutionReport subsolution_check(int n, double eps, double gamma, Vec2 point) {
  check_dimension(n);
  constexpr double c1 = 1.0 / 500.0;
  constexpr double c2 = 1.0 / 3000.0;
  constexpr double kTol = 1e-9;
  const double yp = std::abs(point.x);
  const double yn = point.y;
  const double s = yn - 1.0 - eps / 2.0;
  const double radius = std::hypot(yp, yn);
  const double sphere = yp * yp + s * s;
  if (s < -kTol || radius > 6.0 + kTol || sphere < 1.0 - kTol)
    throw std::domain_error("point lies outside the comparison region");

  SubsolutionReport rep;
  rep.value = c1 * s * (sphere - 1.0) + c2 * gamma * s * s;
  rep.laplacian = c1 * s * (2 * n + 4) + 2.0 * c2 * gamma;
  rep.onOuterSphere = std::abs(radius - 6.0) <= kTol;
  rep.onPlane = std::abs(s) <= kTol && yp >= 1.0 - kTol;
  rep.onInclusion = std::abs(sphere - 1.0) <= kTol && s > -kTol;
  bool ok = rep.laplacian >= 0.0;
  if (rep.onOuterSphere) {
    rep.outerGap = yn - rep.value;
    ok = ok && rep.outerGap >= 0.0;
  }
  if (rep.onPlane) ok = ok && std::abs(rep.value) <= 1e-12;
  if (rep.onInclusion) {
    // normal into the inclusion: -(y', s) on the unit sphere
    const double dyp = 2.0 * c1 * s * yp;
    const double ds = c1 * (sphere - 1.0) + 2.0 * c1 * s * s + 2.0 * c2 * gamma * s;
    const double dnu = -(yp * dyp + s * ds) / std::sqrt(sphere);
    rep.robinResidual = rep.value + gamma * dnu;
    ok = ok && rep.robinResidual <= 1e-12;
  }
  rep.ok = ok;
  return rep;
}

std::vector<std::vector<double>> transform_coeffs(const NeckProfile& profile,
                                                  const std::vector<double>& x0p,
                                                  const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  if (n < 2 || x0p.size() != y.size() - 1)
    throw std::invalid_argument("coordinate sizes do not match");
  double r0sq = 0.0, dist2 = 0.0, r2 = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    r0sq += x0p[i] * x0p[i];
    dist2 += (y[i] - x0p[i]) * (y[i] - x0p[i]);
    r2 += y[i] * y[i];
  }
  const double eta0 = eta(profile, std::sqrt(r0sq));
  const double yn = y[n - 1];
  constexpr double kSlack = 1.0 + 1e-12;
  if (std::sqrt(dist2) > kSlack * 0.25 * std::sqrt(eta0) || std::abs(yn) > kSlack * eta0)
    throw std::domain_error("point outside the flattening window");

  const double r = std::sqrt(r2);
  const double delta = gap_delta(profile, r);
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  double tail = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    a[i][i] = delta / (2.0 * eta0);
    const double g1 = radial_partial(profile.f1, r, y[i]);
    const double g2 = radial_partial(profile.f2, r, y[i]);
    const double m = g2 * (yn - eta0) - g1 * (yn + eta0);
    a[i][n - 1] = a[n - 1][i] = m / (2.0 * eta0);
    tail += m * m;
  }
  a[n - 1][n - 1] = 2.0 * eta0 / delta + tail / (2.0 * eta0 * delta);
  return a;
}

double neck_integral(const NeckProfile& profile, double gamma, double radius, int n) {
  check_dimension(n);
  if (!(radius > 0.0) || radius > profile.R)
    throw std::invalid_argument("neck radius must lie in (0, R]");
  const auto integrand = [&](double r) {
    return std::pow(r, n - 2) / (gap_delta(profile, r) + 2.0 * gamma);
  };
  // split at the gap scale so the peak near the origin is resolved
  const double knee = std::min(radius, std::sqrt(profile.eps + 2.0 * gamma));
  double err = 0.0;
  double total = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, knee, 30, 1e-12, &err);
  if (knee < radius)
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, knee, radius, 30, 1e-12, &err);
  return sphere_measure(n - 2) * total;
}

bool BatteryReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

BatteryCheck make_check(std::string name, double measured, double limit, bool passed,
                        std::string detail) {
  return {std::move(name), passed, measured, limit, std::move(detail)};
}

NeckProfile unit_circles(double eps) {
  NeckProfile p;
  p.eps = eps;
  p.R = 0.25;
  return p;
}

BatteryCheck rho_monotone() {
  int bad = 0;
  for (int n : {2, 3}) {
    double prev = 0.0;
    for (int k = 1; k <= 400; ++k) {
      const double s = std::exp(-1.0) * k / 401.0;
      const double v = rho_n(n, 0.5 * s, 0.5 * s);
      if (v < prev) ++bad;
      prev = v;
    }
  }
  return make_check("rho_monotone", bad, 0, bad == 0, "rate scale nondecreasing in eps+gamma");
}

BatteryCheck aux_gradient(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double eps = std::pow(10.0, -1.0 - 4.0 * unit(rng));
    const double gamma = std::pow(10.0, -1.0 - 7.0 * unit(rng));
    const NeckProfile prof = unit_circles(eps);
    const double xp = (2.0 * unit(rng) - 1.0) * 0.9 * prof.R;
    const double lo = prof.f2.value(std::abs(xp));
    const double hi = eps + prof.f1.value(std::abs(xp));
    const Vec2 x{xp, lo + (hi - lo) * unit(rng)};
    const AuxValue w = aux_w1(x, prof, gamma);
    const double h = 1e-6 * std::max(std::abs(xp), 1e-3);
    const double hn = 1e-6 * (hi - lo);
    const double fdx = (aux_w1({x.x + h, x.y}, prof, gamma).value -
                        aux_w1({x.x - h, x.y}, prof, gamma).value) / (2.0 * h);
    const double fdn = (aux_w1({x.x, x.y + hn}, prof, gamma).value -
                        aux_w1({x.x, x.y - hn}, prof, gamma).value) / (2.0 * hn);
    const double scale = std::hypot(w.gradient.x, w.gradient.y);
    worst = std::max(worst, std::hypot(fdx - w.gradient.x, fdn - w.gradient.y) / scale);
  }
  return make_check("aux_gradient_fd", worst, 1e-6, worst <= 1e-6,
                    "max relative gap between analytic and central-difference gradient");
}

BatteryCheck aux_midplane() {
  double worst = 0.0;
  for (double eps : {1e-1, 1e-3, 1e-5})
    for (double gamma : {0.0, 1e-4, 1e-1})
      for (double xp : {-0.2, 0.0, 0.1}) {
        const NeckProfile prof = unit_circles(eps);
        const double r = std::abs(xp);
        const double mid = 0.5 * (prof.f1.value(r) + prof.f2.value(r) + eps);
        worst = std::max(worst, std::abs(aux_w1({xp, mid}, prof, gamma).value - 0.5));
      }
  return make_check("aux_midplane", worst, 1e-12, worst <= 1e-12, "value one half on the midplane");
}

BatteryCheck barrier_sign() {
  double worst = -std::numeric_limits<double>::infinity();
  int points = 0;
  for (double sigma : {0.5, 1.0, 2.0, 3.0})
    for (double Lambda : {0.5, 1.0, 2.0})
      for (int n : {2, 3, 4})
        for (double epsT : {0.0, 1e-3, 1e-1}) {
          const BarrierSpec spec{sigma, 0.5 * Lambda, Lambda, epsT, n};
          const double gmax = barrier_gamma(sigma, Lambda, n);
          for (double gamma : {gmax, 0.1 * gmax})
            for (int k = 0; k < 1000; ++k) {
              const double xp = k / 1000.0;
              const double e = epsT / Lambda + xp * xp;
              const double scale = e == 0.0 ? 1.0 : std::pow(e, sigma) / gamma;
              worst = std::max(worst, barrier_residual(spec, gamma, xp) / scale);
              ++points;
            }
        }
  // at gamma = gamma(s) with epsTilde = 0 the residual vanishes identically for
  // s >= 1, so rounding of order 1e-15 of the absorption term is tolerated
  return make_check("barrier_nonpositive", worst, 1e-12, worst <= 1e-12,
                    std::to_string(points) + " samples, max residual over absorption term");
}

BatteryCheck barrier_thresholds() {
  double worst = 0.0;
  for (double sigma : {0.5, 1.0, 2.0, 3.0, 4.0, 7.0})
    for (double Lambda : {0.5, 1.0, 3.0})
      for (int n : {2, 3, 5}) {
        const double a = gamma_tilde0(sigma, Lambda, n);
        const double b = barrier_gamma(sigma / 2.0, Lambda, n);
        worst = std::max(worst, std::abs(a - b) / b);
      }
  return make_check("threshold_identity", worst, 1e-14, worst <= 1e-14,
                    "reduced-equation threshold equals barrier threshold at half exponent");
}

BatteryCheck subsolution_samples() {
  int failures = 0, samples = 0;
  for (int n : {2, 3})
    for (double eps : {0.01, 0.1, 0.2})
      for (double gamma : {0.01, 0.1, 0.2}) {
        const double c = 1.0 + eps / 2.0;
        auto probe = [&](Vec2 p) {
          ++samples;
          if (!subsolution_check(n, eps, gamma, p).ok) ++failures;
        };
        for (int i = 0; i <= 60; ++i)
          for (int j = 0; j <= 60; ++j) {
            const Vec2 p{6.0 * i / 60.0, c + 5.0 * j / 60.0};
            const double s = p.y - c;
            if (std::hypot(p.x, p.y) < 6.0 && p.x * p.x + s * s > 1.0) probe(p);
          }
        for (int k = 0; k <= 1000; ++k) {
          const double th = 0.5 * std::numbers::pi * k / 1000.0;
          probe({std::cos(th), c + std::sin(th)});                  // inclusion sphere
          probe({1.0 + (std::sqrt(36.0 - c * c) - 1.0) * k / 1000.0, c});  // flat part
          const double top = std::asin(c / 6.0);
          const double phi = top + (0.5 * std::numbers::pi - top) * k / 1000.0;
          probe({6.0 * std::cos(phi), 6.0 * std::sin(phi)});        // outer sphere
        }
      }
  return make_check("subsolution_conditions", failures, 0, failures == 0,
                    std::to_string(samples) + " samples across region and boundary pieces");
}

BatteryCheck transform_ellipticity() {
  std::vector<double> constants;
  double offWorst = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const NeckProfile prof = unit_circles(eps);
    double c = 1.0;
    for (double x0 : {0.0, 0.02, 0.05, 0.1}) {
      const double e0 = eta(prof, x0);
      const double w = 0.25 * std::sqrt(e0);
      for (int i = -4; i <= 4; ++i)
        for (int j = -4; j <= 4; ++j) {
          const std::vector<double> y{x0 + w * i / 4.0, e0 * j / 4.0};
          const auto a = transform_coeffs(prof, {x0}, y);
          for (int d = 0; d < 2; ++d) c = std::max({c, a[d][d], 1.0 / a[d][d]});
          offWorst = std::max(offWorst, std::abs(a[0][1]) / std::sqrt(e0));
        }
    }
    constants.push_back(c);
  }
  // stable: the measured constant settles as eps shrinks
  const double hi = *std::max_element(constants.begin(), constants.end());
  const double settle =
      std::abs(constants.back() - constants[constants.size() - 2]) / constants.back();
  const bool ok = hi <= 10.0 && settle <= 1e-2 && offWorst <= hi;
  return make_check("transform_ellipticity", hi, 10.0, ok,
                    "diagonal bound over eps 1e-2..1e-6, last relative change " +
                        std::to_string(settle));
}

BatteryCheck neck_oracle() {
  NeckProfile prof;
  prof.eps = 0.01;
  prof.f1 = CurveSpec::even_polynomial({0.5});
  prof.f2 = CurveSpec::even_polynomial({-0.5});
  prof.R = 0.25;
  const double got = neck_integral(prof, 0.0, 0.25, 2);
  const double want = 20.0 * std::atan(2.5);
  const double rel = std::abs(got - want) / want;
  return make_check("neck_integral_closed_form", rel, 1e-8, rel <= 1e-8,
                    "parabolic gap against the arctangent formula");
}

}  // namespace

BatteryReport run_theory_battery(bool timed) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  BatteryReport rep;
  rep.checks.push_back(rho_monotone());
  rep.checks.push_back(aux_gradient(rng));
  rep.checks.push_back(aux_midplane());
  rep.checks.push_back(barrier_sign());
  rep.checks.push_back(barrier_thresholds());
  rep.checks.push_back(subsolution_samples());
  rep.checks.push_back(transform_ellipticity());
  rep.checks.push_back(neck_oracle());
  if (timed)
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

void write_battery_json(std::ostream& out, const BatteryReport& report) {
  nlohmann::ordered_json doc;
  doc["passed"] = report.passed();
  doc["seconds"] = report.seconds;
  auto& list = doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks)
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"measured", c.measured},
                    {"limit", c.limit},
                    {"detail", c.detail}});
  out << doc.dump(2) << '\n';
}

}  // namespace neckfield
