#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "neckfield/geometry.hpp"

namespace neckfield {

/// Blow-up scale: sqrt(eps + gamma) for n = 2, 1/|ln(eps + gamma)| for n = 3,
/// 1 for n >= 4. Throws std::domain_error when eps + gamma <= 0, or when
/// eps + gamma >= 1 for n = 3.
double rho_n(int n, double eps, double gamma);

/// Unit-constant pointwise bound shape at horizontal offset xp.
double envelope(int n, double eps, double gamma, double xp);

struct RatePrediction {
  int n = 2;
  double eps = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
  double envelope(double xp) const { return neckfield::envelope(n, eps, gamma, xp); }
};
RatePrediction predict_rate(int n, double eps, double gamma);

/// Robin threshold 2 / ((n+1) sup|D^2(f1 - f2)|); +infinity for a flat gap.
double gamma0(const NeckProfile& profile, int n);
/// Threshold of the degenerate reduced equation, 1 / (Lambda sigma (n + 1 + 2 (sigma/2 - 1)_+)).
double gamma_tilde0(double sigma, double LambdaTilde, int n);
/// Barrier threshold 1 / (2 Lambda s (n+1) + 4 Lambda s (s-1)_+).
double barrier_gamma(double sigmaTilde, double LambdaTilde, int n);

struct AuxValue {
  double value = 0.0;
  Vec2 gradient;  // (d/dx', d/dx_n)
};

/// Linear-in-x_n profile (x_n - f2 + gamma) / (delta + 2 gamma) across the gap.
AuxValue aux_w1(Vec2 x, const NeckProfile& profile, double gamma);

struct BarrierSpec {
  double sigmaTilde = 1.0;
  double lambdaTilde = 1.0;
  double LambdaTilde = 1.0;
  double epsTilde = 0.0;
  int n = 2;

  void validate() const;  // lambda <= Lambda, sigma > 0
};

/// L(eta^s) = sum_i d_i((epsTilde + t) d_i eta^s) - eta^s / gamma for the model
/// t = Lambda |x'|^2 and eta = epsTilde/Lambda + |x'|^2, evaluated at |x'| = xp.
double barrier_residual(const BarrierSpec& spec, double gamma, double xp);

struct SubsolutionReport {
  double value = 0.0;
  double laplacian = 0.0;
  bool onOuterSphere = false;     // |y| = 6
  bool onPlane = false;           // s = 0 outside the inclusion
  bool onInclusion = false;       // unit sphere about (0', 1 + eps/2)
  double outerGap = 0.0;          // y_n - value on the outer sphere (must be >= 0)
  double robinResidual = 0.0;     // value + gamma d_nu value on the inclusion (must be <= 0)
  bool ok = false;
};

/// Checks the comparison function c1 s (|y'|^2 + s^2 - 1) + c2 gamma s^2,
/// s = y_n - 1 - eps/2, at point (|y'|, y_n) of the closed region above the
/// plane s = 0, inside radius 6 and outside the unit inclusion. Throws
/// std::domain_error for points outside that closed region.
SubsolutionReport subsolution_check(int n, double eps, double gamma, Vec2 point);

/// Coefficients of the flattened operator at y = (y', y_n) around the base
/// point x0'. Returns an n x n symmetric matrix. Throws std::domain_error
/// outside |y' - x0'| <= sqrt(eta(x0'))/4, |y_n| <= eta(x0').
std::vector<std::vector<double>> transform_coeffs(const NeckProfile& profile,
                                                  const std::vector<double>& x0p,
                                                  const std::vector<double>& y);

/// Integral over |x'| <= radius in R^(n-1) of 1/(delta + 2 gamma), relative
/// accuracy 1e-8 or better.
double neck_integral(const NeckProfile& profile, double gamma, double radius, int n = 2);

struct BatteryCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct BatteryReport {
  std::vector<BatteryCheck> checks;
  double seconds = 0.0;
  bool passed() const;
};

/// Property suite over the analytic objects (deterministic sampling).
BatteryReport run_theory_battery(bool timed = true);
void write_battery_json(std::ostream& out, const BatteryReport& report);

}  // namespace neckfield
