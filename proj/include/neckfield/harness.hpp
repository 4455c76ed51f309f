#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "neckfield/decomposition.hpp"
#include "neckfield/fem.hpp"
#include "neckfield/geometry.hpp"
#include "neckfield/meshgen.hpp"

namespace neckfield {

enum class ScenarioKind { Sweep, GammaLimit, Halfball, TheoryBattery };

/// Thresholds checked in --assert mode. NaN disables a check.
struct AssertSpec {
  static constexpr double off = std::numeric_limits<double>::quiet_NaN();
  double slopeMin = off, slopeMax = off;
  double bandMax = off;               // compensated band of fit.y against fit.x
  double variationMax = off;          // (max - min) / min of fit.y
  double recombinationMax = off;
  bool fluxSigns = false;
  double rowSumMin = off, rowSumMax = off;
  double a11BandMax = off;            // band of a11 * rho_n
  double neckOffsetMax = off;         // |a11 - neck integral over |x'| <= R/2|
  double lowerBoundMin = off;         // |b1 - b2| and |K1 - K2| / rho_n
  double finalRelativeMax = off;      // gamma-limit: last relative distance
  bool monotone = false;              // gamma-limit: distances strictly decreasing
  double ratioMax = off;              // halfball: max / min of the inner gradient
};

enum class Compensation { None, Sqrt, Log };

struct SweepConfig {
  std::string scenario = "custom";
  ScenarioKind kind = ScenarioKind::Sweep;
  // geometry
  std::string geometry = "symmetric";  // symmetric | pair
  double r1 = 1.0, r2 = 1.0, outerRadius = 6.0;
  double neckRadius = 0.25;
  DomainMode mode = DomainMode::Planar;
  int dimension = 2;
  std::string phi = "odd";  // odd: x_n - eps/2; vertical: x_n
  // parameters
  std::vector<double> eps;
  std::vector<double> gammas;
  bool allowLargeGamma = false;
  GradingPolicy grading;
  double tol = 1e-10;
  int maxIterations = 0;  // 0 selects the solver default
  PreconditionerKind preconditioner = PreconditionerKind::Jacobi;
  double recombinationFlag = 1e-8;
  bool timing = true;
  int jobs = 1;
  std::string output;
  // half-ball model problem
  std::vector<double> halfballGammas;
  double halfballH = 0.02;
  std::string halfballData = "trig";
  // rate fit
  std::string fitX = "eps";
  std::string fitY = "maxGrad";
  Compensation compensation = Compensation::None;
  std::string fitInput;
  AssertSpec checks;

  /// Throws ConfigError on empty lists, parameters outside (0, 1/4), or gamma
  /// at or above the profile threshold without the override.
  void validate() const;
};

std::vector<std::string> scenario_names();
/// Preset configuration; throws ConfigError listing the presets for unknown names.
SweepConfig scenario(const std::string& name);

/// Flat "section.key = value" text with '#' comments. A scenario.name line
/// loads that preset first; every other key overrides it.
SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::string& path);

DomainSpec make_domain(const SweepConfig& config, double eps);
ScalarField make_phi(const SweepConfig& config, double eps);
SolveOptions solve_options(const SweepConfig& config, bool parallel);

struct SweepRecord {
  int n = 2;
  double eps = 0.0, gamma = 0.0;
  int dof = 0;
  double maxGrad = 0.0, argmaxX = 0.0, argmaxY = 0.0;
  double midgapGrad = 0.0;
  double K1 = 0.0, K2 = 0.0, K1minusK2 = 0.0;
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
  double recombinationResidual = 0.0;
  int iterations = 0;
  double wallTime = 0.0;
  std::string flags;
  std::string error;
};

SweepRecord run_point(const SweepConfig& config, double eps, double gamma, bool parallel = true);
/// All (eps, gamma) points on a pool of `jobs` workers, sorted by (eps, gamma).
std::vector<SweepRecord> run_sweep(const SweepConfig& config, int jobs = 1);

extern const std::vector<std::string> kSweepColumns;
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& rows);
std::vector<SweepRecord> read_sweep_csv(std::istream& in);
/// Numeric column by name; also accepts "epsPlusGamma".
double column_value(const SweepRecord& row, const std::string& column);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rSquared = 0.0;
  double bandRatio = 0.0;  // max / min of the compensated quantity
};

/// Least squares of log y on log x. Throws std::invalid_argument with fewer
/// than three points and std::domain_error for nonpositive data.
RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& y,
                 Compensation compensation = Compensation::None);
RateFit fit_rate(const std::vector<SweepRecord>& table, const std::string& xColumn,
                 const std::string& yColumn, Compensation compensation = Compensation::None);

struct GammaLimitReport {
  double eps = 0.0;
  std::vector<GammaLimitRow> rows;
};
GammaLimitReport run_gamma_limit(const SweepConfig& config);
void write_gamma_limit_csv(std::ostream& out, const GammaLimitReport& report);

struct HalfballRow {
  double gammaHat = 0.0;
  double maxInnerGradient = 0.0;
  int dof = 0;
  int iterations = 0;
};
std::vector<HalfballRow> run_halfball(const SweepConfig& config);
void write_halfball_csv(std::ostream& out, const std::vector<HalfballRow>& rows);

struct CheckOutcome {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double limit = 0.0;
};

std::vector<CheckOutcome> evaluate_checks(const SweepConfig& config,
                                          const std::vector<SweepRecord>& rows);
std::vector<CheckOutcome> evaluate_checks(const SweepConfig& config, const GammaLimitReport& report);
std::vector<CheckOutcome> evaluate_checks(const SweepConfig& config,
                                          const std::vector<HalfballRow>& rows);

void write_checks_json(std::ostream& out, const std::vector<CheckOutcome>& checks);

}  // namespace neckfield
