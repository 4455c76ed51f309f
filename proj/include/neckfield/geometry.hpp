#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace neckfield {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

/// Radial graph x_n = f(|x'|) describing one inclusion boundary near the
/// contact point. Either a circular arc through the origin with horizontal
/// tangent, or an even polynomial without constant and linear terms. A
/// uniform scale factor multiplies the whole graph.
class CurveSpec {
 public:
  /// Arc of a circle of the given radius. sign=+1 bends upward (lower side of
  /// the upper inclusion), sign=-1 bends downward (upper side of the lower one).
  static CurveSpec circle(double radius, int sign);
  /// f(r) = sum_k coeffs[k] * r^(2k+2).
  static CurveSpec even_polynomial(std::vector<double> coeffs);

  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;

  /// Largest |x'| on which the graph is twice differentiable (infinite for
  /// polynomials, the radius for circles).
  double smooth_limit() const;

  CurveSpec scaled(double t) const;
  CurveSpec negated() const;

  bool is_circle() const { return kind_ == Kind::Circle; }
  double radius() const { return radius_; }

 private:
  enum class Kind { Circle, Polynomial };
  Kind kind_ = Kind::Polynomial;
  double radius_ = 0.0;
  double scale_ = 1.0;
  std::vector<double> coeffs_;
};

/// Geometry of the narrow region: upper boundary x_n = eps + f1(x'), lower
/// boundary x_n = f2(x') for |x'| <= 2R.
struct NeckProfile {
  double eps = 0.0;
  CurveSpec f1 = CurveSpec::circle(1.0, +1);
  CurveSpec f2 = CurveSpec::circle(1.0, -1);
  double R = 0.25;
  double kappa = 0.5;

  /// Throws std::invalid_argument when the sampled curvature or two-sided
  /// quadratic bounds fail on |x'| <= 2R.
  void validate() const;

  /// Largest kappa for which the bounds hold on the sampled range.
  static double derive_kappa(const CurveSpec& f1, const CurveSpec& f2, double R);
};

double gap_delta(const NeckProfile& profile, double xp);
double eta(const NeckProfile& profile, double xp);

/// sup over |x'| < R of the Frobenius norm of D^2(f1 - f2) in R^(n-1).
double hessian_sup(const NeckProfile& profile, int n = 2, int samples = 10000);

struct Circle {
  Vec2 center;
  double radius = 1.0;

  bool contains(Vec2 p) const;
};

enum class DomainMode { Planar, Axisymmetric };

/// Outer ball with two inclusions whose closest points are (0, eps) on
/// inclusion 1 and the origin on inclusion 2. In axisymmetric mode the x
/// coordinate is the distance r = |x'| to the symmetry axis.
struct DomainSpec {
  Circle outer;
  std::vector<Circle> inclusions;
  DomainMode mode = DomainMode::Planar;
  int dimension = 2;

  double eps() const;
  int weight_exponent() const {
    return mode == DomainMode::Axisymmetric ? dimension - 2 : 0;
  }

  void validate() const;
};

/// Two inclusions of the given radii above and below the origin, separated
/// by eps, inside a ball of radius outer_radius centred at (0, eps/2).
DomainSpec pair_domain(double eps, double r1, double r2, double outer_radius,
                       DomainMode mode = DomainMode::Planar, int dimension = 2);

/// Outer radius 6 centred at (0, eps/2), unit inclusions centred at (0, 1+eps)
/// and (0, -1).
DomainSpec symmetric_domain(double eps, DomainMode mode = DomainMode::Planar,
                            int dimension = 2);

NeckProfile profile_from_domain(const DomainSpec& domain, double R);

/// Mirror of p across the midplane x_n = eps/2.
Vec2 reflect_midplane(Vec2 p, double eps);

using ScalarField = std::function<double(Vec2)>;

struct FixedRobin {
  double g = 0.0;
};
struct FreeConstant {};
using InclusionData = std::variant<FixedRobin, FreeConstant>;

struct BoundaryData {
  ScalarField phi;
  InclusionData inclusion1 = FreeConstant{};
  InclusionData inclusion2 = FreeConstant{};

  bool free_constants() const;
};

/// phi = x_n - eps/2 with free constants on both inclusions.
BoundaryData odd_boundary_data(double eps);

}  // namespace neckfield
