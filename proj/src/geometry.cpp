#include "neckfield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "neckfield/errors.hpp"

namespace neckfield {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

CurveSpec CurveSpec::circle(double radius, int sign) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
  CurveSpec c;
  c.kind_ = Kind::Circle;
  c.radius_ = radius;
  c.scale_ = sign >= 0 ? 1.0 : -1.0;
  return c;
}

CurveSpec CurveSpec::even_polynomial(std::vector<double> coeffs) {
  CurveSpec c;
  c.kind_ = Kind::Polynomial;
  c.coeffs_ = std::move(coeffs);
  return c;
}

double CurveSpec::smooth_limit() const {
  return kind_ == Kind::Circle ? radius_ : std::numeric_limits<double>::infinity();
}

double CurveSpec::value(double r) const {
  if (kind_ == Kind::Circle) {
    const double a = radius_;
    // a - sqrt(a^2 - r^2) written without cancellation
    return scale_ * r * r / (a + std::sqrt((a - r) * (a + r)));
  }
  const double r2 = r * r;
  double p = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) p = p * r2 + *it;
  return scale_ * p * r2;
}

double CurveSpec::d1(double r) const {
  if (kind_ == Kind::Circle) {
    const double a = radius_;
    return scale_ * r / std::sqrt((a - r) * (a + r));
  }
  const double r2 = r * r;
  double p = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) p = p * r2 + (2.0 * k + 2.0) * coeffs_[k];
  return scale_ * p * r;
}

double CurveSpec::d2(double r) const {
  if (kind_ == Kind::Circle) {
    const double a = radius_;
    const double s = (a - r) * (a + r);
    return scale_ * a * a / (s * std::sqrt(s));
  }
  const double r2 = r * r;
  double p = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 0;)
    p = p * r2 + (2.0 * k + 2.0) * (2.0 * k + 1.0) * coeffs_[k];
  return scale_ * p;
}

CurveSpec CurveSpec::scaled(double t) const {
  CurveSpec c = *this;
  c.scale_ *= t;
  return c;
}

CurveSpec CurveSpec::negated() const { return scaled(-1.0); }

namespace {

void check_range(const NeckProfile& profile, double xp) {
  if (std::abs(xp) > 2.0 * profile.R * (1.0 + 1e-12))
    throw std::domain_error("|x'| = " + std::to_string(std::abs(xp)) +
                            " outside the neck range |x'| <= 2R");
}

}  // namespace

double gap_delta(const NeckProfile& profile, double xp) {
  check_range(profile, xp);
  const double r = std::abs(xp);
  return profile.eps + profile.f1.value(r) - profile.f2.value(r);
}

double eta(const NeckProfile& profile, double xp) { return profile.eps + xp * xp; }

double NeckProfile::derive_kappa(const CurveSpec& f1, const CurveSpec& f2, double R) {
  constexpr int kSamples = 2000;
  double k = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSamples; ++i) {
    const double r = 2.0 * R * i / kSamples;
    const double g2 = f1.d2(r) - f2.d2(r);
    k = std::min(k, g2);
    if (r > 0.0) {
      const double q = (f1.value(r) - f2.value(r)) / (r * r);
      k = std::min({k, q, 1.0 / q});
    }
  }
  return k;
}

void NeckProfile::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("profile gap eps must be positive");
  if (!(R > 0.0)) throw std::invalid_argument("neck radius R must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("curvature floor kappa must be positive");
  if (2.0 * R >= std::min(f1.smooth_limit(), f2.smooth_limit()))
    throw UnsupportedProfile("neck range 2R reaches the end of a circular arc");
  constexpr int kSamples = 2000;
  const double tol = 1e-12;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = 2.0 * R * i / kSamples;
    const double g = f1.value(r) - f2.value(r);
    const double g2 = f1.d2(r) - f2.d2(r);
    if (g2 < kappa * (1.0 - tol))
      throw std::invalid_argument("D^2(f1 - f2) falls below kappa at |x'| = " + std::to_string(r));
    if (g < kappa * r * r * (1.0 - tol) || g > r * r / kappa * (1.0 + tol))
      throw std::invalid_argument("f1 - f2 violates the quadratic bounds at |x'| = " +
                                  std::to_string(r));
  }
}

double hessian_sup(const NeckProfile& profile, int n, int samples) {
  if (n < 2) throw std::invalid_argument("dimension must be at least 2");
  if (profile.R >= std::min(profile.f1.smooth_limit(), profile.f2.smooth_limit()))
    throw UnsupportedProfile("Hessian is unbounded on |x'| < R for this profile");
  double sup = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double r = profile.R * i / samples;
    const double radial = profile.f1.d2(r) - profile.f2.d2(r);
    // tangential eigenvalue g'(r)/r tends to g''(0) at the origin
    const double tangential =
        r > 0.0 ? (profile.f1.d1(r) - profile.f2.d1(r)) / r : radial;
    const double frob = std::sqrt(radial * radial + (n - 2) * tangential * tangential);
    sup = std::max(sup, frob);
  }
  return sup;
}

bool Circle::contains(Vec2 p) const { return norm(p - center) < radius; }

double DomainSpec::eps() const {
  if (inclusions.size() != 2) throw std::invalid_argument("domain requires two inclusions");
  return norm(inclusions[0].center - inclusions[1].center) - inclusions[0].radius -
         inclusions[1].radius;
}

void DomainSpec::validate() const {
  if (inclusions.size() != 2)
    throw std::invalid_argument("domain requires exactly two inclusions, got " +
                                std::to_string(inclusions.size()));
  if (!(outer.radius > 0.0)) throw std::invalid_argument("outer radius must be positive");
  for (const auto& c : inclusions)
    if (!(c.radius > 0.0)) throw std::invalid_argument("inclusion radius must be positive");
  const double gap = eps();
  if (!(gap > 0.0)) throw std::invalid_argument("inclusions overlap or touch");
  const Circle& d1 = inclusions[0];
  const Circle& d2 = inclusions[1];
  if (d1.center.x != 0.0 || d2.center.x != 0.0)
    throw std::invalid_argument("inclusion centres must lie on the x_n axis");
  if (std::abs(d2.center.y + d2.radius) > 1e-12 * d2.radius)
    throw std::invalid_argument("inclusion 2 must touch the origin from below");
  if (std::abs(d1.center.y - d1.radius - gap) > 1e-12 * std::max(1.0, d1.radius))
    throw std::invalid_argument("inclusion 1 must lie above the gap");
  for (const auto& c : inclusions) {
    const double clearance = outer.radius - norm(c.center - outer.center) - c.radius;
    if (clearance < 1.0 - 1e-12)
      throw std::invalid_argument("inclusions must stay at distance >= 1 from the outer boundary");
  }
  if (mode == DomainMode::Axisymmetric) {
    if (dimension < 3) throw std::invalid_argument("axisymmetric mode needs dimension >= 3");
    if (outer.center.x != 0.0)
      throw std::invalid_argument("axisymmetric mode needs all centres on the symmetry axis");
  } else if (dimension != 2) {
    throw std::invalid_argument("planar mode is two-dimensional");
  }
}

DomainSpec pair_domain(double eps, double r1, double r2, double outer_radius, DomainMode mode,
                       int dimension) {
  DomainSpec d;
  d.outer = Circle{{0.0, 0.5 * eps}, outer_radius};
  d.inclusions = {Circle{{0.0, r1 + eps}, r1}, Circle{{0.0, -r2}, r2}};
  d.mode = mode;
  d.dimension = dimension;
  return d;
}

DomainSpec symmetric_domain(double eps, DomainMode mode, int dimension) {
  return pair_domain(eps, 1.0, 1.0, 6.0, mode, dimension);
}

NeckProfile profile_from_domain(const DomainSpec& domain, double R) {
  domain.validate();
  NeckProfile p;
  p.eps = domain.eps();
  p.f1 = CurveSpec::circle(domain.inclusions[0].radius, +1);
  p.f2 = CurveSpec::circle(domain.inclusions[1].radius, -1);
  p.R = R;
  p.kappa = NeckProfile::derive_kappa(p.f1, p.f2, R);
  return p;
}

Vec2 reflect_midplane(Vec2 p, double eps) { return {p.x, eps - p.y}; }

bool BoundaryData::free_constants() const {
  return std::holds_alternative<FreeConstant>(inclusion1) ||
         std::holds_alternative<FreeConstant>(inclusion2);
}

BoundaryData odd_boundary_data(double eps) {
  BoundaryData d;
  d.phi = [eps](Vec2 p) { return p.y - 0.5 * eps; };
  return d;
}

}  // namespace neckfield
