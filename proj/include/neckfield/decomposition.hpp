#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "neckfield/fem.hpp"
#include "neckfield/geometry.hpp"
#include "neckfield/mesh.hpp"

namespace neckfield {

/// Shared inputs of every solve on one pair-domain mesh.
struct ComponentSetup {
  const Mesh* mesh = nullptr;
  const NeckProfile* profile = nullptr;
  int weightExponent = 0;
  double gamma = 0.0;
  ScalarField phi;
  SolveOptions options;
};

/// Capacitary solves: u1 (data 1 on inclusion1, 0 on inclusion2, 0 outside),
/// u2 (the mirror roles) and u3 (data 0 on both inclusions, phi outside).
struct Components {
  Solution u1, u2, u3;
  CsrMatrix stiffness;  // nodal stiffness shared by all three
};

Components solve_components(const ComponentSetup& setup);

/// Nodal cutoff: 1 on the chosen inclusion, 0 on every other boundary node,
/// linear in x_n across the neck and blended to a distance profile outside.
std::vector<double> flux_cutoff(const Mesh& mesh, const NeckProfile& profile, int inclusion);

struct FluxMatrix {
  std::array<std::array<double, 2>, 2> a{};
  std::array<double, 2> b{};
  double det = 0.0;
  bool a11Positive = false, a22Positive = false, a12Negative = false, a21Negative = false;
  std::array<double, 2> columnSums{};  // a_1j + a_2j

  bool signs_ok() const { return a11Positive && a22Positive && a12Negative && a21Negative; }
  double norm() const;  // Frobenius norm of a
};

/// a_ij and b_i by the volume form psi_i^T K u_j.
FluxMatrix flux_matrix(const Components& components, const Mesh& mesh, const NeckProfile& profile);
/// Net flux psi_i^T K u of an arbitrary nodal field through inclusion i.
double volume_flux(const CsrMatrix& stiffness, const std::vector<double>& psi,
                   const std::vector<double>& u);

struct FreeConstants {
  double K1 = 0.0, K2 = 0.0;
  double difference = 0.0;  // K1 - K2 from the direct difference formula
};

/// Cramer solution of a K + b = 0. Throws std::domain_error when
/// |det| < 1e-14 |a|^2.
FreeConstants free_constants(const FluxMatrix& flux);

/// Max-norm of u - (K1 u1 + K2 u2 + u3). Throws std::invalid_argument when
/// the fields have different sizes.
double recombine_check(const std::vector<double>& u, const Components& components, double K1,
                       double K2);

struct DecompositionResult {
  Components components;
  Solution full;  // the free-constant solve on the same mesh
  FluxMatrix flux;
  FreeConstants constants;
  double recombinationResidual = 0.0;
};

/// Components, flux system, free constants, and the recombination check
/// against the directly solved free-constant problem.
DecompositionResult decompose(const ComponentSetup& setup);

struct PerfectSolution {
  std::vector<double> values;
  double K1 = 0.0, K2 = 0.0;
  std::array<double, 2> relativeFlux{};  // |psi_i^T K u| / (|psi_i|_K |u|_K)
  Solution solution;
};

/// gamma = 0 problem: each inclusion boundary condensed to one unknown.
PerfectSolution perfect_solver(const ComponentSetup& setup);

struct GammaLimitRow {
  double gamma = 0.0;
  double distance = 0.0;  // |u_gamma - u_0|_L2
  double relative = 0.0;  // distance / |u_0|_L2
};

/// Free-constant solves for each gamma (strictly decreasing, positive) on the
/// shared mesh compared with the perfect solution.
std::vector<GammaLimitRow> gamma_limit(const ComponentSetup& setup, const std::vector<double>& gammas);

/// Fiber averages of a field over f2(x') < x_n < eps + f1(x'), |x'| <= R.
std::vector<double> vertical_average(const ScalarField& field, const NeckProfile& profile,
                                     const std::vector<double>& xpSamples);
/// Same for a nodal field; throws std::out_of_range when a fiber leaves the mesh.
std::vector<double> vertical_average(const std::vector<double>& nodal, const Mesh& mesh,
                                     const NeckProfile& profile,
                                     const std::vector<double>& xpSamples);

/// JSON object with a, b, det and sign flags at 17 significant digits.
void write_flux_json(std::ostream& out, const FluxMatrix& flux);

}  // namespace neckfield
