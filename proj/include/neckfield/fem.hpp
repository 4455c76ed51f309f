#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "neckfield/geometry.hpp"
#include "neckfield/mesh.hpp"
#include "neckfield/sparse.hpp"

namespace neckfield {

/// Condition imposed on all edges carrying one tag.
struct TagCondition {
  enum class Kind {
    Natural,    // no boundary term
    Dirichlet,  // u = data
    Robin,      // u + gamma du/dnu = data, weak form (1/gamma) int (u - data) v
    FreeRobin,  // u + gamma du/dnu = K with K the (unknown) boundary average
    Floating,   // u equals one unknown constant on the whole tag
  };
  Kind kind = Kind::Natural;
  double gamma = 0.0;
  ScalarField data;  // Dirichlet value or Robin right-hand side

  static TagCondition natural() { return {}; }
  static TagCondition dirichlet(ScalarField g) { return {Kind::Dirichlet, 0.0, std::move(g)}; }
  static TagCondition robin(double gamma, ScalarField g) { return {Kind::Robin, gamma, std::move(g)}; }
  static TagCondition free_robin(double gamma) { return {Kind::FreeRobin, gamma, {}}; }
  static TagCondition floating() { return {Kind::Floating, 0.0, {}}; }
};

/// Robin interface problem on a pair-domain mesh: Dirichlet phi on the outer
/// boundary, FixedRobin or FreeConstant data on each inclusion, nothing on the axis.
struct RobinProblem {
  const Mesh* mesh = nullptr;
  double gamma = 0.0;
  BoundaryData data;
  int weightExponent = 0;
};

/// Fully general boundary specification used by every solve.
struct BoundarySpec {
  const Mesh* mesh = nullptr;
  int weightExponent = 0;
  std::map<BoundaryTag, TagCondition> conditions;
};

BoundarySpec to_boundary_spec(const RobinProblem& problem);

/// Weight |S^{p}| r^p of the axisymmetric reduction (1 when p = 0).
double radial_weight(int exponent, double r);

struct AssembledSystem {
  const Mesh* mesh = nullptr;
  int weightExponent = 0;
  // nodal (unconstrained) pieces
  CsrMatrix stiffness;
  std::map<BoundaryTag, CsrMatrix> boundaryMass;                // weighted edge mass per Robin-type tag
  std::map<BoundaryTag, std::vector<double>> averageVector;     // m(v) = int v dS per tag
  std::map<BoundaryTag, double> boundaryMeasure;                // |dD| per tag
  std::map<BoundaryTag, double> gammaOf;                        // Robin parameter per tag
  std::map<BoundaryTag, ScalarField> robinData;                 // fixed Robin right-hand sides
  // reduced system on the free unknowns, posed for the correction u - lift
  // where lift carries the Robin data on Robin-tagged boundary unknowns
  LinearOperator op;
  std::vector<double> rhs;
  std::vector<double> lift;
  // dirichletMap: dofOfNode[v] = -1 for Dirichlet nodes (value in dirichletValue)
  std::vector<int> dofOfNode;
  std::vector<double> dirichletValue;
  std::map<BoundaryTag, int> floatingDof;
  std::vector<BoundaryTag> freeTags;  // tags with FreeRobin conditions
  int dofs = 0;
};

/// Throws std::invalid_argument for gamma <= 0 or missing Dirichlet data.
AssembledSystem assemble(const BoundarySpec& spec, bool parallel = true);
AssembledSystem assemble(const RobinProblem& problem, bool parallel = true);

enum class PreconditionerKind { Jacobi, IncompleteCholesky };

struct SolveOptions {
  double tol = 1e-10;
  PreconditionerKind preconditioner = PreconditionerKind::Jacobi;
  bool parallel = true;
  int max_iterations = 0;
};

struct Solution {
  std::vector<double> values;  // nodal
  std::optional<double> K1;
  std::optional<double> K2;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> residual_history;
  double gamma = 0.0;
  int dofs = 0;
};

Solution solve(const AssembledSystem& system, const SolveOptions& options = {});

/// Value of the functional int |grad v|^2 + sum (1/gamma) int |v - avg|^2 (or
/// |v - g|^2 for fixed Robin data) with the radial weight.
double energy(const AssembledSystem& system, const std::vector<double>& nodal);

/// Weighted L2 norm of a P1 field.
double l2_norm(const Mesh& mesh, int weightExponent, const std::vector<double>& nodal);

/// Boundary average of a nodal field over one tag (weighted).
double boundary_average(const AssembledSystem& system, BoundaryTag tag,
                        const std::vector<double>& nodal);

struct NeckSample {
  double xp = 0.0;
  Vec2 point;
  double dn = 0.0;  // vertical derivative at the midgap point
};

struct GradientField {
  std::vector<Vec2> gradients;  // per triangle
  std::vector<double> magnitude;
  double maxMagnitude = 0.0;
  int argmaxTriangle = -1;
  Vec2 argmax;  // centroid of the maximizing triangle
  std::vector<NeckSample> neckSamples;
};

/// Exact elementwise gradients of the P1 interpolant; when a profile is given,
/// samples of the vertical derivative at the midgap point over each xp.
GradientField recover_gradient(const std::vector<double>& nodal, const Mesh& mesh,
                               const NeckProfile* profile = nullptr,
                               const std::vector<double>& xpSamples = {}, bool parallel = true);
GradientField recover_gradient(const Solution& solution, const Mesh& mesh,
                               const NeckProfile* profile = nullptr,
                               const std::vector<double>& xpSamples = {});

/// Nodal dump: header "solution dof=N gamma=G K1=.. K2=..", then one value per line.
void write_solution(std::ostream& out, const Solution& solution);
/// CSV rows triangle,cx,cy,gx,gy,magnitude.
void write_gradient_csv(std::ostream& out, const Mesh& mesh, const GradientField& field);

/// Half-disk model problem: U = data on the arc, U + gammaHat dU/dnu = data on
/// the flat side (Dirichlet when gammaHat = 0). Returns the max gradient
/// magnitude over elements whose centroid lies within radius 1/4 of the origin.
struct HalfballResult {
  double maxInnerGradient = 0.0;
  Solution solution;
  Mesh mesh;
};
HalfballResult halfball_scenario(double gammaHat, const ScalarField& data, double h = 0.02,
                                 const SolveOptions& options = {});

}  // namespace neckfield
