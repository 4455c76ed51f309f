#include "neckfield/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "neckfield/errors.hpp"
#include "neckfield/meshgen.hpp"

namespace neckfield {

namespace {

constexpr double kPi = std::numbers::pi;
// support radius of the coarse tent functions around free boundaries
constexpr double kCoarseWidth = 0.5;

// Degree-5 seven-point rule on the reference triangle (barycentric, weights sum to 1).
constexpr double kA1 = 0.059715871789770, kB1 = 0.470142064105115;
constexpr double kA2 = 0.797426985353087, kB2 = 0.101286507323456;
constexpr double kW0 = 0.225, kW1 = 0.132394152788506, kW2 = 0.125939180544827;
constexpr double kTriRule[7][4] = {
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, kW0}, {kA1, kB1, kB1, kW1}, {kB1, kA1, kB1, kW1},
    {kB1, kB1, kA1, kW1},                   {kA2, kB2, kB2, kW2}, {kB2, kA2, kB2, kW2},
    {kB2, kB2, kA2, kW2}};

struct GaussRule {
  std::vector<double> t;  // in [0, 1]
  std::vector<double> w;  // sum to 1
};

GaussRule edge_rule(int exponent) {
  if (exponent <= 1) {
    const double d = 0.5 / std::sqrt(3.0);
    return {{0.5 - d, 0.5 + d}, {0.5, 0.5}};
  }
  const double x1 = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double x2 = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double w1 = (18.0 + std::sqrt(30.0)) / 36.0, w2 = (18.0 - std::sqrt(30.0)) / 36.0;
  return {{0.5 - 0.5 * x2, 0.5 - 0.5 * x1, 0.5 + 0.5 * x1, 0.5 + 0.5 * x2},
          {0.5 * w2, 0.5 * w1, 0.5 * w1, 0.5 * w2}};
}

double sphere_measure(int k) {
  // |S^k| = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
  return 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

// Integral of the radial weight over triangle t.
double element_weight(const Mesh& mesh, int t, int exponent) {
  const double area = mesh.area(t);
  if (exponent == 0) return area;
  const auto& tri = mesh.triangles[t];
  const Vec2 a = mesh.nodes[tri[0]], b = mesh.nodes[tri[1]], c = mesh.nodes[tri[2]];
  if (exponent == 1) return area * radial_weight(1, (a.x + b.x + c.x) / 3.0);
  double s = 0.0;
  for (const auto& q : kTriRule)
    s += q[3] * radial_weight(exponent, q[0] * a.x + q[1] * b.x + q[2] * c.x);
  return area * s;
}

std::array<Vec2, 3> shape_gradients(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec2 p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]], p2 = mesh.nodes[tri[2]];
  const double a2 = cross(p1 - p0, p2 - p0);
  return {Vec2{(p1.y - p2.y) / a2, (p2.x - p1.x) / a2}, Vec2{(p2.y - p0.y) / a2, (p0.x - p2.x) / a2},
          Vec2{(p0.y - p1.y) / a2, (p1.x - p0.x) / a2}};
}

struct EdgeLocal {
  double mass[2][2];
  double avg[2];
  double load[2];  // int w g phi_a
};

// The load is the defect int (g - l) phi_a against the linear lift l with
// endpoint values la, lb, written so that it vanishes exactly when g is
// constant and matches the lift.
EdgeLocal edge_local(const Mesh& mesh, const BoundaryEdge& e, int exponent, const ScalarField* g,
                     double la, double lb) {
  const Vec2 a = mesh.nodes[e.a], b = mesh.nodes[e.b];
  const double len = norm(b - a);
  const GaussRule rule = edge_rule(exponent);
  EdgeLocal out{};
  for (std::size_t q = 0; q < rule.t.size(); ++q) {
    const double t = rule.t[q];
    const Vec2 p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    const double w = rule.w[q] * len * radial_weight(exponent, p.x);
    const double phi[2] = {1.0 - t, t};
    const double gv = g && *g ? (*g)(p) : 0.0;
    const double defect = (1.0 - t) * (gv - la) + t * (gv - lb);
    for (int i = 0; i < 2; ++i) {
      out.avg[i] += w * phi[i];
      out.load[i] += w * defect * phi[i];
      for (int j = 0; j < 2; ++j) out.mass[i][j] += w * (phi[i] * phi[j]);
    }
  }
  return out;
}

CsrMatrix pattern_from_rows(int n, std::vector<std::vector<int>>& rows) {
  CsrMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<int>(r.size());
  }
  m.col.reserve(m.row_ptr[n]);
  for (int i = 0; i < n; ++i) m.col.insert(m.col.end(), rows[i].begin(), rows[i].end());
  m.val.assign(m.col.size(), 0.0);
  return m;
}

void add_to(CsrMatrix& m, int i, int j, double v) {
  const int k = m.find(i, j);
  if (k < 0) throw std::logic_error("assembly entry outside the sparsity pattern");
  m.val[k] += v;
}

bool is_robin_like(TagCondition::Kind k) {
  return k == TagCondition::Kind::Robin || k == TagCondition::Kind::FreeRobin;
}

}  // namespace

double radial_weight(int exponent, double r) {
  if (exponent == 0) return 1.0;
  return sphere_measure(exponent) * std::pow(std::max(r, 0.0), exponent);
}

BoundarySpec to_boundary_spec(const RobinProblem& problem) {
  if (!problem.mesh) throw std::invalid_argument("problem has no mesh");
  if (!(problem.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!problem.data.phi) throw std::invalid_argument("missing Dirichlet data phi on the outer boundary");
  BoundarySpec spec;
  spec.mesh = problem.mesh;
  spec.weightExponent = problem.weightExponent;
  spec.conditions[BoundaryTag::Outer] = TagCondition::dirichlet(problem.data.phi);
  auto inclusion = [&](const InclusionData& d) {
    if (const auto* fixed = std::get_if<FixedRobin>(&d)) {
      const double g = fixed->g;
      return TagCondition::robin(problem.gamma, [g](Vec2) { return g; });
    }
    return TagCondition::free_robin(problem.gamma);
  };
  spec.conditions[BoundaryTag::Inclusion1] = inclusion(problem.data.inclusion1);
  spec.conditions[BoundaryTag::Inclusion2] = inclusion(problem.data.inclusion2);
  spec.conditions[BoundaryTag::Axis] = TagCondition::natural();
  return spec;
}

AssembledSystem assemble(const RobinProblem& problem, bool parallel) {
  return assemble(to_boundary_spec(problem), parallel);
}

AssembledSystem assemble(const BoundarySpec& spec, bool parallel) {
  if (!spec.mesh) throw std::invalid_argument("boundary specification has no mesh");
  const Mesh& mesh = *spec.mesh;
  const int nn = static_cast<int>(mesh.nodes.size());
  const int nt = static_cast<int>(mesh.triangles.size());
  const int p = spec.weightExponent;
  if (p < 0) throw std::invalid_argument("weight exponent must be nonnegative");

  auto condition = [&](BoundaryTag tag) -> const TagCondition& {
    static const TagCondition kNatural;
    auto it = spec.conditions.find(tag);
    return it == spec.conditions.end() ? kNatural : it->second;
  };
  for (const auto& [tag, c] : spec.conditions) {
    if (is_robin_like(c.kind) && !(c.gamma > 0.0))
      throw std::invalid_argument(std::string("gamma must be positive on ") + tag_name(tag));
    if ((c.kind == TagCondition::Kind::Dirichlet || c.kind == TagCondition::Kind::Robin) && !c.data)
      throw std::invalid_argument(std::string("missing boundary data on ") + tag_name(tag));
  }

  AssembledSystem sys;
  sys.mesh = &mesh;
  sys.weightExponent = p;

  // degrees of freedom: Dirichlet first, then floating, then one per remaining node
  sys.dofOfNode.assign(nn, -2);
  sys.dirichletValue.assign(nn, 0.0);
  for (const auto& e : mesh.boundaryEdges) {
    const auto& c = condition(e.tag);
    if (c.kind != TagCondition::Kind::Dirichlet) continue;
    for (int v : {e.a, e.b}) {
      sys.dofOfNode[v] = -1;
      sys.dirichletValue[v] = c.data(mesh.nodes[v]);
    }
  }
  std::map<BoundaryTag, std::vector<int>> floating_nodes;
  for (const auto& e : mesh.boundaryEdges)
    if (condition(e.tag).kind == TagCondition::Kind::Floating)
      for (int v : {e.a, e.b})
        if (sys.dofOfNode[v] != -1) floating_nodes[e.tag].push_back(v);
  for (auto& [tag, nodes] : floating_nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  }
  int next = 0;
  for (int v = 0; v < nn; ++v) {
    bool floating = false;
    for (const auto& [tag, nodes] : floating_nodes)
      if (std::binary_search(nodes.begin(), nodes.end(), v)) floating = true;
    if (sys.dofOfNode[v] == -2 && !floating) sys.dofOfNode[v] = next++;
  }
  for (int v = 0; v < nn; ++v) {
    if (sys.dofOfNode[v] != -2) continue;
    for (const auto& [tag, nodes] : floating_nodes)
      if (std::binary_search(nodes.begin(), nodes.end(), v)) {
        auto it = sys.floatingDof.find(tag);
        if (it == sys.floatingDof.end()) it = sys.floatingDof.emplace(tag, next++).first;
        sys.dofOfNode[v] = it->second;
        break;
      }
  }
  sys.dofs = next;
  if (std::any_of(sys.dofOfNode.begin(), sys.dofOfNode.end(), [](int d) { return d == -2; }))
    throw std::logic_error("node without a degree of freedom");

  // lift: Robin data on the unknowns of Robin-tagged boundaries
  sys.lift.assign(sys.dofs, 0.0);
  for (const auto& e : mesh.boundaryEdges) {
    const auto& c = condition(e.tag);
    if (c.kind != TagCondition::Kind::Robin) continue;
    for (int v : {e.a, e.b})
      if (const int d = sys.dofOfNode[v]; d >= 0) sys.lift[d] = c.data(mesh.nodes[v]);
  }
  auto lift_at = [&](int v) { return sys.dofOfNode[v] >= 0 ? sys.lift[sys.dofOfNode[v]] : 0.0; };

  // element contributions, computed independently and scattered in element order
  std::vector<std::array<double, 6>> local(nt);  // upper triangle of the 3x3 matrix
#pragma omp parallel for schedule(static) if (parallel && nt > 5000)
  for (int t = 0; t < nt; ++t) {
    const auto g = shape_gradients(mesh, t);
    const double w = element_weight(mesh, t, p);
    local[t] = {w * dot(g[0], g[0]), w * dot(g[0], g[1]), w * dot(g[0], g[2]),
                w * dot(g[1], g[1]), w * dot(g[1], g[2]), w * dot(g[2], g[2])};
  }

  // nodal stiffness
  {
    std::vector<std::vector<int>> rows(nn);
    for (const auto& tri : mesh.triangles)
      for (int a : tri)
        for (int b : tri) rows[a].push_back(b);
    sys.stiffness = pattern_from_rows(nn, rows);
    for (int t = 0; t < nt; ++t) {
      const auto& tri = mesh.triangles[t];
      const auto& k = local[t];
      const double m[3][3] = {{k[0], k[1], k[2]}, {k[1], k[3], k[4]}, {k[2], k[4], k[5]}};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) add_to(sys.stiffness, tri[i], tri[j], m[i][j]);
    }
  }

  // boundary pieces per Robin-type tag
  std::map<BoundaryTag, std::vector<std::pair<const BoundaryEdge*, EdgeLocal>>> edge_terms;
  for (const auto& e : mesh.boundaryEdges) {
    const auto& c = condition(e.tag);
    if (!is_robin_like(c.kind)) continue;
    const ScalarField* g = c.kind == TagCondition::Kind::Robin ? &c.data : nullptr;
    edge_terms[e.tag].emplace_back(&e, edge_local(mesh, e, p, g, lift_at(e.a), lift_at(e.b)));
  }
  for (auto& [tag, terms] : edge_terms) {
    std::vector<std::vector<int>> rows(nn);
    for (const auto& [e, loc] : terms)
      for (int a : {e->a, e->b})
        for (int b : {e->a, e->b}) rows[a].push_back(b);
    CsrMatrix mass = pattern_from_rows(nn, rows);
    std::vector<double> avg(nn, 0.0);
    double measure = 0.0;
    for (const auto& [e, loc] : terms) {
      const int v[2] = {e->a, e->b};
      for (int i = 0; i < 2; ++i) {
        avg[v[i]] += loc.avg[i];
        measure += loc.avg[i];
        for (int j = 0; j < 2; ++j) add_to(mass, v[i], v[j], loc.mass[i][j]);
      }
    }
    sys.boundaryMass[tag] = std::move(mass);
    sys.averageVector[tag] = std::move(avg);
    sys.boundaryMeasure[tag] = measure;
    sys.gammaOf[tag] = condition(tag).gamma;
    if (condition(tag).kind == TagCondition::Kind::FreeRobin)
      sys.freeTags.push_back(tag);
    else
      sys.robinData[tag] = condition(tag).data;
  }

  // reduced operator on the free unknowns
  const int nd = sys.dofs;
  {
    std::vector<std::vector<int>> rows(nd);
    for (const auto& tri : mesh.triangles)
      for (int a : tri) {
        const int da = sys.dofOfNode[a];
        if (da < 0) continue;
        for (int b : tri)
          if (sys.dofOfNode[b] >= 0) rows[da].push_back(sys.dofOfNode[b]);
      }
    sys.op.matrix = pattern_from_rows(nd, rows);
  }
  sys.rhs.assign(nd, 0.0);
  CsrMatrix& a = sys.op.matrix;
  auto scatter = [&](int i, int j, double v, bool apply_lift) {
    const int di = sys.dofOfNode[i];
    if (di < 0) return;
    const int dj = sys.dofOfNode[j];
    if (dj >= 0) {
      add_to(a, di, dj, v);
      if (apply_lift) sys.rhs[di] -= v * sys.lift[dj];
    } else {
      sys.rhs[di] -= v * sys.dirichletValue[j];
    }
  };
  for (int i = 0; i < nn; ++i)
    for (int k = sys.stiffness.row_ptr[i]; k < sys.stiffness.row_ptr[i + 1]; ++k)
      scatter(i, sys.stiffness.col[k], sys.stiffness.val[k], true);
  for (auto& [tag, terms] : edge_terms) {
    const double inv_gamma = 1.0 / sys.gammaOf[tag];
    const CsrMatrix& m = sys.boundaryMass[tag];
    const bool robin = condition(tag).kind == TagCondition::Kind::Robin;
    for (int i = 0; i < nn; ++i)
      for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
        scatter(i, m.col[k], inv_gamma * m.val[k], !robin);  // Robin lift sits in the defect load
    if (robin) {
      for (const auto& [e, loc] : terms) {
        const int v[2] = {e->a, e->b};
        for (int i = 0; i < 2; ++i)
          if (sys.dofOfNode[v[i]] >= 0) sys.rhs[sys.dofOfNode[v[i]]] += inv_gamma * loc.load[i];
      }
    } else {
      // -(1/gamma) m m^T / |dD|
      const auto& avg = sys.averageVector[tag];
      LowRankTerm term;
      term.coeff = -inv_gamma / sys.boundaryMeasure[tag];
      double known_part = 0.0;  // m^T (Dirichlet values + lift)
      std::map<int, double> reduced;
      for (int v = 0; v < nn; ++v) {
        if (avg[v] == 0.0) continue;
        const int d = sys.dofOfNode[v];
        if (d >= 0) {
          reduced[d] += avg[v];
          known_part += avg[v] * sys.lift[d];
        } else {
          known_part += avg[v] * sys.dirichletValue[v];
        }
      }
      for (const auto& [d, value] : reduced) {
        term.index.push_back(d);
        term.value.push_back(value);
        sys.rhs[d] -= term.coeff * value * known_part;
      }
      sys.op.low_rank.push_back(std::move(term));
    }
  }
  return sys;
}

double l2_norm(const Mesh& mesh, int exponent, const std::vector<double>& u) {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.area(static_cast<int>(t));
    const double e0 = u[tri[0]], e1 = u[tri[1]], e2 = u[tri[2]];
    if (exponent == 0) {
      const double sum = e0 + e1 + e2;
      s += area / 12.0 * (e0 * e0 + e1 * e1 + e2 * e2 + sum * sum);
      continue;
    }
    const Vec2 a = mesh.nodes[tri[0]], b = mesh.nodes[tri[1]], c = mesh.nodes[tri[2]];
    double local = 0.0;
    for (const auto& q : kTriRule) {
      const double v = q[0] * e0 + q[1] * e1 + q[2] * e2;
      local += q[3] * radial_weight(exponent, q[0] * a.x + q[1] * b.x + q[2] * c.x) * v * v;
    }
    s += area * local;
  }
  return std::sqrt(s);
}

double boundary_average(const AssembledSystem& system, BoundaryTag tag,
                        const std::vector<double>& nodal) {
  auto it = system.averageVector.find(tag);
  if (it == system.averageVector.end())
    throw std::invalid_argument(std::string("no boundary functional for tag ") + tag_name(tag));
  double s = 0.0;
  for (std::size_t v = 0; v < nodal.size(); ++v) s += it->second[v] * nodal[v];
  return s / system.boundaryMeasure.at(tag);
}

Solution solve(const AssembledSystem& system, const SolveOptions& options) {
  Solution sol;
  std::vector<double> x(system.dofs, 0.0);  // correction to the lift
  const Mesh& mesh = *system.mesh;
  SolverOptions so;
  so.tol = options.tol;
  so.parallel = options.parallel;
  so.max_iterations = options.max_iterations;
  if (system.dofs > 0) {
    SolveStats stats;
    if (options.preconditioner == PreconditionerKind::IncompleteCholesky) {
      IncompleteCholesky ic(system.op);
      stats = pcg(system.op, system.rhs, x, ic, so);
    } else if (!system.op.low_rank.empty()) {
      // coarse vectors: tent functions equal to 1 on each free boundary
      std::vector<std::vector<double>> coarse;
      for (BoundaryTag tag : system.freeTags) {
        const std::vector<double> dist = graph_distance(mesh, mesh.boundary_nodes(tag));
        std::vector<double> c(system.dofs, 0.0);
        for (std::size_t v = 0; v < dist.size(); ++v) {
          const int d = system.dofOfNode[v];
          if (d >= 0) c[d] = std::max(c[d], 1.0 - dist[v] / kCoarseWidth);
        }
        coarse.push_back(std::move(c));
      }
      CoarseCorrectedJacobi m(system.op, std::move(coarse));
      stats = pcg(system.op, system.rhs, x, m, so);
    } else {
      JacobiPreconditioner m(system.op);
      stats = pcg(system.op, system.rhs, x, m, so);
    }
    sol.iterations = stats.iterations;
    sol.relative_residual = stats.relative_residual;
    sol.residual_history = std::move(stats.history);
  }
  const int nn = static_cast<int>(system.dofOfNode.size());
  sol.values.resize(nn);
  for (int v = 0; v < nn; ++v) {
    const int d = system.dofOfNode[v];
    sol.values[v] = d >= 0 ? system.lift[d] + x[d] : system.dirichletValue[v];
  }
  sol.dofs = system.dofs;
  for (BoundaryTag tag : {BoundaryTag::Inclusion1, BoundaryTag::Inclusion2}) {
    std::optional<double> k;
    if (std::find(system.freeTags.begin(), system.freeTags.end(), tag) != system.freeTags.end()) {
      k = boundary_average(system, tag, sol.values);
      sol.gamma = system.gammaOf.at(tag);
    } else if (auto it = system.floatingDof.find(tag); it != system.floatingDof.end()) {
      k = system.lift[it->second] + x[it->second];
    }
    (tag == BoundaryTag::Inclusion1 ? sol.K1 : sol.K2) = k;
  }
  if (sol.gamma == 0.0 && !system.gammaOf.empty()) sol.gamma = system.gammaOf.begin()->second;
  return sol;
}

double energy(const AssembledSystem& system, const std::vector<double>& u) {
  std::vector<double> ku(u.size());
  kernels::serial::spmv(system.stiffness, u.data(), ku.data());
  double e = kernels::serial::dot(u.data(), ku.data(), u.size());
  const Mesh& mesh = *system.mesh;
  for (const auto& [tag, mass] : system.boundaryMass) {
    const double inv_gamma = 1.0 / system.gammaOf.at(tag);
    const bool free = std::find(system.freeTags.begin(), system.freeTags.end(), tag) !=
                      system.freeTags.end();
    if (free) {
      std::vector<double> mu(u.size());
      kernels::serial::spmv(mass, u.data(), mu.data());
      const double avg_integral = boundary_average(system, tag, u) * system.boundaryMeasure.at(tag);
      e += inv_gamma * (kernels::serial::dot(u.data(), mu.data(), u.size()) -
                        avg_integral * avg_integral / system.boundaryMeasure.at(tag));
    } else {
      const ScalarField& g = system.robinData.at(tag);
      const GaussRule rule = edge_rule(system.weightExponent);
      double s = 0.0;
      for (const auto& edge : mesh.boundaryEdges) {
        if (edge.tag != tag) continue;
        const Vec2 a = mesh.nodes[edge.a], b = mesh.nodes[edge.b];
        const double len = norm(b - a);
        for (std::size_t q = 0; q < rule.t.size(); ++q) {
          const double t = rule.t[q];
          const Vec2 p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
          const double d = (1.0 - t) * u[edge.a] + t * u[edge.b] - g(p);
          s += rule.w[q] * len * radial_weight(system.weightExponent, p.x) * d * d;
        }
      }
      e += inv_gamma * s;
    }
  }
  return e;
}

GradientField recover_gradient(const std::vector<double>& nodal, const Mesh& mesh,
                               const NeckProfile* profile, const std::vector<double>& xpSamples,
                               bool parallel) {
  GradientField f;
  const int nt = static_cast<int>(mesh.triangles.size());
  f.gradients.resize(nt);
  f.magnitude.resize(nt);
#pragma omp parallel for schedule(static) if (parallel && nt > 5000)
  for (int t = 0; t < nt; ++t) {
    const auto g = shape_gradients(mesh, t);
    const auto& tri = mesh.triangles[t];
    Vec2 s{0.0, 0.0};
    for (int i = 0; i < 3; ++i) s = s + nodal[tri[i]] * g[i];
    f.gradients[t] = s;
    f.magnitude[t] = std::hypot(s.x, s.y);
  }
  for (int t = 0; t < nt; ++t)
    if (f.magnitude[t] > f.maxMagnitude || f.argmaxTriangle < 0) {
      f.maxMagnitude = f.magnitude[t];
      f.argmaxTriangle = t;
    }
  if (f.argmaxTriangle >= 0) f.argmax = mesh.centroid(f.argmaxTriangle);
  if (profile && !xpSamples.empty()) {
    MeshLocator locator(mesh);
    for (double xp : xpSamples) {
      const double r = std::abs(xp);
      const Vec2 p{xp, 0.5 * (profile->eps + profile->f1.value(r) + profile->f2.value(r))};
      const auto t = locator.locate(p);
      if (!t) throw std::out_of_range("neck sample point lies outside the mesh");
      f.neckSamples.push_back({xp, p, f.gradients[*t].y});
    }
  }
  return f;
}

GradientField recover_gradient(const Solution& solution, const Mesh& mesh,
                               const NeckProfile* profile, const std::vector<double>& xpSamples) {
  return recover_gradient(solution.values, mesh, profile, xpSamples);
}

void write_solution(std::ostream& out, const Solution& solution) {
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("none");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return std::string(buf);
  };
  char g[32];
  std::snprintf(g, sizeof g, "%.17g", solution.gamma);
  out << "solution dof=" << solution.dofs << " gamma=" << g << " K1=" << fmt(solution.K1)
      << " K2=" << fmt(solution.K2) << '\n';
  char buf[32];
  for (double v : solution.values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

void write_gradient_csv(std::ostream& out, const Mesh& mesh, const GradientField& field) {
  out << "triangle,cx,cy,gx,gy,magnitude\n";
  char buf[160];
  for (std::size_t t = 0; t < field.gradients.size(); ++t) {
    const Vec2 c = mesh.centroid(static_cast<int>(t));
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, c.x, c.y,
                  field.gradients[t].x, field.gradients[t].y, field.magnitude[t]);
    out << buf;
  }
}

HalfballResult halfball_scenario(double gammaHat, const ScalarField& data, double h,
                                 const SolveOptions& options) {
  if (!(gammaHat >= 0.0)) throw std::invalid_argument("gammaHat must be nonnegative");
  if (!data) throw std::invalid_argument("half-ball data is required");
  HalfballResult out;
  out.mesh = build_halfdisk_mesh(1.0, h);
  BoundarySpec spec;
  spec.mesh = &out.mesh;
  spec.conditions[BoundaryTag::Outer] = TagCondition::dirichlet(data);
  spec.conditions[BoundaryTag::Flat] =
      gammaHat == 0.0 ? TagCondition::dirichlet(data) : TagCondition::robin(gammaHat, data);
  const AssembledSystem sys = assemble(spec, options.parallel);
  out.solution = solve(sys, options);
  out.solution.gamma = gammaHat;
  const GradientField g = recover_gradient(out.solution, out.mesh);
  for (std::size_t t = 0; t < out.mesh.triangles.size(); ++t)
    if (norm(out.mesh.centroid(static_cast<int>(t))) < 0.25)
      out.maxInnerGradient = std::max(out.maxInnerGradient, g.magnitude[t]);
  return out;
}

}  // namespace neckfield
