#include "neckfield/decomposition.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace neckfield {

namespace {

void require_setup(const ComponentSetup& s) {
  if (!s.mesh) throw std::invalid_argument("component setup has no mesh");
  if (!s.phi) throw std::invalid_argument("component setup has no outer data");
}

BoundarySpec fixed_spec(const ComponentSetup& s, double g1, double g2, const ScalarField& outer) {
  BoundarySpec spec;
  spec.mesh = s.mesh;
  spec.weightExponent = s.weightExponent;
  spec.conditions[BoundaryTag::Outer] = TagCondition::dirichlet(outer);
  spec.conditions[BoundaryTag::Inclusion1] = TagCondition::robin(s.gamma, [g1](Vec2) { return g1; });
  spec.conditions[BoundaryTag::Inclusion2] = TagCondition::robin(s.gamma, [g2](Vec2) { return g2; });
  return spec;
}

BoundarySpec free_spec(const ComponentSetup& s, double gamma) {
  BoundarySpec spec;
  spec.mesh = s.mesh;
  spec.weightExponent = s.weightExponent;
  spec.conditions[BoundaryTag::Outer] = TagCondition::dirichlet(s.phi);
  spec.conditions[BoundaryTag::Inclusion1] = TagCondition::free_robin(gamma);
  spec.conditions[BoundaryTag::Inclusion2] = TagCondition::free_robin(gamma);
  return spec;
}

// Runs independent jobs, concurrently when allowed. Inner kernels fall back to
// serial inside the team, which leaves results unchanged.
void run_jobs(std::vector<std::function<void()>>& jobs, bool parallel) {
  const int n = static_cast<int>(jobs.size());
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      jobs[i]();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double energy_norm(const CsrMatrix& k, const std::vector<double>& v) {
  return std::sqrt(std::max(0.0, volume_flux(k, v, v)));
}

}  // namespace

Components solve_components(const ComponentSetup& setup) {
  require_setup(setup);
  if (!(setup.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const ScalarField zero = [](Vec2) { return 0.0; };
  const BoundarySpec specs[3] = {fixed_spec(setup, 1.0, 0.0, zero), fixed_spec(setup, 0.0, 1.0, zero),
                                 fixed_spec(setup, 0.0, 0.0, setup.phi)};
  Components out;
  Solution* targets[3] = {&out.u1, &out.u2, &out.u3};
  SolveOptions inner = setup.options;
  std::vector<std::function<void()>> jobs;
  for (int i = 0; i < 3; ++i)
    jobs.push_back([&, i] {
      const AssembledSystem sys = assemble(specs[i], inner.parallel);
      *targets[i] = solve(sys, inner);
      if (i == 0) out.stiffness = sys.stiffness;
    });
  run_jobs(jobs, setup.options.parallel);
  return out;
}

std::vector<double> flux_cutoff(const Mesh& mesh, const NeckProfile& profile, int inclusion) {
  if (inclusion != 1 && inclusion != 2) throw std::invalid_argument("inclusion index must be 1 or 2");
  const BoundaryTag own = inclusion == 1 ? BoundaryTag::Inclusion1 : BoundaryTag::Inclusion2;
  const std::vector<int> seeds = mesh.boundary_nodes(own);
  if (seeds.empty()) throw std::invalid_argument("mesh has no nodes on the requested inclusion");
  const int n = static_cast<int>(mesh.nodes.size());
  const double R = profile.R;
  const double blend = 0.5 * R;
  const std::vector<double> dist = graph_distance(mesh, seeds);

  std::vector<double> psi(n, 0.0);
  for (int v = 0; v < n; ++v) {
    const Vec2 p = mesh.nodes[v];
    const double far = std::max(0.0, 1.0 - dist[v] / blend);
    const double r = std::abs(p.x);
    double value = far;
    if (r <= R + blend) {
      const double lower = profile.f2.value(r), upper = profile.eps + profile.f1.value(r);
      if (p.y >= lower && p.y <= upper) {
        double ramp = (p.y - lower) / (upper - lower);
        if (inclusion == 2) ramp = 1.0 - ramp;
        const double weight = r <= R ? 1.0 : 1.0 - (r - R) / blend;
        value = weight * ramp + (1.0 - weight) * far;
      }
    }
    psi[v] = value;
  }
  for (const auto& e : mesh.boundaryEdges) {
    if (e.tag == BoundaryTag::Axis) continue;
    const double value = e.tag == own ? 1.0 : 0.0;
    psi[e.a] = psi[e.b] = value;
  }
  // own boundary wins at shared corner nodes
  for (int v : seeds) psi[v] = 1.0;
  return psi;
}

double FluxMatrix::norm() const {
  double s = 0.0;
  for (const auto& row : a)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

double volume_flux(const CsrMatrix& k, const std::vector<double>& psi, const std::vector<double>& u) {
  if (static_cast<int>(psi.size()) != k.rows || static_cast<int>(u.size()) != k.cols)
    throw std::invalid_argument("field size does not match the stiffness matrix");
  std::vector<double> ku(u.size());
  kernels::serial::spmv(k, u.data(), ku.data());
  return kernels::serial::dot(psi.data(), ku.data(), psi.size());
}

FluxMatrix flux_matrix(const Components& c, const Mesh& mesh, const NeckProfile& profile) {
  const std::vector<double> psi[2] = {flux_cutoff(mesh, profile, 1), flux_cutoff(mesh, profile, 2)};
  const std::vector<double>* u[2] = {&c.u1.values, &c.u2.values};
  FluxMatrix f;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) f.a[i][j] = volume_flux(c.stiffness, psi[i], *u[j]);
    f.b[i] = volume_flux(c.stiffness, psi[i], c.u3.values);
  }
  f.det = f.a[0][0] * f.a[1][1] - f.a[0][1] * f.a[1][0];
  f.a11Positive = f.a[0][0] > 0.0;
  f.a22Positive = f.a[1][1] > 0.0;
  f.a12Negative = f.a[0][1] < 0.0;
  f.a21Negative = f.a[1][0] < 0.0;
  f.columnSums = {f.a[0][0] + f.a[1][0], f.a[0][1] + f.a[1][1]};
  return f;
}

FreeConstants free_constants(const FluxMatrix& f) {
  const double scale = f.norm();
  if (f.det == 0.0 || !(std::abs(f.det) >= 1e-14 * scale * scale))
    throw std::domain_error("flux system is singular");
  const auto& a = f.a;
  const auto& b = f.b;
  FreeConstants k;
  k.K1 = (-b[0] * a[1][1] + b[1] * a[0][1]) / f.det;
  k.K2 = (-b[1] * a[0][0] + b[0] * a[1][0]) / f.det;
  k.difference = (b[1] * (a[0][1] + a[0][0]) - b[0] * (a[1][0] + a[1][1])) / f.det;
  return k;
}

double recombine_check(const std::vector<double>& u, const Components& c, double K1, double K2) {
  const std::size_t n = u.size();
  if (c.u1.values.size() != n || c.u2.values.size() != n || c.u3.values.size() != n)
    throw std::invalid_argument("recombination fields live on different meshes");
  double worst = 0.0;
  for (std::size_t v = 0; v < n; ++v)
    worst = std::max(worst, std::abs(u[v] - (K1 * c.u1.values[v] + K2 * c.u2.values[v] + c.u3.values[v])));
  return worst;
}

DecompositionResult decompose(const ComponentSetup& setup) {
  require_setup(setup);
  if (!setup.profile) throw std::invalid_argument("component setup has no profile");
  DecompositionResult r;
  std::vector<std::function<void()>> jobs;
  jobs.push_back([&] {
    ComponentSetup inner = setup;
    r.components = solve_components(inner);
  });
  jobs.push_back([&] {
    const AssembledSystem sys = assemble(free_spec(setup, setup.gamma), setup.options.parallel);
    r.full = solve(sys, setup.options);
  });
  run_jobs(jobs, setup.options.parallel);
  r.flux = flux_matrix(r.components, *setup.mesh, *setup.profile);
  r.constants = free_constants(r.flux);
  r.recombinationResidual = recombine_check(r.full.values, r.components, r.constants.K1, r.constants.K2);
  return r;
}

PerfectSolution perfect_solver(const ComponentSetup& setup) {
  require_setup(setup);
  if (!setup.profile) throw std::invalid_argument("component setup has no profile");
  BoundarySpec spec;
  spec.mesh = setup.mesh;
  spec.weightExponent = setup.weightExponent;
  spec.conditions[BoundaryTag::Outer] = TagCondition::dirichlet(setup.phi);
  spec.conditions[BoundaryTag::Inclusion1] = TagCondition::floating();
  spec.conditions[BoundaryTag::Inclusion2] = TagCondition::floating();
  const AssembledSystem sys = assemble(spec, setup.options.parallel);
  PerfectSolution out;
  out.solution = solve(sys, setup.options);
  out.values = out.solution.values;
  out.K1 = out.solution.K1.value();
  out.K2 = out.solution.K2.value();
  const double un = energy_norm(sys.stiffness, out.values);
  for (int i = 0; i < 2; ++i) {
    const auto psi = flux_cutoff(*setup.mesh, *setup.profile, i + 1);
    const double flux = volume_flux(sys.stiffness, psi, out.values);
    const double scale = energy_norm(sys.stiffness, psi) * un;
    out.relativeFlux[i] = scale > 0.0 ? std::abs(flux) / scale : 0.0;
  }
  return out;
}

std::vector<GammaLimitRow> gamma_limit(const ComponentSetup& setup, const std::vector<double>& gammas) {
  require_setup(setup);
  if (gammas.empty()) throw std::invalid_argument("gamma list is empty");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0)) throw std::invalid_argument("gamma values must be positive");
    if (i > 0 && !(gammas[i] < gammas[i - 1]))
      throw std::invalid_argument("gamma values must be strictly decreasing");
  }
  const PerfectSolution ref = perfect_solver(setup);
  const double ref_norm = l2_norm(*setup.mesh, setup.weightExponent, ref.values);
  std::vector<GammaLimitRow> rows(gammas.size());
  std::vector<std::function<void()>> jobs;
  SolveOptions inner = setup.options;
  for (std::size_t i = 0; i < gammas.size(); ++i)
    jobs.push_back([&, i] {
      const AssembledSystem sys = assemble(free_spec(setup, gammas[i]), inner.parallel);
      const Solution s = solve(sys, inner);
      std::vector<double> diff(s.values.size());
      for (std::size_t v = 0; v < diff.size(); ++v) diff[v] = s.values[v] - ref.values[v];
      rows[i].gamma = gammas[i];
      rows[i].distance = l2_norm(*setup.mesh, setup.weightExponent, diff);
      rows[i].relative = ref_norm > 0.0 ? rows[i].distance / ref_norm : rows[i].distance;
    });
  run_jobs(jobs, setup.options.parallel);
  return rows;
}

namespace {

constexpr int kFiberPieces = 16;

std::vector<double> fiber_averages(const std::function<double(Vec2)>& f, const NeckProfile& profile,
                                   const std::vector<double>& xps) {
  std::vector<double> out;
  out.reserve(xps.size());
  for (double xp : xps) {
    const double r = std::abs(xp);
    if (r > profile.R) throw std::out_of_range("fiber lies outside the neck |x'| <= R");
    const double lower = profile.f2.value(r), upper = profile.eps + profile.f1.value(r);
    const double h = (upper - lower) / kFiberPieces;
    double s = 0.0;
    for (int k = 0; k < kFiberPieces; ++k) {
      const double a = lower + k * h;
      s += boost::math::quadrature::gauss<double, 8>::integrate(
          [&](double y) { return f(Vec2{xp, y}); }, a, a + h);
    }
    out.push_back(s / (upper - lower));
  }
  return out;
}

}  // namespace

std::vector<double> vertical_average(const ScalarField& field, const NeckProfile& profile,
                                     const std::vector<double>& xps) {
  if (!field) throw std::invalid_argument("vertical average needs a field");
  return fiber_averages(field, profile, xps);
}

std::vector<double> vertical_average(const std::vector<double>& nodal, const Mesh& mesh,
                                     const NeckProfile& profile, const std::vector<double>& xps) {
  if (nodal.size() != mesh.nodes.size()) throw std::invalid_argument("field does not match the mesh");
  const MeshLocator locator(mesh);
  return fiber_averages([&](Vec2 p) { return locator.interpolate(nodal, p); }, profile, xps);
}

void write_flux_json(std::ostream& out, const FluxMatrix& f) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  auto flag = [](bool b) { return b ? "true" : "false"; };
  out << "{\n  \"a\": [[" << num(f.a[0][0]) << ", " << num(f.a[0][1]) << "], [" << num(f.a[1][0])
      << ", " << num(f.a[1][1]) << "]],\n  \"b\": [" << num(f.b[0]) << ", " << num(f.b[1])
      << "],\n  \"det\": " << num(f.det) << ",\n  \"columnSums\": [" << num(f.columnSums[0])
      << ", " << num(f.columnSums[1]) << "],\n  \"signFlags\": {\"a11Positive\": "
      << flag(f.a11Positive) << ", \"a22Positive\": " << flag(f.a22Positive)
      << ", \"a12Negative\": " << flag(f.a12Negative) << ", \"a21Negative\": "
      << flag(f.a21Negative) << "}\n}\n";
}

}  // namespace neckfield
