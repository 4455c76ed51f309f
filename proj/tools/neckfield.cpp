#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "neckfield/decomposition.hpp"
#include "neckfield/errors.hpp"
#include "neckfield/harness.hpp"
#include "neckfield/meshgen.hpp"
#include "neckfield/theory.hpp"

namespace nf = neckfield;

namespace {

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kThreshold = 3 };

struct Options {
  std::string command;
  std::string config;
  std::string out;
  int jobs = 0;
  bool assert_mode = false;
};

// --out wins over output.path; "-" or nothing means stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw nf::ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int report_checks(const std::vector<nf::CheckOutcome>& checks, bool assert_mode) {
  nf::write_checks_json(std::cerr, checks);
  if (!assert_mode) return kOk;
  for (const auto& c : checks)
    if (!c.passed) return kThreshold;
  return kOk;
}

struct Point {
  nf::DomainSpec domain;
  nf::NeckProfile profile;
  nf::Mesh mesh;
};

Point first_point(const nf::SweepConfig& cfg) {
  Point p;
  p.domain = nf::make_domain(cfg, cfg.eps.front());
  p.profile = nf::profile_from_domain(p.domain, cfg.neckRadius);
  p.mesh = nf::build_mesh(p.domain, p.profile, cfg.grading);
  return p;
}

nf::ComponentSetup setup_for(const nf::SweepConfig& cfg, const Point& p) {
  return {&p.mesh, &p.profile, p.domain.weight_exponent(), cfg.gammas.front(),
          nf::make_phi(cfg, cfg.eps.front()), nf::solve_options(cfg, true)};
}

int cmd_mesh(const nf::SweepConfig& cfg, std::ostream& out) {
  const Point p = first_point(cfg);
  nf::write_mesh(out, p.mesh);
  const auto q = nf::mesh_quality(p.mesh, p.profile, cfg.grading.band_for(p.profile));
  std::fprintf(stderr, "nodes %zu triangles %zu min angle %.2f max neck ratio %.3f\n",
               p.mesh.nodes.size(), p.mesh.triangles.size(), q.min_angle_deg, q.max_neck_ratio);
  return kOk;
}

int cmd_solve(const nf::SweepConfig& cfg, std::ostream& out) {
  const Point p = first_point(cfg);
  nf::RobinProblem problem{&p.mesh, cfg.gammas.front(), nf::odd_boundary_data(cfg.eps.front()),
                           p.domain.weight_exponent()};
  problem.data.phi = nf::make_phi(cfg, cfg.eps.front());
  const nf::Solution s = nf::solve(nf::assemble(problem), nf::solve_options(cfg, true));
  nf::write_solution(out, s);
  std::fprintf(stderr, "dofs %d iterations %d residual %.3e\n", s.dofs, s.iterations,
               s.relative_residual);
  return kOk;
}

int cmd_decompose(const nf::SweepConfig& cfg, std::ostream& out, bool assert_mode) {
  const Point p = first_point(cfg);
  const nf::DecompositionResult d = nf::decompose(setup_for(cfg, p));
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\"K1\": %.17g, \"K2\": %.17g, \"K1minusK2\": %.17g, "
                "\"recombinationResidual\": %.17g, \"flux\": ",
                d.constants.K1, d.constants.K2, d.constants.difference, d.recombinationResidual);
  out << buf;
  nf::write_flux_json(out, d.flux);
  out << "}\n";
  std::vector<nf::CheckOutcome> checks;
  if (!std::isnan(cfg.checks.recombinationMax))
    checks.push_back({"recombination_max", d.recombinationResidual <= cfg.checks.recombinationMax,
                      d.recombinationResidual, cfg.checks.recombinationMax});
  if (cfg.checks.fluxSigns)
    checks.push_back({"flux_signs", d.flux.signs_ok(), d.flux.signs_ok() ? 0.0 : 1.0, 0.0});
  return report_checks(checks, assert_mode);
}

int cmd_sweep(const nf::SweepConfig& cfg, std::ostream& out, int jobs, bool assert_mode) {
  switch (cfg.kind) {
    case nf::ScenarioKind::TheoryBattery: {
      const auto rep = nf::run_theory_battery();
      nf::write_battery_json(out, rep);
      return assert_mode && !rep.passed() ? kThreshold : kOk;
    }
    case nf::ScenarioKind::GammaLimit: {
      const auto rep = nf::run_gamma_limit(cfg);
      nf::write_gamma_limit_csv(out, rep);
      return report_checks(nf::evaluate_checks(cfg, rep), assert_mode);
    }
    case nf::ScenarioKind::Halfball: {
      const auto rows = nf::run_halfball(cfg);
      nf::write_halfball_csv(out, rows);
      return report_checks(nf::evaluate_checks(cfg, rows), assert_mode);
    }
    case nf::ScenarioKind::Sweep: break;
  }
  const auto rows = nf::run_sweep(cfg, jobs);
  nf::write_sweep_csv(out, rows);
  int rc = report_checks(nf::evaluate_checks(cfg, rows), assert_mode);
  for (const auto& r : rows)
    if (!r.error.empty()) {
      std::fprintf(stderr, "point eps=%g gamma=%g failed: %s\n", r.eps, r.gamma, r.error.c_str());
      if (rc == kOk) rc = kSolver;
    }
  return rc;
}

int cmd_fit(const nf::SweepConfig& cfg, std::ostream& out, int jobs, bool assert_mode) {
  std::vector<nf::SweepRecord> rows;
  if (!cfg.fitInput.empty()) {
    std::ifstream in(cfg.fitInput);
    if (!in) throw nf::ConfigError("cannot open fit input '" + cfg.fitInput + "'");
    rows = nf::read_sweep_csv(in);
  } else {
    rows = nf::run_sweep(cfg, jobs);
  }
  const nf::RateFit f = nf::fit_rate(rows, cfg.fitX, cfg.fitY, cfg.compensation);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\"x\": \"%s\", \"y\": \"%s\", \"slope\": %.17g, \"intercept\": %.17g, "
                "\"rSquared\": %.17g, \"bandRatio\": %.17g}\n",
                cfg.fitX.c_str(), cfg.fitY.c_str(), f.slope, f.intercept, f.rSquared, f.bandRatio);
  out << buf;
  return report_checks(nf::evaluate_checks(cfg, rows), assert_mode);
}

int run(const Options& opt) {
  nf::SweepConfig cfg;
  try {
    cfg = opt.command == "check-theory" && opt.config.empty() ? nf::scenario("theory-battery")
                                                              : nf::load_config(opt.config);
    if (opt.command == "check-theory") cfg.kind = nf::ScenarioKind::TheoryBattery;
    cfg.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  }
  const int jobs = opt.jobs > 0 ? opt.jobs : cfg.jobs;
  try {
    Sink sink(opt.out.empty() ? cfg.output : opt.out);
    std::ostream& out = sink.get();
    if (opt.command == "mesh") return cmd_mesh(cfg, out);
    if (opt.command == "solve") return cmd_solve(cfg, out);
    if (opt.command == "decompose") return cmd_decompose(cfg, out, opt.assert_mode);
    if (opt.command == "fit") return cmd_fit(cfg, out, jobs, opt.assert_mode);
    return cmd_sweep(cfg, out, jobs, opt.assert_mode);
  } catch (const nf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin interface conductivity between nearly touching inclusions"};
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"mesh", "solve", "decompose", "sweep", "fit", "check-theory"}) {
    auto* sub = app.add_subcommand(name);
    const bool optional = std::string(name) == "check-theory";
    auto* c = sub->add_option("--config", opt.config, "flat key = value configuration file");
    if (!optional) c->required();
    sub->add_option("--out", opt.out, "output path (default: output.path or stdout)");
    sub->add_option("--jobs", opt.jobs, "sweep workers")->check(CLI::PositiveNumber);
    sub->add_flag("--assert", opt.assert_mode, "exit 3 when a configured threshold fails");
    sub->callback([&opt, name] { opt.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  return run(opt);
}
