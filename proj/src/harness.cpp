#include "neckfield/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "neckfield/decomposition.hpp"
#include "neckfield/errors.hpp"
#include "neckfield/theory.hpp"

namespace neckfield {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw ConfigError(key + ": not a number: '" + t + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v)) throw ConfigError(key + ": expected an integer");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(to_double(key, item));
  return out;
}

Compensation to_compensation(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "none") return Compensation::None;
  if (t == "sqrt") return Compensation::Sqrt;
  if (t == "log") return Compensation::Log;
  throw ConfigError(key + ": expected none, sqrt or log");
}

using Setter = std::function<void(SweepConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"domain.geometry",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         if (v != "symmetric" && v != "pair") throw ConfigError(k + ": expected symmetric or pair");
         c.geometry = v;
       }},
      {"domain.mode",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         if (v == "planar") c.mode = DomainMode::Planar;
         else if (v == "axisymmetric") c.mode = DomainMode::Axisymmetric;
         else throw ConfigError(k + ": expected planar or axisymmetric");
       }},
      {"domain.dimension", [](SweepConfig& c, auto& k, auto& v) { c.dimension = to_int(k, v); }},
      {"domain.r1", [](SweepConfig& c, auto& k, auto& v) { c.r1 = to_double(k, v); }},
      {"domain.r2", [](SweepConfig& c, auto& k, auto& v) { c.r2 = to_double(k, v); }},
      {"domain.outer_radius", [](SweepConfig& c, auto& k, auto& v) { c.outerRadius = to_double(k, v); }},
      {"domain.neck_radius", [](SweepConfig& c, auto& k, auto& v) { c.neckRadius = to_double(k, v); }},
      {"boundary.phi",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         if (v != "odd" && v != "vertical") throw ConfigError(k + ": expected odd or vertical");
         c.phi = v;
       }},
      {"sweep.eps", [](SweepConfig& c, auto& k, auto& v) { c.eps = to_list(k, v); }},
      {"sweep.gamma", [](SweepConfig& c, auto& k, auto& v) { c.gammas = to_list(k, v); }},
      {"sweep.allow_large_gamma", [](SweepConfig& c, auto& k, auto& v) { c.allowLargeGamma = to_bool(k, v); }},
      {"sweep.timing", [](SweepConfig& c, auto& k, auto& v) { c.timing = to_bool(k, v); }},
      {"sweep.jobs", [](SweepConfig& c, auto& k, auto& v) { c.jobs = to_int(k, v); }},
      {"mesh.theta", [](SweepConfig& c, auto& k, auto& v) { c.grading.theta = to_double(k, v); }},
      {"mesh.h_max", [](SweepConfig& c, auto& k, auto& v) { c.grading.h_max = to_double(k, v); }},
      {"mesh.band", [](SweepConfig& c, auto& k, auto& v) { c.grading.band = to_double(k, v); }},
      {"mesh.h_boundary", [](SweepConfig& c, auto& k, auto& v) { c.grading.h_boundary = to_double(k, v); }},
      {"mesh.grade", [](SweepConfig& c, auto& k, auto& v) { c.grading.grade = to_double(k, v); }},
      {"mesh.max_elements",
       [](SweepConfig& c, auto& k, auto& v) {
         c.grading.max_elements = static_cast<std::size_t>(to_double(k, v));
       }},
      {"solver.tol", [](SweepConfig& c, auto& k, auto& v) { c.tol = to_double(k, v); }},
      {"solver.max_iterations", [](SweepConfig& c, auto& k, auto& v) { c.maxIterations = to_int(k, v); }},
      {"solver.preconditioner",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         if (v == "jacobi") c.preconditioner = PreconditionerKind::Jacobi;
         else if (v == "ic") c.preconditioner = PreconditionerKind::IncompleteCholesky;
         else throw ConfigError(k + ": expected jacobi or ic");
       }},
      {"thresholds.recombination",
       [](SweepConfig& c, auto& k, auto& v) { c.recombinationFlag = to_double(k, v); }},
      {"output.path", [](SweepConfig& c, auto&, auto& v) { c.output = v; }},
      {"halfball.gammas", [](SweepConfig& c, auto& k, auto& v) { c.halfballGammas = to_list(k, v); }},
      {"halfball.h", [](SweepConfig& c, auto& k, auto& v) { c.halfballH = to_double(k, v); }},
      {"halfball.data",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         if (v != "trig" && v != "linear") throw ConfigError(k + ": expected trig or linear");
         c.halfballData = v;
       }},
      {"fit.x", [](SweepConfig& c, auto&, auto& v) { c.fitX = v; }},
      {"fit.y", [](SweepConfig& c, auto&, auto& v) { c.fitY = v; }},
      {"fit.compensation", [](SweepConfig& c, auto& k, auto& v) { c.compensation = to_compensation(k, v); }},
      {"fit.input", [](SweepConfig& c, auto&, auto& v) { c.fitInput = v; }},
      {"assert.slope_min", [](SweepConfig& c, auto& k, auto& v) { c.checks.slopeMin = to_double(k, v); }},
      {"assert.slope_max", [](SweepConfig& c, auto& k, auto& v) { c.checks.slopeMax = to_double(k, v); }},
      {"assert.band_max", [](SweepConfig& c, auto& k, auto& v) { c.checks.bandMax = to_double(k, v); }},
      {"assert.variation_max", [](SweepConfig& c, auto& k, auto& v) { c.checks.variationMax = to_double(k, v); }},
      {"assert.recombination_max",
       [](SweepConfig& c, auto& k, auto& v) { c.checks.recombinationMax = to_double(k, v); }},
      {"assert.flux_signs", [](SweepConfig& c, auto& k, auto& v) { c.checks.fluxSigns = to_bool(k, v); }},
      {"assert.row_sum_min", [](SweepConfig& c, auto& k, auto& v) { c.checks.rowSumMin = to_double(k, v); }},
      {"assert.row_sum_max", [](SweepConfig& c, auto& k, auto& v) { c.checks.rowSumMax = to_double(k, v); }},
      {"assert.a11_band_max", [](SweepConfig& c, auto& k, auto& v) { c.checks.a11BandMax = to_double(k, v); }},
      {"assert.neck_offset_max",
       [](SweepConfig& c, auto& k, auto& v) { c.checks.neckOffsetMax = to_double(k, v); }},
      {"assert.lower_bound_min",
       [](SweepConfig& c, auto& k, auto& v) { c.checks.lowerBoundMin = to_double(k, v); }},
      {"assert.final_relative_max",
       [](SweepConfig& c, auto& k, auto& v) { c.checks.finalRelativeMax = to_double(k, v); }},
      {"assert.monotone", [](SweepConfig& c, auto& k, auto& v) { c.checks.monotone = to_bool(k, v); }},
      {"assert.ratio_max", [](SweepConfig& c, auto& k, auto& v) { c.checks.ratioMax = to_double(k, v); }},
  };
  return table;
}

double compensate(double x, double y, Compensation c) {
  switch (c) {
    case Compensation::Sqrt: return y * std::sqrt(x);
    case Compensation::Log: return y * x * std::abs(std::log(x));
    case Compensation::None: break;
  }
  return y;
}

double band_of(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_flag(std::string& flags, const char* flag) {
  if (!flags.empty()) flags += ';';
  flags += flag;
}

}  // namespace

void SweepConfig::validate() const {
  if (kind == ScenarioKind::TheoryBattery) return;
  if (kind == ScenarioKind::Halfball) {
    if (halfballGammas.empty()) throw ConfigError("halfball.gammas is empty");
    for (double g : halfballGammas)
      if (!(g >= 0.0)) throw ConfigError("halfball.gammas must be nonnegative");
    if (!(halfballH > 0.0) || halfballH > 0.5) throw ConfigError("halfball.h must lie in (0, 0.5]");
    return;
  }
  if (eps.empty()) throw ConfigError("sweep.eps is empty");
  if (gammas.empty()) throw ConfigError("sweep.gamma is empty");
  for (double e : eps)
    if (!(e > 0.0 && e < 0.25)) throw ConfigError("sweep.eps values must lie in (0, 1/4)");
  for (double g : gammas)
    if (!(g > 0.0 && g < 0.25)) throw ConfigError("sweep.gamma values must lie in (0, 1/4)");
  if (dimension < 2) throw ConfigError("domain.dimension must be at least 2");
  if (mode == DomainMode::Planar && dimension != 2)
    throw ConfigError("planar mode requires domain.dimension = 2");
  if (!(tol >= 1e-14 && tol <= 1e-6)) throw ConfigError("solver.tol must lie in [1e-14, 1e-6]");
  if (maxIterations < 0) throw ConfigError("solver.max_iterations must be nonnegative");
  if (jobs < 1) throw ConfigError("sweep.jobs must be at least 1");
  if (kind == ScenarioKind::GammaLimit && eps.size() != 1)
    throw ConfigError("gamma-limit runs take exactly one eps value");
  try {
    grading.validate();
    const DomainSpec dom = make_domain(*this, eps.front());
    const NeckProfile prof = profile_from_domain(dom, neckRadius);
    prof.validate();
    const double g0 = gamma0(prof, dimension);
    if (!allowLargeGamma && kind == ScenarioKind::Sweep)
      for (double g : gammas)
        if (g >= g0)
          throw ConfigError("gamma " + fmt(g) + " is not below the threshold " + fmt(g0) +
                            " (set sweep.allow_large_gamma = true to run anyway)");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::string> scenario_names() {
  return {"upper-bound-2d",        "upper-bound-axi3d",   "lower-bound-symmetric",
          "gamma-limit",           "halfball-uniformity", "theory-battery"};
}

SweepConfig scenario(const std::string& name) {
  SweepConfig c;
  c.scenario = name;
  if (name == "upper-bound-2d") {
    c.eps = {4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3};
    c.gammas = {1e-8};
    c.grading.theta = 0.2;
    c.checks.slopeMin = -0.6;
    c.checks.slopeMax = -0.4;
  } else if (name == "upper-bound-axi3d") {
    c.mode = DomainMode::Axisymmetric;
    c.dimension = 3;
    c.eps = {1e-2, 1e-3, 1e-4};
    c.gammas = {1e-8};
    c.fitX = "epsPlusGamma";
    c.compensation = Compensation::Log;
    c.checks.bandMax = 4.0;
  } else if (name == "lower-bound-symmetric") {
    c.eps = {1e-2, 1e-3, 1e-4};
    c.gammas = {1e-2, 1e-3, 1e-4};
    c.fitX = "epsPlusGamma";
    c.compensation = Compensation::Sqrt;
    c.checks.bandMax = 3.0;
    c.checks.fluxSigns = true;
    c.checks.rowSumMin = 0.05;
    c.checks.rowSumMax = 50.0;
    c.checks.a11BandMax = 5.0;
    c.checks.neckOffsetMax = 10.0;
    c.checks.lowerBoundMin = 0.01;
  } else if (name == "gamma-limit") {
    c.kind = ScenarioKind::GammaLimit;
    c.eps = {1e-2};
    c.gammas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    c.checks.monotone = true;
    c.checks.finalRelativeMax = 1e-3;
  } else if (name == "halfball-uniformity") {
    c.kind = ScenarioKind::Halfball;
    c.halfballGammas = {1.0, 1e-1, 1e-2, 1e-3, 1e-4};
    c.checks.ratioMax = 2.0;
  } else if (name == "theory-battery") {
    c.kind = ScenarioKind::TheoryBattery;
  } else {
    std::string list;
    for (const auto& n : scenario_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown scenario '" + name + "'; presets: " + list);
  }
  return c;
}

SweepConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineNo = 0;
  std::string preset;
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineNo) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "scenario.name") preset = value;
    else entries.emplace_back(key, value);
  }
  SweepConfig c = preset.empty() ? SweepConfig{} : scenario(preset);
  for (const auto& [key, value] : entries) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
    it->second(c, key, value);
  }
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

DomainSpec make_domain(const SweepConfig& config, double eps) {
  if (config.geometry == "pair")
    return pair_domain(eps, config.r1, config.r2, config.outerRadius, config.mode, config.dimension);
  return symmetric_domain(eps, config.mode, config.dimension);
}

ScalarField make_phi(const SweepConfig& config, double eps) {
  if (config.phi == "vertical") return [](Vec2 p) { return p.y; };
  return [eps](Vec2 p) { return p.y - eps / 2.0; };
}

SolveOptions solve_options(const SweepConfig& config, bool parallel) {
  SolveOptions o;
  o.tol = config.tol;
  o.max_iterations = config.maxIterations;
  o.preconditioner = config.preconditioner;
  o.parallel = parallel;
  return o;
}

SweepRecord run_point(const SweepConfig& config, double eps, double gamma, bool parallel) {
  const auto start = std::chrono::steady_clock::now();
  SweepRecord rec;
  rec.n = config.dimension;
  rec.eps = eps;
  rec.gamma = gamma;
  try {
    const DomainSpec dom = make_domain(config, eps);
    const NeckProfile prof = profile_from_domain(dom, config.neckRadius);
    if (gamma >= gamma0(prof, config.dimension)) append_flag(rec.flags, "gamma_above_threshold");
    const Mesh mesh = build_mesh(dom, prof, config.grading);
    const ComponentSetup setup{&mesh,  &prof, dom.weight_exponent(), gamma, make_phi(config, eps),
                               solve_options(config, parallel)};
    const DecompositionResult d = decompose(setup);
    const GradientField g = recover_gradient(d.full.values, mesh, &prof, {0.0}, parallel);
    rec.dof = d.full.dofs;
    rec.maxGrad = g.maxMagnitude;
    rec.argmaxX = g.argmax.x;
    rec.argmaxY = g.argmax.y;
    rec.midgapGrad = std::abs(g.neckSamples.front().dn);
    rec.K1 = d.constants.K1;
    rec.K2 = d.constants.K2;
    rec.K1minusK2 = d.constants.difference;
    rec.a11 = d.flux.a[0][0];
    rec.a12 = d.flux.a[0][1];
    rec.a21 = d.flux.a[1][0];
    rec.a22 = d.flux.a[1][1];
    rec.b1 = d.flux.b[0];
    rec.b2 = d.flux.b[1];
    rec.recombinationResidual = d.recombinationResidual;
    rec.iterations = d.full.iterations;
    if (!d.flux.signs_ok()) append_flag(rec.flags, "flux_signs");
    if (!(rec.recombinationResidual <= config.recombinationFlag))
      append_flag(rec.flags, "recombination");
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  if (config.timing)
    rec.wallTime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, int jobs) {
  config.validate();
  std::vector<std::pair<double, double>> points;
  for (double e : config.eps)
    for (double g : config.gammas) points.emplace_back(e, g);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<SweepRecord> rows(points.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  // with one worker the kernels parallelize internally; with a pool each point runs serially
  const bool inner = workers == 1;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++)
      rows[i] = run_point(config, points[i].first, points[i].second, inner);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

const std::vector<std::string> kSweepColumns = {
    "n",   "eps", "gamma", "dof", "maxGrad", "argmaxX", "argmaxY", "midgapGrad", "K1", "K2",
    "K1minusK2", "a11", "a12", "a21", "a22", "b1", "b2", "recombinationResidual", "iterations",
    "wallTime", "flags", "error"};

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& rows) {
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) out << (i ? "," : "") << kSweepColumns[i];
  out << '\n';
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.n << ',' << fmt(r.eps) << ',' << fmt(r.gamma) << ',' << r.dof << ',' << fmt(r.maxGrad)
        << ',' << fmt(r.argmaxX) << ',' << fmt(r.argmaxY) << ',' << fmt(r.midgapGrad) << ','
        << fmt(r.K1) << ',' << fmt(r.K2) << ',' << fmt(r.K1minusK2) << ',' << fmt(r.a11) << ','
        << fmt(r.a12) << ',' << fmt(r.a21) << ',' << fmt(r.a22) << ',' << fmt(r.b1) << ','
        << fmt(r.b2) << ',' << fmt(r.recombinationResidual) << ',' << r.iterations << ','
        << fmt(r.wallTime) << ',' << r.flags << ',' << err << '\n';
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sweep table is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(trim(cell));
  }
  if (header != kSweepColumns) throw ConfigError("sweep table header does not match");
  std::vector<SweepRecord> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < kSweepColumns.size()) cells.emplace_back();
    auto num = [&](int i) { return to_double(kSweepColumns[i], cells[i]); };
    SweepRecord r;
    r.n = static_cast<int>(num(0));
    r.eps = num(1);
    r.gamma = num(2);
    r.dof = static_cast<int>(num(3));
    r.maxGrad = num(4);
    r.argmaxX = num(5);
    r.argmaxY = num(6);
    r.midgapGrad = num(7);
    r.K1 = num(8);
    r.K2 = num(9);
    r.K1minusK2 = num(10);
    r.a11 = num(11);
    r.a12 = num(12);
    r.a21 = num(13);
    r.a22 = num(14);
    r.b1 = num(15);
    r.b2 = num(16);
    r.recombinationResidual = num(17);
    r.iterations = static_cast<int>(num(18));
    r.wallTime = num(19);
    r.flags = cells[20];
    r.error = cells[21];
    rows.push_back(std::move(r));
  }
  return rows;
}

double column_value(const SweepRecord& r, const std::string& column) {
  static const std::map<std::string, std::function<double(const SweepRecord&)>> columns = {
      {"n", [](auto& r) { return double(r.n); }},
      {"eps", [](auto& r) { return r.eps; }},
      {"gamma", [](auto& r) { return r.gamma; }},
      {"epsPlusGamma", [](auto& r) { return r.eps + r.gamma; }},
      {"dof", [](auto& r) { return double(r.dof); }},
      {"maxGrad", [](auto& r) { return r.maxGrad; }},
      {"argmaxX", [](auto& r) { return r.argmaxX; }},
      {"argmaxY", [](auto& r) { return r.argmaxY; }},
      {"midgapGrad", [](auto& r) { return r.midgapGrad; }},
      {"K1", [](auto& r) { return r.K1; }},
      {"K2", [](auto& r) { return r.K2; }},
      {"K1minusK2", [](auto& r) { return r.K1minusK2; }},
      {"a11", [](auto& r) { return r.a11; }},
      {"a12", [](auto& r) { return r.a12; }},
      {"a21", [](auto& r) { return r.a21; }},
      {"a22", [](auto& r) { return r.a22; }},
      {"b1", [](auto& r) { return r.b1; }},
      {"b2", [](auto& r) { return r.b2; }},
      {"recombinationResidual", [](auto& r) { return r.recombinationResidual; }},
      {"iterations", [](auto& r) { return double(r.iterations); }},
      {"wallTime", [](auto& r) { return r.wallTime; }},
  };
  const auto it = columns.find(column);
  if (it == columns.end()) throw ConfigError("unknown column '" + column + "'");
  return it->second(r);
}

RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& y,
                 Compensation compensation) {
  if (x.size() != y.size()) throw std::invalid_argument("fit columns differ in length");
  if (x.size() < 3) throw std::invalid_argument("rate fit needs at least three points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n), comp(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("rate fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    comp[i] = compensate(x[i], y[i], compensation);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::domain_error("rate fit needs distinct x values");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.rSquared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  f.bandRatio = band_of(comp);
  return f;
}

RateFit fit_rate(const std::vector<SweepRecord>& table, const std::string& xColumn,
                 const std::string& yColumn, Compensation compensation) {
  std::vector<double> x, y;
  for (const auto& r : table) {
    if (!r.error.empty()) continue;
    x.push_back(column_value(r, xColumn));
    y.push_back(column_value(r, yColumn));
  }
  return fit_rate(x, y, compensation);
}

GammaLimitReport run_gamma_limit(const SweepConfig& config) {
  config.validate();
  GammaLimitReport rep;
  rep.eps = config.eps.front();
  std::vector<double> gammas = config.gammas;
  std::sort(gammas.begin(), gammas.end(), std::greater<>());
  const DomainSpec dom = make_domain(config, rep.eps);
  const NeckProfile prof = profile_from_domain(dom, config.neckRadius);
  const Mesh mesh = build_mesh(dom, prof, config.grading);
  const ComponentSetup setup{&mesh,  &prof, dom.weight_exponent(), 0.0, make_phi(config, rep.eps),
                             solve_options(config, true)};
  rep.rows = gamma_limit(setup, gammas);
  return rep;
}

void write_gamma_limit_csv(std::ostream& out, const GammaLimitReport& report) {
  out << "eps,gamma,distance,relative\n";
  for (const auto& r : report.rows)
    out << fmt(report.eps) << ',' << fmt(r.gamma) << ',' << fmt(r.distance) << ','
        << fmt(r.relative) << '\n';
}

std::vector<HalfballRow> run_halfball(const SweepConfig& config) {
  config.validate();
  ScalarField data;
  if (config.halfballData == "linear") data = [](Vec2 p) { return p.x + 2.0 * p.y; };
  else data = [](Vec2 p) { return std::sin(2.0 * p.x) + std::cos(3.0 * p.y); };
  std::vector<HalfballRow> rows;
  for (double g : config.halfballGammas) {
    const HalfballResult r = halfball_scenario(g, data, config.halfballH, solve_options(config, true));
    rows.push_back({g, r.maxInnerGradient, r.solution.dofs, r.solution.iterations});
  }
  return rows;
}

void write_halfball_csv(std::ostream& out, const std::vector<HalfballRow>& rows) {
  out << "gammaHat,maxInnerGradient,dof,iterations\n";
  for (const auto& r : rows)
    out << fmt(r.gammaHat) << ',' << fmt(r.maxInnerGradient) << ',' << r.dof << ','
        << r.iterations << '\n';
}

std::vector<CheckOutcome> evaluate_checks(const SweepConfig& config,
                                          const std::vector<SweepRecord>& rows) {
  const AssertSpec& a = config.checks;
  std::vector<CheckOutcome> out;
  int failed = 0;
  for (const auto& r : rows)
    if (!r.error.empty()) ++failed;
  out.push_back({"points_solved", failed == 0, double(failed), 0.0});
  if (failed) return out;

  const bool wantFit = !std::isnan(a.slopeMin) || !std::isnan(a.slopeMax) || !std::isnan(a.bandMax);
  if (wantFit) {
    const RateFit f = fit_rate(rows, config.fitX, config.fitY, config.compensation);
    if (!std::isnan(a.slopeMin)) out.push_back({"slope_min", f.slope >= a.slopeMin, f.slope, a.slopeMin});
    if (!std::isnan(a.slopeMax)) out.push_back({"slope_max", f.slope <= a.slopeMax, f.slope, a.slopeMax});
    if (!std::isnan(a.bandMax)) out.push_back({"band_max", f.bandRatio <= a.bandMax, f.bandRatio, a.bandMax});
  }
  if (!std::isnan(a.variationMax)) {
    std::vector<double> y;
    for (const auto& r : rows) y.push_back(column_value(r, config.fitY));
    const double v = band_of(y) - 1.0;
    out.push_back({"variation_max", v <= a.variationMax, v, a.variationMax});
  }
  if (!std::isnan(a.recombinationMax)) {
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.recombinationResidual);
    out.push_back({"recombination_max", worst <= a.recombinationMax, worst, a.recombinationMax});
  }
  if (a.fluxSigns) {
    int bad = 0;
    for (const auto& r : rows)
      if (!(r.a11 > 0.0 && r.a22 > 0.0 && r.a12 < 0.0 && r.a21 < 0.0)) ++bad;
    out.push_back({"flux_signs", bad == 0, double(bad), 0.0});
  }
  if (!std::isnan(a.rowSumMin) || !std::isnan(a.rowSumMax)) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : rows)
      for (double s : {r.a11 + r.a12, r.a21 + r.a22}) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    if (!std::isnan(a.rowSumMin)) out.push_back({"row_sum_min", lo >= a.rowSumMin, lo, a.rowSumMin});
    if (!std::isnan(a.rowSumMax)) out.push_back({"row_sum_max", hi <= a.rowSumMax, hi, a.rowSumMax});
  }
  if (!std::isnan(a.a11BandMax)) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.a11 * rho_n(r.n, r.eps, r.gamma));
    const double band = band_of(v);
    out.push_back({"a11_band_max", band <= a.a11BandMax, band, a.a11BandMax});
  }
  if (!std::isnan(a.neckOffsetMax)) {
    double worst = 0.0;
    for (const auto& r : rows) {
      const NeckProfile prof = profile_from_domain(make_domain(config, r.eps), config.neckRadius);
      worst = std::max(worst, std::abs(r.a11 - neck_integral(prof, r.gamma, prof.R / 2.0, r.n)));
    }
    out.push_back({"neck_offset_max", worst <= a.neckOffsetMax, worst, a.neckOffsetMax});
  }
  if (!std::isnan(a.lowerBoundMin)) {
    double flux = std::numeric_limits<double>::infinity(), jump = flux;
    for (const auto& r : rows) {
      flux = std::min(flux, std::abs(r.b1 - r.b2));
      jump = std::min(jump, std::abs(r.K1minusK2) / rho_n(r.n, r.eps, r.gamma));
    }
    out.push_back({"flux_gap_min", flux >= a.lowerBoundMin, flux, a.lowerBoundMin});
    out.push_back({"constant_gap_min", jump >= a.lowerBoundMin, jump, a.lowerBoundMin});
  }
  return out;
}

std::vector<CheckOutcome> evaluate_checks(const SweepConfig& config, const GammaLimitReport& report) {
  const AssertSpec& a = config.checks;
  std::vector<CheckOutcome> out;
  if (a.monotone) {
    int bad = 0;
    for (std::size_t i = 1; i < report.rows.size(); ++i)
      if (!(report.rows[i].distance < report.rows[i - 1].distance)) ++bad;
    out.push_back({"strictly_decreasing", bad == 0, double(bad), 0.0});
  }
  if (!std::isnan(a.finalRelativeMax) && !report.rows.empty()) {
    const double last = report.rows.back().relative;
    out.push_back({"final_relative_max", last <= a.finalRelativeMax, last, a.finalRelativeMax});
  }
  return out;
}

std::vector<CheckOutcome> evaluate_checks(const SweepConfig& config,
                                          const std::vector<HalfballRow>& rows) {
  std::vector<CheckOutcome> out;
  if (!std::isnan(config.checks.ratioMax) && !rows.empty()) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.maxInnerGradient);
    const double ratio = band_of(v);
    out.push_back({"ratio_max", ratio <= config.checks.ratioMax, ratio, config.checks.ratioMax});
  }
  return out;
}

void write_checks_json(std::ostream& out, const std::vector<CheckOutcome>& checks) {
  nlohmann::ordered_json doc;
  doc["passed"] = std::all_of(checks.begin(), checks.end(), [](auto& c) { return c.passed; });
  auto& list = doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"limit", c.limit}});
  out << doc.dump(2) << '\n';
}

}  // namespace neckfield
