#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reflectolab/errors.hpp"
#include "reflectolab/experiments.hpp"
#include "reflectolab/parallel.hpp"
#include "reflectolab/rng.hpp"
#include "reflectolab/run_config.hpp"
#include "reflectolab/sder.hpp"
#include "reflectolab/serialize.hpp"
#include "reflectolab/variation.hpp"

namespace reflectolab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::int64_t kMaxSteps = std::int64_t{1} << 24;
constexpr std::int64_t kMaxPaths = 100'000'000;

// Artifacts of one run, written only after the run succeeds.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string contents) { files.emplace_back(std::move(name), std::move(contents)); }
  void add_json(std::string name, const json& doc) { add(std::move(name), doc.dump(2) + "\n"); }
};

int grid_exponent(const RunConfig& cfg, std::int64_t fallback) {
  const auto steps = cfg.get_int("steps", fallback, 2, kMaxSteps);
  if (!std::has_single_bit(static_cast<std::uint64_t>(steps)))
    throw ConfigError("'steps' must be a power of two");
  return std::countr_zero(static_cast<std::uint64_t>(steps));
}

std::pair<int, int> ladder_levels(const RunConfig& cfg, int min_default, int max_default, int grid) {
  const auto v = cfg.get_list("levels", {static_cast<double>(min_default), static_cast<double>(max_default)});
  if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
    throw ConfigError("'levels' expects MIN,MAX integers");
  const int lo = static_cast<int>(v[0]);
  const int hi = static_cast<int>(v[1]);
  if (lo < 0 || hi < lo || hi > grid) throw ConfigError("'levels' must satisfy 0 <= MIN <= MAX <= log2(steps)");
  return {lo, hi};
}

GpsWeights weights_from(const RunConfig& cfg) {
  const auto alpha = cfg.get_list("alpha", {0.5, 0.5});
  try {
    return GpsWeights(alpha);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("'alpha': ") + e.what());
  }
}

ValleyDomain valley_from(const RunConfig& cfg) {
  const auto v = cfg.get_list("valley", {2.0, 2.0, 1.0, 1.0});
  if (v.size() != 4) throw ConfigError("'valley' expects aL,aR,cL,cR");
  try {
    return ValleyDomain(v[0], v[1], v[2], v[3]);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("'valley': ") + e.what());
  }
}

EspSpec esp_from(const RunConfig& cfg, const std::string& fallback) {
  const auto kind = cfg.get_string("esp", fallback);
  if (kind == "half-line") return HalfLine{};
  if (kind == "gps") return weights_from(cfg);
  if (kind == "valley") return valley_from(cfg);
  throw ConfigError("'esp' must be half-line, gps or valley");
}

Coefficients coefficients_from(const RunConfig& cfg, std::size_t dim) {
  const auto name = cfg.get_string("coeffs", "driftless-identity");
  if (name == "driftless-identity") return Coefficients::driftless_identity(dim);
  if (name == "zero") return Coefficients::zero(dim);
  if (name == "constant-drift") {
    const auto b = cfg.get_list("drift", std::vector<double>(dim, 0.0));
    if (b.size() != dim) throw ConfigError("'drift' must have J entries");
    return Coefficients::constant_drift(b);
  }
  if (name == "linear-drift") {
    const auto m = cfg.get_list("drift-matrix", std::vector<double>(dim * dim, 0.0));
    if (m.size() != dim * dim) throw ConfigError("'drift-matrix' must have J*J entries");
    return Coefficients::linear_drift(m, dim);
  }
  throw ConfigError("'coeffs' must be driftless-identity, constant-drift, linear-drift or zero");
}

std::vector<double> start_from(const RunConfig& cfg, const EspSpec& esp) {
  const auto x0 = cfg.get_list("start", std::vector<double>(esp_dim(esp), 0.0));
  if (x0.size() != esp_dim(esp)) throw ConfigError("'start' must have J entries");
  if (!in_domain(esp, x0)) throw ConfigError("'start' lies outside the domain");
  return x0;
}

std::size_t paths_from(const RunConfig& cfg, std::int64_t fallback) {
  return static_cast<std::size_t>(cfg.get_int("paths", fallback, 1, kMaxPaths));
}

std::size_t workers_from(const RunConfig& cfg) {
  return static_cast<std::size_t>(cfg.get_int("workers", 0, 0, 4096));
}

json ratios(const std::vector<double>& medians, const std::vector<int>& levels, int gap) {
  json out = json::array();
  for (std::size_t j = 0; j + static_cast<std::size_t>(gap) < medians.size(); ++j) {
    const double lo = medians[j];
    const double hi = medians[j + static_cast<std::size_t>(gap)];
    out.push_back({{"from", levels[j]},
                   {"to", levels[j + static_cast<std::size_t>(gap)]},
                   {"ratio", lo > 0 ? hi / lo : 0.0}});
  }
  return out;
}

// -- commands ------------------------------------------------------------------------

void cmd_simulate(const RunConfig& cfg, Artifacts& art) {
  const EspSpec esp = esp_from(cfg, "gps");
  const SderSpec spec{esp, coefficients_from(cfg, esp_dim(esp)), start_from(cfg, esp)};
  const int k = grid_exponent(cfg, 1 << 10);
  const EulerConfig euler{cfg.get_double("horizon", 1.0, 1e-12, 1e12), std::size_t{1} << k, cfg.get_seed(1)};
  const double tol = cfg.get_double("tol", 1e-3, 0.0, 1e12);
  const PathBundle bundle = euler_sder(spec, euler);

  // <v, Z> against Gamma_1(<v, X>) at every grid point
  std::vector<double> level_x(bundle.X.size());
  for (std::size_t i = 0; i < bundle.X.size(); ++i) level_x[i] = level_value(esp, bundle.X.row(i));
  double identity_gap = 0.0;
  if (!std::holds_alternative<ValleyDomain>(esp)) {
    std::vector<double> shifted(level_x);
    const double x0 = shifted.front();
    for (double& v : shifted) v -= x0;  // Gamma_1 of the level path started at <v, Z(0)>
    double running = 0.0;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      running = std::max(running, -(x0 + shifted[i]));
      const double reflected = level_x[i] + running;
      identity_gap = std::max(identity_gap, std::abs(reflected - level_value(esp, bundle.Z.row(i))));
    }
  }
  const json meta = {{"spec", spec.describe()}, {"seed", euler.seed}, {"steps", euler.steps},
                     {"horizon", euler.horizon}};
  art.add("B.csv", path_to_csv(bundle.B));
  art.add("X.csv", path_to_csv(bundle.X));
  art.add("Z.csv", path_to_csv(bundle.Z));
  art.add("Y.csv", path_to_csv(bundle.Y));
  art.add_json("bundle.json", {{"B", path_to_json(bundle.B, meta)},
                               {"X", path_to_json(bundle.X, meta)},
                               {"Z", path_to_json(bundle.Z, meta)},
                               {"Y", path_to_json(bundle.Y, meta)}});
  const auto last = bundle.Z.row(bundle.Z.size() - 1);
  art.add_json("result.json", {{"command", "simulate"},
                               {"spec", spec.describe()},
                               {"steps", euler.steps},
                               {"horizon", euler.horizon},
                               {"seed", euler.seed},
                               {"occupation_fraction", occupation_fraction(bundle.Z, esp, tol)},
                               {"boundary_tol", tol},
                               {"level_identity_max_gap", identity_gap},
                               {"final_z", std::vector<double>(last.begin(), last.end())}});
}

void cmd_variation(const RunConfig& cfg, Artifacts& art) {
  const EspSpec esp = esp_from(cfg, "gps");
  const SderSpec spec{esp, coefficients_from(cfg, esp_dim(esp)), start_from(cfg, esp)};
  spec.validate();
  const int k = grid_exponent(cfg, 1 << 12);
  const double horizon = cfg.get_double("horizon", 1.0, 1e-12, 1e12);
  const auto [lo, hi] = ladder_levels(cfg, std::min(4, k), std::min(10, k), k);
  const double p = cfg.get_double("p", 2.0, 1e-6, 1e6);
  const std::size_t n_paths = paths_from(cfg, 20);
  const std::uint64_t seed = cfg.get_seed(1);
  const PartitionLadder ladder(horizon, lo, hi);
  const std::vector<std::string> names{"Z", "Y", "M", "A"};
  std::vector<std::vector<VariationReport>> reports(n_paths);
  std::vector<double> predicted(n_paths);
  parallel_for(n_paths, workers_from(cfg), [&](std::size_t i) {
    const PathBundle b = euler_sder(spec, {horizon, std::size_t{1} << k, derive_seed(seed, i)});
    const auto parts = dirichlet_parts(b, spec);
    const std::vector<const Path*> paths{&b.Z, &b.Y, &parts.martingale, &parts.finite_energy};
    for (std::size_t c = 0; c < names.size(); ++c)
      reports[i].push_back(variation_ladder(*paths[c], ladder, p, names[c], i));
    predicted[i] = dirichlet_decompose(b, spec, PartitionLadder(horizon, lo, lo)).predicted_qv;
  });
  std::string csv = "level,mesh,S_p,component,path_id\n";
  for (const auto& per_path : reports)
    for (const auto& r : per_path)
      for (const auto& l : r.levels)
        csv += std::to_string(l.level) + "," + format_double(l.mesh) + "," + format_double(l.sum) + "," +
               r.component + "," + std::to_string(r.path_id) + "\n";
  json components = json::object();
  for (std::size_t c = 0; c < names.size(); ++c) {
    json levels = json::array();
    for (std::size_t j = 0; j <= static_cast<std::size_t>(hi - lo); ++j) {
      std::vector<double> v;
      for (const auto& per_path : reports) v.push_back(per_path[c].levels[j].sum);
      levels.push_back({{"level", lo + static_cast<int>(j)},
                        {"mesh", ladder.mesh(lo + static_cast<int>(j))},
                        {"q05", quantile(v, 0.05)},
                        {"q25", quantile(v, 0.25)},
                        {"median", quantile(v, 0.5)},
                        {"q75", quantile(v, 0.75)},
                        {"q95", quantile(v, 0.95)}});
    }
    components[names[c]] = std::move(levels);
  }
  art.add("variation.csv", csv);
  art.add_json("result.json", {{"command", "variation"},
                               {"spec", spec.describe()},
                               {"p", p},
                               {"n_paths", n_paths},
                               {"seed", seed},
                               {"predicted_martingale_qv_median", median(predicted)},
                               {"components", components}});
}

void cmd_hitting(const RunConfig& cfg, Artifacts& art) {
  HittingConfig hc;
  hc.esp = esp_from(cfg, "gps");
  hc.eps = cfg.get_double("eps", 0.25, 1e-9, 1.0);
  hc.n_paths = paths_from(cfg, 20000);
  hc.steps = std::size_t{1} << grid_exponent(cfg, 1 << 14);
  hc.horizon = cfg.get_double("horizon", 4.0, 1e-12, 1e12);
  hc.seed = cfg.get_seed(1);
  hc.workers = workers_from(cfg);
  if (cfg.has("start")) {
    hc.start = start_from(cfg, hc.esp);
    if (std::abs(level_value(hc.esp, hc.start) - hc.eps) > kDomainTol)
      throw ConfigError("'start' must lie on H_eps");
  }
  const auto r = hitting_probability_experiment(hc);
  std::string csv = "path_id,upper_first,capped,exit_time\n";
  for (std::size_t i = 0; i < r.outcomes.size(); ++i)
    csv += std::to_string(i) + "," + (r.outcomes[i].upper_first ? "1" : "0") + "," +
           (r.outcomes[i].capped ? "1" : "0") + "," + format_double(r.outcomes[i].exit_time) + "\n";
  art.add("paths.csv", csv);
  const double dev = r.summary.deviation_from(r.target);
  art.add_json("result.json", {{"command", "hitting"},
                               {"esp", describe(hc.esp)},
                               {"eps", hc.eps},
                               {"summary", to_json(r.summary)},
                               {"target", r.target},
                               {"deviation_in_std_errors", dev},
                               {"within_3_std_errors", std::abs(dev) <= 3.0},
                               {"capped_fraction", r.capped_fraction},
                               {"final_horizon", r.final_horizon},
                               {"delta0", r.delta0},
                               {"dt", hc.horizon / static_cast<double>(hc.steps)}});
}

void cmd_blowup(const RunConfig& cfg, Artifacts& art) {
  BlowupConfig bc;
  bc.weights = weights_from(cfg);
  bc.grid_exponent = grid_exponent(cfg, 1 << 16);
  bc.horizon = cfg.get_double("horizon", 1.0, 1e-12, 1e12);
  std::tie(bc.min_level, bc.max_level) = ladder_levels(cfg, std::min(6, bc.grid_exponent),
                                                       std::min(12, bc.grid_exponent), bc.grid_exponent);
  bc.n_paths = paths_from(cfg, 200);
  bc.seed = cfg.get_seed(1);
  bc.workers = workers_from(cfg);
  bc.degenerate = cfg.get_string("coeffs", "driftless-identity") == "zero";
  const auto r = variation_blowup_experiment(bc);
  std::string csv = "ensemble,path_id,level,mesh,S_1,S_2\n";
  for (std::size_t i = 0; i < bc.n_paths; ++i)
    for (std::size_t j = 0; j < r.origin_tv.levels.size(); ++j)
      csv += "origin," + std::to_string(i) + "," + std::to_string(r.origin_tv.levels[j]) + "," +
             format_double(r.origin_tv.mesh[j]) + "," + format_double(r.origin_tv.per_path[i][j]) + "," +
             format_double(r.origin_qv.per_path[i][j]) + "\n";
  for (std::size_t i = 0; i < bc.n_paths; ++i)
    for (std::size_t j = 0; j < r.comparison_tv.levels.size(); ++j)
      csv += "comparison," + std::to_string(i) + "," + std::to_string(r.comparison_tv.levels[j]) + "," +
             format_double(r.comparison_tv.mesh[j]) + "," + format_double(r.comparison_tv.per_path[i][j]) +
             ",\n";
  art.add("paths.csv", csv);
  art.add_json("result.json", {{"command", "blowup"},
                               {"config_hash", r.config_hash},
                               {"origin_S1", to_json(r.origin_tv, "S_1(Y)")},
                               {"origin_S2", to_json(r.origin_qv, "S_2(Y)")},
                               {"comparison_S1", to_json(r.comparison_tv, "S_1(Y) stopped on H_1/2")},
                               {"origin_S1_ratio_2_levels", ratios(r.origin_tv.medians(), r.origin_tv.levels, 2)},
                               {"comparison_S1_ratio_2_levels",
                                ratios(r.comparison_tv.medians(), r.comparison_tv.levels, 2)},
                               {"comparison_stopped_fraction", r.comparison_stopped_fraction}});
}

void cmd_ladder(const RunConfig& cfg, Artifacts& art) {
  LadderBoundConfig lc;
  lc.weights = weights_from(cfg);
  lc.eps_list = cfg.get_list("eps", {0.2, 0.1, 0.05});
  lc.n_paths = paths_from(cfg, 2000);
  lc.seed = cfg.get_seed(1);
  lc.workers = workers_from(cfg);
  lc.degenerate = cfg.get_string("coeffs", "driftless-identity") == "zero";
  const auto points = ladder_lower_bound_experiment(lc);
  std::string csv = "eps,path_id,functional,lower_first\n";
  json per_eps = json::array();
  for (const auto& pt : points) {
    for (std::size_t i = 0; i < pt.functional_samples.size(); ++i)
      csv += format_double(pt.eps) + "," + std::to_string(i) + "," + format_double(pt.functional_samples[i]) +
             "," + format_double(pt.lower_first_samples[i]) + "\n";
    per_eps.push_back({{"eps", pt.eps},
                       {"functional", to_json(pt.functional)},
                       {"lower_first", to_json(pt.lower_first)},
                       {"proxy_mesh", pt.proxy_mesh},
                       {"capped_fraction", pt.capped_fraction}});
  }
  art.add("paths.csv", csv);
  art.add_json("result.json", {{"command", "ladder"}, {"points", per_eps}});
}

void cmd_valley(const RunConfig& cfg, Artifacts& art) {
  ValleyConfig vc;
  vc.domain = valley_from(cfg);
  vc.grid_exponent = grid_exponent(cfg, 1 << 16);
  vc.horizon = cfg.get_double("horizon", 1.0, 1e-12, 1e12);
  std::tie(vc.min_level, vc.max_level) = ladder_levels(cfg, std::min(6, vc.grid_exponent),
                                                       std::min(12, vc.grid_exponent), vc.grid_exponent);
  vc.n_paths = paths_from(cfg, 200);
  vc.seed = cfg.get_seed(1);
  vc.workers = workers_from(cfg);
  const auto r = valley_dirichlet_experiment(vc);
  std::string csv = "path_id,level,mesh,S2_Y1,S2_Y,S1_Y2\n";
  for (std::size_t i = 0; i < vc.n_paths; ++i)
    for (std::size_t j = 0; j < r.y1_qv.levels.size(); ++j)
      csv += std::to_string(i) + "," + std::to_string(r.y1_qv.levels[j]) + "," + format_double(r.y1_qv.mesh[j]) +
             "," + format_double(r.y1_qv.per_path[i][j]) + "," + format_double(r.y_qv.per_path[i][j]) + "," +
             format_double(r.y2_tv.per_path[i][j]) + "\n";
  art.add("paths.csv", csv);
  art.add_json("result.json", {{"command", "valley"},
                               {"domain", describe(vc.domain)},
                               {"config_hash", r.config_hash},
                               {"S2_Y1", to_json(r.y1_qv, "S_2(Y_1)")},
                               {"S2_Y", to_json(r.y_qv, "S_2(Y)")},
                               {"S1_Y2", to_json(r.y2_tv, "S_1(Y_2)")}});
}

bool cmd_xi_check(const RunConfig& cfg, Artifacts& art) {
  const auto n = static_cast<std::size_t>(cfg.get_int("n", 1024, 2, 1 << 16));
  const auto cases = static_cast<std::size_t>(cfg.get_int("cases", 1000, 1, 1'000'000));
  const auto r = xi_oracle_check(n, cases, cfg.get_seed(1), workers_from(cfg));
  constexpr double tolerance = 1e-10;
  const bool pass = r.max_abs_diff <= tolerance;
  art.add_json("result.json", {{"command", "xi-check"},
                               {"cases", r.cases},
                               {"length", r.length},
                               {"max_abs_diff", r.max_abs_diff},
                               {"tolerance", tolerance},
                               {"pass", pass}});
  return pass;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    Artifacts art;
    bool ok = true;
    const auto& c = config.command;
    if (c == "simulate")
      cmd_simulate(config, art);
    else if (c == "variation")
      cmd_variation(config, art);
    else if (c == "hitting")
      cmd_hitting(config, art);
    else if (c == "blowup")
      cmd_blowup(config, art);
    else if (c == "ladder")
      cmd_ladder(config, art);
    else if (c == "valley")
      cmd_valley(config, art);
    else if (c == "xi-check")
      ok = cmd_xi_check(config, art);
    else
      throw ConfigError("unknown command '" + c + "'");

    const std::string hash = config.hash();
    const fs::path dir = fs::path(config.get_string("out", "runs")) / (c + "-" + hash.substr(0, 12));
    json files = json::array();
    for (const auto& [name, contents] : art.files) {
      write_text_file(dir / name, contents);
      files.push_back(name);
    }
    json manifest = {{"tool", "reflectolab"},
                     {"version", REFLECTOLAB_VERSION},
                     {"command", c},
                     {"config_hash", hash},
                     {"seed", config.get_seed(1)},
                     {"config", config.values()},
                     {"files", files},
                     {"created_utc", utc_now()}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    out << dir.string() << "\n";
    if (!ok) {
      err << "reflectolab: " << c << " check failed, see " << (dir / "result.json").string() << "\n";
      return static_cast<int>(ExitCode::solver_failure);
    }
    return static_cast<int>(ExitCode::ok);
  } catch (const ConfigError& e) {
    err << "reflectolab: config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const DomainError& e) {
    err << "reflectolab: config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const UnsolvableStep& e) {
    err << "reflectolab: solver failure: " << e.what() << "\n";
    return static_cast<int>(ExitCode::solver_failure);
  } catch (const BoundViolation& e) {
    err << "reflectolab: solver failure: " << e.what() << "\n";
    return static_cast<int>(ExitCode::solver_failure);
  } catch (const CapacityError& e) {
    err << "reflectolab: capacity error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::capacity_error);
  } catch (const std::exception& e) {
    err << "reflectolab: error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::failure);
  }
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty() || args.front() == "--help" || args.front() == "-h") {
    err << usage_text();
    return args.empty() ? static_cast<int>(ExitCode::config_error) : static_cast<int>(ExitCode::ok);
  }
  RunConfig config;
  try {
    config = parse_command_line(args);
  } catch (const ConfigError& e) {
    err << "reflectolab: config error: " << e.what() << "\n" << usage_text();
    return static_cast<int>(ExitCode::config_error);
  }
  return run(config, out, err);
}

}  // namespace reflectolab
