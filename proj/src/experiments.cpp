#include "reflectolab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "reflectolab/errors.hpp"
#include "reflectolab/parallel.hpp"
#include "reflectolab/rng.hpp"
#include "reflectolab/sder.hpp"
#include "reflectolab/serialize.hpp"
#include "reflectolab/skorokhod.hpp"
#include "reflectolab/variation.hpp"

namespace reflectolab {

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

double euclid(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sq);
}

std::vector<double> default_start(const EspSpec& esp, double level) {
  const std::size_t J = esp_dim(esp);
  if (std::holds_alternative<ValleyDomain>(esp)) return {0.0, level};
  return std::vector<double>(J, level / static_cast<double>(J));
}

EnsembleLadder make_ladder(double horizon, int min_level, int max_level, std::size_t n_paths) {
  EnsembleLadder out;
  for (int n = min_level; n <= max_level; ++n) {
    out.levels.push_back(n);
    out.mesh.push_back(std::ldexp(horizon, -n));
  }
  out.per_path.resize(n_paths);
  return out;
}

void check_ladder_shape(int grid_exponent, int min_level, int max_level) {
  if (grid_exponent < 1 || grid_exponent > 30) throw DomainError("grid exponent must be in [1, 30]");
  if (min_level < 0 || max_level < min_level || max_level > grid_exponent)
    throw DomainError("ladder levels must satisfy 0 <= min <= max <= grid exponent");
}

}  // namespace

// -- stopping-time ladders -----------------------------------------------------

AlternatingTimes alternating_times(const Path& level_path, double eps, double delta0) {
  if (level_path.dim() != 1) throw DomainError("alternating_times: expected <v, Z> as a 1-D path");
  if (!(eps > delta0) || delta0 < 0) throw DomainError("alternating_times: need 0 <= delta0 < eps");
  AlternatingTimes out;
  bool seeking_upper = true;
  for (std::size_t i = 0; i < level_path.size(); ++i) {
    const double f = level_path(i, 0);
    if (seeking_upper && f >= eps) {
      out.tau.push_back(level_path.time(i));
      seeking_upper = false;
    }
    if (!seeking_upper && f <= delta0) {
      out.alpha.push_back(level_path.time(i));
      seeking_upper = true;
    }
  }
  return out;
}

NeighborTimes neighbor_times(const Path& level_path, double eps) {
  if (level_path.dim() != 1) throw DomainError("neighbor_times: expected <v, Z> as a 1-D path");
  if (!(eps > 0)) throw DomainError("neighbor_times: eps must be positive");
  if (std::abs(level_path(0, 0) - eps) > kDomainTol)
    throw DomainError("neighbor_times: path must start on H_eps");
  NeighborTimes out;
  out.beta.push_back(level_path.time(0));
  out.level.push_back(0);
  int k = 0;
  for (std::size_t i = 1; i < level_path.size(); ++i) {
    const double f = level_path(i, 0);
    const double lower = std::ldexp(eps, k - 1);
    const double upper = std::ldexp(eps, k + 1);
    if (f <= lower || f >= upper) {
      k += (f >= upper) ? 1 : -1;
      out.beta.push_back(level_path.time(i));
      out.level.push_back(k);
    }
  }
  return out;
}

// -- ensemble ladders ------------------------------------------------------------

std::vector<double> EnsembleLadder::level_values(std::size_t level_index) const {
  std::vector<double> v;
  v.reserve(per_path.size());
  for (const auto& p : per_path) v.push_back(p.at(level_index));
  return v;
}

std::vector<double> EnsembleLadder::medians() const {
  std::vector<double> m;
  for (std::size_t j = 0; j < levels.size(); ++j) m.push_back(median(level_values(j)));
  return m;
}

nlohmann::json to_json(const EnsembleLadder& ladder, const std::string& name) {
  nlohmann::json levels = nlohmann::json::array();
  for (std::size_t j = 0; j < ladder.levels.size(); ++j) {
    const auto v = ladder.level_values(j);
    levels.push_back({{"level", ladder.levels[j]},
                      {"mesh", ladder.mesh[j]},
                      {"q25", quantile(v, 0.25)},
                      {"median", quantile(v, 0.5)},
                      {"q75", quantile(v, 0.75)}});
  }
  return {{"quantity", name}, {"n_paths", ladder.per_path.size()}, {"levels", std::move(levels)}};
}

// -- hitting identity --------------------------------------------------------------

std::string HittingConfig::canonical() const {
  std::ostringstream s;
  s << "hitting;esp=" << describe(esp) << ";start=" << join(start) << ";eps=" << format_double(eps)
    << ";paths=" << n_paths << ";steps=" << steps << ";horizon=" << format_double(horizon)
    << ";doublings=" << max_doublings << ";delta0=" << format_double(delta0_factor) << ";seed=" << seed;
  return s.str();
}

HittingResult hitting_probability_experiment(const HittingConfig& config) {
  if (!(config.eps > 0) || config.eps > 1) throw DomainError("hitting: eps must lie in (0, 1]");
  if (config.n_paths == 0) throw DomainError("hitting: need at least one path");
  if (config.steps == 0 || !(config.horizon > 0) || config.max_doublings < 0 || config.max_doublings > 20)
    throw DomainError("hitting: invalid horizon settings");
  const std::size_t J = esp_dim(config.esp);
  const auto start = config.start.empty() ? default_start(config.esp, config.eps) : config.start;
  if (std::abs(level_value(config.esp, start) - config.eps) > kDomainTol)
    throw DomainError("hitting: start point must lie on H_eps");
  const SderSpec spec{config.esp, Coefficients::driftless_identity(J), start};
  spec.validate();

  const double dt = config.horizon / static_cast<double>(config.steps);
  const std::size_t max_steps = config.steps << config.max_doublings;
  const double delta0 = config.eps * config.delta0_factor;
  const double upper = 1.0;

  HittingResult result;
  result.outcomes.resize(config.n_paths);
  result.delta0 = delta0;
  result.target = config.eps;
  parallel_for(config.n_paths, config.workers, [&](std::size_t i) {
    EulerWalker walker(spec, derive_seed(config.seed, i));
    HittingOutcome& out = result.outcomes[i];
    for (std::size_t k = 0;; ++k) {
      const double f = level_value(config.esp, walker.z());
      if (f >= upper) {
        out.upper_first = true;
        break;
      }
      if (f <= delta0) break;
      if (k == max_steps) {
        out.capped = true;
        break;
      }
      walker.step(dt);
    }
    out.exit_time = walker.time();
  });

  std::vector<double> samples;
  std::size_t capped = 0;
  double longest = 0.0;
  for (const auto& o : result.outcomes) {
    longest = std::max(longest, o.exit_time);
    if (o.capped) {
      ++capped;
      continue;
    }
    samples.push_back(o.upper_first ? 1.0 : 0.0);
  }
  if (samples.empty()) throw DomainError("hitting: every path reached the horizon cap");
  result.capped_fraction = static_cast<double>(capped) / static_cast<double>(config.n_paths);
  result.summary = summarize(samples, config.seed, fnv1a_hex(config.canonical()));
  double horizon = config.horizon;
  while (horizon < longest && horizon < config.horizon * std::ldexp(1.0, config.max_doublings))
    horizon *= 2;
  result.final_horizon = horizon;
  return result;
}

// -- GPS blow-up -------------------------------------------------------------------------

std::string BlowupConfig::canonical() const {
  std::ostringstream s;
  s << "blowup;weights=" << join(weights.alpha()) << ";degenerate=" << degenerate
    << ";horizon=" << format_double(horizon) << ";grid=" << grid_exponent << ";levels=" << min_level
    << ".." << max_level << ";paths=" << n_paths << ";cmp=" << format_double(comparison_start) << ","
    << format_double(comparison_stop) << ";seed=" << seed;
  return s.str();
}

BlowupResult variation_blowup_experiment(const BlowupConfig& config) {
  check_ladder_shape(config.grid_exponent, config.min_level, config.max_level);
  if (!(config.comparison_stop < config.comparison_start) || !(config.comparison_stop > 0))
    throw DomainError("blowup: need 0 < comparison_stop < comparison_start");
  const std::size_t J = config.weights.dim();
  const auto coeffs = config.degenerate ? Coefficients::zero(J) : Coefficients::driftless_identity(J);
  const SderSpec origin{config.weights, coeffs, std::vector<double>(J, 0.0)};
  // Comparison starts at the vertex of face 1 on H_start, so pushing is active from t = 0.
  std::vector<double> face_start(J, 0.0);
  face_start[0] = config.comparison_start;
  const SderSpec comparison{config.weights, coeffs, face_start};
  origin.validate();
  comparison.validate();

  const std::size_t steps = std::size_t{1} << config.grid_exponent;
  const double dt = config.horizon / static_cast<double>(steps);
  BlowupResult result;
  result.origin_tv = make_ladder(config.horizon, config.min_level, config.max_level, config.n_paths);
  result.origin_qv = result.origin_tv;
  result.comparison_tv = result.origin_tv;
  result.config_hash = fnv1a_hex(config.canonical());
  std::vector<char> stopped(config.n_paths, 0);

  // Two ensembles share path indices; seeds for the comparison are offset so the
  // two are independent.
  parallel_for(2 * config.n_paths, config.workers, [&](std::size_t job) {
    const bool is_origin = job < config.n_paths;
    const std::size_t i = is_origin ? job : job - config.n_paths;
    const SderSpec& spec = is_origin ? origin : comparison;
    EulerWalker walker(spec, derive_seed(config.seed, is_origin ? i : i + (std::uint64_t{1} << 40)));
    DyadicAccumulator acc(config.grid_exponent, config.min_level, config.max_level, J, {1.0, 2.0});
    std::vector<double> frozen;
    acc.push(walker.y());
    for (std::size_t k = 1; k <= steps; ++k) {
      if (frozen.empty()) {
        walker.step(dt);
        if (!is_origin && level_value(spec.esp, walker.z()) <= config.comparison_stop)
          frozen.assign(walker.y().begin(), walker.y().end());
      }
      acc.push(frozen.empty() ? walker.y() : std::span<const double>(frozen));
    }
    if (is_origin) {
      result.origin_tv.per_path[i] = acc.sums(0);
      result.origin_qv.per_path[i] = acc.sums(1);
    } else {
      result.comparison_tv.per_path[i] = acc.sums(0);
      stopped[i] = frozen.empty() ? 0 : 1;
    }
  });
  result.comparison_stopped_fraction =
      static_cast<double>(std::count(stopped.begin(), stopped.end(), 1)) /
      static_cast<double>(config.n_paths);
  return result;
}

// -- neighbor-ladder lower bound ---------------------------------------------------------

std::string LadderBoundConfig::canonical() const {
  std::ostringstream s;
  s << "ladder;weights=" << join(weights.alpha()) << ";degenerate=" << degenerate
    << ";eps=" << join(eps_list) << ";paths=" << n_paths << ";fine=" << format_double(fine_dt_scale)
    << ";coarse=" << format_double(coarse_dt) << ";tmax=" << format_double(max_time)
    << ";delta0=" << format_double(delta0_factor) << ";seed=" << seed;
  return s.str();
}

std::vector<LadderBoundPoint> ladder_lower_bound_experiment(const LadderBoundConfig& config) {
  if (config.n_paths == 0 || config.eps_list.empty()) throw DomainError("ladder: need paths and eps values");
  if (!(config.fine_dt_scale > 0) || !(config.coarse_dt > 0) || !(config.max_time > 0))
    throw DomainError("ladder: step sizes and time cap must be positive");
  const std::size_t J = config.weights.dim();
  const auto coeffs = config.degenerate ? Coefficients::zero(J) : Coefficients::driftless_identity(J);
  const std::string hash = fnv1a_hex(config.canonical());
  std::vector<LadderBoundPoint> points;
  for (std::size_t e = 0; e < config.eps_list.size(); ++e) {
    const double eps = config.eps_list[e];
    if (!(eps > 0) || !(eps < 0.5)) throw DomainError("ladder: eps must lie in (0, 1/2)");
    const SderSpec spec{config.weights, coeffs, default_start(config.weights, eps)};
    spec.validate();
    const double fine_dt = eps * eps * config.fine_dt_scale;
    const double delta0 = eps * config.delta0_factor;
    std::vector<double> functional(config.n_paths, 0.0);
    std::vector<double> lower_first(config.n_paths, 0.0);
    std::vector<char> capped(config.n_paths, 0);
    const std::uint64_t seed = derive_seed(config.seed, 0x1000 + e);
    parallel_for(config.n_paths, config.workers, [&](std::size_t i) {
      EulerWalker walker(spec, derive_seed(seed, i));
      std::vector<double> y_prev(walker.y().begin(), walker.y().end());
      double variation = 0.0;
      double f = eps;
      // up to beta_1: first hit of H_{eps/2} or H_{2 eps}
      while (f > 0.5 * eps && f < 2.0 * eps) {
        if (walker.time() >= config.max_time) {
          capped[i] = 1;
          return;
        }
        walker.step(fine_dt);
        variation += euclid(walker.y(), y_prev);
        y_prev.assign(walker.y().begin(), walker.y().end());
        f = level_value(spec.esp, walker.z());
      }
      while (f > delta0 && f < 1.0) {
        if (walker.time() >= config.max_time) {
          capped[i] = 1;
          return;
        }
        walker.step(config.coarse_dt);
        f = level_value(spec.esp, walker.z());
      }
      if (f <= delta0) {
        lower_first[i] = 1.0;
        functional[i] = (1.0 - std::exp(-variation)) / eps;
      }
    });
    LadderBoundPoint point;
    point.eps = eps;
    point.functional = summarize(functional, seed, hash);
    point.lower_first = summarize(lower_first, seed, hash);
    point.proxy_mesh = fine_dt;
    point.capped_fraction = static_cast<double>(std::count(capped.begin(), capped.end(), 1)) /
                            static_cast<double>(config.n_paths);
    point.functional_samples = std::move(functional);
    point.lower_first_samples = std::move(lower_first);
    points.push_back(std::move(point));
  }
  return points;
}

// -- valley -------------------------------------------------------------------------------

std::string ValleyConfig::canonical() const {
  std::ostringstream s;
  s << "valley;domain=" << describe(domain) << ";horizon=" << format_double(horizon)
    << ";grid=" << grid_exponent << ";levels=" << min_level << ".." << max_level
    << ";paths=" << n_paths << ";seed=" << seed;
  return s.str();
}

ValleyResult valley_dirichlet_experiment(const ValleyConfig& config) {
  check_ladder_shape(config.grid_exponent, config.min_level, config.max_level);
  const SderSpec spec{config.domain, Coefficients::driftless_identity(2), {0.0, 0.0}};
  spec.validate();
  const std::size_t steps = std::size_t{1} << config.grid_exponent;
  const double dt = config.horizon / static_cast<double>(steps);
  ValleyResult result;
  result.y1_qv = make_ladder(config.horizon, config.min_level, config.max_level, config.n_paths);
  result.y_qv = result.y1_qv;
  result.y2_tv = result.y1_qv;
  result.config_hash = fnv1a_hex(config.canonical());
  parallel_for(config.n_paths, config.workers, [&](std::size_t i) {
    EulerWalker walker(spec, derive_seed(config.seed, i));
    DyadicAccumulator y_acc(config.grid_exponent, config.min_level, config.max_level, 2, {2.0});
    DyadicAccumulator y1_acc(config.grid_exponent, config.min_level, config.max_level, 1, {2.0});
    DyadicAccumulator y2_acc(config.grid_exponent, config.min_level, config.max_level, 1, {1.0});
    auto push = [&] {
      const auto y = walker.y();
      y_acc.push(y);
      y1_acc.push(y.subspan(0, 1));
      y2_acc.push(y.subspan(1, 1));
    };
    push();
    for (std::size_t k = 1; k <= steps; ++k) {
      walker.step(dt);
      push();
    }
    result.y_qv.per_path[i] = y_acc.sums(0);
    result.y1_qv.per_path[i] = y1_acc.sums(0);
    result.y2_tv.per_path[i] = y2_acc.sums(0);
  });
  return result;
}

// -- occupation ---------------------------------------------------------------------------

std::vector<double> OccupationResult::medians() const {
  std::vector<double> m;
  for (const auto& f : fractions) m.push_back(median(f));
  return m;
}

OccupationResult occupation_experiment(const OccupationConfig& config) {
  if (config.n_paths == 0 || config.tolerances.empty()) throw DomainError("occupation: need paths and tolerances");
  if (config.grid_exponent < 1 || config.grid_exponent > 30) throw DomainError("occupation: bad grid exponent");
  const SderSpec spec{HalfLine{}, Coefficients::driftless_identity(1), {0.0}};
  const std::size_t steps = std::size_t{1} << config.grid_exponent;
  const double dt = config.horizon / static_cast<double>(steps);
  OccupationResult result;
  result.tolerances = config.tolerances;
  result.fractions.assign(config.tolerances.size(), std::vector<double>(config.n_paths, 0.0));
  parallel_for(config.n_paths, config.workers, [&](std::size_t i) {
    EulerWalker walker(spec, derive_seed(config.seed, i));
    std::vector<std::size_t> near(config.tolerances.size(), 0);
    for (std::size_t k = 0; k < steps; ++k) {
      const double d = boundary_distance(spec.esp, walker.z());
      for (std::size_t j = 0; j < near.size(); ++j)
        if (d <= config.tolerances[j]) ++near[j];
      walker.step(dt);
    }
    for (std::size_t j = 0; j < near.size(); ++j)
      result.fractions[j][i] = static_cast<double>(near[j]) / static_cast<double>(steps);
  });
  return result;
}

// -- scheme consistency -------------------------------------------------------------------

SchemeResult scheme_consistency_experiment(const SchemeConfig& config) {
  if (config.weights.dim() != 2) throw DomainError("scheme consistency needs J = 2");
  for (int k : config.exponents)
    if (k < 1 || k > config.reference_exponent) throw DomainError("scheme: exponents must not exceed the reference");
  if (config.reference_exponent > 24) throw DomainError("scheme: reference exponent too large");
  SchemeResult result;
  result.exponents = config.exponents;
  result.distance_to_reference.assign(config.exponents.size(), std::vector<double>(config.n_paths));
  result.distance_same_grid = result.distance_to_reference;
  const auto grid = uniform_grid(config.horizon, std::size_t{1} << config.reference_exponent);
  parallel_for(config.n_paths, config.workers, [&](std::size_t i) {
    const Path psi = brownian_path(derive_seed(config.seed, i), 2, grid);
    const Path reference = gps_esm_2d_exact(psi, config.weights).constrained;
    for (std::size_t e = 0; e < config.exponents.size(); ++e) {
      const std::size_t stride = std::size_t{1} << (config.reference_exponent - config.exponents[e]);
      const Path coarse = psi.subsample(stride);
      const Path scheme = gps_esm_discrete(coarse, config.weights).constrained;
      const Path exact = gps_esm_2d_exact(coarse, config.weights).constrained;
      result.distance_same_grid[e][i] = sup_distance(scheme, exact);
      result.distance_to_reference[e][i] = sup_distance(scheme, reference.subsample(stride));
    }
  });
  return result;
}

// -- Xi oracle check ----------------------------------------------------------------------

OracleCheck xi_oracle_check(std::size_t length, std::size_t cases, std::uint64_t seed, std::size_t workers) {
  if (length < 1 || cases < 1) throw DomainError("xi check: need positive length and case count");
  std::vector<double> deviation(cases, 0.0);
  const auto grid = uniform_grid(1.0, std::max<std::size_t>(length, 2) - 1);
  parallel_for(cases, workers, [&](std::size_t c) {
    std::mt19937_64 engine(derive_seed(seed, c));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / static_cast<double>(grid.size())));
    const ValleyDomain domain(0.5 + 2.5 * unit(engine), 0.5 + 2.5 * unit(engine), 0.5 + 1.5 * unit(engine),
                              0.5 + 1.5 * unit(engine));
    const std::size_t n = grid.size();
    std::vector<double> height(n);
    height[0] = 0.5 * unit(engine);
    for (std::size_t i = 1; i < n; ++i) height[i] = height[i - 1] + normal(engine);
    const Path z2 = sm_one_dim(Path::scalar(grid, height)).constrained;
    std::vector<double> ell(n), r(n), psi(n);
    for (std::size_t i = 0; i < n; ++i) {
      ell[i] = domain.left(z2(i, 0));
      r[i] = domain.right(z2(i, 0));
    }
    psi[0] = ell[0] + (r[0] - ell[0]) * unit(engine);
    for (std::size_t i = 1; i < n; ++i) psi[i] = psi[i - 1] + normal(engine);
    const Path p = Path::scalar(grid, psi), l = Path::scalar(grid, ell), u = Path::scalar(grid, r);
    deviation[c] = sup_distance(xi_map(p, l, u), xi_map_reference(p, l, u));
  });
  return {cases, std::max<std::size_t>(length, 2), *std::max_element(deviation.begin(), deviation.end())};
}

}  // namespace reflectolab
