#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reflectolab/esp.hpp"
#include "reflectolab/path.hpp"
#include "reflectolab/stats.hpp"

namespace reflectolab {

// ---------------------------------------------------------------------------
// Stopping-time ladders

/// Alternating hitting times of H_eps and H_0: tau_n = first time after
/// alpha_{n-1} with <v,Z> >= eps, alpha_n = first time after tau_n with
/// <v,Z> <= delta0 (the grid surrogate for H_0).
struct AlternatingTimes {
  std::vector<double> tau;
  std::vector<double> alpha;
};

/// Neighbor-ladder times: beta_0 = 0 and beta_n = first time after beta_{n-1}
/// at which <v,Z> reaches one of the two dyadic levels adjacent to the level
/// of Z(beta_{n-1}).
struct NeighborTimes {
  std::vector<double> beta;
  std::vector<int> level;  // k with <v,Z(beta_n)> on H_{2^k eps}
};

/// `level_path` is the one-dimensional path <v, Z>.
AlternatingTimes alternating_times(const Path& level_path, double eps, double delta0);
/// <v, Z(0)> must equal eps up to kDomainTol.
NeighborTimes neighbor_times(const Path& level_path, double eps);

// ---------------------------------------------------------------------------
// Ensemble ladders

/// Per-path S_p ladders of one quantity plus their ensemble medians.
struct EnsembleLadder {
  std::vector<int> levels;
  std::vector<double> mesh;
  std::vector<std::vector<double>> per_path;  // [path][level]
  std::vector<double> medians() const;
  std::vector<double> level_values(std::size_t level_index) const;
};

nlohmann::json to_json(const EnsembleLadder& ladder, const std::string& name);

// ---------------------------------------------------------------------------
// Hitting identity

struct HittingConfig {
  EspSpec esp = GpsWeights::uniform(2);
  std::vector<double> start;  // empty: eps/J in every coordinate
  double eps = 0.25;
  std::size_t n_paths = 20000;
  std::size_t steps = 1 << 14;  // per initial horizon
  double horizon = 4.0;
  int max_doublings = 3;
  double delta0_factor = 1e-2;  // H_0 is <v,Z> <= eps * delta0_factor
  std::uint64_t seed = 1;
  std::size_t workers = 0;

  std::string canonical() const;
};

struct HittingOutcome {
  bool upper_first = false;  // tau^0 >= tau^1
  bool capped = false;       // neither level reached before the horizon cap
  double exit_time = 0.0;
};

struct HittingResult {
  McSummary summary;  // estimate of P(tau^0 >= tau^1) over resolved paths
  double target = 0.0;
  double capped_fraction = 0.0;
  double delta0 = 0.0;
  double final_horizon = 0.0;
  std::vector<HittingOutcome> outcomes;
};

HittingResult hitting_probability_experiment(const HittingConfig& config);

// ---------------------------------------------------------------------------
// GPS from the origin: total-variation blow-up and zero quadratic variation

struct BlowupConfig {
  GpsWeights weights = GpsWeights::uniform(2);
  bool degenerate = false;  // b = 0, sigma = 0 instead of sigma = I
  double horizon = 1.0;
  int grid_exponent = 16;
  int min_level = 6;
  int max_level = 12;
  std::size_t n_paths = 200;
  double comparison_start = 1.0;  // comparison starts at comparison_start * e_1 ...
  double comparison_stop = 0.5;   // ... and is stopped on H_{1/2}
  std::uint64_t seed = 2;
  std::size_t workers = 0;

  std::string canonical() const;
};

struct BlowupResult {
  EnsembleLadder origin_tv;      // S_1(Y), origin ensemble
  EnsembleLadder origin_qv;      // S_2(Y), origin ensemble
  EnsembleLadder comparison_tv;  // S_1(Y), stopped comparison ensemble
  double comparison_stopped_fraction = 0.0;
  std::string config_hash;
};

BlowupResult variation_blowup_experiment(const BlowupConfig& config);

// ---------------------------------------------------------------------------
// Neighbor-ladder lower bound

struct LadderBoundConfig {
  GpsWeights weights = GpsWeights::uniform(2);
  bool degenerate = false;
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  std::size_t n_paths = 4000;
  double fine_dt_scale = 0x1p-14;  // dt = eps^2 * scale until beta_1
  double coarse_dt = 0x1p-12;      // dt after beta_1, until tau^0 or tau^1
  double max_time = 32.0;
  double delta0_factor = 1e-2;
  std::uint64_t seed = 3;
  std::size_t workers = 0;

  std::string canonical() const;
};

struct LadderBoundPoint {
  double eps = 0.0;
  McSummary functional;   // (1/eps) E[(1 - exp(-L(beta_1))) 1{tau^0 < tau^1}]
  McSummary lower_first;  // P(tau^0 < tau^1)
  double proxy_mesh = 0.0;  // grid mesh used for L(beta_1)
  double capped_fraction = 0.0;
  std::vector<double> functional_samples;  // per path; capped paths count as 0
  std::vector<double> lower_first_samples;
};

std::vector<LadderBoundPoint> ladder_lower_bound_experiment(const LadderBoundConfig& config);

// ---------------------------------------------------------------------------
// Valley domains

struct ValleyConfig {
  ValleyDomain domain{2.0, 2.0, 1.0, 1.0};
  double horizon = 1.0;
  int grid_exponent = 16;
  int min_level = 6;
  int max_level = 12;
  std::size_t n_paths = 200;
  std::uint64_t seed = 4;
  std::size_t workers = 0;

  std::string canonical() const;
};

struct ValleyResult {
  EnsembleLadder y1_qv;  // S_2(Y_1)
  EnsembleLadder y_qv;   // S_2(Y)
  EnsembleLadder y2_tv;  // S_1(Y_2)
  std::string config_hash;
};

ValleyResult valley_dirichlet_experiment(const ValleyConfig& config);

// ---------------------------------------------------------------------------
// Smaller studies

/// Occupation of the 1-D RBM near 0: per-tolerance ensemble of fractions.
struct OccupationConfig {
  std::size_t n_paths = 100;
  int grid_exponent = 16;
  double horizon = 1.0;
  std::vector<double> tolerances{1e-3, 5e-4};
  std::uint64_t seed = 5;
  std::size_t workers = 0;
};

struct OccupationResult {
  std::vector<double> tolerances;
  std::vector<std::vector<double>> fractions;  // [tol][path]
  std::vector<double> medians() const;
};

OccupationResult occupation_experiment(const OccupationConfig& config);

/// Discrete GPS scheme against the exact J = 2 solver on one Brownian path
/// per seed, sampled at several meshes.
struct SchemeConfig {
  GpsWeights weights = GpsWeights::uniform(2);
  std::size_t n_paths = 200;
  double horizon = 1.0;
  std::vector<int> exponents{10, 14};  // mesh horizon * 2^-k
  int reference_exponent = 18;         // exact solver on this finer sample is the reference
  std::uint64_t seed = 6;
  std::size_t workers = 0;
};

struct SchemeResult {
  std::vector<int> exponents;
  std::vector<std::vector<double>> distance_to_reference;   // [exponent][path]
  std::vector<std::vector<double>> distance_same_grid;      // [exponent][path]
};

SchemeResult scheme_consistency_experiment(const SchemeConfig& config);

/// Streaming vs O(n^2) Xi on random (psi, l, r) triples built from simulated
/// valley barriers. Returns the largest pointwise deviation.
struct OracleCheck {
  std::size_t cases = 0;
  std::size_t length = 0;
  double max_abs_diff = 0.0;
};

OracleCheck xi_oracle_check(std::size_t length, std::size_t cases, std::uint64_t seed,
                            std::size_t workers = 0);

}  // namespace reflectolab
