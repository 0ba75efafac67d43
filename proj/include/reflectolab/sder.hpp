#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reflectolab/esp.hpp"
#include "reflectolab/path.hpp"
#include "reflectolab/rng.hpp"
#include "reflectolab/skorokhod.hpp"

namespace reflectolab {

/// Drift b and dispersion sigma of a reflected SDE. Evaluators must be pure
/// functions of the state. `dispersion` writes a J x N matrix row-major.
struct Coefficients {
  using Evaluator = std::function<void(std::span<const double> z, std::span<double> out)>;

  std::size_t state_dim = 0;
  std::size_t noise_dim = 0;
  Evaluator drift;
  Evaluator dispersion;
  /// Every evaluated coefficient entry must satisfy |value| <= bound.
  double bound = 1e8;
  /// Stable text identifying the coefficients; part of the spec hash.
  std::string description;

  /// b = 0, sigma = I_J.
  static Coefficients driftless_identity(std::size_t dim);
  /// b = 0, sigma = 0.
  static Coefficients zero(std::size_t dim);
  /// b = const, sigma = I_J.
  static Coefficients constant_drift(std::vector<double> drift);
  /// b(z) = M z with M given row-major (J x J), sigma = I_J.
  static Coefficients linear_drift(std::vector<double> matrix, std::size_t dim);
  /// Constant b and constant sigma (J x N, row-major).
  static Coefficients constant(std::vector<double> drift, std::vector<double> sigma,
                               std::size_t noise_dim);
};

/// The reflected SDE: ESP, coefficients and initial condition.
struct SderSpec {
  EspSpec esp;
  Coefficients coeffs;
  std::vector<double> initial;

  std::size_t dim() const { return esp_dim(esp); }
  /// Throws DomainError when dimensions disagree or the initial point lies outside G.
  void validate() const;
  /// Canonical text of the whole spec.
  std::string describe() const;
};

struct EulerConfig {
  double horizon = 1.0;
  std::size_t steps = 1024;  // power of two, >= 2
  std::uint64_t seed = 0;

  void validate() const;
};

/// Sampled solution on a common grid. Z = X + Y holds exactly.
struct PathBundle {
  Path B;
  Path X;
  Path Z;
  Path Y;
};

/// N-dimensional Brownian path on `grid`, increments sqrt(dt) * N(0, 1).
Path brownian_path(std::uint64_t seed, std::size_t noise_dim, const std::vector<double>& grid);

/// Euler-Maruyama stepper with the constraint applied after each full
/// increment. Draws noise in the same order as brownian_path.
class EulerWalker {
 public:
  EulerWalker(const SderSpec& spec, std::uint64_t seed);

  /// Advances by dt.
  void step(double dt);

  double time() const noexcept { return time_; }
  std::span<const double> brownian() const noexcept { return b_; }
  std::span<const double> x() const noexcept { return stepper_.x(); }
  std::span<const double> y() const noexcept { return stepper_.y(); }
  std::span<const double> z() const noexcept { return stepper_.z(); }
  const SderSpec& spec() const noexcept { return *spec_; }

 private:
  void check_bound(std::span<const double> values, const char* what) const;

  const SderSpec* spec_;
  NormalSource normals_;
  ConstraintStepper stepper_;
  double time_ = 0.0;
  std::vector<double> b_, db_, drift_, sigma_, x_next_;
};

/// Simulates (B, X, Z, Y) on the uniform grid of `config`.
PathBundle euler_sder(const SderSpec& spec, const EulerConfig& config);

/// Time-weighted fraction of grid intervals whose left endpoint lies within
/// `boundary_tol` of the boundary of G.
double occupation_fraction(const Path& z, const EspSpec& esp, double boundary_tol);

/// First grid time at which <v, Z> reaches `level`, bracketed by a sign change
/// of <v, Z> - level and reported as the bracket end closer in value.
std::optional<double> hitting_time(const Path& z, const EspSpec& esp, double level);

/// First grid index with |Z| >= m (the localizing time zeta^m), if any.
std::optional<std::size_t> exit_index(const Path& z, double m);

/// Prefix of `path` up to and including the localizing index of `z` for
/// level m; the whole path when |Z| stays below m.
Path truncate_at_exit(const Path& path, const Path& z, double m);

}  // namespace reflectolab
