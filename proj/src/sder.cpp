#include "reflectolab/sder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "reflectolab/errors.hpp"
#include "reflectolab/serialize.hpp"

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

void identity_dispersion(std::span<const double>, std::span<double> out, std::size_t dim) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < dim; ++i) out[i * dim + i] = 1.0;
}

}  // namespace

Coefficients Coefficients::driftless_identity(std::size_t dim) {
  Coefficients c;
  c.state_dim = dim;
  c.noise_dim = dim;
  c.drift = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  c.dispersion = [dim](std::span<const double> z, std::span<double> out) { identity_dispersion(z, out, dim); };
  c.description = "driftless-identity";
  return c;
}

Coefficients Coefficients::zero(std::size_t dim) {
  Coefficients c;
  c.state_dim = dim;
  c.noise_dim = dim;
  c.drift = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  c.dispersion = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  c.description = "zero";
  return c;
}

Coefficients Coefficients::constant_drift(std::vector<double> drift) {
  const std::size_t dim = drift.size();
  Coefficients c;
  c.state_dim = dim;
  c.noise_dim = dim;
  c.description = "constant-drift(" + join(drift) + ")";
  c.drift = [b = std::move(drift)](std::span<const double>, std::span<double> out) {
    std::copy(b.begin(), b.end(), out.begin());
  };
  c.dispersion = [dim](std::span<const double> z, std::span<double> out) { identity_dispersion(z, out, dim); };
  return c;
}

Coefficients Coefficients::linear_drift(std::vector<double> matrix, std::size_t dim) {
  if (matrix.size() != dim * dim) throw DomainError("linear drift matrix must be J x J");
  Coefficients c;
  c.state_dim = dim;
  c.noise_dim = dim;
  c.description = "linear-drift(" + join(matrix) + ")";
  c.drift = [m = std::move(matrix), dim](std::span<const double> z, std::span<double> out) {
    for (std::size_t i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < dim; ++j) acc += m[i * dim + j] * z[j];
      out[i] = acc;
    }
  };
  c.dispersion = [dim](std::span<const double> z, std::span<double> out) { identity_dispersion(z, out, dim); };
  return c;
}

Coefficients Coefficients::constant(std::vector<double> drift, std::vector<double> sigma,
                                    std::size_t noise_dim) {
  const std::size_t dim = drift.size();
  if (noise_dim == 0 || sigma.size() != dim * noise_dim)
    throw DomainError("dispersion matrix must be J x N");
  Coefficients c;
  c.state_dim = dim;
  c.noise_dim = noise_dim;
  c.description = "constant(" + join(drift) + ";" + join(sigma) + ")";
  c.drift = [b = std::move(drift)](std::span<const double>, std::span<double> out) {
    std::copy(b.begin(), b.end(), out.begin());
  };
  c.dispersion = [s = std::move(sigma)](std::span<const double>, std::span<double> out) {
    std::copy(s.begin(), s.end(), out.begin());
  };
  return c;
}

void SderSpec::validate() const {
  const std::size_t J = dim();
  if (coeffs.state_dim != J) throw DomainError("coefficients dimension does not match the ESP");
  if (coeffs.noise_dim == 0) throw DomainError("noise dimension must be positive");
  if (!coeffs.drift || !coeffs.dispersion) throw DomainError("coefficient evaluators missing");
  if (initial.size() != J) throw DomainError("initial condition has the wrong dimension");
  if (!in_domain(esp, initial)) throw DomainError("initial condition outside G");
}

std::string SderSpec::describe() const {
  return reflectolab::describe(esp) + ";" + coeffs.description + ";x0=" + join(initial);
}

void EulerConfig::validate() const {
  if (!(horizon > 0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive");
  if (steps < 2 || !std::has_single_bit(steps)) throw DomainError("steps must be a power of two >= 2");
}

Path brownian_path(std::uint64_t seed, std::size_t noise_dim, const std::vector<double>& grid) {
  if (noise_dim == 0) throw DomainError("noise dimension must be positive");
  std::vector<double> values(grid.size() * noise_dim, 0.0);
  NormalSource normals(seed);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double scale = std::sqrt(grid[i] - grid[i - 1]);
    for (std::size_t k = 0; k < noise_dim; ++k)
      values[i * noise_dim + k] = values[(i - 1) * noise_dim + k] + scale * normals();
  }
  return Path(grid, std::move(values), noise_dim);
}

EulerWalker::EulerWalker(const SderSpec& spec, std::uint64_t seed)
    : spec_(&spec), normals_(seed), stepper_((spec.validate(), spec.esp), spec.initial) {
  const std::size_t J = spec.dim();
  const std::size_t N = spec.coeffs.noise_dim;
  b_.assign(N, 0.0);
  db_.resize(N);
  drift_.resize(J);
  sigma_.resize(J * N);
  x_next_.resize(J);
}

void EulerWalker::check_bound(std::span<const double> values, const char* what) const {
  for (double v : values)
    if (!std::isfinite(v) || std::abs(v) > spec_->coeffs.bound)
      throw BoundViolation(std::string(what) + " evaluator out of bounds at t = " + format_double(time_));
}

void EulerWalker::step(double dt) {
  const std::size_t J = drift_.size();
  const std::size_t N = db_.size();
  const auto z = stepper_.z();
  spec_->coeffs.drift(z, drift_);
  spec_->coeffs.dispersion(z, sigma_);
  check_bound(drift_, "drift");
  check_bound(sigma_, "dispersion");
  const double scale = std::sqrt(dt);
  for (std::size_t k = 0; k < N; ++k) {
    db_[k] = scale * normals_();
    b_[k] += db_[k];
  }
  const auto x = stepper_.x();
  for (std::size_t i = 0; i < J; ++i) {
    double inc = drift_[i] * dt;
    for (std::size_t k = 0; k < N; ++k) inc += sigma_[i * N + k] * db_[k];
    x_next_[i] = x[i] + inc;
  }
  stepper_.advance(x_next_);
  time_ += dt;
}

PathBundle euler_sder(const SderSpec& spec, const EulerConfig& config) {
  config.validate();
  spec.validate();
  const auto grid = uniform_grid(config.horizon, config.steps);
  const std::size_t J = spec.dim();
  const std::size_t N = spec.coeffs.noise_dim;
  const std::size_t n = grid.size();
  std::vector<double> b(n * N), x(n * J), z(n * J), y(n * J);
  EulerWalker walker(spec, config.seed);
  auto record = [&](std::size_t i) {
    std::copy(walker.brownian().begin(), walker.brownian().end(), b.begin() + i * N);
    std::copy(walker.x().begin(), walker.x().end(), x.begin() + i * J);
    std::copy(walker.z().begin(), walker.z().end(), z.begin() + i * J);
    std::copy(walker.y().begin(), walker.y().end(), y.begin() + i * J);
  };
  record(0);
  for (std::size_t i = 1; i < n; ++i) {
    walker.step(grid[i] - grid[i - 1]);
    record(i);
  }
  return {Path(grid, std::move(b), N), Path(grid, std::move(x), J), Path(grid, std::move(z), J),
          Path(grid, std::move(y), J)};
}

double occupation_fraction(const Path& z, const EspSpec& esp, double boundary_tol) {
  if (z.dim() != esp_dim(esp)) throw DomainError("occupation_fraction: dimension mismatch");
  if (z.size() < 2) return 0.0;
  double near = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i)
    if (boundary_distance(esp, z.row(i)) <= boundary_tol) near += z.time(i + 1) - z.time(i);
  return near / (z.times().back() - z.times().front());
}

std::optional<double> hitting_time(const Path& z, const EspSpec& esp, double level) {
  if (z.dim() != esp_dim(esp)) throw DomainError("hitting_time: dimension mismatch");
  if (level < 0) throw DomainError("hitting_time: level must be nonnegative");
  const double g0 = level_value(esp, z.row(0)) - level;
  if (g0 == 0.0) return z.time(0);
  for (std::size_t i = 1; i < z.size(); ++i) {
    const double g = level_value(esp, z.row(i)) - level;
    if (g == 0.0 || std::signbit(g) != std::signbit(g0)) {
      const double prev = std::abs(level_value(esp, z.row(i - 1)) - level);
      return prev < std::abs(g) ? z.time(i - 1) : z.time(i);
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> exit_index(const Path& z, double m) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    double norm2 = 0.0;
    for (double v : z.row(i)) norm2 += v * v;
    if (std::sqrt(norm2) >= m) return i;
  }
  return std::nullopt;
}

Path truncate_at_exit(const Path& path, const Path& z, double m) {
  require_same_grid(path, z, "truncate_at_exit");
  const auto idx = exit_index(z, m);
  return idx ? path.slice(0, *idx) : path;
}

}  // namespace reflectolab
