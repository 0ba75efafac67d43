#include "reflectolab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reflectolab/errors.hpp"

namespace reflectolab {

PartitionLadder::PartitionLadder(double horizon, int min_level, int max_level)
    : horizon_(horizon), min_level_(min_level), max_level_(max_level) {
  if (!(horizon > 0) || !std::isfinite(horizon)) throw DomainError("ladder horizon must be positive");
  if (min_level < 0 || max_level < min_level || max_level > 40)
    throw DomainError("ladder levels must satisfy 0 <= min <= max <= 40");
}

std::vector<int> PartitionLadder::levels() const {
  std::vector<int> out;
  for (int n = min_level_; n <= max_level_; ++n) out.push_back(n);
  return out;
}

double PartitionLadder::mesh(int level) const { return std::ldexp(horizon_, -level); }

std::vector<double> PartitionLadder::points(int level) const {
  const std::size_t count = std::size_t{1} << level;
  const double h = mesh(level);
  std::vector<double> pts(count + 1);
  for (std::size_t j = 0; j <= count; ++j) pts[j] = static_cast<double>(j) * h;
  pts.back() = horizon_;
  return pts;
}

namespace {

std::vector<std::size_t> grid_indices(const Path& path, std::span<const double> partition) {
  std::vector<std::size_t> idx;
  idx.reserve(partition.size());
  const auto& grid = path.times();
  for (double t : partition) {
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(grid.begin(), grid.end(), t - slack);
    if (it == grid.end() || std::abs(*it - t) > slack)
      throw DomainError("partition point " + std::to_string(t) + " is not on the path grid");
    idx.push_back(static_cast<std::size_t>(it - grid.begin()));
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] <= idx[i - 1]) throw DomainError("partition must be strictly increasing");
  return idx;
}

double sum_over_indices(const Path& path, const std::vector<std::size_t>& idx, double p) {
  double total = 0.0;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    const auto a = path.row(idx[i - 1]);
    const auto b = path.row(idx[i]);
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sq += (b[k] - a[k]) * (b[k] - a[k]);
    const double inc = std::sqrt(sq);
    total += (p == 1.0) ? inc : (p == 2.0 ? sq : std::pow(inc, p));
  }
  return total;
}

}  // namespace

double p_variation_sum(const Path& path, std::span<const double> partition, double p) {
  if (!(p > 0)) throw DomainError("p must be positive");
  return sum_over_indices(path, grid_indices(path, partition), p);
}

std::vector<double> VariationReport::sums() const {
  std::vector<double> s;
  for (const auto& l : levels) s.push_back(l.sum);
  return s;
}

VariationReport variation_ladder(const Path& path, const PartitionLadder& ladder, double p,
                                 std::string component, std::uint64_t path_id) {
  if (!(p > 0)) throw DomainError("p must be positive");
  VariationReport report{p, std::move(component), path_id, {}};
  for (int n : ladder.levels()) {
    const auto pts = ladder.points(n);
    report.levels.push_back({n, ladder.mesh(n), sum_over_indices(path, grid_indices(path, pts), p)});
  }
  return report;
}

VariationReport total_variation_ladder(const Path& path, const PartitionLadder& ladder,
                                       std::string component, std::uint64_t path_id) {
  return variation_ladder(path, ladder, 1.0, std::move(component), path_id);
}

DyadicAccumulator::DyadicAccumulator(int grid_exponent, int min_level, int max_level,
                                     std::size_t dim, std::vector<double> powers)
    : grid_exponent_(grid_exponent),
      min_level_(min_level),
      max_level_(max_level),
      dim_(dim),
      powers_(std::move(powers)) {
  if (min_level < 0 || max_level < min_level || max_level > grid_exponent || grid_exponent > 40)
    throw DomainError("ladder levels must satisfy 0 <= min <= max <= grid exponent");
  if (dim == 0 || powers_.empty()) throw DomainError("accumulator needs a dimension and powers");
  const auto nlev = static_cast<std::size_t>(max_level - min_level + 1);
  last_.assign(nlev * dim, 0.0);
  sums_.assign(nlev * powers_.size(), 0.0);
}

void DyadicAccumulator::push(std::span<const double> value) {
  if (value.size() != dim_) throw DomainError("accumulator: dimension mismatch");
  if (complete()) throw DomainError("accumulator: grid already complete");
  const std::size_t i = count_++;
  for (int n = min_level_; n <= max_level_; ++n) {
    const std::size_t stride = std::size_t{1} << (grid_exponent_ - n);
    if (i % stride != 0) continue;
    const auto li = static_cast<std::size_t>(n - min_level_);
    double* last = last_.data() + li * dim_;
    if (i > 0) {
      double sq = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) sq += (value[k] - last[k]) * (value[k] - last[k]);
      const double inc = std::sqrt(sq);
      for (std::size_t q = 0; q < powers_.size(); ++q) {
        const double p = powers_[q];
        sums_[li * powers_.size() + q] += (p == 1.0) ? inc : (p == 2.0 ? sq : std::pow(inc, p));
      }
    }
    std::copy(value.begin(), value.end(), last);
  }
}

double DyadicAccumulator::sum(int level, std::size_t power_index) const {
  if (level < min_level_ || level > max_level_ || power_index >= powers_.size())
    throw DomainError("accumulator: level or power out of range");
  return sums_[static_cast<std::size_t>(level - min_level_) * powers_.size() + power_index];
}

std::vector<double> DyadicAccumulator::sums(std::size_t power_index) const {
  std::vector<double> out;
  for (int n = min_level_; n <= max_level_; ++n) out.push_back(sum(n, power_index));
  return out;
}

double oscillation(const Path& path, double s, double t) {
  if (s > t) throw DomainError("oscillation: s > t");
  const auto& grid = path.times();
  auto first = std::lower_bound(grid.begin(), grid.end(), s) - grid.begin();
  auto last = std::upper_bound(grid.begin(), grid.end(), t) - grid.begin();
  if (first >= last) return 0.0;
  const auto lo = static_cast<std::size_t>(first);
  const auto hi = static_cast<std::size_t>(last);
  if (path.dim() == 1) {
    double mn = path(lo, 0), mx = path(lo, 0);
    for (std::size_t i = lo + 1; i < hi; ++i) {
      mn = std::min(mn, path(i, 0));
      mx = std::max(mx, path(i, 0));
    }
    return mx - mn;
  }
  // vector paths: diameter of the visited set
  double best = 0.0;
  for (std::size_t i = lo; i < hi; ++i)
    for (std::size_t j = i + 1; j < hi; ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < path.dim(); ++k) sq += (path(j, k) - path(i, k)) * (path(j, k) - path(i, k));
      best = std::max(best, sq);
    }
  return std::sqrt(best);
}

DirichletParts dirichlet_parts(const PathBundle& bundle, const SderSpec& spec) {
  const std::size_t J = spec.dim();
  if (bundle.Z.dim() != J || bundle.Y.dim() != J || bundle.X.dim() != J)
    throw DomainError("dirichlet_decompose: bundle dimension does not match the spec");
  require_same_grid(bundle.Z, bundle.Y, "dirichlet_decompose");
  for (std::size_t k = 0; k < J; ++k)
    if (bundle.Z(0, k) != spec.initial[k])
      throw DomainError("dirichlet_decompose: bundle was not generated from this spec");
  const std::size_t n = bundle.Z.size();
  std::vector<double> a(n * J, 0.0);
  std::vector<double> m(n * J, 0.0);
  std::vector<double> prev(J), cur(J), integral(J, 0.0);
  spec.coeffs.drift(bundle.Z.row(0), prev);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      spec.coeffs.drift(bundle.Z.row(i), cur);
      const double dt = bundle.Z.time(i) - bundle.Z.time(i - 1);
      for (std::size_t k = 0; k < J; ++k) integral[k] += 0.5 * (prev[k] + cur[k]) * dt;
      prev.swap(cur);
    }
    for (std::size_t k = 0; k < J; ++k) {
      a[i * J + k] = integral[k] + bundle.Y(i, k);
      m[i * J + k] = bundle.Z(i, k) - bundle.Z(0, k) - a[i * J + k];
    }
  }
  return {Path(bundle.Z.times(), std::move(m), J), Path(bundle.Z.times(), std::move(a), J)};
}

DirichletReport dirichlet_decompose(const PathBundle& bundle, const SderSpec& spec,
                                    const PartitionLadder& ladder) {
  const auto parts = dirichlet_parts(bundle, spec);
  DirichletReport report;
  const auto mq = variation_ladder(parts.martingale, ladder, 2.0, "M");
  const auto aq = variation_ladder(parts.finite_energy, ladder, 2.0, "A");
  for (std::size_t i = 0; i < mq.levels.size(); ++i) {
    report.levels.push_back(mq.levels[i].level);
    report.mesh.push_back(mq.levels[i].mesh);
    report.martingale_qv.push_back(mq.levels[i].sum);
    report.drift_qv.push_back(aq.levels[i].sum);
  }
  const std::size_t J = spec.dim();
  const std::size_t N = spec.coeffs.noise_dim;
  std::vector<double> sigma(J * N);
  auto trace = [&](std::size_t i) {
    spec.coeffs.dispersion(bundle.Z.row(i), sigma);
    double s = 0.0;
    for (double v : sigma) s += v * v;
    return s;
  };
  double prev = trace(0);
  for (std::size_t i = 1; i < bundle.Z.size(); ++i) {
    const double cur = trace(i);
    report.predicted_qv += 0.5 * (prev + cur) * (bundle.Z.time(i) - bundle.Z.time(i - 1));
    prev = cur;
  }
  return report;
}

}  // namespace reflectolab
