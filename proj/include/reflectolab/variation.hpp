#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reflectolab/path.hpp"
#include "reflectolab/sder.hpp"

namespace reflectolab {

/// Nested dyadic partitions of [0, T]: level n has 2^n intervals of mesh T 2^-n.
class PartitionLadder {
 public:
  PartitionLadder(double horizon, int min_level, int max_level);

  double horizon() const noexcept { return horizon_; }
  int min_level() const noexcept { return min_level_; }
  int max_level() const noexcept { return max_level_; }
  std::vector<int> levels() const;

  double mesh(int level) const;
  std::vector<double> points(int level) const;

 private:
  double horizon_;
  int min_level_;
  int max_level_;
};

/// sum_i |A(t_i) - A(t_{i-1})|^p over the partition, Euclidean norm for vector
/// paths. Every partition point must be a grid point of `path`.
double p_variation_sum(const Path& path, std::span<const double> partition, double p);

struct LevelSum {
  int level;
  double mesh;
  double sum;
};

struct VariationReport {
  double p = 1.0;
  std::string component;
  std::uint64_t path_id = 0;
  std::vector<LevelSum> levels;

  std::vector<double> sums() const;
};

/// S_p at every ladder level.
VariationReport variation_ladder(const Path& path, const PartitionLadder& ladder, double p,
                                 std::string component = "all", std::uint64_t path_id = 0);

/// S_1 at every ladder level.
VariationReport total_variation_ladder(const Path& path, const PartitionLadder& ladder,
                                       std::string component = "all", std::uint64_t path_id = 0);

/// Streaming S_p sums on the dyadic ladder of a uniform grid with 2^K steps.
/// Values are pushed in grid order (index 0 first); levels must not exceed K.
class DyadicAccumulator {
 public:
  DyadicAccumulator(int grid_exponent, int min_level, int max_level, std::size_t dim,
                    std::vector<double> powers);

  void push(std::span<const double> value);

  /// S_p at `level` for powers()[power_index]; complete once 2^K + 1 values are in.
  double sum(int level, std::size_t power_index) const;
  std::vector<double> sums(std::size_t power_index) const;
  const std::vector<double>& powers() const noexcept { return powers_; }
  bool complete() const noexcept { return count_ == (std::size_t{1} << grid_exponent_) + 1; }

 private:
  int grid_exponent_;
  int min_level_;
  int max_level_;
  std::size_t dim_;
  std::vector<double> powers_;
  std::size_t count_ = 0;
  std::vector<double> last_;  // per level, dim values
  std::vector<double> sums_;  // per level, per power
};

/// sup over s <= u1 <= u2 <= t of |f(u2) - f(u1)| at grid points in [s, t].
double oscillation(const Path& path, double s, double t);

/// Quadratic-variation ladders of the two parts of Z = Z(0) + M + A, where
/// A = int b(Z) ds + Y and M = Z - Z(0) - A.
struct DirichletReport {
  std::vector<int> levels;
  std::vector<double> mesh;
  std::vector<double> martingale_qv;  // S_2 of M
  std::vector<double> drift_qv;       // S_2 of A
  /// int trace(sigma sigma^T)(Z) ds, the predicted limit of S_2(M).
  double predicted_qv = 0.0;
};

/// The decomposition paths themselves (trapezoidal drift integral).
struct DirichletParts {
  Path martingale;
  Path finite_energy;
};

DirichletParts dirichlet_parts(const PathBundle& bundle, const SderSpec& spec);
DirichletReport dirichlet_decompose(const PathBundle& bundle, const SderSpec& spec,
                                    const PartitionLadder& ladder);

}  // namespace reflectolab
