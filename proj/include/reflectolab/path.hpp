#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace reflectolab {

/// A sampled continuous function: a strictly increasing time grid and one
/// J-vector per grid point, stored row-major.
class Path {
 public:
  Path(std::vector<double> times, std::vector<double> values, std::size_t dim);

  /// One-dimensional convenience constructor.
  static Path scalar(std::vector<double> times, std::vector<double> values);

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  double time(std::size_t i) const { return times_[i]; }
  double operator()(std::size_t i, std::size_t k) const { return values_[i * dim_ + k]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Coordinate k as a one-dimensional path on the same grid.
  Path component(std::size_t k) const;
  /// Grid points [first, last] (inclusive) as a new path.
  Path slice(std::size_t first, std::size_t last) const;
  /// Every `stride`-th grid point starting at 0.
  Path subsample(std::size_t stride) const;

  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::size_t dim_;
};

/// Uniform grid {0, T/steps, ..., T} with steps + 1 points.
std::vector<double> uniform_grid(double horizon, std::size_t steps);

/// Throws DomainError unless the two paths share a grid bit-for-bit.
void require_same_grid(const Path& a, const Path& b, const char* what);

/// Pointwise a - b.
Path difference(const Path& a, const Path& b);

/// Largest absolute coordinate difference over all grid points.
double sup_distance(const Path& a, const Path& b);

}  // namespace reflectolab
