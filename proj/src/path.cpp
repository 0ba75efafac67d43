#include "reflectolab/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "reflectolab/errors.hpp"

namespace reflectolab {

Path::Path(std::vector<double> times, std::vector<double> values, std::size_t dim)
    : times_(std::move(times)), values_(std::move(values)), dim_(dim) {
  if (dim_ == 0) throw DomainError("path dimension must be at least 1");
  if (times_.empty()) throw DomainError("path needs at least one grid point");
  if (values_.size() != times_.size() * dim_)
    throw DomainError("path values do not match grid length times dimension");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) throw DomainError("non-finite grid time");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw DomainError("time grid not strictly increasing at index " + std::to_string(i));
  }
  for (double x : values_)
    if (!std::isfinite(x)) throw DomainError("non-finite path value");
}

Path Path::scalar(std::vector<double> times, std::vector<double> values) {
  return Path(std::move(times), std::move(values), 1);
}

Path Path::component(std::size_t k) const {
  if (k >= dim_) throw DomainError("component index out of range");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = (*this)(i, k);
  return Path(times_, std::move(out), 1);
}

Path Path::slice(std::size_t first, std::size_t last) const {
  if (first > last || last >= size()) throw DomainError("slice out of range");
  std::vector<double> t(times_.begin() + first, times_.begin() + last + 1);
  std::vector<double> v(values_.begin() + first * dim_, values_.begin() + (last + 1) * dim_);
  return Path(std::move(t), std::move(v), dim_);
}

Path Path::subsample(std::size_t stride) const {
  if (stride == 0) throw DomainError("subsample stride must be positive");
  std::vector<double> t;
  std::vector<double> v;
  for (std::size_t i = 0; i < size(); i += stride) {
    t.push_back(times_[i]);
    auto r = row(i);
    v.insert(v.end(), r.begin(), r.end());
  }
  return Path(std::move(t), std::move(v), dim_);
}

std::vector<double> uniform_grid(double horizon, std::size_t steps) {
  if (!(horizon > 0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive");
  if (steps == 0) throw DomainError("grid needs at least one step");
  std::vector<double> t(steps + 1);
  const double dt = horizon / static_cast<double>(steps);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = static_cast<double>(i) * dt;
  t.back() = horizon;
  return t;
}

void require_same_grid(const Path& a, const Path& b, const char* what) {
  if (a.times() != b.times()) throw DomainError(std::string(what) + ": paths must share one grid");
}

Path difference(const Path& a, const Path& b) {
  require_same_grid(a, b, "difference");
  if (a.dim() != b.dim()) throw DomainError("difference: dimension mismatch");
  std::vector<double> v(a.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values()[i] - b.values()[i];
  return Path(a.times(), std::move(v), a.dim());
}

double sup_distance(const Path& a, const Path& b) {
  require_same_grid(a, b, "sup_distance");
  if (a.dim() != b.dim()) throw DomainError("sup_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  return d;
}

}  // namespace reflectolab
