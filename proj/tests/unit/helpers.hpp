#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "reflectolab/path.hpp"

namespace testing {

// Seeded Gaussian random walk on a uniform grid; the first row is `start`.
inline reflectolab::Path random_walk(std::uint64_t seed, std::size_t steps, std::vector<double> start,
                                     double horizon = 1.0, double scale = 1.0) {
  const std::size_t dim = start.size();
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto grid = reflectolab::uniform_grid(horizon, steps);
  const double sd = scale * std::sqrt(horizon / static_cast<double>(steps));
  std::vector<double> values(start);
  values.reserve((steps + 1) * dim);
  for (std::size_t i = 1; i <= steps; ++i)
    for (std::size_t k = 0; k < dim; ++k) values.push_back(values[(i - 1) * dim + k] + sd * normal(engine));
  return reflectolab::Path(grid, std::move(values), dim);
}

// Brute-force evaluation of psi(t) + max(0, max_{s<=t} -psi(s)).
inline std::vector<double> gamma1_oracle(const std::vector<double>& psi) {
  std::vector<double> phi(psi.size());
  for (std::size_t t = 0; t < psi.size(); ++t) {
    double m = 0.0;
    for (std::size_t s = 0; s <= t; ++s) m = std::max(m, -psi[s]);
    phi[t] = psi[t] + m;
  }
  return phi;
}

// Literal double loop for max(0 ^ inf_{[0,t]}(psi-l), sup_s[(psi(s)-r(s)) ^ inf_{[s,t]}(psi-l)]).
inline std::vector<double> xi_oracle(const std::vector<double>& psi, const std::vector<double>& l,
                                     const std::vector<double>& r) {
  std::vector<double> out(psi.size());
  for (std::size_t t = 0; t < psi.size(); ++t) {
    double inf_all = 0.0;
    for (std::size_t u = 0; u <= t; ++u) inf_all = std::min(inf_all, psi[u] - l[u]);
    double best = inf_all;
    for (std::size_t s = 0; s <= t; ++s) {
      double inf_tail = psi[s] - l[s];
      for (std::size_t u = s; u <= t; ++u) inf_tail = std::min(inf_tail, psi[u] - l[u]);
      best = std::max(best, std::min(psi[s] - r[s], inf_tail));
    }
    out[t] = best;
  }
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace testing
