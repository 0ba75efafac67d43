#include "reflectolab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "reflectolab/errors.hpp"

namespace reflectolab {

double McSummary::deviation_from(double target) const {
  const double diff = estimate - target;
  if (std_error > 0) return diff / std_error;
  return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

McSummary summarize(std::span<const double> samples, std::uint64_t seed, std::string config_hash) {
  McSummary s;
  s.n_paths = samples.size();
  s.estimate = mean(samples);
  double ss = 0.0;
  for (double x : samples) ss += (x - s.estimate) * (x - s.estimate);
  const double var = samples.size() > 1 ? ss / static_cast<double>(samples.size() - 1) : 0.0;
  s.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  s.ci95_low = s.estimate - 1.96 * s.std_error;
  s.ci95_high = s.estimate + 1.96 * s.std_error;
  s.seed = seed;
  s.config_hash = std::move(config_hash);
  return s;
}

nlohmann::json to_json(const McSummary& s) {
  return {{"estimate", s.estimate},   {"n_paths", s.n_paths},   {"std_error", s.std_error},
          {"ci95_low", s.ci95_low},   {"ci95_high", s.ci95_high}, {"seed", s.seed},
          {"config_hash", s.config_hash}};
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw DomainError("quantile of an empty sample");
  if (q < 0 || q > 1) throw DomainError("quantile level outside [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace reflectolab
