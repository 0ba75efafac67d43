#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace reflectolab {

/// Monte Carlo estimate with its sampling error.
struct McSummary {
  double estimate = 0.0;
  std::size_t n_paths = 0;
  double std_error = 0.0;  // sample std / sqrt(n_paths)
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;

  /// (estimate - target) / std_error; 0 when both are degenerate.
  double deviation_from(double target) const;
};

McSummary summarize(std::span<const double> samples, std::uint64_t seed, std::string config_hash);

nlohmann::json to_json(const McSummary& s);

double mean(std::span<const double> xs);
/// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace reflectolab
