#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace reflectolab {

/// Absolute tolerance for domain-membership checks.
inline constexpr double kDomainTol = 1e-9;

/// The half-line [0, inf) with normal reflection.
struct HalfLine {};

/// Weight vector of a GPS orthant ESP. Components positive, summing to one, J >= 2.
class GpsWeights {
 public:
  explicit GpsWeights(std::vector<double> alpha);

  /// Equal weights 1/J.
  static GpsWeights uniform(std::size_t dim);

  std::size_t dim() const noexcept { return alpha_.size(); }
  double operator[](std::size_t i) const { return alpha_[i]; }
  const std::vector<double>& alpha() const noexcept { return alpha_; }

 private:
  std::vector<double> alpha_;
};

/// Region {(x, y): y >= 0, -c_L y^a_L <= x <= c_R y^a_R} with horizontal
/// reflection on the lateral curves and a half-space cone at the vertex.
struct ValleyDomain {
  double alpha_left;
  double alpha_right;
  double c_left;
  double c_right;

  ValleyDomain(double alpha_l, double alpha_r, double c_l, double c_r);

  double left(double y) const;   // L(y)
  double right(double y) const;  // R(y)
};

using EspSpec = std::variant<HalfLine, GpsWeights, ValleyDomain>;

/// State dimension J of the ESP.
std::size_t esp_dim(const EspSpec& esp);

/// The functional <v, z> whose level sets H_eps are used for hitting times.
/// v = 1 on the half-line, (1, ..., 1) for GPS, (0, 1) for the valley.
double level_value(const EspSpec& esp, std::span<const double> z);

/// The vector v itself.
std::vector<double> vertex_direction(const EspSpec& esp);

/// True when z lies in G up to `tol`.
bool in_domain(const EspSpec& esp, std::span<const double> z, double tol = kDomainTol);

/// Distance from z to the boundary of G. For the valley the lateral distance
/// is measured horizontally.
double boundary_distance(const EspSpec& esp, std::span<const double> z);

/// Canonical one-line description, stable across runs; feeds config hashes.
std::string describe(const EspSpec& esp);

}  // namespace reflectolab
