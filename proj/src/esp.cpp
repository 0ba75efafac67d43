#include "reflectolab/esp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "reflectolab/detail/overloaded.hpp"
#include "reflectolab/errors.hpp"
#include "reflectolab/serialize.hpp"

namespace reflectolab {

GpsWeights::GpsWeights(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.size() < 2) throw DomainError("GPS weights need J >= 2");
  for (double a : alpha_)
    if (!(a > 0) || !std::isfinite(a)) throw DomainError("GPS weights must be positive");
  const double sum = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("GPS weights must sum to 1");
}

GpsWeights GpsWeights::uniform(std::size_t dim) {
  if (dim < 2) throw DomainError("GPS weights need J >= 2");
  std::vector<double> a(dim, 1.0 / static_cast<double>(dim));
  // keep the sum within tolerance for any J
  a.back() = 1.0 - std::accumulate(a.begin(), a.end() - 1, 0.0);
  return GpsWeights(std::move(a));
}

ValleyDomain::ValleyDomain(double alpha_l, double alpha_r, double c_l, double c_r)
    : alpha_left(alpha_l), alpha_right(alpha_r), c_left(c_l), c_right(c_r) {
  for (double p : {alpha_l, alpha_r, c_l, c_r})
    if (!(p > 0) || !std::isfinite(p)) throw DomainError("valley parameters must be positive");
}

double ValleyDomain::left(double y) const { return -c_left * std::pow(std::max(y, 0.0), alpha_left); }
double ValleyDomain::right(double y) const { return c_right * std::pow(std::max(y, 0.0), alpha_right); }

using detail::overloaded;

std::size_t esp_dim(const EspSpec& esp) {
  return std::visit(overloaded{[](const HalfLine&) -> std::size_t { return 1; },
                               [](const GpsWeights& w) { return w.dim(); },
                               [](const ValleyDomain&) -> std::size_t { return 2; }},
                    esp);
}

double level_value(const EspSpec& esp, std::span<const double> z) {
  return std::visit(
      overloaded{[&](const HalfLine&) { return z[0]; },
                 [&](const GpsWeights&) { return std::accumulate(z.begin(), z.end(), 0.0); },
                 [&](const ValleyDomain&) { return z[1]; }},
      esp);
}

std::vector<double> vertex_direction(const EspSpec& esp) {
  return std::visit(overloaded{[](const HalfLine&) { return std::vector<double>{1.0}; },
                               [](const GpsWeights& w) { return std::vector<double>(w.dim(), 1.0); },
                               [](const ValleyDomain&) { return std::vector<double>{0.0, 1.0}; }},
                    esp);
}

bool in_domain(const EspSpec& esp, std::span<const double> z, double tol) {
  if (z.size() != esp_dim(esp)) return false;
  return std::visit(overloaded{[&](const HalfLine&) { return z[0] >= -tol; },
                               [&](const GpsWeights&) {
                                 return std::all_of(z.begin(), z.end(),
                                                    [&](double x) { return x >= -tol; });
                               },
                               [&](const ValleyDomain& d) {
                                 const double y = z[1];
                                 return y >= -tol && z[0] >= d.left(y) - tol &&
                                        z[0] <= d.right(y) + tol;
                               }},
                    esp);
}

double boundary_distance(const EspSpec& esp, std::span<const double> z) {
  return std::visit(
      overloaded{[&](const HalfLine&) { return std::max(z[0], 0.0); },
                 [&](const GpsWeights&) {
                   return std::max(*std::min_element(z.begin(), z.end()), 0.0);
                 },
                 [&](const ValleyDomain& d) {
                   const double y = std::max(z[1], 0.0);
                   const double lateral = std::min(z[0] - d.left(y), d.right(y) - z[0]);
                   return std::max(std::min(y, lateral), 0.0);
                 }},
      esp);
}

std::string describe(const EspSpec& esp) {
  return std::visit(overloaded{[](const HalfLine&) { return std::string("half-line"); },
                               [](const GpsWeights& w) {
                                 std::string s = "gps:";
                                 for (std::size_t i = 0; i < w.dim(); ++i) {
                                   if (i) s += ',';
                                   s += format_double(w[i]);
                                 }
                                 return s;
                               },
                               [](const ValleyDomain& d) {
                                 return "valley:" + format_double(d.alpha_left) + ',' +
                                        format_double(d.alpha_right) + ',' +
                                        format_double(d.c_left) + ',' + format_double(d.c_right);
                               }},
                    esp);
}

}  // namespace reflectolab
