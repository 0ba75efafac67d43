#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "reflectolab/esp.hpp"
#include "reflectolab/path.hpp"

namespace reflectolab {

/// Output of a constrained map: the constrained path (phi, or Z) and the
/// constraining term (eta, or Y) with constrained = input + push at every
/// grid point.
struct Reflection {
  Path constrained;
  Path push;
};

/// One-dimensional Skorokhod map on [0, inf):
/// phi(t) = psi(t) + max(0, max_{s<=t} -psi(s)), evaluated at grid points.
Reflection sm_one_dim(const Path& psi);

/// Generators of a direction cone. At the GPS vertex the cone is spanned by
/// the face directions together with v = (1, ..., 1).
struct DirectionCone {
  std::vector<std::vector<double>> generators;
  bool vertex = false;
};

/// Face directions d_1..d_J with (d_i)_i = 1 and (d_i)_j = -a_j / (1 - a_i).
std::vector<std::vector<double>> gps_directions(const GpsWeights& weights);

/// Cone d(x) at a boundary point x of the orthant (all generators, plus v
/// when x is the origin).
DirectionCone gps_cone_at(const GpsWeights& weights, std::span<const double> x,
                          double tol = kDomainTol);

/// Streaming evaluator of Xi_{l,r}. Each push consumes (psi, l, r) at the
/// next grid point and returns Xi at that point. O(1) per point.
class XiAccumulator {
 public:
  double push(double psi, double ell, double r);

 private:
  bool started_ = false;
  double running_min_ = 0.0;  // inf_{u<=t} (psi - l)
  double upper_ = 0.0;        // sup_s [(psi(s) - r(s)) ^ inf_{u in [s,t]} (psi - l)]
};

/// Xi_{l,r}(psi) in a single pass.
Path xi_map(const Path& psi, const Path& ell, const Path& r);

/// Xi_{l,r}(psi) evaluated literally from the double sup/inf formula, O(n^2).
/// Kept as the reference the streaming evaluator is checked against.
Path xi_map_reference(const Path& psi, const Path& ell, const Path& r);

/// Valley-domain ESM: Z_2 = Gamma_1(psi_2), Z_1 = psi_1 - Xi_{L(Z_2), R(Z_2)}(psi_1).
Reflection valley_esm(const Path& psi, const ValleyDomain& domain);

/// Exact two-dimensional GPS ESM via the rotation w = x_1 - x_2, h = x_1 + x_2,
/// which maps the quadrant onto the valley with L(h) = -h, R(h) = h.
Reflection gps_esm_2d_exact(const Path& psi, const GpsWeights& weights);

/// Result of one constrained step.
struct GpsStep {
  std::vector<double> z_next;
  std::vector<double> eta_incr;
  std::vector<double> beta;  // face multipliers
  double gamma = 0.0;        // vertex multiplier (eta_incr = gamma v + D beta)
};

/// Largest J accepted by the active-set enumeration.
inline constexpr std::size_t kMaxGpsDim = 12;

/// Per-step constraint for the GPS orthant. Stage one pushes along v just
/// enough to restore <v, x> >= 0; stage two solves the face complementarity
/// problem w = x + D beta >= 0, beta >= 0, beta_i w_i = 0 by active-set
/// enumeration, choosing the feasible solution of least |beta|_1 (first in
/// bitmask order on ties).
class GpsStepSolver {
 public:
  explicit GpsStepSolver(const GpsWeights& weights);

  std::size_t dim() const noexcept { return dim_; }
  const Eigen::MatrixXd& directions() const noexcept { return directions_; }

  GpsStep solve(std::span<const double> z_prev, std::span<const double> delta) const;

  /// Allocation-free form used by the simulators. Writes eta_incr (size J);
  /// returns false when the step leaves the orthant untouched.
  bool solve_push(std::span<const double> z_prev, std::span<const double> delta,
                  std::span<double> eta_incr) const;

 private:
  struct Subset {
    std::vector<int> index;
    Eigen::MatrixXd inverse;  // of D restricted to rows/cols in index
  };

  // Core solve on x = z_prev + delta; fills beta, gamma; x is updated to w.
  void solve_in_place(Eigen::Ref<Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> beta,
                      double& gamma, std::span<const double> z_prev,
                      std::span<const double> delta) const;

  std::size_t dim_;
  Eigen::MatrixXd directions_;          // column i is d_i
  std::vector<std::optional<Subset>> subsets_;  // indexed by bitmask
};

/// GPS ESM scheme: folds GpsStepSolver over the increments of psi.
/// Z(0) = psi(0), Y = sum of eta increments, Z = psi + Y.
Reflection gps_esm_discrete(const Path& psi, const GpsWeights& weights);

/// Incremental constraint state for any supported ESP. Feed successive free
/// values X(t_n); reads back Y(t_n) and Z(t_n) = X(t_n) + Y(t_n).
class ConstraintStepper {
 public:
  ConstraintStepper(const EspSpec& esp, std::span<const double> x0);

  void advance(std::span<const double> x_next);

  std::size_t dim() const noexcept { return x_.size(); }
  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }
  std::span<const double> z() const noexcept { return z_; }

 private:
  enum class Kind : std::uint8_t { half_line, gps, valley };

  Kind kind_;
  std::optional<GpsStepSolver> gps_;
  std::optional<ValleyDomain> valley_;
  XiAccumulator xi_;
  std::vector<double> x_, y_, z_;
  std::vector<double> delta_, eta_;
};

}  // namespace reflectolab
