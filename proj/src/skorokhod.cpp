#include "reflectolab/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "reflectolab/detail/overloaded.hpp"
#include "reflectolab/errors.hpp"

namespace reflectolab {

UnsolvableStep::UnsolvableStep(std::vector<double> z_prev, std::vector<double> delta)
    : std::runtime_error("GPS step has no feasible complementary solution (mesh too coarse?)"),
      z_prev_(std::move(z_prev)),
      delta_(std::move(delta)) {}

namespace {

void require_one_dim(const Path& p, const char* what) {
  if (p.dim() != 1) throw DomainError(std::string(what) + ": expected a one-dimensional path");
}

Reflection fold_stepper(const EspSpec& esp, const Path& psi) {
  if (psi.dim() != esp_dim(esp)) throw DomainError("input path dimension does not match the ESP");
  ConstraintStepper stepper(esp, psi.row(0));
  const std::size_t n = psi.size();
  const std::size_t dim = psi.dim();
  std::vector<double> z(n * dim);
  std::vector<double> y(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) stepper.advance(psi.row(i));
    std::copy(stepper.z().begin(), stepper.z().end(), z.begin() + i * dim);
    std::copy(stepper.y().begin(), stepper.y().end(), y.begin() + i * dim);
  }
  return {Path(psi.times(), std::move(z), dim), Path(psi.times(), std::move(y), dim)};
}

}  // namespace

Reflection sm_one_dim(const Path& psi) {
  require_one_dim(psi, "sm_one_dim");
  if (psi(0, 0) < -kDomainTol) throw DomainError("sm_one_dim: psi(0) < 0 lies outside [0, inf)");
  return fold_stepper(HalfLine{}, psi);
}

std::vector<std::vector<double>> gps_directions(const GpsWeights& weights) {
  const std::size_t J = weights.dim();
  std::vector<std::vector<double>> d(J, std::vector<double>(J));
  for (std::size_t i = 0; i < J; ++i)
    for (std::size_t j = 0; j < J; ++j) d[i][j] = (i == j) ? 1.0 : -weights[j] / (1.0 - weights[i]);
  return d;
}

DirectionCone gps_cone_at(const GpsWeights& weights, std::span<const double> x, double tol) {
  if (x.size() != weights.dim()) throw DomainError("gps_cone_at: dimension mismatch");
  const auto d = gps_directions(weights);
  DirectionCone cone;
  bool origin = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) <= tol)
      cone.generators.push_back(d[i]);
    else
      origin = false;
  }
  if (origin) {
    cone.generators.emplace_back(weights.dim(), 1.0);
    cone.vertex = true;
  }
  return cone;
}

// -- Xi --------------------------------------------------------------------

double XiAccumulator::push(double psi, double ell, double r) {
  const double gap = psi - ell;
  if (!started_) {
    running_min_ = gap;
    upper_ = std::min(psi - r, gap);
    started_ = true;
  } else {
    // inf over [s, t] extends by one point; min distributes over the sup.
    running_min_ = std::min(running_min_, gap);
    upper_ = std::min(std::max(upper_, psi - r), gap);
  }
  return std::max(std::min(0.0, running_min_), upper_);
}

namespace {
void check_xi_inputs(const Path& psi, const Path& ell, const Path& r) {
  require_one_dim(psi, "xi_map");
  require_one_dim(ell, "xi_map");
  require_one_dim(r, "xi_map");
  require_same_grid(psi, ell, "xi_map");
  require_same_grid(psi, r, "xi_map");
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (ell(i, 0) > r(i, 0))
      throw DomainError("xi_map: lower barrier above upper barrier at index " + std::to_string(i));
  if (psi(0, 0) < ell(0, 0) - kDomainTol || psi(0, 0) > r(0, 0) + kDomainTol)
    throw DomainError("xi_map: psi(0) outside [l(0), r(0)]");
}
}  // namespace

Path xi_map(const Path& psi, const Path& ell, const Path& r) {
  check_xi_inputs(psi, ell, r);
  XiAccumulator acc;
  std::vector<double> out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] = acc.push(psi(i, 0), ell(i, 0), r(i, 0));
  return Path::scalar(psi.times(), std::move(out));
}

Path xi_map_reference(const Path& psi, const Path& ell, const Path& r) {
  check_xi_inputs(psi, ell, r);
  const std::size_t n = psi.size();
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    double inf_all = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u <= t; ++u) inf_all = std::min(inf_all, psi(u, 0) - ell(u, 0));
    double sup = -std::numeric_limits<double>::infinity();
    double inf_tail = std::numeric_limits<double>::infinity();  // inf over u in [s, t]
    for (std::size_t s = t + 1; s-- > 0;) {
      inf_tail = std::min(inf_tail, psi(s, 0) - ell(s, 0));
      sup = std::max(sup, std::min(psi(s, 0) - r(s, 0), inf_tail));
    }
    out[t] = std::max(std::min(0.0, inf_all), sup);
  }
  return Path::scalar(psi.times(), std::move(out));
}

Reflection valley_esm(const Path& psi, const ValleyDomain& domain) {
  if (psi.dim() != 2) throw DomainError("valley_esm: expected a two-dimensional path");
  if (!in_domain(domain, psi.row(0)))
    throw DomainError("valley_esm: psi(0) outside the valley domain");
  return fold_stepper(domain, psi);
}

Reflection gps_esm_2d_exact(const Path& psi, const GpsWeights& weights) {
  if (weights.dim() != 2 || psi.dim() != 2)
    throw DomainError("gps_esm_2d_exact: only J = 2 is supported");
  if (!in_domain(weights, psi.row(0)))
    throw DomainError("gps_esm_2d_exact: psi(0) outside the quadrant");
  const std::size_t n = psi.size();
  std::vector<double> z(2 * n);
  std::vector<double> y(2 * n);
  double h_push = 0.0;
  XiAccumulator xi;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = psi(i, 0) + psi(i, 1);
    const double w = psi(i, 0) - psi(i, 1);
    h_push = std::max(h_push, -h);
    // Pushes in rotated coordinates: Gamma_1 on h, -Xi on w with barriers -+Z_h.
    const double xv = xi.push(w, -(h + h_push), h + h_push);
    y[2 * i] = 0.5 * (h_push - xv);
    y[2 * i + 1] = 0.5 * (h_push + xv);
    z[2 * i] = psi(i, 0) + y[2 * i];
    z[2 * i + 1] = psi(i, 1) + y[2 * i + 1];
  }
  return {Path(psi.times(), std::move(z), 2), Path(psi.times(), std::move(y), 2)};
}

// -- GPS step solver ---------------------------------------------------------

GpsStepSolver::GpsStepSolver(const GpsWeights& weights) : dim_(weights.dim()) {
  if (dim_ > kMaxGpsDim)
    throw CapacityError("GPS step solver supports J <= " + std::to_string(kMaxGpsDim) +
                        ", got J = " + std::to_string(dim_));
  const auto d = gps_directions(weights);
  directions_.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      directions_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d[i][j];

  const std::size_t full = (std::size_t{1} << dim_) - 1;
  subsets_.resize(full + 1);
  // The full set is skipped: every d_i is orthogonal to v, so D has rank J - 1.
  for (std::size_t mask = 1; mask < full; ++mask) {
    Subset s;
    for (std::size_t i = 0; i < dim_; ++i)
      if (mask & (std::size_t{1} << i)) s.index.push_back(static_cast<int>(i));
    const auto k = static_cast<Eigen::Index>(s.index.size());
    Eigen::MatrixXd block(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) block(a, b) = directions_(s.index[a], s.index[b]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
    if (!lu.isInvertible()) continue;
    s.inverse = lu.inverse();
    subsets_[mask] = std::move(s);
  }
}

void GpsStepSolver::solve_in_place(Eigen::Ref<Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> beta,
                                   double& gamma, std::span<const double> z_prev,
                                   std::span<const double> delta) const {
  const auto J = static_cast<Eigen::Index>(dim_);
  double level = 0.0;
  for (Eigen::Index i = 0; i < J; ++i) {
    x[i] = z_prev[i] + delta[i];
    level += x[i];
  }
  gamma = std::max(0.0, -level) / static_cast<double>(dim_);
  if (gamma > 0.0) x.array() += gamma;
  beta.setZero();

  const double tol = 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff());
  if (x.minCoeff() >= -tol) {
    x = x.cwiseMax(0.0);  // rounding residue from the vertex shift
    return;
  }

  double best_l1 = std::numeric_limits<double>::infinity();
  std::size_t best_mask = 0;
  Eigen::VectorXd best_beta = Eigen::VectorXd::Zero(J);
  Eigen::VectorXd cand(J);
  Eigen::VectorXd w(J);
  for (std::size_t mask = 1; mask < subsets_.size(); ++mask) {
    const auto& s = subsets_[mask];
    if (!s) continue;
    const auto k = static_cast<Eigen::Index>(s->index.size());
    Eigen::VectorXd xs(k);
    for (Eigen::Index a = 0; a < k; ++a) xs[a] = x[s->index[a]];
    const Eigen::VectorXd bs = -(s->inverse * xs);
    if (bs.minCoeff() < -tol) continue;
    cand.setZero();
    for (Eigen::Index a = 0; a < k; ++a) cand[s->index[a]] = std::max(bs[a], 0.0);
    w = x + directions_ * cand;
    bool feasible = true;
    for (Eigen::Index i = 0; i < J && feasible; ++i)
      if (!(mask & (std::size_t{1} << i)) && w[i] < -tol) feasible = false;
    if (!feasible) continue;
    const double l1 = cand.sum();
    if (l1 < best_l1) {
      best_l1 = l1;
      best_mask = mask;
      best_beta = cand;
    }
  }
  if (best_mask == 0)
    throw UnsolvableStep(std::vector<double>(z_prev.begin(), z_prev.end()),
                         std::vector<double>(delta.begin(), delta.end()));
  beta = best_beta;
  x += directions_ * beta;
  for (Eigen::Index i = 0; i < J; ++i)
    if (best_mask & (std::size_t{1} << i) || x[i] < 0.0) x[i] = 0.0;
}

GpsStep GpsStepSolver::solve(std::span<const double> z_prev, std::span<const double> delta) const {
  if (z_prev.size() != dim_ || delta.size() != dim_)
    throw DomainError("gps_step_solver: dimension mismatch");
  for (double z : z_prev)
    if (!(z >= -kDomainTol)) throw DomainError("gps_step_solver: z_prev outside the orthant");
  const auto J = static_cast<Eigen::Index>(dim_);
  Eigen::VectorXd x(J);
  Eigen::VectorXd beta(J);
  GpsStep step;
  solve_in_place(x, beta, step.gamma, z_prev, delta);
  const Eigen::VectorXd eta = directions_ * beta + Eigen::VectorXd::Constant(J, step.gamma);
  step.z_next.assign(x.data(), x.data() + J);
  step.eta_incr.assign(eta.data(), eta.data() + J);
  step.beta.assign(beta.data(), beta.data() + J);
  return step;
}

bool GpsStepSolver::solve_push(std::span<const double> z_prev, std::span<const double> delta,
                               std::span<double> eta_incr) const {
  // Fast path: the free step stays in the orthant.
  bool inside = true;
  for (std::size_t i = 0; i < dim_; ++i)
    if (z_prev[i] + delta[i] < 0.0) {
      inside = false;
      break;
    }
  if (inside) {
    std::fill(eta_incr.begin(), eta_incr.end(), 0.0);
    return false;
  }
  const auto J = static_cast<Eigen::Index>(dim_);
  Eigen::VectorXd x(J);
  Eigen::VectorXd beta(J);
  double gamma = 0.0;
  solve_in_place(x, beta, gamma, z_prev, delta);
  const Eigen::VectorXd eta = directions_ * beta;
  for (std::size_t i = 0; i < dim_; ++i) eta_incr[i] = eta[static_cast<Eigen::Index>(i)] + gamma;
  return true;
}

Reflection gps_esm_discrete(const Path& psi, const GpsWeights& weights) {
  if (psi.dim() != weights.dim()) throw DomainError("gps_esm_discrete: dimension mismatch");
  if (!in_domain(weights, psi.row(0))) throw DomainError("gps_esm_discrete: psi(0) outside the orthant");
  return fold_stepper(weights, psi);
}

// -- ConstraintStepper -------------------------------------------------------

ConstraintStepper::ConstraintStepper(const EspSpec& esp, std::span<const double> x0)
    : x_(x0.begin(), x0.end()), y_(x0.size(), 0.0), z_(x0.begin(), x0.end()) {
  if (x0.size() != esp_dim(esp)) throw DomainError("initial point has the wrong dimension");
  if (!in_domain(esp, x0)) throw DomainError("initial point outside the domain G");
  std::visit(detail::overloaded{
                 [&](const HalfLine&) {
                   kind_ = Kind::half_line;
                   y_[0] = std::max(0.0, -x_[0]);
                   z_[0] = x_[0] + y_[0];
                 },
                 [&](const GpsWeights& w) {
                   kind_ = Kind::gps;
                   gps_.emplace(w);
                   delta_.resize(w.dim());
                   eta_.resize(w.dim());
                 },
                 [&](const ValleyDomain& d) {
                   kind_ = Kind::valley;
                   valley_ = d;
                   y_[1] = std::max(0.0, -x_[1]);
                   z_[1] = x_[1] + y_[1];
                   y_[0] = -xi_.push(x_[0], d.left(z_[1]), d.right(z_[1]));
                   z_[0] = x_[0] + y_[0];
                 }},
             esp);
}

void ConstraintStepper::advance(std::span<const double> x_next) {
  switch (kind_) {
    case Kind::half_line:
      x_[0] = x_next[0];
      y_[0] = std::max(y_[0], -x_[0]);
      z_[0] = x_[0] + y_[0];
      break;
    case Kind::gps: {
      for (std::size_t i = 0; i < x_.size(); ++i) delta_[i] = x_next[i] - x_[i];
      const bool pushed = gps_->solve_push(z_, delta_, eta_);
      for (std::size_t i = 0; i < x_.size(); ++i) {
        x_[i] = x_next[i];
        if (pushed) y_[i] += eta_[i];
        z_[i] = x_[i] + y_[i];
      }
      break;
    }
    case Kind::valley: {
      x_[0] = x_next[0];
      x_[1] = x_next[1];
      y_[1] = std::max(y_[1], -x_[1]);
      z_[1] = x_[1] + y_[1];
      y_[0] = -xi_.push(x_[0], valley_->left(z_[1]), valley_->right(z_[1]));
      z_[0] = x_[0] + y_[0];
      break;
    }
  }
}

}  // namespace reflectolab
