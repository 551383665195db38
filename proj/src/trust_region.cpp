#include "trmpc/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trmpc/stats.hpp"

namespace trmpc {

namespace {

constexpr double kArgmaxThreshold = 1e-6;  // eta + alpha below this -> argmax
constexpr double kLogDelta = 1e-12;        // offset of the log coordinates

void check_inputs(double eta, double alpha, const Vector& logp,
                  const Vector& costs) {
  if (!(eta > 0.0) || !(alpha >= 0.0))
    throw std::invalid_argument("trust_region: multipliers out of range");
  if (logp.size() != costs.size() || logp.size() < 1)
    throw std::invalid_argument("trust_region: logp/costs size mismatch");
}

/// Exponents of the unnormalized trust-region weights.
Vector weight_exponents(double eta, double alpha, const Vector& logp,
                        const Vector& costs) {
  const double total = eta + alpha;
  const double kappa = eta / total - 1.0;  // exactly zero when alpha == 0
  Vector e(logp.size());
  for (Index i = 0; i < logp.size(); ++i)
    e[i] = kappa * logp[i] - costs[i] / total;
  return e;
}

}  // namespace

double log_partition(double eta, double alpha, const Vector& logp,
                     const Vector& costs) {
  check_inputs(eta, alpha, logp, costs);
  const Vector e = weight_exponents(eta, alpha, logp, costs);
  const double m = e.maxCoeff();
  if (!std::isfinite(m))
    throw std::runtime_error("log_partition: degenerate batch (all costs infinite)");
  double sum = 0.0;
  for (Index i = 0; i < e.size(); ++i) {
    const double shifted = e[i] - m;
    if (shifted >= kExpFlush) sum += std::exp(shifted);
  }
  // m + log(sum/n) keeps the constant-cost case exact.
  return m + std::log(sum / static_cast<double>(e.size()));
}

double dual_value(double eta, double alpha, const Vector& logp,
                  const Vector& costs, const TrustRegionConfig& cfg) {
  if (!std::isfinite(cfg.h_min) && alpha != 0.0)
    throw std::invalid_argument("dual_value: alpha must be 0 when h_min is disabled");
  const double log_z = log_partition(eta, alpha, logp, costs);
  const double entropy_term = alpha == 0.0 ? 0.0 : alpha * cfg.h_min;
  return -eta * cfg.epsilon + entropy_term - (eta + alpha) * log_z;
}

Eigen::Vector2d dual_gradient(double eta, double alpha, const Vector& logp,
                              const Vector& costs, const TrustRegionConfig& cfg) {
  if (!std::isfinite(cfg.h_min) && alpha != 0.0)
    throw std::invalid_argument("dual_gradient: alpha must be 0 when h_min is disabled");
  check_inputs(eta, alpha, logp, costs);

  const double total = eta + alpha;
  const Vector e = weight_exponents(eta, alpha, logp, costs);
  const double m = e.maxCoeff();
  if (!std::isfinite(m))
    throw std::runtime_error("dual_gradient: degenerate batch (all costs infinite)");

  double sum = 0.0;
  double acc_eta = 0.0;    // E_w[alpha*logp + J] accumulator
  double acc_alpha = 0.0;  // E_w[-eta*logp + J] accumulator
  for (Index i = 0; i < e.size(); ++i) {
    const double shifted = e[i] - m;
    if (shifted < kExpFlush) continue;  // vanishing or +inf-cost rows
    const double w = std::exp(shifted);
    if (w == 0.0) continue;
    sum += w;
    acc_eta += w * (alpha * logp[i] + costs[i]);
    acc_alpha += w * (-eta * logp[i] + costs[i]);
  }
  const double log_z = m + std::log(sum / static_cast<double>(e.size()));
  const double dlogz_deta = acc_eta / sum / (total * total);
  const double dlogz_dalpha = acc_alpha / sum / (total * total);

  Eigen::Vector2d grad;
  grad[0] = -log_z - total * dlogz_deta - cfg.epsilon;
  grad[1] = -log_z - total * dlogz_dalpha + cfg.h_min;
  return grad;
}

DualState solve_dual(const Vector& logp, const Vector& costs,
                     const TrustRegionConfig& cfg,
                     const std::optional<DualState>& warm_start) {
  if (!(cfg.epsilon > 0.0) || !(cfg.eta_floor > 0.0))
    throw std::invalid_argument("solve_dual: invalid config");
  const bool pin_alpha = !std::isfinite(cfg.h_min);
  constexpr double kMultiplierCap = 1e12;

  // The dual is concave, so each partial derivative is non-increasing along
  // its own coordinate: every coordinate maximization is a monotone
  // root-find, solved by bisection in log space. Block coordinate ascent
  // over the two multipliers then converges without step-size tuning.
  auto partial = [&](double eta, double alpha, int coord) {
    return dual_gradient(eta, alpha, logp, costs, cfg)[coord];
  };

  auto bisect_coordinate = [&](int coord, double fixed, double floor,
                               double hint) {
    auto grad_at = [&](double x) {
      return coord == 0 ? partial(x, fixed, 0) : partial(fixed, x, 1);
    };
    if (grad_at(floor) <= 0.0) return floor;  // boundary optimum
    double lo = floor;
    double hi = std::max({4.0 * floor, 4.0 * hint, 1.0});
    while (grad_at(hi) > 0.0) {
      lo = hi;
      hi *= 8.0;
      if (hi >= kMultiplierCap) return kMultiplierCap;
    }
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
      mid = lo <= 0.0 ? 0.5 * hi : std::sqrt(lo * hi);
      const double g_mid = grad_at(mid);
      if (std::abs(g_mid) <= 0.5 * cfg.grad_tol) return mid;
      (g_mid > 0.0 ? lo : hi) = mid;
      if (hi - lo <= 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
  };

  double eta = warm_start ? std::max(warm_start->eta, cfg.eta_floor) : 1.0;
  double alpha =
      pin_alpha ? 0.0
                : (warm_start ? std::max(warm_start->alpha, cfg.alpha_floor) : 0.0);

  DualState out;
  const int max_rounds = std::max(1, cfg.max_iterations);
  for (int round = 0; round < max_rounds; ++round) {
    out.iterations = round + 1;
    eta = bisect_coordinate(0, alpha, cfg.eta_floor, eta);
    if (!pin_alpha) alpha = bisect_coordinate(1, eta, cfg.alpha_floor, alpha);

    Eigen::Vector2d grad = dual_gradient(eta, alpha, logp, costs, cfg);
    if (pin_alpha) grad[1] = 0.0;
    Eigen::Vector2d projected = grad;
    if (eta <= cfg.eta_floor * (1.0 + 1e-9) && grad[0] < 0.0) projected[0] = 0.0;
    if (!pin_alpha && alpha <= cfg.alpha_floor + 1e-12 && grad[1] < 0.0)
      projected[1] = 0.0;

    out.gradient = grad;
    if (projected.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) {
      out.converged = true;
      break;
    }
  }

  out.eta = eta;
  out.alpha = alpha;
  out.dual_value = dual_value(eta, alpha, logp, costs, cfg);
  return out;
}

Vector tr_weights(double eta, double alpha, const Vector& logp,
                  const Vector& costs) {
  check_inputs(eta, alpha, logp, costs);
  if (eta + alpha < kArgmaxThreshold) {
    // The exponent divides by eta + alpha; below the threshold the softmax
    // is an argmax over costs, assigned explicitly.
    Index best = 0;
    costs.minCoeff(&best);
    if (!std::isfinite(costs[best]))
      throw std::runtime_error("tr_weights: degenerate batch (all costs infinite)");
    Vector w = Vector::Zero(costs.size());
    w[best] = 1.0;
    return w;
  }
  return log_softmax_normalized(weight_exponents(eta, alpha, logp, costs));
}

GaussianProposal project_gaussian(const Matrix& samples, const Vector& weights,
                                  const Matrix* correlation_template) {
  const Index n = samples.rows();
  const Index d = samples.cols();
  if (weights.size() != n)
    throw std::invalid_argument("project_gaussian: weight size mismatch");
  if (n < 2)
    throw std::runtime_error("project_gaussian: degenerate elite mass");
  if (effective_sample_size(weights) < 1.5)
    throw std::runtime_error("project_gaussian: degenerate elite mass");

  const Vector mean = samples.transpose() * weights;
  Matrix centered = samples.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * weights.asDiagonal() * centered;

  if (correlation_template != nullptr) {
    if (correlation_template->rows() != d || correlation_template->cols() != d)
      throw std::invalid_argument("project_gaussian: template size mismatch");
    return make_gaussian_corr(mean, cov.diagonal(), *correlation_template);
  }
  return make_gaussian(mean, std::move(cov));
}

TrUpdateResult tr_update(const GaussianProposal& proposal, SampleBatch& batch,
                         const TrustRegionConfig& cfg,
                         const Matrix* correlation_template,
                         const std::optional<DualState>& warm_start) {
  const Index n = batch.size();
  if (batch.logpdf.size() != n || batch.costs.size() != n)
    throw std::invalid_argument("tr_update: batch not fully populated");

  Vector dual_logp, dual_costs;
  if (cfg.buffer_in_dual || batch.origin.empty()) {
    dual_logp = batch.logpdf;
    dual_costs = batch.costs;
  } else {
    Index fresh = 0;
    for (auto o : batch.origin) fresh += o == SampleOrigin::fresh ? 1 : 0;
    dual_logp.resize(fresh);
    dual_costs.resize(fresh);
    Index k = 0;
    for (Index i = 0; i < n; ++i) {
      if (batch.origin[i] == SampleOrigin::fresh) {
        dual_logp[k] = batch.logpdf[i];
        dual_costs[k] = batch.costs[i];
        ++k;
      }
    }
  }

  TrUpdateResult result;
  result.dual = solve_dual(dual_logp, dual_costs, cfg, warm_start);
  batch.weights =
      tr_weights(result.dual.eta, result.dual.alpha, batch.logpdf, batch.costs);
  result.effective_sample_size = effective_sample_size(batch.weights);
  result.proposal =
      project_gaussian(batch.samples, batch.weights, correlation_template);
  result.kl_new_old = gaussian_kl(result.proposal, proposal);
  result.entropy_new = gaussian_entropy(result.proposal);
  return result;
}

}  // namespace trmpc
