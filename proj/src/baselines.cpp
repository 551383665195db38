#include "trmpc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trmpc/stats.hpp"
#include "trmpc/trust_region.hpp"

namespace trmpc {

Vector mppi_weights(const Vector& costs, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("mppi_weights: lambda must be positive");
  return log_softmax_normalized(-costs / lambda);
}

double adapt_temperature(const Vector& costs, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("adapt_temperature: kappa must be positive");
  std::vector<double> finite;
  finite.reserve(costs.size());
  for (Index i = 0; i < costs.size(); ++i)
    if (std::isfinite(costs[i])) finite.push_back(costs[i]);
  if (finite.empty()) return 1e-8;
  std::sort(finite.begin(), finite.end());
  const double spread = percentile_sorted(finite, 0.9) - finite.front();
  return std::max(1e-8, spread / kappa);
}

Vector momentum_blend(const Vector& old_value, const Vector& new_value,
                      double alpha_m) {
  if (!(alpha_m >= 0.0 && alpha_m < 1.0))
    throw std::invalid_argument("momentum_blend: alpha_m must be in [0, 1)");
  if (old_value.size() != new_value.size())
    throw std::invalid_argument("momentum_blend: size mismatch");
  return alpha_m * old_value + (1.0 - alpha_m) * new_value;
}

GaussianProposal cem_update(const Matrix& samples, const Vector& costs,
                            const GaussianProposal& previous,
                            const CemConfig& cfg,
                            const Matrix* correlation_template) {
  const Index n = samples.rows();
  if (costs.size() != n) throw std::invalid_argument("cem_update: size mismatch");
  if (!(cfg.elite_fraction > 0.0 && cfg.elite_fraction <= 1.0))
    throw std::invalid_argument("cem_update: elite_fraction out of range");
  const Index elite_count = static_cast<Index>(
      std::ceil(cfg.elite_fraction * static_cast<double>(n)));
  if (elite_count < 2)
    throw std::invalid_argument("cem_update: need at least 2 elites");

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + elite_count, order.end(),
                    [&](Index a, Index b) {
                      if (costs[a] != costs[b]) return costs[a] < costs[b];
                      return a < b;  // deterministic under ties
                    });

  if (elite_count == n && cfg.momentum == 0.0) {
    // Plain uniform moment match, bit-identical to the projection path.
    return project_gaussian(samples,
                            Vector::Constant(n, 1.0 / static_cast<double>(n)),
                            correlation_template);
  }

  Matrix elites(elite_count, samples.cols());
  for (Index k = 0; k < elite_count; ++k) elites.row(k) = samples.row(order[k]);
  GaussianProposal matched = project_gaussian(
      elites, Vector::Constant(elite_count, 1.0 / static_cast<double>(elite_count)),
      correlation_template);
  if (cfg.momentum == 0.0) return matched;

  const Vector mean = momentum_blend(previous.mean, matched.mean, cfg.momentum);
  const Vector variances =
      momentum_blend(previous.cov.diagonal(), matched.cov.diagonal(), cfg.momentum);
  if (correlation_template != nullptr)
    return make_gaussian_corr(mean, variances, *correlation_template);
  // Without a template, rescale the matched covariance to the blended
  // marginal variances; momentum never touches the correlation.
  const Vector std_dev = variances.cwiseMax(0.0).cwiseSqrt();
  Vector matched_std = matched.cov.diagonal().cwiseMax(1e-300).cwiseSqrt();
  Vector ratio = std_dev.cwiseQuotient(matched_std);
  Matrix cov = ratio.asDiagonal() * matched.cov * ratio.asDiagonal();
  return make_gaussian(mean, std::move(cov));
}

}  // namespace trmpc
