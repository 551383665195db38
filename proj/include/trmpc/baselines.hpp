#pragma once

#include "trmpc/gaussian.hpp"
#include "trmpc/types.hpp"

namespace trmpc {

/// Importance-weighting baseline with a quantile-range temperature
/// heuristic and momentum smoothing. Exactly one of fixed lambda /
/// adaptive is active.
struct MppiConfig {
  bool adaptive = true;
  double lambda = 1.0;   // used when adaptive == false
  double kappa = 10.0;   // temperature heuristic scale
  double momentum = 0.3; // alpha_m in [0, 1)
};

struct CemConfig {
  double elite_fraction = 0.1;  // in (0, 1], elite count >= 2
  double momentum = 0.1;        // alpha_m in [0, 1)
};

/// softmax(-costs / lambda), computed in the log domain, sums to one.
Vector mppi_weights(const Vector& costs, double lambda);

/// lambda = max(1e-8, (quantile_0.9(costs) - min(costs)) / kappa) over the
/// finite entries.
double adapt_temperature(const Vector& costs, double kappa);

/// Convex blend alpha_m * old + (1 - alpha_m) * fresh; applied to means
/// and to marginal variances.
Vector momentum_blend(const Vector& old_value, const Vector& new_value,
                      double alpha_m);

/// Elite moment match: selects ceil(elite_fraction * N) lowest-cost rows
/// (ties broken by row index), moment-matches them with uniform weights,
/// momentum-blends mean and marginal variances against `previous`, and
/// routes the variances through the correlation template when given.
GaussianProposal cem_update(const Matrix& samples, const Vector& costs,
                            const GaussianProposal& previous,
                            const CemConfig& cfg,
                            const Matrix* correlation_template = nullptr);

}  // namespace trmpc
