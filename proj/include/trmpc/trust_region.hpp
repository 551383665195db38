#pragma once

#include <limits>
#include <optional>

#include "trmpc/batch.hpp"
#include "trmpc/gaussian.hpp"

namespace trmpc {

/// Trust-region update settings. epsilon bounds the KL divergence between
/// consecutive proposals; h_min is the entropy lower bound and -inf
/// disables the entropy constraint (pinning its multiplier to zero).
struct TrustRegionConfig {
  double epsilon = 2.0;
  double h_min = -std::numeric_limits<double>::infinity();
  double eta_floor = 1e-6;
  double alpha_floor = 0.0;
  int max_iterations = 200;
  double grad_tol = 1e-8;
  /// Buffered rows are excluded from the dual's expectation estimate by
  /// default: it averages over rows drawn from the current proposal, and
  /// foreign rows bias the partition estimate. They always participate in
  /// the weights and the moment match.
  bool buffer_in_dual = false;
};

struct DualState {
  double eta = 1.0;
  double alpha = 0.0;
  double dual_value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  bool converged = false;
  int iterations = 0;
};

/// All operations below take log densities of the samples under the
/// generating proposal and their rollout costs; expectations over the
/// proposal are estimated as sample means over those rows.

/// log of the sample-estimated partition function
/// Z = E[ p^(eta/(eta+alpha) - 1) * exp(-J / (eta+alpha)) ],
/// computed entirely in the log domain. Rows with +inf cost contribute
/// nothing; throws "degenerate batch" when every row does.
double log_partition(double eta, double alpha, const Vector& logp,
                     const Vector& costs);

/// g(eta, alpha) = -eta*epsilon + alpha*h_min - (eta+alpha)*log Z.
double dual_value(double eta, double alpha, const Vector& logp,
                  const Vector& costs, const TrustRegionConfig& cfg);

/// Analytic gradient of the sample-estimated dual, self-normalized in the
/// log domain. Matches central finite differences of dual_value.
Eigen::Vector2d dual_gradient(double eta, double alpha, const Vector& logp,
                              const Vector& costs, const TrustRegionConfig& cfg);

/// Maximizes the dual over [eta_floor, inf) x [alpha_floor, inf) with
/// projected gradient ascent in log coordinates (Barzilai-Borwein step,
/// Armijo backtracking). With h_min = -inf the alpha coordinate is pinned
/// to zero and the problem is one-dimensional.
DualState solve_dual(const Vector& logp, const Vector& costs,
                     const TrustRegionConfig& cfg,
                     const std::optional<DualState>& warm_start = std::nullopt);

/// Normalized weights w_i proportional to
/// p^(eta/(eta+alpha) - 1) * exp(-J / (eta+alpha)). At eta+alpha below
/// 1e-6 the weights degenerate to argmax selection of the min-cost row.
/// Rows with +inf cost get weight zero.
Vector tr_weights(double eta, double alpha, const Vector& logp,
                  const Vector& costs);

/// Weighted moment match. When a correlation template (unit diagonal) is
/// supplied, only the marginal variances are taken from the weighted
/// covariance and the result is D^1/2 * template * D^1/2. Throws
/// "degenerate elite mass" when the effective sample size drops below 1.5.
GaussianProposal project_gaussian(const Matrix& samples, const Vector& weights,
                                  const Matrix* correlation_template = nullptr);

struct TrUpdateResult {
  GaussianProposal proposal;
  DualState dual;
  double kl_new_old = 0.0;   // closed-form Gaussian KL, post-projection
  double entropy_new = 0.0;
  double effective_sample_size = 0.0;
};

/// Full trust-region update: solve the dual, weight the batch, project back
/// to a Gaussian. `batch.logpdf` must have been computed under `proposal`;
/// batch.weights is filled as a side effect.
TrUpdateResult tr_update(const GaussianProposal& proposal, SampleBatch& batch,
                         const TrustRegionConfig& cfg,
                         const Matrix* correlation_template = nullptr,
                         const std::optional<DualState>& warm_start = std::nullopt);

}  // namespace trmpc
