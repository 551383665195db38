#pragma once

#include "trmpc/types.hpp"

namespace trmpc {

/// Gaussian over stacked control sequences, kept together with its lower
/// Cholesky factor so densities and transforms never invert the covariance.
struct GaussianProposal {
  Vector mean;
  Matrix cov;   // symmetric positive definite after construction
  Matrix chol;  // lower triangular, chol * chol^T == cov

  Index dim() const { return mean.size(); }
};

/// Diagonal floor added before factorization. Moment-matched covariances
/// from few samples are rank deficient; the absolute term covers the
/// all-points-identical case where the trace vanishes.
double covariance_jitter(const Matrix& cov);

/// Symmetrizes, applies the jitter floor and factorizes. Escalates the
/// jitter if the factorization fails on badly conditioned input.
GaussianProposal make_gaussian(Vector mean, Matrix cov);

/// Builds S * correlation * S from marginal variances and a unit-diagonal
/// correlation matrix. The jitter floor goes on the variances, never on
/// the off-diagonal structure, so the correlation of the result equals the
/// template to rounding.
GaussianProposal make_gaussian_corr(Vector mean, const Vector& variances,
                                    const Matrix& correlation);

/// log N(v; mean, cov) for each row of `samples`, via triangular solves.
Vector gaussian_logpdf_batch(const GaussianProposal& p, const Matrix& samples);

/// Differential entropy: d/2 log(2 pi e) + sum_i log L_ii.
double gaussian_entropy(const GaussianProposal& p);

/// Closed-form D_KL(p || q) between same-dimension Gaussians.
double gaussian_kl(const GaussianProposal& p, const GaussianProposal& q);

}  // namespace trmpc
