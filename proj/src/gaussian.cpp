#include "trmpc/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace trmpc {

namespace {
constexpr double kLog2Pi = 1.8378770664093455;
constexpr double kLog2PiE = 2.8378770664093453;
}  // namespace

double covariance_jitter(const Matrix& cov) {
  const double d = static_cast<double>(cov.rows());
  return 1e-9 * cov.trace() / d + 1e-12;
}

GaussianProposal make_gaussian(Vector mean, Matrix cov) {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size())
    throw std::invalid_argument("make_gaussian: dimension mismatch");
  Matrix sym = 0.5 * (cov + cov.transpose());
  double jitter = covariance_jitter(sym);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix c = sym;
    c.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() == Eigen::Success) {
      GaussianProposal p;
      p.mean = std::move(mean);
      p.cov = std::move(c);
      p.chol = llt.matrixL();
      return p;
    }
    jitter = jitter * 10.0 + 1e-12;
  }
  throw std::runtime_error("make_gaussian: covariance not factorizable");
}

GaussianProposal make_gaussian_corr(Vector mean, const Vector& variances,
                                    const Matrix& correlation) {
  const Index d = mean.size();
  if (variances.size() != d || correlation.rows() != d || correlation.cols() != d)
    throw std::invalid_argument("make_gaussian_corr: dimension mismatch");
  double jitter = 1e-9 * variances.cwiseMax(0.0).mean() + 1e-12;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const Vector scale = (variances.cwiseMax(0.0).array() + jitter).sqrt();
    Matrix cov = scale.asDiagonal() * correlation * scale.asDiagonal();
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) {
      GaussianProposal p;
      p.mean = std::move(mean);
      p.cov = std::move(cov);
      p.chol = llt.matrixL();
      return p;
    }
    jitter = jitter * 10.0 + 1e-12;
  }
  throw std::runtime_error("make_gaussian_corr: covariance not factorizable");
}

Vector gaussian_logpdf_batch(const GaussianProposal& p, const Matrix& samples) {
  const Index d = p.dim();
  if (samples.cols() != d)
    throw std::invalid_argument("gaussian_logpdf_batch: dimension mismatch");
  const double log_det_half = p.chol.diagonal().array().log().sum();
  const double norm_const = -0.5 * static_cast<double>(d) * kLog2Pi - log_det_half;
  Matrix centered = (samples.rowwise() - p.mean.transpose()).transpose();
  p.chol.triangularView<Eigen::Lower>().solveInPlace(centered);
  return (norm_const - 0.5 * centered.colwise().squaredNorm().array()).transpose();
}

double gaussian_entropy(const GaussianProposal& p) {
  return 0.5 * static_cast<double>(p.dim()) * kLog2PiE +
         p.chol.diagonal().array().log().sum();
}

double gaussian_kl(const GaussianProposal& p, const GaussianProposal& q) {
  const Index d = p.dim();
  if (q.dim() != d) throw std::invalid_argument("gaussian_kl: dimension mismatch");
  // trace(Cq^-1 Cp) = ||Lq^-1 Lp||_F^2
  Matrix m = q.chol.triangularView<Eigen::Lower>().solve(p.chol);
  const double trace_term = m.squaredNorm();
  Vector diff = q.chol.triangularView<Eigen::Lower>().solve(q.mean - p.mean);
  const double maha = diff.squaredNorm();
  const double log_det = 2.0 * (q.chol.diagonal().array().log().sum() -
                                p.chol.diagonal().array().log().sum());
  return 0.5 * (trace_term + maha - static_cast<double>(d) + log_det);
}

}  // namespace trmpc
