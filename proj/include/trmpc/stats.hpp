#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "trmpc/types.hpp"

namespace trmpc {

/// Shifted exponents below this are flushed to zero: the results would be
/// subnormal (slow on common libms) and vanish in the normalized sums.
constexpr double kExpFlush = -700.0;

/// log(sum(exp(x))) with max-shift; -inf entries contribute nothing.
/// Returns -inf when every entry is -inf.
inline double logsumexp(const Vector& x) {
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double e = x[i] - m;
    if (e >= kExpFlush) s += std::exp(e);
  }
  return m + std::log(s);
}

/// exp(x - logsumexp(x)), renormalized to sum exactly to one in floating
/// point. Throws when all entries are -inf.
inline Vector log_softmax_normalized(const Vector& x) {
  const double lse = logsumexp(x);
  if (!std::isfinite(lse))
    throw std::runtime_error("log_softmax: degenerate batch (all weights zero)");
  Vector w(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double e = x[i] - lse;
    w[i] = e >= kExpFlush ? std::exp(e) : 0.0;
  }
  w /= w.sum();
  return w;
}

/// Percentile with linear interpolation on a sorted vector, q in [0, 1].
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty set");
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double effective_sample_size(const Vector& weights) {
  const double s2 = weights.squaredNorm();
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

}  // namespace trmpc
