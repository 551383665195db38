#pragma once

#include <cmath>
#include <functional>

#include "trmpc/gaussian.hpp"
#include "trmpc/rng.hpp"
#include "trmpc/types.hpp"

namespace trmpc::test {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

inline Matrix random_spd(Index dim, Rng& rng) {
  Matrix a = random_matrix(dim, dim, rng);
  return a * a.transpose() / static_cast<double>(dim) +
         0.3 * Matrix::Identity(dim, dim);
}

inline GaussianProposal random_gaussian(Index dim, Rng& rng) {
  return make_gaussian(random_vector(dim, rng), random_spd(dim, rng));
}

// Adaptive Simpson quadrature, used as an independent oracle.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 24) {
  const double c = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fc = f(c);
  std::function<double(double, double, double, double, double, double, int)> go =
      [&](double lo, double hi, double flo, double fhi, double fmid, double whole,
          int level) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double flm = f(lmid), frm = f(rmid);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (level <= 0 || std::abs(left + right - whole) < 15.0 * tol)
      return left + right + (left + right - whole) / 15.0;
    return go(lo, mid, flo, fmid, flm, left, level - 1) +
           go(mid, hi, fmid, fhi, frm, right, level - 1);
  };
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
  return go(a, b, fa, fb, fc, whole, depth);
}

}  // namespace trmpc::test
