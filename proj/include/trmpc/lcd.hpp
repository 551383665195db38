#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "trmpc/types.hpp"

namespace trmpc {

/// Deterministic Dirac-mixture approximation of N(0, I), optimized offline
/// and loaded at controller setup. Immutable once built.
struct LcdSampleSet {
  Index dim = 0;
  Index count = 0;
  Matrix points;  // count x dim
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  std::uint64_t seed = 0;
  bool quality_ok = true;
  std::vector<double> objective_trace;  // accepted steps, non-increasing

  Vector sample_mean() const;
  Matrix sample_covariance() const;  // 1/N normalization
  /// Mean norm within 0.02 sqrt(d) and, for count >= dim + 2, covariance
  /// entries within 0.05 of the identity.
  bool moments_within_bounds() const;
};

struct LcdOptimizeOptions {
  int budget = 400;  // quasi-Newton iterations per start
  int starts = 5;
  double grad_tol = 1e-10;
  bool parallel_starts = true;
};

/// Minimizes a smooth discrepancy between the point set and N(0, I)
/// (Gaussian-kernel MMD summed over several kernel widths, closed-form
/// gradients) with L-BFGS from random-normal initializations, keeping the
/// best of `starts` runs. Deterministic given (n, dim, options, seed).
/// Sets quality_ok = false when the moment bounds are not met within the
/// budget; the caller decides what to do with such a set.
LcdSampleSet optimize_lcd_set(Index n, Index dim, const LcdOptimizeOptions& options,
                              std::uint64_t seed);

/// Plain-text format: line 1 "LCD v1", line 2 "<dim> <count>", then
/// `count` rows of `dim` floats at 17 significant digits. The round trip
/// is bitwise exact on the points.
void save_sample_set(const LcdSampleSet& set, const std::string& path);
LcdSampleSet load_sample_set(const std::string& path);

}  // namespace trmpc
