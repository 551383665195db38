#pragma once

#include <cstdint>
#include <vector>

#include "trmpc/types.hpp"

namespace trmpc {

enum class SampleOrigin : std::uint8_t { fresh, buffered };

/// One optimizer iteration's worth of sampled control sequences together
/// with everything the update rules consume. Rows with +inf cost mark
/// failed rollouts and receive zero weight under every update rule.
struct SampleBatch {
  Matrix samples;  // N x d_v, one sequence per row
  Vector costs;    // N
  Vector logpdf;   // N, log density under the generating proposal
  Vector weights;  // N, filled by an update rule, sums to one
  std::vector<SampleOrigin> origin;  // N

  Index size() const { return samples.rows(); }
};

}  // namespace trmpc
