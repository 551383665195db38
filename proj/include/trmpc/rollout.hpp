#pragma once

#include "trmpc/ocp.hpp"

namespace trmpc {

struct RolloutResult {
  Vector costs;      // one cumulative cost per input row
  int failures = 0;  // rows that went non-finite and were set to +inf
};

/// Shoots every row of `samples` (already clipped to bounds) from x0 and
/// accumulates stage plus terminal cost. Rows are independent and are
/// distributed over `threads` workers; the result is bitwise independent
/// of the schedule. A non-finite state or cost flags the row with +inf
/// instead of aborting the batch.
RolloutResult rollout_batch(const OcpConfig& ocp, const Vector& x0,
                            const Matrix& samples, int threads = 1);

}  // namespace trmpc
