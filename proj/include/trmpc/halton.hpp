#pragma once

#include <cstdint>
#include <vector>

#include "trmpc/types.hpp"

namespace trmpc {

/// Halton sequence with independent random digit permutations per
/// (dimension, digit position), deep enough to cover double precision.
/// Leading-zero digits are permuted as well, so every index maps to an
/// interior point.
class HaltonSequence {
 public:
  static constexpr Index kMaxDimensions = 64;

  HaltonSequence(Index dim, std::uint64_t scramble_seed);

  Index dim() const { return dim_; }

  /// Fills `out` (n x dim) with the next n scrambled points in (0, 1).
  void next_block(Index n, Matrix& out);

 private:
  Index dim_ = 0;
  std::vector<int> bases_;
  // perms_[dim][digit] is a permutation of {0, ..., base-1}
  std::vector<std::vector<std::vector<std::uint16_t>>> perms_;
  std::uint64_t index_ = 0;
};

}  // namespace trmpc
