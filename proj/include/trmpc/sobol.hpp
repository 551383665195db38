#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "trmpc/types.hpp"

namespace trmpc {

/// Digital (t, s)-sequence in base 2 with nested uniform scrambling.
/// The first two dimensions use the canonical direction numbers; higher
/// dimensions combine primitive polynomials over GF(2) (enumerated in
/// ascending degree order) with seed-randomized odd initial values, and
/// every dimension is passed through a hash-based Owen scramble keyed by
/// the scramble seed. Each dimension is a (0, 1)-sequence, so per-axis
/// stratification holds for any prefix.
class SobolSequence {
 public:
  static constexpr Index kMaxDimensions = 64;

  SobolSequence(Index dim, std::uint64_t scramble_seed);

  Index dim() const { return dim_; }

  /// Fills `out` (n x dim) with the next n scrambled points in (0, 1).
  void next_block(Index n, Matrix& out);

 private:
  Index dim_ = 0;
  std::vector<std::array<std::uint32_t, 32>> directions_;  // per dimension
  std::vector<std::uint32_t> state_;                       // current point
  std::vector<std::uint32_t> scramble_key_;                // per dimension
  std::uint64_t index_ = 0;
};

/// Hash-based Owen-style scramble of a 32-bit radical-inverse value.
std::uint32_t owen_scramble(std::uint32_t value, std::uint32_t key);

}  // namespace trmpc
