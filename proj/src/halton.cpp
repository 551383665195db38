#include "trmpc/halton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trmpc/rng.hpp"

namespace trmpc {

namespace {

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int candidate = 2; static_cast<int>(primes.size()) < count; ++candidate) {
    bool is_prime = true;
    for (int p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(candidate);
  }
  return primes;
}

int digit_depth(int base) {
  // Enough digits that the truncated tail is below 2^-52.
  int depth = 0;
  double resolution = 1.0;
  while (resolution > 0x1p-52) {
    resolution /= base;
    ++depth;
  }
  return depth;
}

}  // namespace

HaltonSequence::HaltonSequence(Index dim, std::uint64_t scramble_seed)
    : dim_(dim) {
  if (dim < 1 || dim > kMaxDimensions)
    throw std::invalid_argument("HaltonSequence: dimension out of supported range");
  bases_ = first_primes(static_cast<int>(dim));
  perms_.resize(dim);
  for (Index j = 0; j < dim; ++j) {
    const int base = bases_[j];
    const int depth = digit_depth(base);
    perms_[j].resize(depth);
    for (int t = 0; t < depth; ++t) {
      auto& perm = perms_[j][t];
      perm.resize(base);
      std::iota(perm.begin(), perm.end(), std::uint16_t{0});
      Rng rng(derive_seed(derive_seed(scramble_seed, j), t));
      for (int k = base - 1; k > 0; --k) {
        const int swap_with = static_cast<int>(rng.next_u64() % (k + 1));
        std::swap(perm[k], perm[swap_with]);
      }
    }
  }
}

void HaltonSequence::next_block(Index n, Matrix& out) {
  out.resize(n, dim_);
  std::uint16_t digits[64];
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < dim_; ++j) {
      const int base = bases_[j];
      const auto& perms = perms_[j];
      const int depth = static_cast<int>(perms.size());
      std::fill(digits, digits + depth, std::uint16_t{0});
      std::uint64_t m = index_;
      for (int t = 0; t < depth && m > 0; ++t) {
        digits[t] = static_cast<std::uint16_t>(m % base);
        m /= base;
      }
      double x = 0.0;
      for (int t = depth - 1; t >= 0; --t)
        x = (static_cast<double>(perms[t][digits[t]]) + x) / base;
      out(i, j) = x;
    }
    ++index_;
  }
}

}  // namespace trmpc
