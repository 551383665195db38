#include "trmpc/sobol.hpp"

#include <bit>
#include <stdexcept>

#include "trmpc/rng.hpp"

namespace trmpc {

namespace {

// GF(2) polynomial arithmetic on bitmasks (bit k = coefficient of x^k).

std::uint32_t gf2_mulmod(std::uint32_t a, std::uint32_t b, std::uint32_t mod,
                         int degree) {
  std::uint32_t r = 0;
  while (b != 0) {
    if (b & 1u) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (1u << degree)) a ^= mod;
  }
  return r;
}

std::uint32_t gf2_powmod(std::uint32_t base, std::uint32_t exp,
                         std::uint32_t mod, int degree) {
  std::uint32_t r = 1;
  while (exp != 0) {
    if (exp & 1u) r = gf2_mulmod(r, base, mod, degree);
    base = gf2_mulmod(base, base, mod, degree);
    exp >>= 1;
  }
  return r;
}

// x generates the full multiplicative group mod p iff x^(2^s-1) = 1 and
// x^((2^s-1)/q) != 1 for every prime divisor q; that certifies primitivity.
bool is_primitive(std::uint32_t poly, int degree) {
  static const std::array<std::vector<std::uint32_t>, 11> kFactors = {{
      {}, {}, {3}, {7}, {3, 5}, {31}, {3, 7}, {127}, {3, 5, 17}, {7, 73},
      {3, 11, 31}}};
  const std::uint32_t order = (1u << degree) - 1u;
  if (degree == 1) return poly == 0b11u;  // x + 1
  if (gf2_powmod(2u, order, poly, degree) != 1u) return false;
  for (std::uint32_t q : kFactors[degree]) {
    if (gf2_powmod(2u, order / q, poly, degree) == 1u) return false;
  }
  return true;
}

struct Polynomial {
  std::uint32_t mask;
  int degree;
};

std::vector<Polynomial> primitive_polynomials(int count) {
  std::vector<Polynomial> polys;
  for (int degree = 1; degree <= 10 && static_cast<int>(polys.size()) < count;
       ++degree) {
    const std::uint32_t hi = 1u << degree;
    for (std::uint32_t interior = 0; interior < (hi >> 1); ++interior) {
      const std::uint32_t poly = hi | (interior << 1) | 1u;
      if (is_primitive(poly, degree)) {
        polys.push_back({poly, degree});
        if (static_cast<int>(polys.size()) == count) break;
      }
    }
  }
  return polys;
}

std::uint32_t reverse_bits32(std::uint32_t x) {
  x = ((x >> 1) & 0x55555555u) | ((x & 0x55555555u) << 1);
  x = ((x >> 2) & 0x33333333u) | ((x & 0x33333333u) << 2);
  x = ((x >> 4) & 0x0f0f0f0fu) | ((x & 0x0f0f0f0fu) << 4);
  x = ((x >> 8) & 0x00ff00ffu) | ((x & 0x00ff00ffu) << 8);
  return (x >> 16) | (x << 16);
}

std::uint32_t laine_karras_permutation(std::uint32_t x, std::uint32_t key) {
  x += key;
  x ^= x * 0x6c50b47cu;
  x ^= x * 0xb82f1e52u;
  x ^= x * 0xc7afe638u;
  x ^= x * 0x8d22f6e6u;
  return x;
}

}  // namespace

std::uint32_t owen_scramble(std::uint32_t value, std::uint32_t key) {
  value = reverse_bits32(value);
  value = laine_karras_permutation(value, key);
  return reverse_bits32(value);
}

SobolSequence::SobolSequence(Index dim, std::uint64_t scramble_seed)
    : dim_(dim) {
  if (dim < 1 || dim > kMaxDimensions)
    throw std::invalid_argument("SobolSequence: dimension out of supported range");

  directions_.resize(dim);
  state_.assign(dim, 0u);
  scramble_key_.resize(dim);

  std::uint64_t key_state = scramble_seed;
  for (Index j = 0; j < dim; ++j)
    scramble_key_[j] = static_cast<std::uint32_t>(splitmix64(key_state));

  // First dimension: van der Corput, m_k = 1.
  for (int k = 0; k < 32; ++k) directions_[0][k] = 1u << (31 - k);
  if (dim == 1) return;

  const auto polys = primitive_polynomials(static_cast<int>(dim) - 1);
  Rng init_rng(derive_seed(scramble_seed, 0x50b01ULL));
  for (Index j = 1; j < dim; ++j) {
    const auto [poly, s] = polys[j - 1];
    std::array<std::uint32_t, 32> m{};
    for (int k = 0; k < s; ++k) {
      if (j == 1) {
        m[k] = 1u;  // canonical second dimension
      } else {
        // random odd value below 2^(k+1)
        m[k] = (static_cast<std::uint32_t>(init_rng.next_u32()) % (1u << k)) * 2u + 1u;
      }
    }
    for (int k = s; k < 32; ++k) {
      std::uint32_t v = (m[k - s] << s) ^ m[k - s];
      for (int i = 1; i < s; ++i) {
        if (poly & (1u << (s - i))) v ^= m[k - i] << i;
      }
      m[k] = v;
    }
    for (int k = 0; k < 32; ++k) directions_[j][k] = m[k] << (31 - k);
  }
}

void SobolSequence::next_block(Index n, Matrix& out) {
  out.resize(n, dim_);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < dim_; ++j) {
      const std::uint32_t scrambled = owen_scramble(state_[j], scramble_key_[j]);
      out(i, j) = (static_cast<double>(scrambled) + 0.5) * 0x1p-32;
    }
    // Gray-code advance to the next point.
    const int bit = std::countr_zero(index_ + 1);
    for (Index j = 0; j < dim_; ++j) state_[j] ^= directions_[j][bit];
    ++index_;
  }
}

}  // namespace trmpc
