#pragma once

#include <memory>
#include <optional>
#include <string>

#include "trmpc/gaussian.hpp"
#include "trmpc/halton.hpp"
#include "trmpc/lcd.hpp"
#include "trmpc/rng.hpp"
#include "trmpc/sobol.hpp"

namespace trmpc {

enum class SamplerKind { random, sobol_scrambled, halton_scrambled, lcd };

const char* to_string(SamplerKind kind);
SamplerKind sampler_from_string(const std::string& name);

/// Interchangeable source of unit-Gaussian samples. Quasi-random kinds keep
/// an internal cursor, so a source is a pure function of (seed, call count)
/// but must not be shared across threads without synchronization.
class UnitSampleSource {
 public:
  static UnitSampleSource make_random(Index dim);
  static UnitSampleSource make_sobol(Index dim, std::uint64_t scramble_seed);
  static UnitSampleSource make_halton(Index dim, std::uint64_t scramble_seed);
  static UnitSampleSource make_lcd(LcdSampleSet set);

  SamplerKind kind() const { return kind_; }
  Index dim() const { return dim_; }

  /// Next n unit samples, one per row. Random draws i.i.d. N(0, 1) from
  /// `rng`; Sobol/Halton map their next n scrambled points per dimension
  /// through the inverse normal CDF; LCD returns the stored set verbatim
  /// and requires n to equal the stored count.
  Matrix draw(Index n, Rng& rng);

 private:
  UnitSampleSource() = default;

  SamplerKind kind_ = SamplerKind::random;
  Index dim_ = 0;
  std::unique_ptr<SobolSequence> sobol_;
  std::unique_ptr<HaltonSequence> halton_;
  std::optional<LcdSampleSet> lcd_;
};

inline Matrix draw_unit(UnitSampleSource& source, Index n, Rng& rng) {
  return source.draw(n, rng);
}

/// Haar-distributed rotation from SO(dim): orthonormalize a standard-normal
/// matrix, fix column signs by the triangular factor's diagonal, flip one
/// column if the determinant is -1.
Matrix random_rotation(Index dim, Rng& rng);

/// Row-wise affine map v = mean + L * R * u. The rotation is applied before
/// the Cholesky scaling.
Matrix transform_samples(const Matrix& unit, const GaussianProposal& proposal,
                         const Matrix& rotation);

}  // namespace trmpc
