#include "trmpc/sampling.hpp"

#include <algorithm>
#include <stdexcept>

#include "trmpc/normal.hpp"

namespace trmpc {

namespace {
constexpr double kUniformClamp = 0x1p-52;  // scrambled points can hit 0/1
}

const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::random: return "random";
    case SamplerKind::sobol_scrambled: return "sobol";
    case SamplerKind::halton_scrambled: return "halton";
    case SamplerKind::lcd: return "lcd";
  }
  return "?";
}

SamplerKind sampler_from_string(const std::string& name) {
  if (name == "random") return SamplerKind::random;
  if (name == "sobol") return SamplerKind::sobol_scrambled;
  if (name == "halton") return SamplerKind::halton_scrambled;
  if (name == "lcd") return SamplerKind::lcd;
  throw std::invalid_argument("unknown sampler '" + name + "'");
}

UnitSampleSource UnitSampleSource::make_random(Index dim) {
  UnitSampleSource s;
  s.kind_ = SamplerKind::random;
  s.dim_ = dim;
  return s;
}

UnitSampleSource UnitSampleSource::make_sobol(Index dim, std::uint64_t scramble_seed) {
  UnitSampleSource s;
  s.kind_ = SamplerKind::sobol_scrambled;
  s.dim_ = dim;
  s.sobol_ = std::make_unique<SobolSequence>(dim, scramble_seed);
  return s;
}

UnitSampleSource UnitSampleSource::make_halton(Index dim, std::uint64_t scramble_seed) {
  UnitSampleSource s;
  s.kind_ = SamplerKind::halton_scrambled;
  s.dim_ = dim;
  s.halton_ = std::make_unique<HaltonSequence>(dim, scramble_seed);
  return s;
}

UnitSampleSource UnitSampleSource::make_lcd(LcdSampleSet set) {
  if (set.points.rows() != set.count || set.points.cols() != set.dim)
    throw std::invalid_argument("UnitSampleSource: malformed LCD set");
  UnitSampleSource s;
  s.kind_ = SamplerKind::lcd;
  s.dim_ = set.dim;
  s.lcd_ = std::move(set);
  return s;
}

Matrix UnitSampleSource::draw(Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("draw_unit: need at least one sample");
  switch (kind_) {
    case SamplerKind::random: {
      Matrix out(n, dim_);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < dim_; ++j) out(i, j) = rng.normal();
      return out;
    }
    case SamplerKind::sobol_scrambled:
    case SamplerKind::halton_scrambled: {
      Matrix out;
      if (kind_ == SamplerKind::sobol_scrambled)
        sobol_->next_block(n, out);
      else
        halton_->next_block(n, out);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < dim_; ++j)
          out(i, j) = norm_quantile(
              std::clamp(out(i, j), kUniformClamp, 1.0 - kUniformClamp));
      return out;
    }
    case SamplerKind::lcd: {
      if (n != lcd_->count)
        throw std::invalid_argument(
            "draw_unit: LCD set has " + std::to_string(lcd_->count) +
            " points, requested " + std::to_string(n));
      return lcd_->points;
    }
  }
  throw std::logic_error("draw_unit: unreachable");
}

Matrix random_rotation(Index dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_rotation: dim must be >= 1");
  Matrix gauss(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) gauss(i, j) = rng.normal();

  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  if (q.determinant() < 0.0) q.col(dim - 1) = -q.col(dim - 1);
  return q;
}

Matrix transform_samples(const Matrix& unit, const GaussianProposal& proposal,
                         const Matrix& rotation) {
  const Index d = proposal.dim();
  if (unit.cols() != d || rotation.rows() != d || rotation.cols() != d)
    throw std::invalid_argument("transform_samples: dimension mismatch");
  Matrix scale = proposal.chol * rotation;  // v = mean + L R u
  Matrix out = unit * scale.transpose();
  out.rowwise() += proposal.mean.transpose();
  return out;
}

}  // namespace trmpc
