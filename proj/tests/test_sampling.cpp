#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "trmpc/normal.hpp"
#include "trmpc/sampling.hpp"

using namespace trmpc;

namespace {

// Max deviation of the per-dimension empirical CDF from uniform, after
// mapping the Gaussian samples back through the normal CDF.
double cdf_deviation(const Matrix& samples) {
  double worst = 0.0;
  const Index n = samples.rows();
  for (Index j = 0; j < samples.cols(); ++j) {
    std::vector<double> u(n);
    for (Index i = 0; i < n; ++i) u[i] = norm_cdf(samples(i, j));
    std::sort(u.begin(), u.end());
    for (Index i = 0; i < n; ++i) {
      const double hi = static_cast<double>(i + 1) / n - u[i];
      const double lo = u[i] - static_cast<double>(i) / n;
      worst = std::max({worst, hi, lo});
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("lcd source returns the stored points verbatim") {
  Rng rng(51);
  LcdSampleSet set;
  set.dim = 2;
  set.count = 25;
  set.points = test::random_matrix(25, 2, rng);
  UnitSampleSource source = UnitSampleSource::make_lcd(set);

  const Matrix first = source.draw(25, rng);
  CHECK((first - set.points).lpNorm<Eigen::Infinity>() == 0.0);
  const Matrix second = source.draw(25, rng);
  CHECK((second - set.points).lpNorm<Eigen::Infinity>() == 0.0);

  CHECK_THROWS_AS(source.draw(24, rng), std::invalid_argument);
}

TEST_CASE("sobol moments at N=1024, d=2") {
  Rng rng(52);
  UnitSampleSource source = UnitSampleSource::make_sobol(2, 99);
  const Matrix samples = source.draw(1024, rng);
  const Vector mean = samples.colwise().mean();
  CHECK(mean.lpNorm<Eigen::Infinity>() <= 0.05);
  Matrix centered = samples.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / 1024.0;
  CHECK(std::abs(cov(0, 0) - 1.0) <= 0.05);
  CHECK(std::abs(cov(1, 1) - 1.0) <= 0.05);
  CHECK(std::abs(cov(0, 1)) <= 0.05);
}

TEST_CASE("random source is a pure function of the seed") {
  UnitSampleSource a = UnitSampleSource::make_random(3);
  UnitSampleSource b = UnitSampleSource::make_random(3);
  Rng rng_a(7), rng_b(7);
  const Matrix first_a = a.draw(10, rng_a);
  const Matrix first_b = b.draw(10, rng_b);
  CHECK((first_a - first_b).lpNorm<Eigen::Infinity>() == 0.0);
  // Cursor semantics: same call count, same output.
  const Matrix second_a = a.draw(10, rng_a);
  const Matrix second_b = b.draw(10, rng_b);
  CHECK((second_a - second_b).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((first_a - second_a).lpNorm<Eigen::Infinity>() != 0.0);
}

TEST_CASE("quasi-random sources honor their internal cursor") {
  Rng rng(53);
  for (auto make : {&UnitSampleSource::make_sobol, &UnitSampleSource::make_halton}) {
    UnitSampleSource whole = make(4, 1234);
    UnitSampleSource split = make(4, 1234);
    const Matrix all = whole.draw(64, rng);
    const Matrix head = split.draw(32, rng);
    const Matrix tail = split.draw(32, rng);
    CHECK((all.topRows(32) - head).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((all.bottomRows(32) - tail).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("sobol and halton dimensions are range checked") {
  CHECK_THROWS_AS(UnitSampleSource::make_sobol(65, 1), std::invalid_argument);
  CHECK_THROWS_AS(UnitSampleSource::make_halton(65, 1), std::invalid_argument);
  CHECK_NOTHROW(UnitSampleSource::make_sobol(64, 1));
  CHECK_NOTHROW(UnitSampleSource::make_halton(64, 1));
}

TEST_CASE("random_rotation group membership") {
  Rng rng(54);
  CHECK(random_rotation(1, rng)(0, 0) == 1.0);
  for (Index dim : {2, 5, 17}) {
    const Matrix r = random_rotation(dim, rng);
    const Matrix gram = r.transpose() * r;
    CHECK((gram - Matrix::Identity(dim, dim)).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("2-D rotation angles are uniform (chi-square at 1%)") {
  Rng rng(55);
  const int draws = 10'000;
  const int bins = 16;
  int counts[16] = {};
  for (int i = 0; i < draws; ++i) {
    const Matrix r = random_rotation(2, rng);
    double angle = std::atan2(r(1, 0), r(0, 0));
    if (angle < 0.0) angle += 2.0 * M_PI;
    ++counts[std::min(bins - 1, static_cast<int>(angle / (2.0 * M_PI) * bins))];
  }
  const double expected = static_cast<double>(draws) / bins;
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b)
    chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  CHECK(chi2 <= 30.5779);  // 99th percentile of chi-square with 15 dof
}

TEST_CASE("transform_samples identity and scalar affine cases") {
  const GaussianProposal standard =
      make_gaussian(Vector::Zero(3), Matrix::Identity(3, 3));
  Rng rng(56);
  const Matrix unit = test::random_matrix(20, 3, rng);
  const Matrix out = transform_samples(unit, standard, Matrix::Identity(3, 3));
  // Identity up to the jitter folded into the factor.
  CHECK((out - unit).lpNorm<Eigen::Infinity>() <= 1e-6);

  const GaussianProposal scalar =
      make_gaussian(Vector::Constant(1, 3.0), Matrix::Constant(1, 1, 4.0));
  Matrix pm(3, 1);
  pm << -1.0, 0.0, 1.0;
  const Matrix mapped = transform_samples(pm, scalar, Matrix::Identity(1, 1));
  CHECK(mapped(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mapped(1, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(mapped(2, 0) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("exact-moment inputs give exact proposal moments under any rotation") {
  // Cross polytope scaled to unit covariance: exact zero mean, identity cov.
  const Index d = 3;
  Matrix unit(2 * d, d);
  unit.setZero();
  for (Index i = 0; i < d; ++i) {
    unit(2 * i, i) = std::sqrt(static_cast<double>(d));
    unit(2 * i + 1, i) = -std::sqrt(static_cast<double>(d));
  }

  Rng rng(57);
  const GaussianProposal proposal = test::random_gaussian(d, rng);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix rotation = random_rotation(d, rng);
    const Matrix out = transform_samples(unit, proposal, rotation);
    const Vector mean = out.colwise().mean();
    CHECK((mean - proposal.mean).lpNorm<Eigen::Infinity>() <=
          1e-8 * std::max(1.0, proposal.mean.lpNorm<Eigen::Infinity>()));
    Matrix centered = out.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(2 * d);
    CHECK((cov - proposal.cov).norm() <= 1e-8 * proposal.cov.norm());
  }
}

TEST_CASE("scrambled sequences beat random sampling on per-axis discrepancy") {
  const Index n = 256;
  const Index d = 8;
  int sobol_wins = 0, halton_wins = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(1000 + trial);
    UnitSampleSource sobol = UnitSampleSource::make_sobol(d, 7000 + trial);
    UnitSampleSource halton = UnitSampleSource::make_halton(d, 9000 + trial);
    UnitSampleSource random = UnitSampleSource::make_random(d);
    const double sobol_dev = cdf_deviation(sobol.draw(n, rng));
    const double halton_dev = cdf_deviation(halton.draw(n, rng));
    const double random_dev = cdf_deviation(random.draw(n, rng));
    if (sobol_dev < random_dev) ++sobol_wins;
    if (halton_dev < random_dev) ++halton_wins;
  }
  CHECK(sobol_wins >= 18);
  CHECK(halton_wins >= 18);
}
