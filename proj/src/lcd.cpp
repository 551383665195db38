#include "trmpc/lcd.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "trmpc/rng.hpp"

namespace trmpc {

Vector LcdSampleSet::sample_mean() const { return points.colwise().mean(); }

Matrix LcdSampleSet::sample_covariance() const {
  Matrix centered = points.rowwise() - points.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(count);
}

bool LcdSampleSet::moments_within_bounds() const {
  if (sample_mean().norm() > 0.02 * std::sqrt(static_cast<double>(dim)))
    return false;
  if (count >= dim + 2) {
    Matrix deviation = sample_covariance() - Matrix::Identity(dim, dim);
    if (deviation.cwiseAbs().maxCoeff() > 0.05) return false;
  }
  return points.allFinite();
}

namespace {

// Squared MMD between the point set and N(0, I). The kernel is a sum of
// Gaussians at several widths (scaled with the dimension so the kernel
// keeps resolving typical inter-point distances as d grows) plus a small
// quadratic-polynomial component, whose MMD is the first/second moment
// mismatch ||mu||^2 + 0.5 ||M2 - I||_F^2. The narrow Gaussians place the
// points homogeneously; the polynomial part pins the moments.
struct MmdObjective {
  Index n;
  Index d;
  std::vector<double> widths;
  double moment_weight = 0.1;

  explicit MmdObjective(Index n_, Index d_) : n(n_), d(d_) {
    const double scale = static_cast<double>(d);
    widths = {0.25 * scale, 0.5 * scale, scale, 2.0 * scale, 4.0 * scale};
  }

  double eval(const Matrix& x, Matrix& grad) const {
    const double nn = static_cast<double>(n);
    const Vector sq = x.rowwise().squaredNorm();
    Matrix dist2 = (-2.0 * x * x.transpose()).rowwise() + sq.transpose();
    dist2.colwise() += sq;
    dist2 = dist2.cwiseMax(0.0);

    grad.setZero(n, d);
    double objective = 0.0;
    const double dd = static_cast<double>(d);
    for (const double w : widths) {
      const Matrix kernel = (-dist2 / (2.0 * w)).array().exp().matrix();
      const double c1 = std::pow(w / (1.0 + w), 0.5 * dd);
      const double c2 = std::pow(w / (2.0 + w), 0.5 * dd);
      const Vector attract = (-sq / (2.0 * (1.0 + w))).array().exp().matrix();

      objective += kernel.sum() / (nn * nn) - 2.0 / nn * c1 * attract.sum() + c2;

      const Vector row_sums = kernel.rowwise().sum();
      grad.noalias() += (2.0 / (nn * nn * w)) *
                        (kernel * x - row_sums.asDiagonal() * x);
      grad.noalias() += (2.0 * c1 / (nn * (1.0 + w))) *
                        (attract.asDiagonal() * x);
    }

    const Vector mean = x.colwise().mean();
    const Matrix second = x.transpose() * x / nn - Matrix::Identity(d, d);
    objective += moment_weight * (mean.squaredNorm() + 0.5 * second.squaredNorm());
    grad.rowwise() += moment_weight * (2.0 / nn) * mean.transpose();
    grad.noalias() += moment_weight * (2.0 / nn) * (x * second);
    return objective;
  }
};

struct OptimizeOutcome {
  Matrix points;
  double objective = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> trace;
};

// L-BFGS with Armijo backtracking on the flattened point matrix.
OptimizeOutcome run_single_start(Index n, Index d, const LcdOptimizeOptions& opt,
                                 std::uint64_t seed) {
  const Index dof = n * d;
  Rng rng(seed);
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = rng.normal();

  MmdObjective objective(n, d);
  Matrix grad(n, d);
  double f = objective.eval(x, grad);

  OptimizeOutcome outcome;
  outcome.trace.push_back(f);

  const int memory = 8;
  std::deque<Vector> s_hist, y_hist;
  Vector g = Eigen::Map<const Vector>(grad.data(), dof);

  for (int it = 0; it < opt.budget; ++it) {
    if (g.norm() <= opt.grad_tol) break;

    // Two-loop recursion for the search direction.
    Vector q = -g;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      alpha[k] = rho * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) {
      const auto& s_last = s_hist.back();
      const auto& y_last = y_hist.back();
      q *= s_last.dot(y_last) / y_last.squaredNorm();
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      const double beta = rho * y_hist[k].dot(q);
      q += (alpha[k] - beta) * s_hist[k];
    }
    double directional = g.dot(q);
    if (!(directional < 0.0)) {  // not a descent direction, reset
      q = -g;
      directional = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
    }

    double step = 1.0;
    bool accepted = false;
    Matrix x_new(n, d);
    Matrix grad_new(n, d);
    double f_new = f;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::Map<Vector>(x_new.data(), dof) =
          Eigen::Map<const Vector>(x.data(), dof) + step * q;
      f_new = objective.eval(x_new, grad_new);
      if (f_new <= f + 1e-4 * step * directional) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Vector g_new = Eigen::Map<const Vector>(grad_new.data(), dof);
    Vector s_vec = step * q;
    Vector y_vec = g_new - g;
    if (y_vec.dot(s_vec) > 1e-14) {
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    x = x_new;
    f = f_new;
    g = std::move(g_new);
    outcome.trace.push_back(f);
    outcome.iterations = it + 1;
  }

  outcome.points = std::move(x);
  outcome.objective = f;
  return outcome;
}

}  // namespace

LcdSampleSet optimize_lcd_set(Index n, Index dim, const LcdOptimizeOptions& options,
                              std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("optimize_lcd_set: need at least 2 points");
  if (dim < 1) throw std::invalid_argument("optimize_lcd_set: dimension must be positive");
  if (options.budget < 1 || options.starts < 1)
    throw std::invalid_argument("optimize_lcd_set: invalid budget");

  std::vector<OptimizeOutcome> outcomes(options.starts);
  if (options.parallel_starts && options.starts > 1) {
    std::vector<std::future<OptimizeOutcome>> futures;
    futures.reserve(options.starts);
    for (int s = 0; s < options.starts; ++s)
      futures.push_back(std::async(std::launch::async, run_single_start, n, dim,
                                   options, derive_seed(seed, s)));
    for (int s = 0; s < options.starts; ++s) outcomes[s] = futures[s].get();
  } else {
    for (int s = 0; s < options.starts; ++s)
      outcomes[s] = run_single_start(n, dim, options, derive_seed(seed, s));
  }

  int best = 0;
  for (int s = 1; s < options.starts; ++s)
    if (outcomes[s].objective < outcomes[best].objective) best = s;

  LcdSampleSet set;
  set.dim = dim;
  set.count = n;
  set.points = std::move(outcomes[best].points);
  set.objective = outcomes[best].objective;
  set.iterations = outcomes[best].iterations;
  set.seed = seed;
  set.objective_trace = std::move(outcomes[best].trace);
  set.quality_ok = set.moments_within_bounds();
  return set;
}

void save_sample_set(const LcdSampleSet& set, const std::string& path) {
  if (set.count != set.points.rows() || set.dim != set.points.cols())
    throw std::invalid_argument("save_sample_set: header fields do not match points");
  if (!set.points.allFinite())
    throw std::invalid_argument("save_sample_set: non-finite points");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_sample_set: cannot open " + path);
  out << "LCD v1\n" << set.dim << " " << set.count << "\n";
  char buffer[40];
  for (Index i = 0; i < set.count; ++i) {
    for (Index j = 0; j < set.dim; ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", set.points(i, j));
      out << buffer << (j + 1 == set.dim ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("save_sample_set: write failed on " + path);
}

LcdSampleSet load_sample_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sample_set: cannot open " + path);

  auto parse_error = [&](int line, const std::string& what) {
    std::ostringstream msg;
    msg << "load_sample_set: " << path << ":" << line << ": " << what;
    return std::runtime_error(msg.str());
  };

  std::string line;
  if (!std::getline(in, line)) throw parse_error(1, "missing header");
  if (line != "LCD v1") throw parse_error(1, "expected 'LCD v1' header");

  if (!std::getline(in, line)) throw parse_error(2, "missing dimensions");
  std::istringstream header(line);
  long long dim = 0, count = 0;
  std::string extra;
  if (!(header >> dim >> count) || (header >> extra) || dim < 1 || count < 1)
    throw parse_error(2, "expected '<dim> <count>' with positive integers");

  LcdSampleSet set;
  set.dim = static_cast<Index>(dim);
  set.count = static_cast<Index>(count);
  set.points.resize(set.count, set.dim);

  for (Index i = 0; i < set.count; ++i) {
    const int line_no = static_cast<int>(i) + 3;
    if (!std::getline(in, line))
      throw parse_error(line_no, "shape mismatch: fewer rows than declared");
    std::istringstream row(line);
    std::string token;
    for (Index j = 0; j < set.dim; ++j) {
      if (!(row >> token))
        throw parse_error(line_no, "shape mismatch: fewer values than declared");
      char* end = nullptr;
      const double value = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size())
        throw parse_error(line_no, "invalid number '" + token + "'");
      if (!std::isfinite(value)) throw parse_error(line_no, "non-finite value");
      set.points(i, j) = value;
    }
    if (row >> extra)
      throw parse_error(line_no, "shape mismatch: more values than declared");
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      throw parse_error(static_cast<int>(set.count) + 3,
                        "shape mismatch: more rows than declared");
  }
  return set;
}

}  // namespace trmpc
