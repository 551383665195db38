// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Usage: acceptance [first] [last]   (defaults 1 15)

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trmpc/baselines.hpp"
#include "trmpc/bench.hpp"
#include "trmpc/envs/cartpole.hpp"
#include "trmpc/envs/truck.hpp"
#include "trmpc/mpc.hpp"
#include "trmpc/sampling.hpp"
#include "trmpc/stats.hpp"
#include "trmpc/trust_region.hpp"

using namespace trmpc;

namespace {

struct Outcome {
  bool passed = true;
  bool soft = false;  // soft gates warn instead of failing
  std::string detail;
};

constexpr const char* kLcdCache = "acceptance_lcd_cache";

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Vector random_vector(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

GaussianProposal random_gaussian(Index dim, Rng& rng) {
  Matrix a = random_matrix(dim, dim, rng);
  return make_gaussian(random_vector(dim, rng),
                       a * a.transpose() / static_cast<double>(dim) +
                           0.3 * Matrix::Identity(dim, dim));
}

double log_uniform(Rng& rng, double lo, double hi) {
  return lo * std::pow(hi / lo, rng.uniform01());
}

struct Instance {
  GaussianProposal proposal;
  Matrix samples;
  Vector logp;
  Vector costs;
};

Instance random_instance(Index n, Index d, Rng& rng) {
  Instance inst;
  inst.proposal = random_gaussian(d, rng);
  inst.samples = random_matrix(n, d, rng) * inst.proposal.chol.transpose();
  inst.samples.rowwise() += inst.proposal.mean.transpose();
  inst.logp = gaussian_logpdf_batch(inst.proposal, inst.samples);
  const Vector anchor = random_vector(d, rng);
  const double scale = 0.2 + 2.0 * rng.uniform01();
  inst.costs.resize(n);
  for (Index i = 0; i < n; ++i)
    inst.costs[i] =
        0.5 * scale * (inst.samples.row(i).transpose() - anchor).squaredNorm();
  return inst;
}

// Closed-form multiplier for proposal N(0, I) and cost 0.5 ||v||^2: the
// tempered posterior is N(0, s2 I), s2 = eta/(1+eta).
double conjugate_eta_star(double epsilon, int dim) {
  auto kl = [&](double eta) {
    const double s2 = eta / (1.0 + eta);
    return 0.5 * dim * (s2 - 1.0 - std::log(s2));
  };
  double lo = 1e-8, hi = 1e8;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (kl(mid) > epsilon ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

double nearest_neighbor_cv(const Matrix& points) {
  const Index n = points.rows();
  Vector nearest(n);
  for (Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      best = std::min(best, (points.row(i) - points.row(j)).norm());
    }
    nearest[i] = best;
  }
  const double mean = nearest.mean();
  return std::sqrt((nearest.array() - mean).square().mean()) / mean;
}

// --- criteria -------------------------------------------------------------

Outcome criterion_dual_gradient_fd() {
  Rng rng(901);
  const Index sizes[2] = {8, 64};
  const Index dims[2] = {1, 4};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(sizes[trial % 2], dims[(trial / 2) % 2], rng);
    TrustRegionConfig cfg;
    cfg.epsilon = log_uniform(rng, 0.1, 5.0);
    cfg.h_min = -30.0 + 40.0 * rng.uniform01();
    const double eta = log_uniform(rng, 0.05, 20.0);
    const double alpha = log_uniform(rng, 0.05, 20.0);
    const Eigen::Vector2d analytic =
        dual_gradient(eta, alpha, inst.logp, inst.costs, cfg);
    for (int coord = 0; coord < 2; ++coord) {
      const double h = 1e-5 * std::max(1.0, std::abs(coord == 0 ? eta : alpha));
      const double ep = coord == 0 ? eta + h : eta;
      const double em = coord == 0 ? eta - h : eta;
      const double ap = coord == 0 ? alpha : alpha + h;
      const double am = coord == 0 ? alpha : alpha - h;
      const double fd = (dual_value(ep, ap, inst.logp, inst.costs, cfg) -
                         dual_value(em, am, inst.logp, inst.costs, cfg)) /
                        (2.0 * h);
      const double rel = std::abs(analytic[coord] - fd) /
                         std::max({1.0, std::abs(analytic[coord]), std::abs(fd)});
      worst = std::max(worst, rel);
    }
  }
  std::ostringstream detail;
  detail << "worst relative error " << worst << " over 100 instances";
  return {worst <= 1e-5, false, detail.str()};
}

Outcome criterion_mppi_reduction() {
  Rng rng(902);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 4 + static_cast<Index>(rng.next_u64() % 60);
    const Instance inst = random_instance(n, 3, rng);
    const double eta = log_uniform(rng, 0.05, 20.0);
    const Vector tr = tr_weights(eta, 0.0, inst.logp, inst.costs);
    const Vector softmax = mppi_weights(inst.costs, eta);
    worst = std::max(worst, (tr - softmax).lpNorm<Eigen::Infinity>());
  }
  std::ostringstream detail;
  detail << "max |tr - softmax| = " << worst << " over 50 batches";
  return {worst <= 1e-12, false, detail.str()};
}

Outcome criterion_conjugate_oracle() {
  const Index d = 2;
  const Index n = 100'000;
  TrustRegionConfig cfg;
  cfg.epsilon = 0.25;
  Rng rng(903);

  const GaussianProposal prior =
      make_gaussian(Vector::Zero(d), Matrix::Identity(d, d));
  SampleBatch batch;
  batch.samples = random_matrix(n, d, rng);
  batch.logpdf = gaussian_logpdf_batch(prior, batch.samples);
  batch.costs.resize(n);
  for (Index i = 0; i < n; ++i)
    batch.costs[i] = 0.5 * batch.samples.row(i).squaredNorm();
  batch.origin.assign(n, SampleOrigin::fresh);

  const TrUpdateResult update = tr_update(prior, batch, cfg);
  const double s2_star =
      conjugate_eta_star(cfg.epsilon, d) / (1.0 + conjugate_eta_star(cfg.epsilon, d));

  bool ok = true;
  std::ostringstream detail;
  for (Index i = 0; i < d; ++i) {
    ok = ok && std::abs(update.proposal.mean[i]) <= 0.05 * std::sqrt(s2_star);
    ok = ok && std::abs(update.proposal.cov(i, i) - s2_star) <= 0.05 * s2_star;
  }
  ok = ok && std::abs(update.proposal.cov(0, 1)) <= 0.05 * s2_star;
  const bool kl_ok =
      update.kl_new_old >= 0.8 * cfg.epsilon && update.kl_new_old <= 1.2 * cfg.epsilon;
  detail << "var " << update.proposal.cov(0, 0) << " vs " << s2_star << ", KL "
         << update.kl_new_old << " vs eps " << cfg.epsilon;
  return {ok && kl_ok, false, detail.str()};
}

Outcome criterion_entropy_bound() {
  Rng rng(904);
  double worst_slack = 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(10'000, 2, rng);
    SampleBatch batch;
    batch.samples = inst.samples;
    batch.logpdf = inst.logp;
    batch.costs = inst.costs;
    batch.origin.assign(batch.size(), SampleOrigin::fresh);

    TrustRegionConfig unconstrained;
    unconstrained.epsilon = 1.5;
    SampleBatch copy = batch;
    const TrUpdateResult base = tr_update(inst.proposal, copy, unconstrained);

    TrustRegionConfig constrained = unconstrained;
    constrained.h_min = base.entropy_new + 1.0;
    const TrUpdateResult bounded = tr_update(inst.proposal, batch, constrained);
    worst_slack = std::min(worst_slack, bounded.entropy_new - (constrained.h_min - 0.1));
  }
  std::ostringstream detail;
  detail << "min entropy slack above (h_min - 0.1): " << worst_slack;
  return {worst_slack >= 0.0, false, detail.str()};
}

Outcome criterion_constant_cost_noop() {
  // Exact-moment unit set in 2-D.
  Matrix unit(4, 2);
  const double a = std::sqrt(2.0);
  unit << a, 0, -a, 0, 0, a, 0, -a;

  Rng rng(905);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const GaussianProposal proposal = random_gaussian(2, rng);
    const Matrix rotation = random_rotation(2, rng);
    const Matrix samples = transform_samples(unit, proposal, rotation);
    const Vector costs = Vector::Constant(4, 3.5);

    SampleBatch batch;
    batch.samples = samples;
    batch.logpdf = gaussian_logpdf_batch(proposal, samples);
    batch.costs = costs;
    batch.origin.assign(4, SampleOrigin::fresh);
    TrustRegionConfig cfg;
    cfg.epsilon = 2.0;
    const TrUpdateResult tr = tr_update(proposal, batch, cfg);
    worst = std::max(worst, (tr.proposal.mean - proposal.mean).lpNorm<Eigen::Infinity>());

    const Vector w = mppi_weights(costs, adapt_temperature(costs, 10.0));
    const GaussianProposal matched = project_gaussian(samples, w);
    const Vector blended = momentum_blend(proposal.mean, matched.mean, 0.3);
    worst = std::max(worst, (blended - proposal.mean).lpNorm<Eigen::Infinity>());

    CemConfig cem;
    cem.elite_fraction = 1.0;
    cem.momentum = 0.0;
    const GaussianProposal elite = cem_update(samples, costs, proposal, cem);
    worst = std::max(worst, (elite.mean - proposal.mean).lpNorm<Eigen::Infinity>());
  }
  std::ostringstream detail;
  detail << "max |mean shift| = " << worst;
  return {worst <= 1e-9, false, detail.str()};
}

Outcome criterion_concavity() {
  Rng rng(906);
  TrustRegionConfig cfg;
  cfg.epsilon = 1.0;
  cfg.h_min = -10.0;
  int violations = 0;
  for (int segment = 0; segment < 50; ++segment) {
    const Instance inst = random_instance(32, 3, rng);
    const Eigen::Vector2d a(log_uniform(rng, 0.05, 20.0), log_uniform(rng, 0.05, 20.0));
    const Eigen::Vector2d b(log_uniform(rng, 0.05, 20.0), log_uniform(rng, 0.05, 20.0));
    double values[11];
    for (int k = 0; k <= 10; ++k) {
      const Eigen::Vector2d p = a + (b - a) * (k / 10.0);
      values[k] = dual_value(p[0], p[1], inst.logp, inst.costs, cfg);
    }
    for (int k = 1; k < 10; ++k)
      if (values[k] < 0.5 * (values[k - 1] + values[k + 1]) - 1e-8) ++violations;
  }
  std::ostringstream detail;
  detail << violations << " midpoint-concavity violations over 50 segments";
  return {violations == 0, false, detail.str()};
}

Outcome criterion_lcd_quality() {
  Rng rng(907);
  std::ostringstream detail;
  bool ok = true;
  for (const Index d : {Index{40}, Index{50}}) {
    for (const Index n : {Index{20}, Index{40}, Index{100}, Index{300}}) {
      const LcdSampleSet set = ensure_lcd_set(kLcdCache, n, d);
      const double mean_norm = set.sample_mean().norm();
      const double mean_cap = 0.02 * std::sqrt(static_cast<double>(d));
      bool set_ok = mean_norm <= mean_cap;
      if (n >= d + 2) {
        const double cov_err = (set.sample_covariance() - Matrix::Identity(d, d))
                                   .cwiseAbs()
                                   .maxCoeff();
        set_ok = set_ok && cov_err <= 0.05;
      }
      std::vector<double> random_cv(100);
      for (auto& cv : random_cv) cv = nearest_neighbor_cv(random_matrix(n, d, rng));
      std::sort(random_cv.begin(), random_cv.end());
      const double median_cv = 0.5 * (random_cv[49] + random_cv[50]);
      set_ok = set_ok && nearest_neighbor_cv(set.points) < median_cv;
      if (!set_ok) detail << " (n=" << n << ",d=" << d << " failed)";
      ok = ok && set_ok;
    }
  }
  if (ok) detail << "all 8 shipped (n, d) pairs within bounds";
  return {ok, false, detail.str()};
}

Outcome criterion_rotation_transform() {
  Rng rng(908);
  bool ok = true;
  std::ostringstream detail;
  double worst_orth = 0.0, worst_det = 0.0;
  for (const Index d : {Index{2}, Index{5}, Index{17}, Index{50}}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix r = random_rotation(d, rng);
      worst_orth = std::max(worst_orth, (r.transpose() * r - Matrix::Identity(d, d))
                                            .lpNorm<Eigen::Infinity>());
      worst_det = std::max(worst_det, std::abs(r.determinant() - 1.0));
    }
  }
  ok = ok && worst_orth <= 1e-10 && worst_det <= 1e-8;

  // Exact-moment cross polytope: transformed moments equal the proposal's.
  double worst_moment = 0.0;
  for (const Index d : {Index{3}, Index{8}}) {
    Matrix unit = Matrix::Zero(2 * d, d);
    for (Index i = 0; i < d; ++i) {
      unit(2 * i, i) = std::sqrt(static_cast<double>(d));
      unit(2 * i + 1, i) = -std::sqrt(static_cast<double>(d));
    }
    const GaussianProposal proposal = random_gaussian(d, rng);
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix out = transform_samples(unit, proposal, random_rotation(d, rng));
      const Vector mean = out.colwise().mean();
      Matrix centered = out.rowwise() - mean.transpose();
      const Matrix cov = centered.transpose() * centered / static_cast<double>(2 * d);
      worst_moment = std::max(
          worst_moment, (mean - proposal.mean).norm() / std::max(1.0, proposal.mean.norm()));
      worst_moment = std::max(worst_moment, (cov - proposal.cov).norm() / proposal.cov.norm());
    }
  }
  ok = ok && worst_moment <= 1e-8;
  detail << "orth " << worst_orth << ", |det-1| " << worst_det << ", moment rel "
         << worst_moment;
  return {ok, false, detail.str()};
}

Outcome criterion_environment_oracles() {
  std::ostringstream detail;
  bool ok = true;

  const envs::CartPoleParams cp;
  const Vector u0 = Vector::Zero(1);
  Vector hanging = Vector::Zero(4);
  hanging[2] = M_PI;
  ok = ok && (envs::cartpole_step(cp, hanging, u0, cp.dt) - hanging)
                     .lpNorm<Eigen::Infinity>() <= 1e-10;
  ok = ok && envs::cartpole_step(cp, Vector::Zero(4), u0, cp.dt)
                     .lpNorm<Eigen::Infinity>() <= 1e-10;

  // Energy conservation of the unforced system.
  auto energy = [&](const Vector& x) {
    const double kinetic = 0.5 * (cp.cart_mass + cp.pole_mass) * x[1] * x[1] +
                           cp.pole_mass * cp.half_length * x[1] * x[3] * std::cos(x[2]) +
                           (2.0 / 3.0) * cp.pole_mass * cp.half_length * cp.half_length *
                               x[3] * x[3];
    return kinetic + cp.pole_mass * cp.gravity * cp.half_length * std::cos(x[2]);
  };
  Vector x = Vector::Zero(4);
  x[2] = 2.0;
  const double e0 = energy(x);
  for (int i = 0; i < 1000; ++i) x = envs::cartpole_step(cp, x, u0, 1e-3);
  const double energy_drift = std::abs(energy(x) - e0) / std::abs(e0);
  ok = ok && energy_drift <= 1e-4;

  const envs::TruckParams tp;
  Vector t = Vector::Zero(4);
  t[0] = 20.0;
  double straight_err = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vector next = envs::truck_step(tp, t, u0, tp.dt);
    straight_err = std::max(straight_err, std::abs(next[0] - (t[0] + tp.speed * tp.dt)));
    straight_err = std::max({straight_err, std::abs(next[1]), std::abs(next[2]),
                             std::abs(next[3])});
    t = next;
  }
  ok = ok && straight_err <= 1e-12;

  // RK4 order on a constant-force cart-pole trajectory.
  auto integrate = [&](double dt) {
    Vector y = Vector::Zero(4);
    y[2] = 2.5;
    const Vector f = Vector::Constant(1, 3.0);
    const int steps = static_cast<int>(std::round(0.5 / dt));
    for (int k = 0; k < steps; ++k) y = envs::cartpole_step(cp, y, f, dt);
    return y;
  };
  const Vector reference = integrate(2.5e-5);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const std::vector<double> dts = {8e-3, 4e-3, 2e-3, 1e-3};
  for (double dt : dts) {
    const double lx = std::log(dt);
    const double ly = std::log((integrate(dt) - reference).norm());
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(dts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  ok = ok && slope >= 3.5;

  detail << "energy drift " << energy_drift << ", straight-backing err " << straight_err
         << ", RK4 slope " << slope;
  return {ok, false, detail.str()};
}

Outcome criterion_determinism() {
  const envs::CartPoleParams params;
  const envs::CartPoleCostWeights weights;
  const OcpConfig ocp = envs::make_cartpole_ocp(params, weights, 20);

  MpcConfig cfg;
  cfg.num_samples = 24;
  cfg.num_iterations = 2;
  cfg.buffer_size = 4;
  cfg.rule = UpdateRule::trust_region;
  cfg.sampler = SamplerKind::sobol_scrambled;
  cfg.init_std = Vector::Constant(1, 2.5);
  cfg.seed = 321;

  cfg.rollout_threads = 1;
  const EpisodeResult serial = run_episode(ocp, envs::cartpole_initial_state(), 15, cfg);
  const EpisodeResult repeat = run_episode(ocp, envs::cartpole_initial_state(), 15, cfg);
  cfg.rollout_threads = 8;
  const EpisodeResult parallel = run_episode(ocp, envs::cartpole_initial_state(), 15, cfg);

  const bool identical_repeat =
      serial.cumulative_cost == repeat.cumulative_cost &&
      serial.smoothness == repeat.smoothness &&
      (serial.controls - repeat.controls).lpNorm<Eigen::Infinity>() == 0.0 &&
      (serial.states - repeat.states).lpNorm<Eigen::Infinity>() == 0.0;
  const bool identical_parallel =
      serial.cumulative_cost == parallel.cumulative_cost &&
      (serial.controls - parallel.controls).lpNorm<Eigen::Infinity>() == 0.0 &&
      (serial.states - parallel.states).lpNorm<Eigen::Infinity>() == 0.0;
  std::ostringstream detail;
  detail << "repeat " << (identical_repeat ? "bitwise" : "DIFFERS") << ", workers 1 vs 8 "
         << (identical_parallel ? "bitwise" : "DIFFERS");
  return {identical_repeat && identical_parallel, false, detail.str()};
}

// --- benchmark trend criteria (desk scale, 20 seeds) -----------------------

ExperimentConfig trend_config(const std::string& env, const std::string& out_tag) {
  ExperimentConfig cfg;
  cfg.environment = env;
  cfg.runs = 20;
  cfg.base_seed = 7000;
  cfg.out_dir = std::string("acceptance_out/") + out_tag;
  cfg.lcd_dir = kLcdCache;
  return cfg;
}

Outcome criterion_eps_sweep() {
  ExperimentConfig cfg = trend_config("cartpole", "eps_sweep");
  cfg.rules = {UpdateRule::trust_region};
  cfg.samplers = {SamplerKind::random, SamplerKind::sobol_scrambled,
                  SamplerKind::halton_scrambled, SamplerKind::lcd};
  cfg.axis = SweepAxis::epsilon;
  cfg.values = {0.1, 2.0, 50.0};
  cfg.num_samples = 100;
  cfg.num_iterations = 5;
  const auto summaries = aggregate(run_sweep(cfg));

  bool ok = true;
  std::ostringstream detail;
  for (SamplerKind sk : cfg.samplers) {
    auto cell = [&](double eps) {
      std::ostringstream id;
      id << "cartpole|tr|" << to_string(sk) << "|eps=" << eps;
      return summaries.at(id.str()).median;
    };
    const double lo = cell(0.1), mid = cell(2.0), hi = cell(50.0);
    detail << to_string(sk) << " [" << lo << ", " << mid << ", " << hi << "] ";
    ok = ok && mid < lo && mid < hi;
  }
  return {ok, false, detail.str()};
}

Outcome criterion_low_sample_advantage() {
  bool ok = true;
  std::ostringstream detail;
  for (const std::string env : {"cartpole", "truck"}) {
    ExperimentConfig cfg = trend_config(env, "low_sample_" + env);
    cfg.rules = {UpdateRule::trust_region, UpdateRule::mppi_heuristic};
    cfg.samplers = {SamplerKind::lcd};
    cfg.num_samples = 40;
    cfg.num_iterations = 3;
    const auto summaries = aggregate(run_sweep(cfg));
    const double tr = summaries.at(env + "|tr|lcd").median;
    const double mppi = summaries.at(env + "|mppi|lcd").median;
    detail << env << " tr " << tr << " vs mppi " << mppi << "; ";
    ok = ok && tr <= mppi;
  }
  return {ok, false, detail.str()};
}

Outcome criterion_convergence_dominance() {
  ExperimentConfig tr_cfg = trend_config("truck", "convergence_tr");
  tr_cfg.rules = {UpdateRule::trust_region};
  tr_cfg.samplers = {SamplerKind::random, SamplerKind::sobol_scrambled,
                     SamplerKind::halton_scrambled, SamplerKind::lcd};
  tr_cfg.num_samples = 40;
  tr_cfg.num_iterations = 3;
  const auto tr_summaries = aggregate(run_sweep(tr_cfg));

  ExperimentConfig heur_cfg = trend_config("truck", "convergence_mppi");
  heur_cfg.rules = {UpdateRule::mppi_heuristic};
  heur_cfg.samplers = tr_cfg.samplers;
  heur_cfg.num_samples = 40;
  heur_cfg.num_iterations = 10;
  const auto heur_summaries = aggregate(run_sweep(heur_cfg));

  int wins = 0;
  std::ostringstream detail;
  for (SamplerKind sk : tr_cfg.samplers) {
    const double tr = tr_summaries.at(std::string("truck|tr|") + to_string(sk)).median;
    const double heur =
        heur_summaries.at(std::string("truck|mppi|") + to_string(sk)).median;
    const bool win = tr <= heur;
    wins += win;
    detail << to_string(sk) << " " << tr << (win ? " <= " : " > ") << heur << "; ";
  }
  detail << wins << "/4 samplers (need >= 2)";
  return {wins >= 2, false, detail.str()};
}

Outcome criterion_runtime_ordering() {
  // Sequential execution so per-step timings are uncontended; episodes are
  // dispatched round-robin across cells, and the minimum per-episode mean
  // filters machine-load noise out of the structural cost comparison.
  setenv("TRSMPC_THREADS", "1", 1);
  ExperimentConfig cfg = trend_config("truck", "runtime");
  cfg.rules = {UpdateRule::trust_region, UpdateRule::mppi_heuristic};
  cfg.samplers = {SamplerKind::random, SamplerKind::sobol_scrambled,
                  SamplerKind::halton_scrambled, SamplerKind::lcd};
  cfg.runs = 100;
  cfg.truck_steps = 60;  // many short windows; the min picks clean ones
  cfg.num_samples = 40;
  cfg.num_iterations = 3;
  const auto records = run_sweep(cfg);
  unsetenv("TRSMPC_THREADS");

  std::map<std::string, double> best_ms;
  for (const auto& r : records) {
    const std::string key = r.rule + "|" + r.sampler;
    auto [it, inserted] = best_ms.try_emplace(key, r.step_ms_mean);
    if (!inserted) it->second = std::min(it->second, r.step_ms_mean);
  }

  bool ok = true;
  std::ostringstream detail;
  for (const char* sampler : {"random", "sobol", "halton", "lcd"}) {
    const double heur = best_ms[std::string("mppi|") + sampler];
    const double tr = best_ms[std::string("tr|") + sampler];
    detail << sampler << ": mppi " << heur << " / tr " << tr << " ms; ";
    ok = ok && heur <= tr;
  }
  for (const char* rule : {"tr", "mppi"}) {
    const double rnd = best_ms[std::string(rule) + "|random"];
    ok = ok && rnd <= best_ms[std::string(rule) + "|sobol"];
    ok = ok && rnd <= best_ms[std::string(rule) + "|halton"];
  }
  return {ok, false, detail.str()};
}

Outcome criterion_smoothness() {
  ExperimentConfig cfg = trend_config("truck", "smoothness");
  cfg.rules = {UpdateRule::trust_region, UpdateRule::mppi_heuristic};
  cfg.samplers = {SamplerKind::lcd, SamplerKind::random};
  cfg.num_samples = 40;
  cfg.num_iterations = 3;
  const auto records = run_sweep(cfg);
  const auto smoothness =
      aggregate_metric(records, [](const ExperimentRecord& r) { return r.smoothness; });
  const double tr_lcd = smoothness.at("truck|tr|lcd").median;
  const double mppi_random = smoothness.at("truck|mppi|random").median;
  std::ostringstream detail;
  detail << "tr-lcd " << tr_lcd << " vs mppi-random " << mppi_random;
  return {tr_lcd <= mppi_random, true, detail.str()};
}

struct Criterion {
  int number;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "dual gradient vs finite differences", criterion_dual_gradient_fd},
    {2, "importance-weight reduction at alpha=0", criterion_mppi_reduction},
    {3, "conjugate-Gaussian oracle", criterion_conjugate_oracle},
    {4, "entropy lower bound honored", criterion_entropy_bound},
    {5, "constant-cost no-op updates", criterion_constant_cost_noop},
    {6, "dual concavity along segments", criterion_concavity},
    {7, "deterministic sample set quality", criterion_lcd_quality},
    {8, "rotation and transform exactness", criterion_rotation_transform},
    {9, "environment oracles", criterion_environment_oracles},
    {10, "bitwise determinism across workers", criterion_determinism},
    {11, "epsilon sweep U-shape (cartpole)", criterion_eps_sweep},
    {12, "low-sample advantage (both envs, lcd)", criterion_low_sample_advantage},
    {13, "convergence dominance (truck)", criterion_convergence_dominance},
    {14, "runtime ordering", criterion_runtime_ordering},
    {15, "smoothness sanity (soft)", criterion_smoothness},
};

}  // namespace

int main(int argc, char** argv) {
  int first = 1, last = 15;
  if (argc >= 2) first = std::atoi(argv[1]);
  if (argc >= 3) last = std::atoi(argv[2]);

  int hard_failures = 0;
  for (const Criterion& criterion : kCriteria) {
    if (criterion.number < first || criterion.number > last) continue;
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.passed = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const char* tag = outcome.passed ? "[PASS]" : (outcome.soft ? "[WARN]" : "[FAIL]");
    std::printf("%s %02d %s -- %s\n", tag, criterion.number, criterion.name,
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.passed && !outcome.soft) ++hard_failures;
  }
  if (hard_failures > 0) std::printf("%d criterion(s) failed\n", hard_failures);
  return hard_failures == 0 ? 0 : 1;
}
