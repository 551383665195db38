#include "trmpc/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trmpc/rollout.hpp"
#include "trmpc/stats.hpp"

namespace trmpc {

const char* to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::trust_region: return "tr";
    case UpdateRule::mppi_heuristic: return "mppi";
    case UpdateRule::cem: return "cem";
  }
  return "?";
}

UpdateRule rule_from_string(const std::string& name) {
  if (name == "tr") return UpdateRule::trust_region;
  if (name == "mppi") return UpdateRule::mppi_heuristic;
  if (name == "cem") return UpdateRule::cem;
  throw std::invalid_argument("unknown update rule '" + name + "'");
}

void SampleBuffer::refresh(const Matrix& samples, const Vector& costs) {
  const Index keep = std::min<Index>(capacity_, samples.rows());
  std::vector<Index> order(samples.rows());
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                    [&](Index a, Index b) {
                      if (costs[a] != costs[b]) return costs[a] < costs[b];
                      return a < b;
                    });
  Matrix seqs(keep, samples.cols());
  Vector kept_costs(keep);
  for (Index k = 0; k < keep; ++k) {
    seqs.row(k) = samples.row(order[k]);
    kept_costs[k] = costs[order[k]];
  }
  sequences_ = std::move(seqs);
  costs_ = std::move(kept_costs);
  costs_valid_ = true;
}

void SampleBuffer::shift(int control_dim) {
  for (Index i = 0; i < sequences_.rows(); ++i) {
    Vector row = sequences_.row(i).transpose();
    sequences_.row(i) = shift_warm_start(row, control_dim).transpose();
  }
  costs_valid_ = false;
}

void SampleBuffer::set_costs(const Vector& costs) {
  if (costs.size() != sequences_.rows())
    throw std::invalid_argument("SampleBuffer: cost size mismatch");
  costs_ = costs;
  costs_valid_ = true;
}

Matrix colored_correlation(int horizon, int control_dim, double beta) {
  if (horizon < 1 || control_dim < 1)
    throw std::invalid_argument("colored_correlation: invalid dimensions");
  if (!(beta >= 0.0))
    throw std::invalid_argument("colored_correlation: beta must be >= 0");

  // Spectral synthesis of circularly stationary sequences 4x the horizon,
  // empirical autocovariance averaged over 10^4 draws and every circular
  // time position. Frequencies sit on a half-bin grid: the lowest one
  // stays positive for any beta and the flat spectrum averages to an
  // exactly white ensemble. The per-draw circular estimate is positive
  // semidefinite, so the Toeplitz average is too.
  const int synth_len = 4 * horizon;
  const int num_freq = synth_len / 2;
  const int num_draws = 10000;

  Vector amplitude(num_freq);
  for (int k = 1; k <= num_freq; ++k)
    amplitude[k - 1] = std::pow(static_cast<double>(k) - 0.5, -0.5 * beta);

  Matrix basis(2 * num_freq, synth_len);
  for (int k = 1; k <= num_freq; ++k) {
    const double w = 2.0 * M_PI * (k - 0.5) / synth_len;
    for (int t = 0; t < synth_len; ++t) {
      basis(2 * (k - 1), t) = amplitude[k - 1] * std::cos(w * t);
      basis(2 * (k - 1) + 1, t) = amplitude[k - 1] * std::sin(w * t);
    }
  }

  Rng rng(derive_seed(0xC0110EEDULL, static_cast<std::uint64_t>(horizon) * 131 +
                                         static_cast<std::uint64_t>(beta * 1e6)));
  Vector lags = Vector::Zero(horizon);
  const int chunk = 256;
  Matrix coeffs(chunk, 2 * num_freq);
  for (int done = 0; done < num_draws;) {
    const int rows = std::min(chunk, num_draws - done);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < 2 * num_freq; ++j) coeffs(i, j) = rng.normal();
    const Matrix draws = coeffs.topRows(rows) * basis;  // rows x synth_len
    for (int tau = 0; tau < horizon; ++tau) {
      double acc = 0.0;
      for (int i = 0; i < rows; ++i) {
        const auto x = draws.row(i);
        acc += x.head(synth_len - tau).dot(x.tail(synth_len - tau));
      }
      lags[tau] += acc / static_cast<double>(synth_len - tau);
    }
    done += rows;
  }
  lags /= lags[0];  // normalization constants cancel in the correlation

  Matrix corr(horizon, horizon);
  for (int s1 = 0; s1 < horizon; ++s1)
    for (int s2 = 0; s2 < horizon; ++s2) corr(s1, s2) = lags[std::abs(s1 - s2)];

  // The unbiased lag estimate is exact in expectation but not guaranteed
  // positive semidefinite; floor the spectrum and restore the unit diagonal.
  Eigen::SelfAdjointEigenSolver<Matrix> eigs(corr);
  const Vector floored = eigs.eigenvalues().cwiseMax(1e-9);
  corr = eigs.eigenvectors() * floored.asDiagonal() * eigs.eigenvectors().transpose();
  corr = 0.5 * (corr + corr.transpose());
  const Vector inv_std = corr.diagonal().cwiseSqrt().cwiseInverse();
  corr = inv_std.asDiagonal() * corr * inv_std.asDiagonal();
  corr.diagonal().setOnes();

  // Within a time step the channels are uncorrelated: one identical block
  // per channel, zeros everywhere else.
  const Index d_v = static_cast<Index>(horizon) * control_dim;
  Matrix full = Matrix::Zero(d_v, d_v);
  for (int c = 0; c < control_dim; ++c)
    for (int s1 = 0; s1 < horizon; ++s1)
      for (int s2 = 0; s2 < horizon; ++s2)
        full(static_cast<Index>(s1) * control_dim + c,
             static_cast<Index>(s2) * control_dim + c) = corr(s1, s2);
  return full;
}

Matrix clip_controls(Matrix samples, const Vector& lower, const Vector& upper) {
  const Index d_u = lower.size();
  if (upper.size() != d_u || samples.cols() % d_u != 0)
    throw std::invalid_argument("clip_controls: bound size mismatch");
  for (Index j = 0; j < samples.cols(); ++j) {
    const Index channel = j % d_u;
    samples.col(j) = samples.col(j).cwiseMax(lower[channel]).cwiseMin(upper[channel]);
  }
  return samples;
}

Vector shift_warm_start(const Vector& mean, int control_dim) {
  const Index d_v = mean.size();
  if (d_v % control_dim != 0)
    throw std::invalid_argument("shift_warm_start: layout mismatch");
  Vector shifted(d_v);
  shifted.head(d_v - control_dim) = mean.tail(d_v - control_dim);
  shifted.tail(control_dim) = mean.tail(control_dim);
  return shifted;
}

namespace {

void validate_mpc_config(const MpcConfig& cfg, const OcpConfig& ocp) {
  if (cfg.num_samples < 2) throw std::invalid_argument("MpcConfig: num_samples must be >= 2");
  if (cfg.num_iterations < 1) throw std::invalid_argument("MpcConfig: num_iterations must be >= 1");
  if (cfg.buffer_size < 0 || cfg.buffer_size >= cfg.num_samples)
    throw std::invalid_argument("MpcConfig: buffer size must satisfy 0 <= B < N");
  if (cfg.init_std.size() != ocp.control_dim)
    throw std::invalid_argument("MpcConfig: init_std must have control_dim entries");
  if (cfg.sampler == SamplerKind::lcd) {
    if (!cfg.lcd_set) throw std::invalid_argument("MpcConfig: lcd sampler needs a sample set");
    if (cfg.lcd_set->dim != ocp.seq_dim())
      throw std::invalid_argument("MpcConfig: LCD set dimension mismatch");
    if (cfg.lcd_set->count != cfg.num_samples)
      throw std::invalid_argument("MpcConfig: LCD set size must equal num_samples");
  }
}

Vector initial_variances(const MpcConfig& cfg, const OcpConfig& ocp) {
  const Index d_v = ocp.seq_dim();
  Vector variances(d_v);
  for (Index j = 0; j < d_v; ++j) {
    const double s = cfg.init_std[j % ocp.control_dim];
    variances[j] = s * s;
  }
  return variances;
}

UnitSampleSource make_source(const MpcConfig& cfg, const OcpConfig& ocp,
                             std::uint64_t scramble_seed) {
  switch (cfg.sampler) {
    case SamplerKind::random:
      return UnitSampleSource::make_random(ocp.seq_dim());
    case SamplerKind::sobol_scrambled:
      return UnitSampleSource::make_sobol(ocp.seq_dim(), scramble_seed);
    case SamplerKind::halton_scrambled:
      return UnitSampleSource::make_halton(ocp.seq_dim(), scramble_seed);
    case SamplerKind::lcd:
      return UnitSampleSource::make_lcd(*cfg.lcd_set);
  }
  throw std::logic_error("make_source: unreachable");
}

}  // namespace

MpcStepResult mpc_step(const Vector& state, GaussianProposal& proposal,
                       SampleBuffer& buffer, const MpcConfig& cfg,
                       const OcpConfig& ocp, UnitSampleSource& source, Rng& rng) {
  const auto step_start = std::chrono::steady_clock::now();
  const Index d_v = ocp.seq_dim();
  const int d_u = ocp.control_dim;

  const Matrix& correlation = cfg.correlation;

  // Warm start: shifted previous mean, fresh initial covariance; buffered
  // sequences are shifted alongside and their stale costs re-evaluated at
  // the first iteration.
  proposal = make_gaussian_corr(shift_warm_start(proposal.mean, d_u),
                                initial_variances(cfg, ocp), correlation);
  buffer.shift(d_u);

  MpcStepResult result;
  result.best_cost = std::numeric_limits<double>::infinity();
  std::optional<DualState> warm_dual;

  for (int j = 0; j < cfg.num_iterations; ++j) {
    IterationDiagnostics diag;

    const Matrix rotation = random_rotation(d_v, rng);
    Matrix fresh = transform_samples(source.draw(cfg.num_samples, rng), proposal,
                                     rotation);
    fresh = clip_controls(std::move(fresh), ocp.control_lower, ocp.control_upper);

    const Index n_buffered = buffer.size();
    const bool reroll_buffer = n_buffered > 0 && !buffer.costs_valid();

    SampleBatch batch;
    batch.samples.resize(cfg.num_samples + n_buffered, d_v);
    batch.samples.topRows(cfg.num_samples) = fresh;
    if (n_buffered > 0) batch.samples.bottomRows(n_buffered) = buffer.sequences();
    batch.origin.assign(cfg.num_samples + n_buffered, SampleOrigin::fresh);
    for (Index i = 0; i < n_buffered; ++i)
      batch.origin[cfg.num_samples + i] = SampleOrigin::buffered;

    // Rollout: fresh rows always; buffered rows only when their costs are
    // stale (the start state changed between steps, never within one).
    batch.costs.resize(batch.size());
    if (reroll_buffer) {
      const RolloutResult rollout =
          rollout_batch(ocp, state, batch.samples, cfg.rollout_threads);
      batch.costs = rollout.costs;
      diag.rollout_failures = rollout.failures;
      buffer.set_costs(batch.costs.tail(n_buffered));
    } else {
      const RolloutResult rollout =
          rollout_batch(ocp, state, batch.samples.topRows(cfg.num_samples),
                        cfg.rollout_threads);
      batch.costs.head(cfg.num_samples) = rollout.costs;
      diag.rollout_failures = rollout.failures;
      if (n_buffered > 0) batch.costs.tail(n_buffered) = buffer.costs();
    }
    diag.fresh_rows = cfg.num_samples;
    diag.buffered_rows = static_cast<int>(n_buffered);

    Index best_row = 0;
    const double iteration_best = batch.costs.minCoeff(&best_row);
    if (iteration_best < result.best_cost) {
      result.best_cost = iteration_best;
      result.best_sequence = batch.samples.row(best_row).transpose();
    }

    if (!std::isfinite(iteration_best)) {
      // Degenerate batch: nothing usable was sampled this iteration.
      diag.update_failed = true;
      result.failed = true;
      result.iterations.push_back(diag);
      break;
    }

    try {
      switch (cfg.rule) {
        case UpdateRule::trust_region: {
          batch.logpdf = gaussian_logpdf_batch(proposal, batch.samples);
          TrUpdateResult update = tr_update(proposal, batch, cfg.trust_region,
                                            &correlation, warm_dual);
          warm_dual = update.dual;
          diag.dual = update.dual;
          diag.kl_new_old = update.kl_new_old;
          diag.entropy = update.entropy_new;
          diag.effective_sample_size = update.effective_sample_size;
          proposal = std::move(update.proposal);
          break;
        }
        case UpdateRule::mppi_heuristic: {
          const double lambda = cfg.mppi.adaptive
                                    ? adapt_temperature(batch.costs, cfg.mppi.kappa)
                                    : cfg.mppi.lambda;
          diag.lambda = lambda;
          batch.weights = mppi_weights(batch.costs, lambda);
          diag.effective_sample_size = effective_sample_size(batch.weights);
          GaussianProposal matched =
              project_gaussian(batch.samples, batch.weights, &correlation);
          const Vector mean =
              momentum_blend(proposal.mean, matched.mean, cfg.mppi.momentum);
          const Vector variances = momentum_blend(
              proposal.cov.diagonal(), matched.cov.diagonal(), cfg.mppi.momentum);
          GaussianProposal next = make_gaussian_corr(mean, variances, correlation);
          diag.kl_new_old = gaussian_kl(next, proposal);
          diag.entropy = gaussian_entropy(next);
          proposal = std::move(next);
          break;
        }
        case UpdateRule::cem: {
          GaussianProposal next =
              cem_update(batch.samples, batch.costs, proposal, cfg.cem, &correlation);
          diag.kl_new_old = gaussian_kl(next, proposal);
          diag.entropy = gaussian_entropy(next);
          diag.effective_sample_size = std::ceil(
              cfg.cem.elite_fraction * static_cast<double>(batch.size()));
          proposal = std::move(next);
          break;
        }
      }
    } catch (const std::runtime_error&) {
      // Degenerate update (for instance the weights collapsed onto a single
      // row): the proposal stays where it was, the batch itself is still
      // valid, so the step can return its best sample as usual.
      diag.update_failed = true;
    }

    buffer.refresh(batch.samples, batch.costs);
    result.iterations.push_back(diag);
  }

  if (!result.failed && result.best_sequence.size() == d_v &&
      std::isfinite(result.best_cost)) {
    result.applied = result.best_sequence.head(d_u);
  } else {
    result.failed = true;
  }
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - step_start)
                       .count();
  return result;
}

EpisodeResult run_episode(const OcpConfig& ocp, const Vector& x0, int steps,
                          const MpcConfig& cfg) {
  ocp.validate();
  if (steps < 1) throw std::invalid_argument("run_episode: steps must be >= 1");

  MpcConfig resolved = cfg;
  if (resolved.correlation.size() == 0)
    resolved.correlation =
        colored_correlation(ocp.horizon, ocp.control_dim, cfg.noise_beta);
  validate_mpc_config(resolved, ocp);

  Rng rng(resolved.seed);
  UnitSampleSource source =
      make_source(resolved, ocp, derive_seed(resolved.seed, 0x5c4a3bULL));

  // Cold start: zero mean when feasible, midpoint of the bounds otherwise.
  const Index d_v = ocp.seq_dim();
  Vector mean0 = Vector::Zero(d_v);
  for (Index j = 0; j < d_v; ++j) {
    const Index c = j % ocp.control_dim;
    if (ocp.control_lower[c] > 0.0 || ocp.control_upper[c] < 0.0)
      mean0[j] = 0.5 * (ocp.control_lower[c] + ocp.control_upper[c]);
  }
  GaussianProposal proposal = make_gaussian_corr(
      mean0, initial_variances(resolved, ocp), resolved.correlation);
  SampleBuffer buffer(resolved.buffer_size);

  EpisodeResult episode;
  episode.states.resize(steps + 1, ocp.state_dim);
  episode.controls.resize(steps, ocp.control_dim);
  episode.states.row(0) = x0.transpose();

  Vector state = x0;
  Vector previous_control = Vector::Zero(ocp.control_dim);
  std::vector<double> step_ms;
  step_ms.reserve(steps);
  int executed = 0;

  for (int k = 0; k < steps; ++k) {
    MpcStepResult step = mpc_step(state, proposal, buffer, resolved, ocp, source, rng);
    step_ms.push_back(step.wall_ms);

    const Vector u = step.failed ? previous_control : step.applied;
    if (step.failed) ++episode.failed_steps;

    episode.cumulative_cost += ocp.stage_cost(state, u);
    state = ocp.dynamics(state, u);
    episode.controls.row(k) = u.transpose();
    episode.states.row(k + 1) = state.transpose();
    previous_control = u;
    ++executed;

    if (!state.allFinite()) {
      episode.truncated = true;
      break;
    }
  }

  if (executed < steps) {
    episode.states.conservativeResize(executed + 1, Eigen::NoChange);
    episode.controls.conservativeResize(executed, Eigen::NoChange);
  }

  for (Index k = 1; k < episode.controls.rows(); ++k)
    episode.smoothness +=
        (episode.controls.row(k) - episode.controls.row(k - 1)).squaredNorm();

  const double n = static_cast<double>(step_ms.size());
  if (n > 0) {
    double mean = 0.0;
    for (double v : step_ms) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : step_ms) var += (v - mean) * (v - mean);
    episode.step_ms_mean = mean;
    episode.step_ms_std = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  }
  return episode;
}

}  // namespace trmpc
