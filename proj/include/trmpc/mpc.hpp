#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trmpc/baselines.hpp"
#include "trmpc/ocp.hpp"
#include "trmpc/sampling.hpp"
#include "trmpc/trust_region.hpp"

namespace trmpc {

enum class UpdateRule { trust_region, mppi_heuristic, cem };

const char* to_string(UpdateRule rule);
UpdateRule rule_from_string(const std::string& name);

/// Per-time-step optimizer settings. `correlation` may be left empty, in
/// which case the colored-noise template for (horizon, control_dim, beta)
/// is built at episode setup.
struct MpcConfig {
  int num_samples = 100;    // fresh samples per iteration
  int num_iterations = 3;   // optimizer iterations per step
  int buffer_size = 5;      // retained best trajectories, < num_samples
  UpdateRule rule = UpdateRule::trust_region;
  SamplerKind sampler = SamplerKind::lcd;
  Vector init_std;          // d_u entries, broadcast over the horizon
  double noise_beta = 1.0;  // PSD ~ 1/w^beta time correlation
  TrustRegionConfig trust_region;
  MppiConfig mppi;
  CemConfig cem;
  std::uint64_t seed = 0;
  int rollout_threads = 1;
  Matrix correlation;                 // optional d_v x d_v template
  std::optional<LcdSampleSet> lcd_set;  // required for the lcd sampler
};

struct IterationDiagnostics {
  DualState dual;       // trust-region rule only
  double kl_new_old = 0.0;
  double entropy = 0.0;
  double effective_sample_size = 0.0;
  double lambda = 0.0;  // mppi rule only
  int fresh_rows = 0;
  int buffered_rows = 0;
  int rollout_failures = 0;
  /// The update degenerated (weights collapsed onto one row) and the
  /// proposal was left unchanged; the step still returns its best sample.
  bool update_failed = false;
};

struct MpcStepResult {
  Vector applied;        // first control of the best sampled sequence
  Vector best_sequence;  // d_v
  double best_cost = 0.0;
  std::vector<IterationDiagnostics> iterations;
  bool failed = false;   // degenerate batch; caller repeats previous control
  double wall_ms = 0.0;  // brackets the step body only, no file I/O
};

/// Cost-ascending store of the best (sequence, cost) pairs seen in the most
/// recent iteration.
class SampleBuffer {
 public:
  explicit SampleBuffer(int capacity) : capacity_(capacity) {}

  int capacity() const { return capacity_; }
  Index size() const { return sequences_.rows(); }
  const Matrix& sequences() const { return sequences_; }
  const Vector& costs() const { return costs_; }
  bool costs_valid() const { return costs_valid_; }

  /// Replaces the content with the `capacity` lowest-cost rows of the batch.
  void refresh(const Matrix& samples, const Vector& costs);

  /// Warm start across time steps: shift every sequence and mark the stored
  /// costs stale (the start state changed).
  void shift(int control_dim);

  void set_costs(const Vector& costs);

 private:
  int capacity_ = 0;
  Matrix sequences_;
  Vector costs_;
  bool costs_valid_ = false;
};

/// Temporal correlation of 1/w^beta colored noise over the horizon, one
/// block per control channel, zero across channels, unit diagonal, positive
/// definite after jitter. Deterministic for given (horizon, control_dim,
/// beta); the empirical average uses a fixed internal seed.
Matrix colored_correlation(int horizon, int control_dim, double beta);

/// Elementwise clamp of every (step, channel) entry to the channel bounds.
Matrix clip_controls(Matrix samples, const Vector& lower, const Vector& upper);

/// Drop the first control block, shift left, duplicate the final block.
Vector shift_warm_start(const Vector& mean, int control_dim);

/// One receding-horizon step: warm starts the proposal mean and buffer,
/// then for each iteration draws samples (fresh rotation each iteration),
/// appends buffered rows, clips, rolls out in parallel, applies the
/// configured update rule and refreshes the buffer. Returns the first
/// control of the best sampled sequence. `proposal` and `buffer` are
/// updated in place and carried to the next step.
MpcStepResult mpc_step(const Vector& state, GaussianProposal& proposal,
                       SampleBuffer& buffer, const MpcConfig& cfg,
                       const OcpConfig& ocp, UnitSampleSource& source, Rng& rng);

struct EpisodeResult {
  Matrix states;    // (T+1) x d_x
  Matrix controls;  // T x d_u
  double cumulative_cost = 0.0;  // sum of applied-step stage costs
  double smoothness = 0.0;       // sum over ||u_k - u_{k-1}||^2
  double step_ms_mean = 0.0;
  double step_ms_std = 0.0;
  bool truncated = false;  // environment diverged
  int failed_steps = 0;
};

/// Closed-loop rollout of `steps` MPC steps from x0. Fully determined by
/// (seed, config, environment), independent of the rollout worker count.
EpisodeResult run_episode(const OcpConfig& ocp, const Vector& x0, int steps,
                          const MpcConfig& cfg);

}  // namespace trmpc
