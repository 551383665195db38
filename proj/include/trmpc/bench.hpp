#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "trmpc/envs/cartpole.hpp"
#include "trmpc/envs/truck.hpp"
#include "trmpc/mpc.hpp"

namespace trmpc {

enum class SweepAxis { none, epsilon, samples, iterations };

const char* to_string(SweepAxis axis);

/// One experiment grid: environment x update rules x samplers x sweep
/// values, `runs` seeds per cell. Worker count is capped by the
/// TRSMPC_THREADS environment variable.
struct ExperimentConfig {
  std::string environment = "cartpole";
  std::vector<UpdateRule> rules = {UpdateRule::trust_region};
  std::vector<SamplerKind> samplers = {SamplerKind::lcd};
  SweepAxis axis = SweepAxis::none;
  std::vector<double> values;
  int runs = 100;
  std::uint64_t base_seed = 0;
  std::string out_dir = ".";
  std::string lcd_dir = "lcd_sets";  // cache for generated LCD sets

  // Controller settings (the sweep axis overrides the matching field).
  int num_samples = 100;
  int num_iterations = 5;
  int buffer_size = 5;
  double epsilon = 2.0;
  double h_min = -std::numeric_limits<double>::infinity();
  double noise_beta = 1.0;
  double mppi_kappa = 10.0;
  double mppi_momentum = 0.3;
  double cem_elite_fraction = 0.1;
  double cem_momentum = 0.1;
  double init_std_scale = 0.5;  // fraction of the control half-range

  // Environment settings (defaults baked in, overridable via config file).
  envs::CartPoleParams cartpole;
  envs::CartPoleCostWeights cartpole_cost;
  int cartpole_horizon = 50;
  int cartpole_steps = 150;
  envs::TruckParams truck;
  envs::TruckCostWeights truck_cost;
  int truck_horizon = 40;
  int truck_steps = 400;
};

struct ExperimentRecord {
  std::string cell_id;
  std::string rule;
  std::string sampler;
  std::string environment;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  double cum_cost = 0.0;
  double smoothness = 0.0;
  double step_ms_mean = 0.0;
  double step_ms_std = 0.0;
  bool truncated = false;
};

struct CellSummary {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  int n = 0;         // records aggregated (truncated excluded)
  int failures = 0;  // truncated episodes
};

/// Environment + start state + episode length for a named environment.
struct ResolvedEnvironment {
  OcpConfig ocp;
  Vector x0;
  int steps = 0;
};

ResolvedEnvironment resolve_environment(const ExperimentConfig& cfg);

/// Loads the (count, dim) LCD set from the cache directory, generating and
/// saving it first when missing. Generation is deterministic.
LcdSampleSet ensure_lcd_set(const std::string& dir, Index count, Index dim);

/// Runs the full grid, streaming CSV records to <out_dir>/records.csv in
/// canonical (cell, seed) order as episodes complete, then writes the
/// summary JSON. Individual episode failures are recorded and the sweep
/// continues. Returns all records.
std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& cfg);

/// Median / quartiles of the cumulative cost per cell, linear-interpolation
/// percentiles, truncated episodes excluded and counted.
std::map<std::string, CellSummary> aggregate(const std::vector<ExperimentRecord>& records);

/// Same aggregation for an arbitrary record field.
std::map<std::string, CellSummary> aggregate_metric(
    const std::vector<ExperimentRecord>& records,
    double (*metric)(const ExperimentRecord&));

/// Writes records.csv (17 significant digits) and summary.json under
/// out_dir. The JSON layout is {"cells": {id: {median, q25, q75, n,
/// failures}}} over cumulative cost, described by schemas/summary.schema.json.
void emit(const std::vector<ExperimentRecord>& records,
          const std::map<std::string, CellSummary>& summaries,
          const std::string& out_dir);

std::vector<ExperimentRecord> parse_records_csv(const std::string& path);

extern const char* const kRecordsCsvHeader;

int worker_count_from_env(int jobs);

}  // namespace trmpc
