#include "trmpc/bench.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "trmpc/stats.hpp"

namespace trmpc {

const char* const kRecordsCsvHeader =
    "cell_id,rule,sampler,env,sweep_value,seed,cum_cost,smoothness,"
    "step_ms_mean,step_ms_std,truncated";

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::epsilon: return "eps";
    case SweepAxis::samples: return "n";
    case SweepAxis::iterations: return "iters";
  }
  return "?";
}

int worker_count_from_env(int jobs) {
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (const char* cap = std::getenv("TRSMPC_THREADS")) {
    const int parsed = std::atoi(cap);
    if (parsed >= 1) workers = std::min(workers, parsed);
  }
  return std::max(1, std::min(workers, jobs));
}

ResolvedEnvironment resolve_environment(const ExperimentConfig& cfg) {
  ResolvedEnvironment env;
  if (cfg.environment == "cartpole") {
    env.ocp = envs::make_cartpole_ocp(cfg.cartpole, cfg.cartpole_cost,
                                      cfg.cartpole_horizon);
    env.x0 = envs::cartpole_initial_state();
    env.steps = cfg.cartpole_steps;
  } else if (cfg.environment == "truck") {
    env.ocp = envs::make_truck_ocp(cfg.truck, cfg.truck_cost, cfg.truck_horizon);
    env.x0 = envs::truck_initial_state();
    env.steps = cfg.truck_steps;
  } else {
    throw std::invalid_argument("unknown environment '" + cfg.environment + "'");
  }
  return env;
}

LcdSampleSet ensure_lcd_set(const std::string& dir, Index count, Index dim) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / ("lcd_n" + std::to_string(count) + "_d" +
                                         std::to_string(dim) + ".txt");
  if (fs::exists(path)) return load_sample_set(path.string());

  LcdOptimizeOptions options;
  options.budget = 300;
  options.starts = 5;
  LcdSampleSet set = optimize_lcd_set(count, dim, options,
                                      derive_seed(0x1cd5e75ULL, count * 1000 + dim));
  save_sample_set(set, path.string());
  return set;
}

namespace {

struct Cell {
  std::string id;
  UpdateRule rule;
  SamplerKind sampler;
  double sweep_value;
  MpcConfig mpc;
};

std::string make_cell_id(const ExperimentConfig& cfg, UpdateRule rule,
                         SamplerKind sampler, double value) {
  std::ostringstream id;
  id << cfg.environment << "|" << to_string(rule) << "|" << to_string(sampler);
  if (cfg.axis != SweepAxis::none) id << "|" << to_string(cfg.axis) << "=" << value;
  return id.str();
}

MpcConfig make_mpc_config(const ExperimentConfig& cfg, const ResolvedEnvironment& env,
                          UpdateRule rule, SamplerKind sampler, double value,
                          const Matrix& correlation) {
  MpcConfig mpc;
  mpc.rule = rule;
  mpc.sampler = sampler;
  mpc.num_samples = cfg.num_samples;
  mpc.num_iterations = cfg.num_iterations;
  mpc.buffer_size = cfg.buffer_size;
  mpc.noise_beta = cfg.noise_beta;
  mpc.trust_region.epsilon = cfg.epsilon;
  mpc.trust_region.h_min = cfg.h_min;
  mpc.mppi.adaptive = true;
  mpc.mppi.kappa = cfg.mppi_kappa;
  mpc.mppi.momentum = cfg.mppi_momentum;
  mpc.cem.elite_fraction = cfg.cem_elite_fraction;
  mpc.cem.momentum = cfg.cem_momentum;
  mpc.rollout_threads = 1;
  mpc.correlation = correlation;

  switch (cfg.axis) {
    case SweepAxis::none: break;
    case SweepAxis::epsilon: mpc.trust_region.epsilon = value; break;
    case SweepAxis::samples: mpc.num_samples = static_cast<int>(value); break;
    case SweepAxis::iterations: mpc.num_iterations = static_cast<int>(value); break;
  }
  if (mpc.buffer_size >= mpc.num_samples) mpc.buffer_size = mpc.num_samples - 1;

  mpc.init_std = cfg.init_std_scale * 0.5 *
                 (env.ocp.control_upper - env.ocp.control_lower);
  return mpc;
}

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string record_to_csv(const ExperimentRecord& r) {
  std::ostringstream row;
  row << r.cell_id << "," << r.rule << "," << r.sampler << "," << r.environment
      << "," << format_double(r.sweep_value) << "," << r.seed << ","
      << format_double(r.cum_cost) << "," << format_double(r.smoothness) << ","
      << format_double(r.step_ms_mean) << "," << format_double(r.step_ms_std)
      << "," << (r.truncated ? 1 : 0);
  return row.str();
}

// Streams rows in canonical index order even when episodes finish out of
// order: completed rows wait until their predecessors are written.
class SequencedWriter {
 public:
  SequencedWriter(const std::string& path, std::size_t total) : total_(total) {
    out_.open(path);
    if (!out_) throw std::runtime_error("run_sweep: cannot open " + path);
    out_ << kRecordsCsvHeader << "\n";
    pending_.resize(total);
    ready_.assign(total, false);
  }

  void push(std::size_t index, std::string row) {
    std::lock_guard<std::mutex> lock(mutex_);
    pending_[index] = std::move(row);
    ready_[index] = true;
    while (next_ < total_ && ready_[next_]) {
      out_ << pending_[next_] << "\n";
      pending_[next_].clear();
      ++next_;
    }
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::size_t total_;
  std::size_t next_ = 0;
  std::vector<std::string> pending_;
  std::vector<bool> ready_;
  std::mutex mutex_;
};

}  // namespace

std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("run_sweep: runs must be >= 1");
  if (cfg.axis != SweepAxis::none && cfg.values.empty())
    throw std::invalid_argument("run_sweep: sweep value list is empty");
  if (cfg.rules.empty() || cfg.samplers.empty())
    throw std::invalid_argument("run_sweep: empty controller matrix");

  const ResolvedEnvironment env = resolve_environment(cfg);
  const Matrix correlation = colored_correlation(
      env.ocp.horizon, env.ocp.control_dim, cfg.noise_beta);

  const std::vector<double> values =
      cfg.axis == SweepAxis::none ? std::vector<double>{0.0} : cfg.values;

  std::vector<Cell> cells;
  for (const double value : values) {
    for (const UpdateRule rule : cfg.rules) {
      for (const SamplerKind sampler : cfg.samplers) {
        Cell cell{make_cell_id(cfg, rule, sampler, value), rule, sampler, value,
                  make_mpc_config(cfg, env, rule, sampler, value, correlation)};
        if (sampler == SamplerKind::lcd)
          cell.mpc.lcd_set =
              ensure_lcd_set(cfg.lcd_dir, cell.mpc.num_samples, env.ocp.seq_dim());
        cells.push_back(std::move(cell));
      }
    }
  }

  const std::size_t total = cells.size() * static_cast<std::size_t>(cfg.runs);
  std::vector<ExperimentRecord> records(total);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string csv_path =
      (std::filesystem::path(cfg.out_dir) / "records.csv").string();
  SequencedWriter writer(csv_path, total);

  std::atomic<std::size_t> cursor{0};
  auto work = [&]() {
    for (;;) {
      // Dispatch round-robin across cells so slow machine-load drift hits
      // every cell equally (the per-step timings are compared across cells).
      const std::size_t dispatch = cursor.fetch_add(1);
      if (dispatch >= total) return;
      const std::size_t cell_index = dispatch % cells.size();
      const int run = static_cast<int>(dispatch / cells.size());
      const std::size_t job = cell_index * cfg.runs + run;
      const Cell& cell = cells[cell_index];

      ExperimentRecord record;
      record.cell_id = cell.id;
      record.rule = to_string(cell.rule);
      record.sampler = to_string(cell.sampler);
      record.environment = cfg.environment;
      record.sweep_value = cell.sweep_value;
      record.seed = cfg.base_seed + static_cast<std::uint64_t>(run);

      MpcConfig mpc = cell.mpc;
      mpc.seed = record.seed;
      try {
        const EpisodeResult episode = run_episode(env.ocp, env.x0, env.steps, mpc);
        record.cum_cost = episode.cumulative_cost;
        record.smoothness = episode.smoothness;
        record.step_ms_mean = episode.step_ms_mean;
        record.step_ms_std = episode.step_ms_std;
        record.truncated = episode.truncated;
      } catch (const std::exception&) {
        record.truncated = true;  // recorded as a failure, sweep continues
      }
      records[job] = record;
      writer.push(job, record_to_csv(record));
    }
  };

  const int workers = worker_count_from_env(static_cast<int>(total));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  emit(records, aggregate(records), cfg.out_dir);
  return records;
}

std::map<std::string, CellSummary> aggregate_metric(
    const std::vector<ExperimentRecord>& records,
    double (*metric)(const ExperimentRecord&)) {
  std::map<std::string, std::vector<double>> cell_values;
  std::map<std::string, int> cell_failures;
  for (const auto& record : records) {
    if (record.truncated) {
      ++cell_failures[record.cell_id];
      cell_values.try_emplace(record.cell_id);
      continue;
    }
    cell_values[record.cell_id].push_back(metric(record));
    cell_failures.try_emplace(record.cell_id, 0);
  }

  std::map<std::string, CellSummary> summaries;
  for (auto& [id, values] : cell_values) {
    CellSummary summary;
    summary.n = static_cast<int>(values.size());
    summary.failures = cell_failures[id];
    if (!values.empty()) {
      std::sort(values.begin(), values.end());
      summary.q25 = percentile_sorted(values, 0.25);
      summary.median = percentile_sorted(values, 0.5);
      summary.q75 = percentile_sorted(values, 0.75);
    }
    summaries[id] = summary;
  }
  return summaries;
}

std::map<std::string, CellSummary> aggregate(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  return aggregate_metric(records,
                          [](const ExperimentRecord& r) { return r.cum_cost; });
}

void emit(const std::vector<ExperimentRecord>& records,
          const std::map<std::string, CellSummary>& summaries,
          const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const std::string csv_path = (fs::path(out_dir) / "records.csv").string();
  {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("emit: cannot open " + csv_path);
    csv << kRecordsCsvHeader << "\n";
    for (const auto& record : records) csv << record_to_csv(record) << "\n";
    if (!csv) throw std::runtime_error("emit: write failed on " + csv_path);
  }

  nlohmann::json cells = nlohmann::json::object();
  for (const auto& [id, summary] : summaries) {
    cells[id] = {{"median", summary.median},
                 {"q25", summary.q25},
                 {"q75", summary.q75},
                 {"n", summary.n},
                 {"failures", summary.failures}};
  }
  const std::string json_path = (fs::path(out_dir) / "summary.json").string();
  std::ofstream json_out(json_path);
  if (!json_out) throw std::runtime_error("emit: cannot open " + json_path);
  json_out << nlohmann::json{{"cells", cells}}.dump(2) << "\n";
  if (!json_out) throw std::runtime_error("emit: write failed on " + json_path);
}

std::vector<ExperimentRecord> parse_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_records_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kRecordsCsvHeader)
    throw std::runtime_error("parse_records_csv: bad header in " + path);

  std::vector<ExperimentRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 11)
      throw std::runtime_error("parse_records_csv: bad row '" + line + "'");
    ExperimentRecord r;
    r.cell_id = fields[0];
    r.rule = fields[1];
    r.sampler = fields[2];
    r.environment = fields[3];
    r.sweep_value = std::strtod(fields[4].c_str(), nullptr);
    r.seed = std::strtoull(fields[5].c_str(), nullptr, 10);
    r.cum_cost = std::strtod(fields[6].c_str(), nullptr);
    r.smoothness = std::strtod(fields[7].c_str(), nullptr);
    r.step_ms_mean = std::strtod(fields[8].c_str(), nullptr);
    r.step_ms_std = std::strtod(fields[9].c_str(), nullptr);
    r.truncated = fields[10] == "1";
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace trmpc
