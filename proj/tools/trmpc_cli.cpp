#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trmpc/bench.hpp"

namespace {

struct SubOptions {
  trmpc::ExperimentConfig cfg;
  std::vector<std::string> rules;
  std::vector<std::string> samplers;
  std::vector<double> values;
  std::string h_min = "none";
  int runs = -1;  // resolved after parsing: --runs > --full > desk default
  bool full = false;
};

double parse_hmin(const std::string& text) {
  if (text == "none") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str())
    throw CLI::ValidationError("--hmin expects a number, '-inf' or 'none'");
  return value;
}

void add_common_options(CLI::App* sub, SubOptions& o) {
  sub->add_option("--env", o.cfg.environment, "Environment")
      ->check(CLI::IsMember({"cartpole", "truck"}))
      ->capture_default_str();
  sub->add_option("--rule", o.rules, "Update rules: tr|mppi|cem (comma list)")
      ->delimiter(',');
  sub->add_option("--sampler", o.samplers,
                  "Samplers: random|sobol|halton|lcd (comma list)")
      ->delimiter(',');
  sub->add_option("--n", o.cfg.num_samples, "Samples per iteration");
  sub->add_option("--iters", o.cfg.num_iterations, "Optimizer iterations per step");
  sub->add_option("--eps", o.cfg.epsilon, "Trust region KL bound");
  sub->add_option("--hmin", o.h_min, "Entropy lower bound (-inf/none disables)");
  sub->add_option("--runs", o.runs, "Episodes per cell (overrides --full)");
  sub->add_option("--seed", o.cfg.base_seed, "Base seed");
  sub->add_option("--out-dir", o.cfg.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--lcd-dir", o.cfg.lcd_dir, "LCD sample set cache directory")
      ->capture_default_str();
  sub->add_flag("--full", o.full, "Full-scale run count (100 instead of 20)");

  sub->add_option("--buffer", o.cfg.buffer_size, "Sample buffer size");
  sub->add_option("--beta", o.cfg.noise_beta, "Colored-noise exponent");
  sub->add_option("--kappa", o.cfg.mppi_kappa, "MPPI temperature heuristic scale");
  sub->add_option("--momentum", o.cfg.mppi_momentum, "MPPI momentum");
  sub->add_option("--elite-frac", o.cfg.cem_elite_fraction, "CEM elite fraction");
  sub->add_option("--cem-momentum", o.cfg.cem_momentum, "CEM momentum");
  sub->add_option("--std-scale", o.cfg.init_std_scale,
                  "Initial std as a fraction of the control half-range");

  auto* cp = sub->add_option_group("cartpole", "Cart-pole parameters");
  cp->add_option("--cp-cart-mass", o.cfg.cartpole.cart_mass);
  cp->add_option("--cp-pole-mass", o.cfg.cartpole.pole_mass);
  cp->add_option("--cp-half-length", o.cfg.cartpole.half_length);
  cp->add_option("--cp-gravity", o.cfg.cartpole.gravity);
  cp->add_option("--cp-force-bound", o.cfg.cartpole.force_bound);
  cp->add_option("--cp-dt", o.cfg.cartpole.dt);
  cp->add_option("--cp-horizon", o.cfg.cartpole_horizon);
  cp->add_option("--cp-steps", o.cfg.cartpole_steps);
  cp->add_option("--cp-q-theta", o.cfg.cartpole_cost.q_theta);
  cp->add_option("--cp-q-x", o.cfg.cartpole_cost.q_x);
  cp->add_option("--cp-q-xdot", o.cfg.cartpole_cost.q_xdot);
  cp->add_option("--cp-q-thetadot", o.cfg.cartpole_cost.q_thetadot);
  cp->add_option("--cp-r", o.cfg.cartpole_cost.r);
  cp->add_option("--cp-terminal-scale", o.cfg.cartpole_cost.terminal_scale);

  auto* tk = sub->add_option_group("truck", "Truck parameters");
  tk->add_option("--tk-wheelbase", o.cfg.truck.wheelbase);
  tk->add_option("--tk-hitch-length", o.cfg.truck.hitch_length);
  tk->add_option("--tk-speed", o.cfg.truck.speed);
  tk->add_option("--tk-steer-bound", o.cfg.truck.steer_bound);
  tk->add_option("--tk-dt", o.cfg.truck.dt);
  tk->add_option("--tk-horizon", o.cfg.truck_horizon);
  tk->add_option("--tk-steps", o.cfg.truck_steps);
  tk->add_option("--tk-q-pos", o.cfg.truck_cost.q_pos);
  tk->add_option("--tk-q-yaw", o.cfg.truck_cost.q_yaw);
  tk->add_option("--tk-q-hitch", o.cfg.truck_cost.q_hitch);
  tk->add_option("--tk-r", o.cfg.truck_cost.r);
  tk->add_option("--tk-jk-limit", o.cfg.truck_cost.jackknife_limit);
  tk->add_option("--tk-jk-weight", o.cfg.truck_cost.jackknife_weight);
  tk->add_option("--tk-terminal-scale", o.cfg.truck_cost.terminal_scale);
}

int run_grid(SubOptions& o, trmpc::SweepAxis axis) {
  o.cfg.axis = axis;
  if (axis != trmpc::SweepAxis::none) o.cfg.values = o.values;
  o.cfg.h_min = parse_hmin(o.h_min);
  o.cfg.runs = o.runs > 0 ? o.runs : (o.full ? 100 : 20);
  o.cfg.rules.clear();
  for (const auto& name : o.rules) o.cfg.rules.push_back(trmpc::rule_from_string(name));
  o.cfg.samplers.clear();
  for (const auto& name : o.samplers)
    o.cfg.samplers.push_back(trmpc::sampler_from_string(name));

  const auto records = trmpc::run_sweep(o.cfg);
  const auto summaries = trmpc::aggregate(records);

  std::printf("%-40s %12s %12s %12s %4s %4s\n", "cell", "median", "q25", "q75",
              "n", "fail");
  for (const auto& [id, s] : summaries)
    std::printf("%-40s %12.4f %12.4f %12.4f %4d %4d\n", id.c_str(), s.median,
                s.q25, s.q75, s.n, s.failures);
  std::printf("wrote %s/records.csv and %s/summary.json\n", o.cfg.out_dir.c_str(),
              o.cfg.out_dir.c_str());
  return 0;
}

}  // namespace

// Expands `--config <file>` into the equivalent long options, inserted
// right after the subcommand so explicit command-line flags win. Lines are
// `key = value` with `#` comments; keys are the long option names.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;
  if (args.size() < 2)
    throw std::runtime_error("--config requires a subcommand");

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string text) {
      const auto begin = text.find_first_not_of(" \t\r");
      if (begin == std::string::npos) return std::string();
      const auto end = text.find_last_not_of(" \t\r");
      return text.substr(begin, end - begin + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    const std::string flag = "--" + key;
    // Explicit command-line flags override the file.
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    injected.push_back(flag);
    injected.push_back(value);
  }
  args.insert(args.begin() + 2, injected.begin(), injected.end());
  return args;
}

int main(int argc, char** argv) {
  CLI::App app{"Trust-region sampling-based MPC benchmark"};
  app.require_subcommand(1);

  SubOptions eps_opts;
  eps_opts.rules = {"tr"};
  eps_opts.samplers = {"random", "sobol", "halton", "lcd"};
  eps_opts.values = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0};
  eps_opts.cfg.num_samples = 100;
  eps_opts.cfg.num_iterations = 5;
  auto* sweep_eps = app.add_subcommand(
      "sweep-eps", "Sweep the trust-region bound over the sampler matrix");
  add_common_options(sweep_eps, eps_opts);
  sweep_eps->add_option("--values", eps_opts.values, "Epsilon values")->delimiter(',');

  SubOptions samples_opts;
  samples_opts.rules = {"tr", "mppi"};
  samples_opts.samplers = {"random", "sobol", "halton", "lcd"};
  samples_opts.values = {20, 40, 100, 300};
  samples_opts.cfg.num_iterations = 3;
  auto* sweep_samples =
      app.add_subcommand("sweep-samples", "Sweep the per-iteration sample count");
  add_common_options(sweep_samples, samples_opts);
  sweep_samples->add_option("--values", samples_opts.values, "Sample counts")
      ->delimiter(',');

  SubOptions iters_opts;
  iters_opts.rules = {"tr", "mppi"};
  iters_opts.samplers = {"random", "sobol", "halton", "lcd"};
  iters_opts.values = {1, 3, 5, 10};
  iters_opts.cfg.num_samples = 40;
  auto* sweep_iters =
      app.add_subcommand("sweep-iters", "Sweep the optimizer iteration count");
  add_common_options(sweep_iters, iters_opts);
  sweep_iters->add_option("--values", iters_opts.values, "Iteration counts")
      ->delimiter(',');

  SubOptions single_opts;
  single_opts.rules = {"tr"};
  single_opts.samplers = {"lcd"};
  single_opts.cfg.num_samples = 100;
  single_opts.cfg.num_iterations = 3;
  auto* single = app.add_subcommand("single", "Run one controller cell");
  add_common_options(single, single_opts);

  struct {
    int n = 100;
    int dim = 2;
    std::uint64_t seed = 0;
    std::string out;
    int budget = 400;
    int starts = 5;
  } lcd_opts;
  auto* lcd_gen =
      app.add_subcommand("lcd-gen", "Optimize and store a deterministic sample set");
  lcd_gen->add_option("--n", lcd_opts.n, "Number of samples")->required();
  lcd_gen->add_option("--dim", lcd_opts.dim, "Dimension")->required();
  lcd_gen->add_option("--seed", lcd_opts.seed, "Optimizer seed");
  lcd_gen->add_option("--out", lcd_opts.out, "Output path")->required();
  lcd_gen->add_option("--budget", lcd_opts.budget, "Iterations per start");
  lcd_gen->add_option("--starts", lcd_opts.starts, "Multi-start count");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<const char*> argv_expanded;
  argv_expanded.reserve(args.size());
  for (const auto& arg : args) argv_expanded.push_back(arg.c_str());
  CLI11_PARSE(app, static_cast<int>(argv_expanded.size()),
              const_cast<char**>(argv_expanded.data()));

  try {
    if (sweep_eps->parsed()) return run_grid(eps_opts, trmpc::SweepAxis::epsilon);
    if (sweep_samples->parsed())
      return run_grid(samples_opts, trmpc::SweepAxis::samples);
    if (sweep_iters->parsed())
      return run_grid(iters_opts, trmpc::SweepAxis::iterations);
    if (single->parsed()) return run_grid(single_opts, trmpc::SweepAxis::none);
    if (lcd_gen->parsed()) {
      trmpc::LcdOptimizeOptions options;
      options.budget = lcd_opts.budget;
      options.starts = lcd_opts.starts;
      const trmpc::LcdSampleSet set =
          trmpc::optimize_lcd_set(lcd_opts.n, lcd_opts.dim, options, lcd_opts.seed);
      trmpc::save_sample_set(set, lcd_opts.out);
      std::printf("wrote %s (objective %.6e, %d iterations, quality %s)\n",
                  lcd_opts.out.c_str(), set.objective, set.iterations,
                  set.quality_ok ? "ok" : "below bounds");
      return set.quality_ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
