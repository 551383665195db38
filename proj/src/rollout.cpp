#include "trmpc/rollout.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace trmpc {

void OcpConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("OcpConfig: horizon must be >= 1");
  if (control_dim < 1 || state_dim < 1)
    throw std::invalid_argument("OcpConfig: dimensions must be positive");
  if (control_lower.size() != control_dim || control_upper.size() != control_dim)
    throw std::invalid_argument("OcpConfig: bound size mismatch");
  if (!((control_lower.array() < control_upper.array()).all()))
    throw std::invalid_argument("OcpConfig: control_lower must be < control_upper");
  if (!(dt > 0.0)) throw std::invalid_argument("OcpConfig: dt must be positive");
  if (!dynamics || !stage_cost || !terminal_cost)
    throw std::invalid_argument("OcpConfig: missing handle");
}

namespace {

double rollout_row(const OcpConfig& ocp, const Vector& x0,
                   const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Vector x = x0;
  double cost = 0.0;
  Vector u(ocp.control_dim);
  for (int n = 0; n < ocp.horizon; ++n) {
    u = row.segment(static_cast<Index>(n) * ocp.control_dim, ocp.control_dim).transpose();
    cost += ocp.stage_cost(x, u);
    x = ocp.dynamics(x, u);
    if (!x.allFinite() || !std::isfinite(cost))
      return std::numeric_limits<double>::infinity();
  }
  cost += ocp.terminal_cost(x);
  return std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
}

}  // namespace

RolloutResult rollout_batch(const OcpConfig& ocp, const Vector& x0,
                            const Matrix& samples, int threads) {
  ocp.validate();
  if (samples.cols() != ocp.seq_dim())
    throw std::invalid_argument("rollout_batch: sample dimension mismatch");
  if (!x0.allFinite() || x0.size() != ocp.state_dim)
    throw std::invalid_argument("rollout_batch: invalid initial state");

  const Index n = samples.rows();
  RolloutResult result;
  result.costs.resize(n);
  std::atomic<int> failures{0};

  auto run_range = [&](Index begin, Index end) {
    int local_failures = 0;
    for (Index i = begin; i < end; ++i) {
      const double c = rollout_row(ocp, x0, samples.row(i));
      result.costs[i] = c;
      if (!std::isfinite(c)) ++local_failures;
    }
    failures += local_failures;
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    run_range(0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const Index chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const Index begin = w * chunk;
      const Index end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  result.failures = failures.load();
  return result;
}

}  // namespace trmpc
