#pragma once

#include <functional>

#include "trmpc/types.hpp"

namespace trmpc {

using DynamicsFn = std::function<Vector(const Vector&, const Vector&)>;
using StageCostFn = std::function<double(const Vector&, const Vector&)>;
using TerminalCostFn = std::function<double(const Vector&)>;

/// Finite-horizon optimal control problem over stacked control sequences.
/// The dynamics and cost handles must be pure; rollouts call them from
/// multiple threads.
struct OcpConfig {
  int horizon = 0;      // prediction steps, >= 1
  int control_dim = 0;  // d_u
  int state_dim = 0;    // d_x
  Vector control_lower;
  Vector control_upper;
  DynamicsFn dynamics;        // (x, u) -> x'
  StageCostFn stage_cost;     // (x, u) -> real
  TerminalCostFn terminal_cost;  // (x) -> real
  double dt = 0.0;

  Index seq_dim() const {
    return static_cast<Index>(horizon) * control_dim;
  }

  void validate() const;
};

/// Stacked control sequences store step k's controls at
/// [k * d_u, (k + 1) * d_u); these helpers give the (step, channel) view.
inline double seq_at(const Vector& v, int control_dim, int step, int channel) {
  return v[static_cast<Index>(step) * control_dim + channel];
}

inline auto seq_step(const Vector& v, int control_dim, int step) {
  return v.segment(static_cast<Index>(step) * control_dim, control_dim);
}

}  // namespace trmpc
