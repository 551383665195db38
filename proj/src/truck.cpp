#include "trmpc/envs/truck.hpp"

#include <cmath>

namespace trmpc::envs {

namespace {

Eigen::Vector4d derivative(const TruckParams& p, const Eigen::Vector4d& x,
                           double steer) {
  const double yaw = x[2];
  const double hitch = x[3];
  const double v = p.speed;
  Eigen::Vector4d dx;
  dx[0] = v * std::cos(hitch) * std::cos(yaw);
  dx[1] = v * std::cos(hitch) * std::sin(yaw);
  dx[2] = v / p.hitch_length * std::sin(hitch);
  dx[3] = v / p.wheelbase * std::tan(steer) - dx[2];
  return dx;
}

}  // namespace

Vector truck_step(const TruckParams& p, const Vector& x, const Vector& u,
                  double dt) {
  const Eigen::Vector4d s = x.head<4>();
  const double steer = u[0];
  const Eigen::Vector4d k1 = derivative(p, s, steer);
  const Eigen::Vector4d k2 = derivative(p, s + 0.5 * dt * k1, steer);
  const Eigen::Vector4d k3 = derivative(p, s + 0.5 * dt * k2, steer);
  const Eigen::Vector4d k4 = derivative(p, s + dt * k3, steer);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double truck_cost(const TruckParams&, const TruckCostWeights& w,
                  const Vector& x, const Vector& u) {
  double cost = w.q_pos * (x[0] * x[0] + x[1] * x[1]) + w.q_yaw * x[2] * x[2] +
                w.q_hitch * x[3] * x[3] + w.r * u[0] * u[0];
  const double over = std::abs(x[3]) - w.jackknife_limit;
  if (over > 0.0) cost += w.jackknife_weight * over * over;
  return cost;
}

OcpConfig make_truck_ocp(const TruckParams& p, const TruckCostWeights& w,
                         int horizon) {
  OcpConfig ocp;
  ocp.horizon = horizon;
  ocp.control_dim = 1;
  ocp.state_dim = 4;
  ocp.control_lower = Vector::Constant(1, -p.steer_bound);
  ocp.control_upper = Vector::Constant(1, p.steer_bound);
  ocp.dt = p.dt;
  ocp.dynamics = [p](const Vector& x, const Vector& u) {
    return truck_step(p, x, u, p.dt);
  };
  ocp.stage_cost = [p, w](const Vector& x, const Vector& u) {
    return truck_cost(p, w, x, u);
  };
  ocp.terminal_cost = [p, w](const Vector& x) {
    return w.terminal_scale * truck_cost(p, w, x, Vector::Zero(1));
  };
  return ocp;
}

Vector truck_initial_state() {
  Vector x0(4);
  x0[0] = std::sqrt(20.0 * 20.0 - 4.0 * 4.0);  // 20 m from the dock
  x0[1] = 4.0;
  x0[2] = 0.3;
  x0[3] = 0.4;
  return x0;
}

}  // namespace trmpc::envs
