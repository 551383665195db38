#include "trmpc/envs/cartpole.hpp"

#include <cmath>

namespace trmpc::envs {

namespace {

// Solves the 2x2 mass matrix system for (xdd, thdd).
Eigen::Vector4d derivative(const CartPoleParams& p, const Eigen::Vector4d& x,
                           double force) {
  const double theta = x[2];
  const double xdot = x[1];
  const double thdot = x[3];
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double m = p.pole_mass;
  const double l = p.half_length;

  const double a11 = p.cart_mass + m;
  const double a12 = m * l * c;
  const double a22 = (4.0 / 3.0) * m * l * l;
  const double b1 = force + m * l * thdot * thdot * s;
  const double b2 = m * p.gravity * l * s;
  const double det = a11 * a22 - a12 * a12;

  Eigen::Vector4d dx;
  dx[0] = xdot;
  dx[1] = (b1 * a22 - a12 * b2) / det;
  dx[2] = thdot;
  dx[3] = (a11 * b2 - a12 * b1) / det;
  return dx;
}

}  // namespace

Vector cartpole_step(const CartPoleParams& p, const Vector& x, const Vector& u,
                     double dt) {
  const Eigen::Vector4d s = x.head<4>();
  const double f = u[0];
  const Eigen::Vector4d k1 = derivative(p, s, f);
  const Eigen::Vector4d k2 = derivative(p, s + 0.5 * dt * k1, f);
  const Eigen::Vector4d k3 = derivative(p, s + 0.5 * dt * k2, f);
  const Eigen::Vector4d k4 = derivative(p, s + dt * k3, f);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double cartpole_cost(const CartPoleParams&, const CartPoleCostWeights& w,
                     const Vector& x, const Vector& u) {
  return w.q_theta * (1.0 - std::cos(x[2])) + w.q_x * x[0] * x[0] +
         w.q_xdot * x[1] * x[1] + w.q_thetadot * x[3] * x[3] +
         w.r * u[0] * u[0];
}

OcpConfig make_cartpole_ocp(const CartPoleParams& p, const CartPoleCostWeights& w,
                            int horizon) {
  OcpConfig ocp;
  ocp.horizon = horizon;
  ocp.control_dim = 1;
  ocp.state_dim = 4;
  ocp.control_lower = Vector::Constant(1, -p.force_bound);
  ocp.control_upper = Vector::Constant(1, p.force_bound);
  ocp.dt = p.dt;
  ocp.dynamics = [p](const Vector& x, const Vector& u) {
    return cartpole_step(p, x, u, p.dt);
  };
  ocp.stage_cost = [p, w](const Vector& x, const Vector& u) {
    return cartpole_cost(p, w, x, u);
  };
  ocp.terminal_cost = [p, w](const Vector& x) {
    return w.terminal_scale * cartpole_cost(p, w, x, Vector::Zero(1));
  };
  return ocp;
}

Vector cartpole_initial_state() {
  Vector x0 = Vector::Zero(4);
  x0[2] = M_PI;  // hanging
  return x0;
}

}  // namespace trmpc::envs
