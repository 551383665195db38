#pragma once

#include "trmpc/ocp.hpp"

namespace trmpc::envs {

/// Cart-pole swing-up. State is (cart position, cart velocity, pole angle,
/// angular velocity) with angle zero upright; control is the horizontal
/// force on the cart.
struct CartPoleParams {
  double cart_mass = 1.0;    // kg
  double pole_mass = 0.1;    // kg
  double half_length = 0.5;  // m, pivot to pole center of mass
  double gravity = 9.81;     // m/s^2
  double force_bound = 10.0; // N
  double dt = 0.02;          // s
};

struct CartPoleCostWeights {
  double q_theta = 10.0;
  double q_x = 1.0;
  double q_xdot = 0.1;
  double q_thetadot = 0.1;
  double r = 0.01;
  double terminal_scale = 25.0;  // weight of the horizon-end state cost
};

/// One RK4 step of the frictionless cart-pole equations of motion with the
/// force held constant over dt.
Vector cartpole_step(const CartPoleParams& p, const Vector& x, const Vector& u,
                     double dt);

double cartpole_cost(const CartPoleParams& p, const CartPoleCostWeights& w,
                     const Vector& x, const Vector& u);

/// Swing-up OCP: quadratic-style stage cost, terminal cost equals the stage
/// cost at zero input.
OcpConfig make_cartpole_ocp(const CartPoleParams& p, const CartPoleCostWeights& w,
                            int horizon);

/// Hanging start state used by the benchmark.
Vector cartpole_initial_state();

}  // namespace trmpc::envs
