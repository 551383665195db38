#pragma once

#include "trmpc/ocp.hpp"

namespace trmpc::envs {

/// Truck backer-upper: a kinematic tractor-trailer reversing at fixed
/// speed toward a dock at the origin. State is (trailer x, trailer y,
/// trailer yaw, hitch angle); control is the tractor steering angle.
struct TruckParams {
  double wheelbase = 3.0;     // m, tractor
  double hitch_length = 4.0;  // m, hitch to trailer axle
  double speed = -1.0;        // m/s, negative = reversing
  double steer_bound = 0.5;   // rad
  double dt = 0.05;           // s
};

struct TruckCostWeights {
  double q_pos = 0.2;
  double q_yaw = 1.0;
  double q_hitch = 2.0;
  double r = 0.01;
  double jackknife_limit = 1.2;    // rad, must stay below pi/2
  double jackknife_weight = 500.0;
  double terminal_scale = 25.0;    // weight of the horizon-end state cost
};

Vector truck_step(const TruckParams& p, const Vector& x, const Vector& u,
                  double dt);

/// Quadratic dock cost; exceeding the jackknife limit adds a large penalty
/// instead of terminating so batch rollouts stay fixed-length.
double truck_cost(const TruckParams& p, const TruckCostWeights& w,
                  const Vector& x, const Vector& u);

OcpConfig make_truck_ocp(const TruckParams& p, const TruckCostWeights& w,
                         int horizon);

/// Benchmark start: 20 m from the dock with a 0.3 rad yaw offset, a 4 m
/// lateral offset and the hitch folded near the edge of the recoverable
/// region, so the controller has to commit to sustained near-full-lock
/// steering from the first step.
Vector truck_initial_state();

}  // namespace trmpc::envs
