#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "needle/config.hpp"
#include "needle/equilibrium.hpp"

namespace needle {

enum class DynamicalSystem { Newtonian, GradientFlow };

// Newtonian: interior charges obey x_i'' = net force, starting at rest.
// GradientFlow: interior charges obey x_i' = net force.
// Endpoints stay pinned at 0 and 1 in both systems.
struct DynamicsSpec {
  DynamicalSystem system = DynamicalSystem::Newtonian;
  ChargeConfiguration initial_positions;
  double horizon = 0.0;
  double sampling_step = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ChargeConfiguration> states;
  // Newtonian only (empty otherwise): one velocity vector per sample, full
  // length n with the endpoint components exactly 0.
  std::vector<std::vector<double>> velocities;

  bool has_velocities() const noexcept { return !velocities.empty(); }
};

// Integrates the chosen system over [0, horizon] with adaptive embedded
// Runge-Kutta stepping and returns states on the fixed sampling grid
// (multiples of sampling_step, plus the horizon). Any proposed step that
// would shrink a neighbor gap below 10% of its current value is halved and
// retried; throws Error(OrderingBreached) if that halving underflows.
Trajectory simulate(const DynamicsSpec& spec);

// Componentwise trapezoidal average of the sampled positions with times in
// [from, horizon]. Requires at least two such samples.
ChargeConfiguration time_average(const Trajectory& traj, double from);

// Integrates the first-order system until the net-force max-norm drops below
// tol, checking at sampling intervals, up to the given time budget. The
// report carries converged=false if the budget runs out first.
EquilibriumReport flow_to_equilibrium(std::size_t n,
                                      const ChargeConfiguration& start,
                                      double tol, double time_budget = 50.0);

// CSV with header t,x1,...,xn (plus v2,...,v{n-1} when velocities exist).
std::string trajectory_csv(const Trajectory& traj);

}  // namespace needle
