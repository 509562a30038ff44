#pragma once

#include <cstddef>
#include <string>

#include "needle/config.hpp"

namespace needle {

enum class SolveMethod { FixedPoint, GradientDescent, GradientFlow, Hybrid };

const char* solve_method_name(SolveMethod method) noexcept;

struct EquilibriumReport {
  ChargeConfiguration configuration;
  double residual = 0.0;  // max over interior charges of |net_force|
  std::size_t iterations = 0;
  SolveMethod method = SolveMethod::Hybrid;
  bool converged = false;
};

// Net force on the given charge (1-based index, valid range 2..n-1):
// sum over left neighbors of 1/(x_i-x_j)^2 minus the same sum over right
// neighbors. Positive values push toward increasing x.
double net_force(const ChargeConfiguration& config, std::size_t charge);

// Max over interior charges of |net_force|.
double max_net_force(const ChargeConfiguration& config);

// Pairwise inverse-distance energy over all charges including the pinned
// endpoints: sum of 1/(a_k - a_j) over j < k.
double energy(const OpenSimplexPoint& point);

// Partial derivatives of the energy with respect to each interior coordinate;
// component k equals minus the net force on charge k+2 (1-based).
std::vector<double> energy_gradient(const OpenSimplexPoint& point);

// One application of the fixed-point map: each interior coordinate moves at
// most a third of the smaller neighbor gap in the direction of its net force,
// damped by exp(-1/F^2); coincident coordinates move a third of the gap on
// their open side. Fixed points are exactly the equilibria.
ClosedSimplexPoint phi_map(const ClosedSimplexPoint& point);

// Iterates phi_map until the max interior displacement drops below tol or
// max_iter is reached. Never throws on non-convergence: the report carries
// the best iterate with converged=false.
EquilibriumReport solve_fixed_point(const ClosedSimplexPoint& start,
                                    std::size_t max_iter, double tol);

// Minimizes the energy over the open simplex by damped Newton descent:
// Newton directions of the strictly convex energy with Armijo backtracking
// that keeps iterates strictly ordered; terminates when the gradient
// max-norm drops below tol. Throws Error(StepUnderflow) if backtracking can
// no longer make representable progress above tol.
EquilibriumReport solve_gradient_descent(const OpenSimplexPoint& start,
                                         double tol);

// Default solver tolerance: 1e-10 up to 64 charges, then 1e-8 * (n/64).
double default_tolerance(std::size_t n);

// Hybrid pipeline from the equispaced start: fixed-point iterations for
// coarse localization, then gradient descent to tol.
EquilibriumReport solve(std::size_t n, double tol);
EquilibriumReport solve(std::size_t n);

// JSON object {n, method, iterations, residual, converged, positions[]}.
std::string report_to_json(const EquilibriumReport& report);

}  // namespace needle
