#pragma once

#include <array>
#include <cstdint>

#include "needle/config.hpp"
#include "needle/distribution.hpp"

namespace needle {

// The needle occupies [0,1] x {0} x {0}.
struct SpacePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Field vector in normalized units: total charge 1, multiplicative constant
// dropped.
struct FieldSample {
  SpacePoint point;
  std::array<double, 3> vector{0.0, 0.0, 0.0};
};

// Coulomb sum over the configuration with charge 1/n per point.
FieldSample discrete_field(const ChargeConfiguration& config,
                           const SpacePoint& p);

// Closed-form field of the unit uniform line density on the needle,
// evaluated off the closed segment.
FieldSample uniform_field_offneedle(const SpacePoint& p);

// Principal-value field of the uniform density at a point inside the needle,
// under the fixed orientation "positive = toward increasing x":
// (2x-1) / (x(1-x)). Antisymmetric about x = 1/2.
double pv_field_on_needle(double x);

// Closed form 1/(x-1) - 1/x + 2/eps of the same-sign integral that diverges
// as eps -> 0 (both one-sided contributions taken with the same sign).
double same_sign_divergence_check(double x, double eps);

// Riemann-Stieltjes evaluation of the field against the step function of the
// given CDF; by construction the exact same finite sum as discrete_field on
// the underlying configuration.
FieldSample stieltjes_field(const EmpiricalCdf& cdf, const SpacePoint& p);

// Trigamma function psi_1(x) for x > 0, to relative error ~1e-13: upward
// recurrence to x >= 12, then the asymptotic expansion through x^-11.
double trigamma(double x);

// A finite-sum value and its trigamma closed form, which must agree.
struct RatioPair {
  double finite_sum = 0.0;
  double closed_form = 0.0;
};

// Ratios of the displayed numerator 4^-n to the one-sided force sums on a
// grid of 2^n + 1 equally spaced charges, for the charge at q/2^s:
// q_minus uses the charges strictly to the left, q_plus those to the right.
// Both tend to 0 as n grows.
struct NearestChargeRatios {
  RatioPair q_minus;
  RatioPair q_plus;
};

NearestChargeRatios nearest_charge_ratios(std::uint64_t q, unsigned s,
                                          unsigned n);

// The normalized one-sided force sum (left charges) on the same grid:
// (1/(2^n+1)) * sum over left charges of inverse square distances.
// Grows without bound in n.
RatioPair partial_force_sum(std::uint64_t q, unsigned s, unsigned n);

// Normalized signed sum (left minus right) on the same grid, positive toward
// increasing x; converges to pv_field_on_needle(q/2^s) as n grows.
double net_signed_force_sum(std::uint64_t q, unsigned s, unsigned n);

}  // namespace needle
