#include "needle/field.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace needle {

namespace {

bool on_closed_needle(const SpacePoint& p) {
  return p.y == 0.0 && p.z == 0.0 && p.x >= 0.0 && p.x <= 1.0;
}

// Shared accumulation for the discrete and Riemann-Stieltjes forms: the sum
// of (p - X_i)/|p - X_i|^3 over charge locations, each with weight 1/count.
std::array<double, 3> charge_sum(std::span<const double> charges,
                                 const SpacePoint& p) {
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  for (double xi : charges) {
    const double dx = p.x - xi;
    const double dy = p.y;
    const double dz = p.z;
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0) fail(Errc::PointOnCharge, "observation point on a charge");
    const double inv = 1.0 / (r2 * std::sqrt(r2));
    acc[0] += dx * inv;
    acc[1] += dy * inv;
    acc[2] += dz * inv;
  }
  const double w = 1.0 / static_cast<double>(charges.size());
  for (double& c : acc) c *= w;
  return acc;
}

}  // namespace

FieldSample discrete_field(const ChargeConfiguration& config,
                           const SpacePoint& p) {
  return {p, charge_sum(config.positions(), p)};
}

FieldSample stieltjes_field(const EmpiricalCdf& cdf, const SpacePoint& p) {
  if (on_closed_needle(p)) {
    fail(Errc::PointOnNeedle, "observation point on the needle");
  }
  // Integrating against the step function F_n picks up one atom of mass 1/n
  // per jump: the exact same finite sum as the discrete field.
  return {p, charge_sum(cdf.configuration().positions(), p)};
}

FieldSample uniform_field_offneedle(const SpacePoint& p) {
  if (on_closed_needle(p)) {
    fail(Errc::PointOnNeedle, "observation point on the needle");
  }
  const double rho = std::hypot(p.y, p.z);
  const double r0 = std::hypot(p.x, rho);
  const double r1 = std::hypot(p.x - 1.0, rho);
  const double ex = 1.0 / r1 - 1.0 / r0;
  FieldSample out{p, {ex, 0.0, 0.0}};
  if (rho > 0.0) {
    const double erho = (p.x / r0 - (p.x - 1.0) / r1) / rho;
    out.vector[1] = erho * (p.y / rho);
    out.vector[2] = erho * (p.z / rho);
  }
  return out;
}

double pv_field_on_needle(double x) {
  if (x == 0.0 || x == 1.0) {
    fail(Errc::Endpoint, "field is unbounded at the needle endpoints");
  }
  if (!(x > 0.0 && x < 1.0)) {
    fail(Errc::OutOfRange, "point not inside the needle");
  }
  return (2.0 * x - 1.0) / (x * (1.0 - x));
}

double same_sign_divergence_check(double x, double eps) {
  if (!(eps > 0.0 && x - eps > 0.0 && x + eps < 1.0)) {
    fail(Errc::DomainViolation, "need 0 < x-eps and x+eps < 1 with eps > 0");
  }
  return 1.0 / (x - 1.0) - 1.0 / x + 2.0 / eps;
}

double trigamma(double x) {
  if (!(x > 0.0)) {
    fail(Errc::NonpositiveArgument, "trigamma requires x > 0");
  }
  double acc = 0.0;
  while (x < 12.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  // psi_1(x) ~ 1/x + 1/(2x^2) + sum_k B_{2k} x^(-2k-1), truncated after
  // B_10; the first omitted term is below 1e-13 relative for x >= 12.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double bern =
      1.0 / 6 +
      inv2 * (-1.0 / 30 +
              inv2 * (1.0 / 42 + inv2 * (-1.0 / 30 + inv2 * (5.0 / 66))));
  return acc + inv + 0.5 * inv2 + inv * inv2 * bern;
}

namespace {

struct DyadicGrid {
  std::uint64_t m;      // index of the target charge, 0-based
  std::uint64_t count;  // 2^n
  double u;             // q / 2^s
  double spacing;       // 1 / 2^n
};

DyadicGrid dyadic_grid(std::uint64_t q, unsigned s, unsigned n) {
  if (s == 0 || q == 0 || q >= (std::uint64_t{1} << s)) {
    fail(Errc::DomainViolation, "need 0 < q < 2^s");
  }
  if (n < s + 1 || n > 30) {
    fail(Errc::DomainViolation, "need s+1 <= n <= 30");
  }
  DyadicGrid g;
  g.m = q << (n - s);
  g.count = std::uint64_t{1} << n;
  g.spacing = 1.0 / static_cast<double>(g.count);
  g.u = static_cast<double>(q) / static_cast<double>(std::uint64_t{1} << s);
  return g;
}

// Sum of 1/((k/2^n) - u)^2 over k = 0..m-1, accumulated smallest terms
// first (the far charges).
double left_sum(const DyadicGrid& g) {
  double acc = 0.0;
  for (std::uint64_t k = 0; k < g.m; ++k) {
    const double d = static_cast<double>(k) * g.spacing - g.u;
    acc += 1.0 / (d * d);
  }
  return acc;
}

// Same over k = m+1..2^n.
double right_sum(const DyadicGrid& g) {
  double acc = 0.0;
  for (std::uint64_t k = g.count; k > g.m; --k) {
    const double d = static_cast<double>(k) * g.spacing - g.u;
    acc += 1.0 / (d * d);
  }
  return acc;
}

constexpr double kPiSquared = std::numbers::pi * std::numbers::pi;

// 6 * sum_{j=1..terms} 1/j^2, via psi_1(terms + 1) = pi^2/6 - sum.
double six_basel_partial(std::uint64_t terms) {
  return kPiSquared - 6.0 * trigamma(static_cast<double>(terms) + 1.0);
}

}  // namespace

NearestChargeRatios nearest_charge_ratios(std::uint64_t q, unsigned s,
                                          unsigned n) {
  const DyadicGrid g = dyadic_grid(q, s, n);
  const double four_n = std::pow(4.0, static_cast<double>(n));
  const double numerator = 1.0 / four_n;

  NearestChargeRatios out;
  out.q_minus.finite_sum = numerator / left_sum(g);
  out.q_plus.finite_sum = numerator / right_sum(g);
  // Closed forms 3 * 2^(1-4n) / (pi^2 - 6 psi_1(1 + terms)) with
  // terms = m on the left and 2^n - m on the right.
  const double scale = 3.0 * std::pow(2.0, 1.0 - 4.0 * static_cast<double>(n));
  out.q_minus.closed_form = scale / six_basel_partial(g.m);
  out.q_plus.closed_form = scale / six_basel_partial(g.count - g.m);
  return out;
}

RatioPair partial_force_sum(std::uint64_t q, unsigned s, unsigned n) {
  const DyadicGrid g = dyadic_grid(q, s, n);
  const double norm = 1.0 / static_cast<double>(g.count + 1);
  RatioPair out;
  out.finite_sum = norm * left_sum(g);
  out.closed_form = std::pow(2.0, 2.0 * static_cast<double>(n) - 1.0) *
                    six_basel_partial(g.m) /
                    (3.0 * static_cast<double>(g.count + 1));
  return out;
}

double net_signed_force_sum(std::uint64_t q, unsigned s, unsigned n) {
  const DyadicGrid g = dyadic_grid(q, s, n);
  return (left_sum(g) - right_sum(g)) / static_cast<double>(g.count + 1);
}

}  // namespace needle
