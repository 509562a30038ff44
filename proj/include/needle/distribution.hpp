#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "needle/config.hpp"

namespace needle {

// Empirical distribution function of a configuration: a right-continuous
// step function jumping by 1/n at each charge position.
class EmpiricalCdf {
public:
  explicit EmpiricalCdf(ChargeConfiguration config)
      : config_(std::move(config)) {}

  const ChargeConfiguration& configuration() const noexcept { return config_; }

  // Fraction of charges at positions <= x.
  double operator()(double x) const noexcept;

private:
  ChargeConfiguration config_;
};

inline double cdf_eval(const EmpiricalCdf& cdf, double x) noexcept {
  return cdf(x);
}

// sup over [0,1] of |F(x) - x|, evaluated exactly at the jump points and
// their left limits (where the supremum is attained).
double sup_distance_to_uniform(const EmpiricalCdf& cdf);

// A dyadic fraction q/2^s in (0,1) with q odd.
struct DyadicTarget {
  std::uint64_t q = 1;
  unsigned s = 1;

  static DyadicTarget make(std::uint64_t q, unsigned s);
  double value() const noexcept;
};

// For a configuration of 2^m + 1 charges, the position of the charge with a
// fraction gamma = q/2^s of the other charges strictly to its left: 1-based
// index gamma * 2^m + 1, computed in exact integer arithmetic.
double dyadic_position(const ChargeConfiguration& config, DyadicTarget target);

struct GapStats {
  double max_gap = 0.0;
  double min_gap = 0.0;
  double ratio = 0.0;  // max_gap / min_gap
  std::vector<double> gaps;
};

GapStats gap_stats(const ChargeConfiguration& config);

// First-order prediction of the (n+1)-charge equilibrium from an n-charge
// equilibrium: y_1 = 0, y_{n+1} = 1, and
// y_k = ((k-1)/n) x_{k-1} + ((n+1-k)/n) x_k for k = 2..n (1-based).
ChargeConfiguration predict_added_charge(const ChargeConfiguration& config);

// X_{n,2} / X_{2n-1,2} from freshly solved equilibria at default tolerances.
double second_charge_ratio(std::size_t n);

}  // namespace needle
