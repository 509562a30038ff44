#include "needle/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "needle/equilibrium.hpp"

namespace needle {

double EmpiricalCdf::operator()(double x) const noexcept {
  const auto& p = config_.positions();
  const auto it = std::upper_bound(p.begin(), p.end(), x);
  return static_cast<double>(it - p.begin()) / static_cast<double>(p.size());
}

double sup_distance_to_uniform(const EmpiricalCdf& cdf) {
  const auto& p = cdf.configuration().positions();
  const double n = static_cast<double>(p.size());
  // |F - id| is maximal at a jump point (value (i+1)/n - x_i) or at its left
  // limit (value x_i - i/n); between jumps it only shrinks toward the right
  // limit values already covered.
  double best = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double after = (static_cast<double>(i) + 1.0) / n - p[i];
    const double before = p[i] - static_cast<double>(i) / n;
    best = std::max({best, std::abs(after), std::abs(before)});
  }
  return best;
}

DyadicTarget DyadicTarget::make(std::uint64_t q, unsigned s) {
  if (s == 0 || s >= 63) fail(Errc::DomainViolation, "s must be in 1..62");
  if (q % 2 == 0 || q == 0 || q >= (std::uint64_t{1} << s)) {
    fail(Errc::DomainViolation, "q must be odd with 0 < q < 2^s");
  }
  return DyadicTarget{q, s};
}

double DyadicTarget::value() const noexcept {
  return static_cast<double>(q) /
         static_cast<double>(std::uint64_t{1} << s);
}

double dyadic_position(const ChargeConfiguration& config, DyadicTarget target) {
  const std::size_t n = config.n();
  // n must be 2^m + 1.
  const std::size_t pow2 = n - 1;
  if (n < 3 || (pow2 & (pow2 - 1)) != 0) {
    std::ostringstream msg;
    msg << "charge count " << n << " is not 2^m + 1";
    fail(Errc::CountNotDyadic, msg.str());
  }
  unsigned m = 0;
  while ((std::size_t{1} << m) < pow2) ++m;
  if (m < target.s) {
    std::ostringstream msg;
    msg << "need 2^" << target.s << " + 1 or more charges, got " << n;
    fail(Errc::ResolutionTooCoarse, msg.str());
  }
  // 1-based index gamma * 2^m + 1 = q * 2^(m-s) + 1.
  const std::uint64_t index1 = target.q * (std::uint64_t{1} << (m - target.s)) + 1;
  return config[static_cast<std::size_t>(index1 - 1)];
}

GapStats gap_stats(const ChargeConfiguration& config) {
  const auto& p = config.positions();
  GapStats stats;
  stats.gaps.resize(p.size() - 1);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    stats.gaps[i] = p[i + 1] - p[i];
  }
  const auto [lo, hi] = std::minmax_element(stats.gaps.begin(), stats.gaps.end());
  stats.min_gap = *lo;
  stats.max_gap = *hi;
  stats.ratio = stats.max_gap / stats.min_gap;
  return stats;
}

ChargeConfiguration predict_added_charge(const ChargeConfiguration& config) {
  const std::size_t n = config.n();
  if (n < 3) fail(Errc::InvalidCount, "prediction needs n >= 3");
  const double dn = static_cast<double>(n);
  std::vector<double> y(n + 1);
  y.front() = 0.0;
  y.back() = 1.0;
  // 1-based: y_k = ((k-1)/n) x_{k-1} + ((n+1-k)/n) x_k for k = 2..n.
  for (std::size_t k = 2; k <= n; ++k) {
    const double w = static_cast<double>(k - 1) / dn;
    y[k - 1] = w * config[k - 2] + (1.0 - w) * config[k - 1];
  }
  return ChargeConfiguration::from_positions(std::move(y));
}

double second_charge_ratio(std::size_t n) {
  if (n < 5) fail(Errc::InvalidCount, "ratio needs n >= 5");
  const EquilibriumReport small = solve(n);
  const EquilibriumReport large = solve(2 * n - 1);
  return small.configuration[1] / large.configuration[1];
}

}  // namespace needle
