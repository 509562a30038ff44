#include "needle/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace needle {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

constexpr double kErrorTolerance = 1e-9;
constexpr double kMinGapShrink = 0.1;

// Interior net forces with pinned endpoints; `full` is the n-vector of
// positions with full[0] = 0 and full[n-1] = 1.
void interior_forces(const std::vector<double>& full, std::vector<double>& out) {
  const std::size_t n = full.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = full[i] - full[j];
      acc += (d > 0.0 ? 1.0 : -1.0) / (d * d);
    }
    out[i - 1] = acc;
  }
}

class NeedleOde {
public:
  NeedleOde(DynamicalSystem system, std::size_t n)
      : system_(system), n_(n), full_(n, 0.0), forces_(n - 2, 0.0) {
    full_.back() = 1.0;
  }

  std::size_t state_size() const {
    return system_ == DynamicalSystem::Newtonian ? 2 * (n_ - 2) : n_ - 2;
  }

  std::size_t interior() const { return n_ - 2; }

  // State layout: interior positions first; Newtonian appends velocities.
  void rhs(const std::vector<double>& state, std::vector<double>& out) {
    const std::size_t m = interior();
    std::copy(state.begin(), state.begin() + m, full_.begin() + 1);
    interior_forces(full_, forces_);
    if (system_ == DynamicalSystem::Newtonian) {
      std::copy(state.begin() + m, state.end(), out.begin());
      std::copy(forces_.begin(), forces_.end(), out.begin() + m);
    } else {
      std::copy(forces_.begin(), forces_.end(), out.begin());
    }
  }

private:
  DynamicalSystem system_;
  std::size_t n_;
  std::vector<double> full_;
  std::vector<double> forces_;
};

bool gaps_acceptable(const std::vector<double>& current,
                     const std::vector<double>& proposed,
                     std::size_t interior) {
  auto gap = [interior](const std::vector<double>& s, std::size_t k) {
    const double left = k == 0 ? 0.0 : s[k - 1];
    const double right = k == interior ? 1.0 : s[k];
    return right - left;
  };
  for (std::size_t k = 0; k <= interior; ++k) {
    if (!(gap(proposed, k) > kMinGapShrink * gap(current, k))) return false;
  }
  return true;
}

class AdaptiveStepper {
public:
  AdaptiveStepper(NeedleOde& ode, std::vector<double> initial_state)
      : ode_(ode),
        y_(std::move(initial_state)),
        size_(y_.size()),
        k1_(size_), k2_(size_), k3_(size_), k4_(size_), k5_(size_),
        k6_(size_), k7_(size_), y_stage_(size_), y_new_(size_) {
    ode_.rhs(y_, k1_);
  }

  const std::vector<double>& state() const { return y_; }
  double time() const { return t_; }

  void advance_to(double t_target) {
    // Slivers below the step-underflow threshold are snapped over, not
    // integrated; they are at worst a few ulps of the target time.
    const double tiny = std::max(4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(1.0, std::abs(t_target)),
                                 4e-14);
    while (t_target - t_ > tiny) {
      step(std::min(h_, t_target - t_));
    }
    t_ = t_target;
  }

private:
  void step(double h_first) {
    double h = h_first;
    const bool clipped = h < h_;
    for (;;) {
      if (!(h > 1e-14)) {
        fail(Errc::OrderingBreached,
             "adaptive step underflow while preserving charge ordering");
      }
      const double err = stages(h);
      if (err <= 1.0 && gaps_acceptable(y_, y_new_, ode_.interior())) {
        t_ += h;
        y_.swap(y_new_);
        k1_.swap(k7_);  // first-same-as-last
        if (!clipped) {
          const double factor =
              err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
          h_ = h * factor;
        }
        return;
      }
      if (err <= 1.0) {
        h *= 0.5;  // ordering safeguard rejected the step
      } else {
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
    }
  }

  // Evaluates one trial step of size h into y_new_; returns the scaled
  // embedded error estimate (acceptable when <= 1).
  double stages(double h) {
    auto comb = [&](std::vector<double>& dst, auto&&... terms) {
      for (std::size_t i = 0; i < size_; ++i) {
        double acc = y_[i];
        ((acc += h * terms.second * (*terms.first)[i]), ...);
        dst[i] = acc;
      }
    };
    using T = std::pair<const std::vector<double>*, double>;
    comb(y_stage_, T{&k1_, kA21});
    ode_.rhs(y_stage_, k2_);
    comb(y_stage_, T{&k1_, kA31}, T{&k2_, kA32});
    ode_.rhs(y_stage_, k3_);
    comb(y_stage_, T{&k1_, kA41}, T{&k2_, kA42}, T{&k3_, kA43});
    ode_.rhs(y_stage_, k4_);
    comb(y_stage_, T{&k1_, kA51}, T{&k2_, kA52}, T{&k3_, kA53}, T{&k4_, kA54});
    ode_.rhs(y_stage_, k5_);
    comb(y_stage_, T{&k1_, kA61}, T{&k2_, kA62}, T{&k3_, kA63}, T{&k4_, kA64},
         T{&k5_, kA65});
    ode_.rhs(y_stage_, k6_);
    comb(y_new_, T{&k1_, kB1}, T{&k3_, kB3}, T{&k4_, kB4}, T{&k5_, kB5},
         T{&k6_, kB6});
    ode_.rhs(y_new_, k7_);
    double err = 0.0;
    for (std::size_t i = 0; i < size_; ++i) {
      const double e = h * (kE1 * k1_[i] + kE3 * k3_[i] + kE4 * k4_[i] +
                            kE5 * k5_[i] + kE6 * k6_[i] + kE7 * k7_[i]);
      const double scale =
          kErrorTolerance *
          (1.0 + std::max(std::abs(y_[i]), std::abs(y_new_[i])));
      const double r = e / scale;
      err += r * r;
    }
    return std::sqrt(err / static_cast<double>(size_));
  }

  NeedleOde& ode_;
  std::vector<double> y_;
  std::size_t size_;
  double t_ = 0.0;
  double h_ = 1e-4;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  std::vector<double> y_stage_, y_new_;
};

ChargeConfiguration state_to_config(const std::vector<double>& state,
                                    std::size_t interior) {
  std::vector<double> p;
  p.reserve(interior + 2);
  p.push_back(0.0);
  p.insert(p.end(), state.begin(), state.begin() + interior);
  p.push_back(1.0);
  return ChargeConfiguration::from_positions(std::move(p));
}

std::vector<double> state_to_velocity(const std::vector<double>& state,
                                      std::size_t interior) {
  std::vector<double> v(interior + 2, 0.0);
  std::copy(state.begin() + interior, state.begin() + 2 * interior,
            v.begin() + 1);
  return v;
}

std::vector<double> sample_times(double horizon, double step) {
  std::vector<double> times;
  const auto count =
      static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
  times.reserve(count + 2);
  for (std::size_t k = 0; k <= count; ++k) {
    times.push_back(static_cast<double>(k) * step);
  }
  times.back() = std::min(times.back(), horizon);
  if (times.back() < horizon - 1e-12 * std::max(1.0, horizon)) {
    times.push_back(horizon);
  }
  return times;
}

}  // namespace

Trajectory simulate(const DynamicsSpec& spec) {
  if (!(spec.sampling_step > 0.0 && spec.horizon >= spec.sampling_step)) {
    fail(Errc::OutOfRange, "need horizon >= sampling_step > 0");
  }
  const std::size_t n = spec.initial_positions.n();
  if (n < 3) fail(Errc::InvalidCount, "simulation needs n >= 3");

  NeedleOde ode(spec.system, n);
  const std::size_t interior = n - 2;
  std::vector<double> state(ode.state_size(), 0.0);
  std::copy(spec.initial_positions.positions().begin() + 1,
            spec.initial_positions.positions().end() - 1, state.begin());

  AdaptiveStepper stepper(ode, std::move(state));

  Trajectory traj;
  const bool with_velocity = spec.system == DynamicalSystem::Newtonian;
  for (double t : sample_times(spec.horizon, spec.sampling_step)) {
    stepper.advance_to(t);
    traj.times.push_back(t);
    traj.states.push_back(state_to_config(stepper.state(), interior));
    if (with_velocity) {
      traj.velocities.push_back(state_to_velocity(stepper.state(), interior));
    }
  }
  return traj;
}

ChargeConfiguration time_average(const Trajectory& traj, double from) {
  if (from < 0.0) fail(Errc::OutOfRange, "from must be nonnegative");
  std::size_t first = 0;
  while (first < traj.times.size() && traj.times[first] < from - 1e-12) {
    ++first;
  }
  if (traj.times.size() - first < 2) {
    fail(Errc::InsufficientSamples,
         "need at least two samples at or after the averaging start");
  }
  const std::size_t n = traj.states.front().n();
  std::vector<double> acc(n, 0.0);
  double span = 0.0;
  for (std::size_t k = first; k + 1 < traj.times.size(); ++k) {
    const double dt = traj.times[k + 1] - traj.times[k];
    span += dt;
    for (std::size_t i = 0; i < n; ++i) {
      acc[i] += 0.5 * dt * (traj.states[k][i] + traj.states[k + 1][i]);
    }
  }
  for (double& a : acc) a /= span;
  acc.front() = 0.0;
  acc.back() = 1.0;
  return ChargeConfiguration::from_positions(std::move(acc));
}

EquilibriumReport flow_to_equilibrium(std::size_t n,
                                      const ChargeConfiguration& start,
                                      double tol, double time_budget) {
  if (n != start.n()) {
    fail(Errc::InvalidCount, "charge count does not match start configuration");
  }
  if (n < 3) fail(Errc::InvalidCount, "flow needs n >= 3");
  if (!(tol > 0.0)) fail(Errc::OutOfRange, "tol must be positive");

  NeedleOde ode(DynamicalSystem::GradientFlow, n);
  std::vector<double> state(start.positions().begin() + 1,
                            start.positions().end() - 1);
  AdaptiveStepper stepper(ode, std::move(state));

  constexpr double kCheckInterval = 0.25;
  std::size_t checks = 0;
  for (;;) {
    ChargeConfiguration c = state_to_config(stepper.state(), n - 2);
    const double residual = max_net_force(c);
    if (residual < tol) {
      return {std::move(c), residual, checks, SolveMethod::GradientFlow, true};
    }
    if (stepper.time() >= time_budget) {
      return {std::move(c), residual, checks, SolveMethod::GradientFlow, false};
    }
    stepper.advance_to(std::min(stepper.time() + kCheckInterval, time_budget));
    ++checks;
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().n();
  std::string out = "t";
  for (std::size_t i = 1; i <= n; ++i) {
    out += ",x" + std::to_string(i);
  }
  if (traj.has_velocities()) {
    for (std::size_t i = 2; i < n; ++i) {
      out += ",v" + std::to_string(i);
    }
  }
  out += '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += format_double(traj.times[k]);
    for (std::size_t i = 0; i < n; ++i) {
      out += ',';
      out += format_double(traj.states[k][i]);
    }
    if (traj.has_velocities()) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        out += ',';
        out += format_double(traj.velocities[k][i]);
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace needle
