#include "needle/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

namespace needle {

const char* solve_method_name(SolveMethod method) noexcept {
  switch (method) {
    case SolveMethod::FixedPoint: return "FixedPoint";
    case SolveMethod::GradientDescent: return "GradientDescent";
    case SolveMethod::GradientFlow: return "GradientFlow";
    case SolveMethod::Hybrid: return "Hybrid";
  }
  return "Unknown";
}

namespace {

// Neumaier-compensated accumulator. The force terms span several orders of
// magnitude (inverse squares of both tiny end gaps and O(1) spans), and the
// default solver tolerance of 1e-10 sits below the noise of plain summation
// once n reaches a few dozen.
class CompensatedSum {
public:
  void add(double term) {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      comp_ += (sum_ - t) + term;
    } else {
      comp_ += (term - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double net_force_at(const std::vector<double>& x, std::size_t i) {
  CompensatedSum force;
  for (std::size_t j = 0; j < i; ++j) {
    const double d = x[i] - x[j];
    force.add(1.0 / (d * d));
  }
  for (std::size_t j = i + 1; j < x.size(); ++j) {
    const double d = x[j] - x[i];
    force.add(-1.0 / (d * d));
  }
  return force.value();
}

bool strictly_ordered(const std::vector<double>& interior) {
  double prev = 0.0;
  for (double a : interior) {
    if (!(a > prev)) return false;
    prev = a;
  }
  return prev < 1.0;
}

double energy_of_interior(const std::vector<double>& interior) {
  std::vector<double> x;
  x.reserve(interior.size() + 2);
  x.push_back(0.0);
  x.insert(x.end(), interior.begin(), interior.end());
  x.push_back(1.0);
  CompensatedSum s;
  for (std::size_t k = 1; k < x.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      s.add(1.0 / (x[k] - x[j]));
    }
  }
  return s.value();
}

std::vector<double> gradient_of_interior(const std::vector<double>& interior) {
  std::vector<double> x;
  x.reserve(interior.size() + 2);
  x.push_back(0.0);
  x.insert(x.end(), interior.begin(), interior.end());
  x.push_back(1.0);
  std::vector<double> g(interior.size());
  for (std::size_t k = 1; k + 1 < x.size(); ++k) {
    g[k - 1] = -net_force_at(x, k);
  }
  return g;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

EquilibriumReport make_report(std::vector<double> interior, SolveMethod method,
                              std::size_t iterations, bool converged) {
  auto config = config_from_interior(
      OpenSimplexPoint::from_interior(std::move(interior)));
  const double residual = max_net_force(config);
  return {std::move(config), residual, iterations, method, converged};
}

}  // namespace

double net_force(const ChargeConfiguration& config, std::size_t charge) {
  if (charge < 2 || charge >= config.n()) {
    std::ostringstream msg;
    msg << "charge index " << charge << " not interior for n = " << config.n();
    fail(Errc::IndexOutOfRange, msg.str());
  }
  return net_force_at(config.positions(), charge - 1);
}

double max_net_force(const ChargeConfiguration& config) {
  const auto& x = config.positions();
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    m = std::max(m, std::abs(net_force_at(x, i)));
  }
  return m;
}

double energy(const OpenSimplexPoint& point) {
  return energy_of_interior(point.interior());
}

std::vector<double> energy_gradient(const OpenSimplexPoint& point) {
  return gradient_of_interior(point.interior());
}

ClosedSimplexPoint phi_map(const ClosedSimplexPoint& point) {
  const auto& x = point.coords();
  const std::size_t n = x.size();
  std::vector<double> y(x);
  y.front() = 0.0;
  y.back() = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double xl = x[i - 1];
    const double xi = x[i];
    const double xr = x[i + 1];
    if (xl == xi && xi == xr) {
      y[i] = xi;
    } else if (xl == xi) {
      y[i] = xi + (xr - xi) / 3.0;
    } else if (xi == xr) {
      y[i] = xi - (xi - xl) / 3.0;
    } else {
      // Both neighbor gaps are open, so every distance below is nonzero:
      // a tie with a non-neighbor would force a tie with a neighbor in a
      // nondecreasing list.
      double force = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = x[i] - x[j];
        force += (j < i ? 1.0 : -1.0) / (d * d);
      }
      if (force == 0.0) {
        y[i] = xi;
      } else {
        const double gap = std::min(xi - xl, xr - xi);
        const double sign = force > 0.0 ? 1.0 : -1.0;
        y[i] = xi + (gap / 3.0) * sign * std::exp(-1.0 / (force * force));
      }
    }
  }
  return ClosedSimplexPoint::from_coords(std::move(y));
}

EquilibriumReport solve_fixed_point(const ClosedSimplexPoint& start,
                                    std::size_t max_iter, double tol) {
  if (!(tol > 0.0)) fail(Errc::OutOfRange, "tol must be positive");
  ClosedSimplexPoint current = start;
  std::size_t iterations = 0;
  bool converged = false;
  while (iterations < max_iter) {
    ClosedSimplexPoint next = phi_map(current);
    double disp = 0.0;
    for (std::size_t i = 0; i < current.n(); ++i) {
      disp = std::max(disp, std::abs(next.coords()[i] - current.coords()[i]));
    }
    current = std::move(next);
    ++iterations;
    if (disp < tol) {
      converged = true;
      break;
    }
  }
  // The iterate may still sit on a degenerate boundary if the budget ran out.
  const auto& c = current.coords();
  std::vector<double> interior(c.begin() + 1, c.end() - 1);
  if (!strictly_ordered(interior)) {
    fail(Errc::NotConverged,
         "fixed-point iterate is degenerate after iteration budget");
  }
  return make_report(std::move(interior), SolveMethod::FixedPoint, iterations,
                     converged);
}

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr std::size_t kMaxDescentIterations = 1000;
constexpr std::size_t kMaxBacktracks = 60;

// Dense symmetric positive-definite solve via Cholesky, in place. Returns
// false if a pivot fails to be positive.
bool spd_solve(std::vector<double>& h, std::vector<double>& rhs,
               std::size_t m) {
  for (std::size_t k = 0; k < m; ++k) {
    double pivot = h[k * m + k];
    for (std::size_t j = 0; j < k; ++j) {
      pivot -= h[k * m + j] * h[k * m + j];
    }
    if (!(pivot > 0.0)) return false;
    const double root = std::sqrt(pivot);
    h[k * m + k] = root;
    for (std::size_t i = k + 1; i < m; ++i) {
      double v = h[i * m + k];
      for (std::size_t j = 0; j < k; ++j) {
        v -= h[i * m + j] * h[k * m + j];
      }
      h[i * m + k] = v / root;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double v = rhs[i];
    for (std::size_t j = 0; j < i; ++j) v -= h[i * m + j] * rhs[j];
    rhs[i] = v / h[i * m + i];
  }
  for (std::size_t ii = m; ii-- > 0;) {
    double v = rhs[ii];
    for (std::size_t j = ii + 1; j < m; ++j) v -= h[j * m + ii] * rhs[j];
    rhs[ii] = v / h[ii * m + ii];
  }
  return true;
}

// Hessian of the energy in the interior coordinates: diagonal entries sum
// 2/d^3 over every other charge including the pinned endpoints, off-diagonal
// entries are -2/d^3 for interior pairs.
std::vector<double> hessian_of_interior(const std::vector<double>& interior) {
  const std::size_t m = interior.size();
  std::vector<double> x;
  x.reserve(m + 2);
  x.push_back(0.0);
  x.insert(x.end(), interior.begin(), interior.end());
  x.push_back(1.0);
  std::vector<double> h(m * m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double diag = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j == k + 1) continue;
      const double d = std::abs(x[k + 1] - x[j]);
      const double cube = 2.0 / (d * d * d);
      diag += cube;
      if (j >= 1 && j + 1 < x.size()) {
        h[k * m + (j - 1)] = -cube;
      }
    }
    h[k * m + k] = diag;
  }
  return h;
}

}  // namespace

EquilibriumReport solve_gradient_descent(const OpenSimplexPoint& start,
                                         double tol) {
  if (!(tol > 0.0)) fail(Errc::OutOfRange, "tol must be positive");
  std::vector<double> a = start.interior();
  if (a.empty()) {
    return make_report(std::move(a), SolveMethod::GradientDescent, 0, true);
  }

  std::vector<double> g = gradient_of_interior(a);
  double f = energy_of_interior(a);
  std::vector<double> candidate(a.size());

  // Stall watch: near the representation floor the iterates hop among
  // neighboring ulp-scale points whose gradients no longer shrink.  Newton
  // steps normally cut the gradient by orders of magnitude per iteration,
  // so many iterations without relative improvement mean the floor.
  double best_gmax = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  constexpr std::size_t kStallPatience = 50;

  for (std::size_t it = 0; it < kMaxDescentIterations; ++it) {
    const double gmax = max_abs(g);
    if (gmax < tol) {
      return make_report(std::move(a), SolveMethod::GradientDescent, it, true);
    }
    if (gmax < best_gmax * (1.0 - 1e-6)) {
      best_gmax = gmax;
      stalled = 0;
    } else if (++stalled >= kStallPatience) {
      fail(Errc::StepUnderflow,
           "no representable progress below the requested tolerance");
    }

    // Descent direction: the Newton step of the strictly convex energy,
    // falling back to the raw gradient if the factorization ever balks.
    // Line-search descent along the bare gradient stalls near the minimum:
    // the ordering-preserving curvature 2/d^3 of the tight end gaps
    // amplifies coordinate roundoff until the gradient cannot shrink any
    // further along that single direction.
    std::vector<double> direction = g;
    std::vector<double> h = hessian_of_interior(a);
    if (!spd_solve(h, direction, a.size())) {
      direction = g;
    }

    double slope = 0.0;  // directional derivative g . direction
    for (std::size_t k = 0; k < a.size(); ++k) {
      slope += g[k] * direction[k];
    }
    if (!(slope > 0.0)) {
      direction = g;
      slope = 0.0;
      for (double v : g) slope += v * v;
    }

    double t = 1.0;
    bool accepted = false;
    double f_candidate = 0.0;
    for (std::size_t back = 0; back < kMaxBacktracks; ++back) {
      for (std::size_t k = 0; k < a.size(); ++k) {
        candidate[k] = a[k] - t * direction[k];
      }
      if (strictly_ordered(candidate)) {
        f_candidate = energy_of_interior(candidate);
        // The additive slack keeps roundoff in the energy sum from rejecting
        // genuine descent steps near the minimum.
        if (f_candidate <=
            f - kArmijoSlope * t * slope + 16.0 * std::numeric_limits<double>::epsilon() * std::abs(f)) {
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      fail(Errc::StepUnderflow,
           "backtracking exhausted before reaching tolerance");
    }
    if (candidate == a) {
      // The accepted step rounded away entirely: the iterate is the best
      // point double precision can represent, yet its gradient still
      // exceeds tol.
      fail(Errc::StepUnderflow,
           "no representable progress below the requested tolerance");
    }
    a.swap(candidate);
    f = f_candidate;
    g = gradient_of_interior(a);
  }
  fail(Errc::NotConverged, "gradient descent iteration budget exhausted");
}

double default_tolerance(std::size_t n) {
  return n <= 64 ? 1e-10 : 1e-8 * (static_cast<double>(n) / 64.0);
}

namespace {

constexpr std::size_t kPhiIterationCap = 500;
constexpr double kPhiCoarseTolerance = 1e-3;

}  // namespace

EquilibriumReport solve(std::size_t n, double tol) {
  if (n < 3) fail(Errc::InvalidCount, "solve needs n >= 3");
  if (!(tol > 0.0)) fail(Errc::OutOfRange, "tol must be positive");
  const ChargeConfiguration start = equispaced(n);
  EquilibriumReport coarse = solve_fixed_point(
      ClosedSimplexPoint::from_coords(start.positions()), kPhiIterationCap,
      kPhiCoarseTolerance);
  try {
    EquilibriumReport fine =
        solve_gradient_descent(interior_of(coarse.configuration), tol);
    fine.method = SolveMethod::Hybrid;
    fine.iterations += coarse.iterations;
    return fine;
  } catch (const Error& e) {
    if (e.code() == Errc::StepUnderflow) {
      fail(Errc::NotConverged,
           "descent stage stalled at the double-precision floor before "
           "reaching tolerance " +
               format_double(tol));
    }
    throw;
  }
}

EquilibriumReport solve(std::size_t n) { return solve(n, default_tolerance(n)); }

std::string report_to_json(const EquilibriumReport& report) {
  std::string out = "{\"n\":";
  out += std::to_string(report.configuration.n());
  out += ",\"method\":\"";
  out += solve_method_name(report.method);
  out += "\",\"iterations\":";
  out += std::to_string(report.iterations);
  out += ",\"residual\":";
  out += format_double(report.residual);
  out += ",\"converged\":";
  out += report.converged ? "true" : "false";
  out += ",\"positions\":";
  out += to_json_array(report.configuration);
  out += "}";
  return out;
}

}  // namespace needle
