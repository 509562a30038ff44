// Command-line driver: equilibrium solves, trajectory simulation, table
// generation, and field maps, each run writing its data files plus a JSON
// manifest describing the run.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "needle/config.hpp"
#include "needle/distribution.hpp"
#include "needle/dynamics.hpp"
#include "needle/equilibrium.hpp"
#include "needle/field.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Exit codes: 0 success, 2 validation error, 3 convergence failure,
// 4 I/O error.
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

class CliFailure : public std::runtime_error {
public:
  CliFailure(int exit_code, std::string kind, const std::string& message)
      : std::runtime_error(message), exit_code(exit_code), kind(std::move(kind)) {}
  int exit_code;
  std::string kind;
};

int exit_code_for(needle::Errc code) {
  switch (code) {
    case needle::Errc::NotConverged:
    case needle::Errc::StepUnderflow:
    case needle::Errc::OrderingBreached:
      return kExitConvergence;
    case needle::Errc::IoFailure:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

fs::path output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("NEEDLE_OUT_DIR"); env && *env) return env;
  return ".";
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
      throw CliFailure(kExitIo, "IoFailure",
                       "cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    throw CliFailure(kExitIo, "IoFailure",
                     "cannot move " + tmp.string() + " to " + path.string());
  }
}

class ManifestWriter {
public:
  ManifestWriter(std::string command, fs::path dir)
      : command_(std::move(command)),
        dir_(std::move(dir)),
        start_(std::chrono::steady_clock::now()) {}

  void param(const std::string& key, const json& value) {
    parameters_[key] = value;
  }

  void wrote(const fs::path& path, const std::string& content) {
    write_file_atomic(path, content);
    output_paths_.push_back(path.string());
  }

  void warning_count(const std::string& key, std::size_t count) {
    warnings_[key] = count;
  }

  fs::path dir() const { return dir_; }

  fs::path finish() {
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start_;
    json manifest;
    manifest["command"] = command_;
    manifest["parameters"] = parameters_;
    manifest["output_paths"] = output_paths_;
    manifest["tool_version"] = kToolVersion;
    manifest["wall_time_seconds"] = elapsed.count();
    if (!warnings_.empty()) manifest["warnings"] = warnings_;
    const fs::path path = dir_ / (command_ + "_manifest.json");
    write_file_atomic(path, manifest.dump(2) + "\n");
    return path;
  }

private:
  std::string command_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  json parameters_ = json::object();
  json warnings_ = json::object();
  std::vector<std::string> output_paths_;
};

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoul(item));
      } else {
        const std::size_t lo = std::stoul(item.substr(0, dots));
        const std::size_t hi = std::stoul(item.substr(dots + 2));
        for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::exception&) {
      throw CliFailure(kExitValidation, "BadFlag",
                       "cannot parse count list item '" + item + "'");
    }
    pos = comma + 1;
  }
  if (out.empty()) {
    throw CliFailure(kExitValidation, "BadFlag", "empty count list");
  }
  return out;
}

// Exact rational parse of a dyadic fraction flag like "5/8".
needle::DyadicTarget parse_dyadic(const std::string& text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string::npos) {
    throw CliFailure(kExitValidation, "BadFlag",
                     "dyadic fraction must look like 1/4, got '" + text + "'");
  }
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  try {
    num = std::stoull(text.substr(0, slash));
    den = std::stoull(text.substr(slash + 1));
  } catch (const std::exception&) {
    throw CliFailure(kExitValidation, "BadFlag",
                     "cannot parse fraction '" + text + "'");
  }
  if (den == 0 || (den & (den - 1)) != 0 || num == 0 || num >= den) {
    throw CliFailure(kExitValidation, "BadFlag",
                     "'" + text + "' is not a dyadic fraction in (0,1)");
  }
  while (num % 2 == 0) {
    num /= 2;
    den /= 2;
  }
  unsigned s = 0;
  while ((std::uint64_t{1} << s) < den) ++s;
  try {
    return needle::DyadicTarget::make(num, s);
  } catch (const needle::Error& e) {
    throw CliFailure(kExitValidation, errc_name(e.code()), e.what());
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(text.substr(pos));
      return out;
    }
    out.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
}

double parse_double_flag(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw CliFailure(kExitValidation, "BadFlag",
                     "cannot parse " + what + " '" + text + "'");
  }
}

std::string csv_line(std::initializer_list<double> values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ',';
    out += needle::format_double(v);
  }
  out += '\n';
  return out;
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::size_t n = 0;
  double tol = 0.0;  // 0 means default tolerance
  std::string method = "hybrid";
  std::string out;
};

int run_solve(const SolveArgs& args) {
  ManifestWriter manifest("solve", output_dir(args.out));
  const double tol = args.tol > 0.0 ? args.tol : needle::default_tolerance(args.n);
  manifest.param("n", args.n);
  manifest.param("tol", tol);
  manifest.param("method", args.method);

  const needle::EquilibriumReport report = [&] {
    if (args.method == "hybrid") return needle::solve(args.n, tol);
    if (args.method == "fixed-point") {
      return needle::solve_fixed_point(
          needle::ClosedSimplexPoint::from_coords(
              needle::equispaced(args.n).positions()),
          200000, tol);
    }
    if (args.method == "descent") {
      return needle::solve_gradient_descent(
          needle::interior_of(needle::equispaced(args.n)), tol);
    }
    throw CliFailure(kExitValidation, "BadFlag",
                     "unknown method '" + args.method + "'");
  }();
  if (!report.converged) {
    throw CliFailure(kExitConvergence, "NotConverged",
                     "solver did not reach tolerance");
  }

  const std::string stem = "solve_n" + std::to_string(args.n);
  manifest.wrote(manifest.dir() / (stem + "_report.json"),
                 needle::report_to_json(report) + "\n");
  manifest.wrote(manifest.dir() / (stem + "_positions.txt"),
                 needle::to_text(report.configuration));
  manifest.finish();
  return 0;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string system = "newton";
  std::size_t n = 0;
  std::string init = "equispaced";
  std::string init_file;
  double horizon = 10.0;
  double step = 0.01;
  std::string cdf_snapshots;
  std::string out;
};

needle::ChargeConfiguration initial_configuration(const SimulateArgs& args) {
  if (args.init == "equispaced") {
    return needle::equispaced(args.n);
  }
  if (args.init == "half-needle") {
    // Interior charges packed on the left half: x_i = (i-1)/(2n-1) for
    // 1 < i < n, with the endpoints pinned as always.
    std::vector<double> p(args.n);
    p.front() = 0.0;
    p.back() = 1.0;
    for (std::size_t i = 1; i + 1 < args.n; ++i) {
      p[i] = static_cast<double>(i) / static_cast<double>(2 * args.n - 1);
    }
    return needle::ChargeConfiguration::from_positions(std::move(p));
  }
  if (args.init == "file") {
    std::ifstream in(args.init_file, std::ios::binary);
    if (!in) {
      throw CliFailure(kExitIo, "IoFailure",
                       "cannot read " + args.init_file);
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return needle::config_from_text(text);
  }
  throw CliFailure(kExitValidation, "BadFlag",
                   "unknown init '" + args.init + "'");
}

int run_simulate(const SimulateArgs& args) {
  ManifestWriter manifest("simulate", output_dir(args.out));
  manifest.param("system", args.system);
  manifest.param("n", args.n);
  manifest.param("init", args.init);
  if (!args.init_file.empty()) manifest.param("init_file", args.init_file);
  manifest.param("horizon", args.horizon);
  manifest.param("step", args.step);

  needle::DynamicsSpec spec{
      args.system == "newton" ? needle::DynamicalSystem::Newtonian
                              : needle::DynamicalSystem::GradientFlow,
      initial_configuration(args), args.horizon, args.step};
  if (args.system != "newton" && args.system != "flow") {
    throw CliFailure(kExitValidation, "BadFlag",
                     "unknown system '" + args.system + "'");
  }

  const needle::Trajectory traj = needle::simulate(spec);
  manifest.wrote(manifest.dir() / "trajectory.csv", needle::trajectory_csv(traj));

  if (!args.cdf_snapshots.empty()) {
    manifest.param("cdf_snapshots", args.cdf_snapshots);
    for (const std::string& token : split(args.cdf_snapshots, ',')) {
      const double t = parse_double_flag(token, "snapshot time");
      // Nearest stored sample at or before t.
      std::size_t idx = 0;
      for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] <= t + 1e-12) idx = k;
      }
      const needle::EmpiricalCdf cdf(traj.states[idx]);
      std::string csv = "position,cdf\n";
      for (double x : traj.states[idx].positions()) {
        csv += csv_line({x, cdf(x)});
      }
      manifest.wrote(manifest.dir() / ("cdf_t" + token + ".csv"), csv);
    }
  }
  manifest.finish();
  return 0;
}

// ---- table ----------------------------------------------------------------

struct TableArgs {
  std::string kind;
  std::string gammas = "1/4,5/8";
  unsigned min_k = 3;
  unsigned max_k = 8;
  std::string ns = "5,9,17,33";
  std::uint64_t q = 1;
  unsigned s = 1;
  std::string out;
};

int run_table(const TableArgs& args) {
  ManifestWriter manifest("table", output_dir(args.out));
  manifest.param("kind", args.kind);

  if (args.kind == "dyadic") {
    manifest.param("gammas", args.gammas);
    manifest.param("min_k", args.min_k);
    manifest.param("max_k", args.max_k);
    std::vector<needle::DyadicTarget> targets;
    for (const std::string& token : split(args.gammas, ',')) {
      targets.push_back(parse_dyadic(token));
    }
    std::string csv = "gamma,k,n,index,position\n";
    std::map<std::size_t, needle::EquilibriumReport> solved;
    for (unsigned k = args.min_k; k <= args.max_k; ++k) {
      const std::size_t n = (std::size_t{1} << k) + 1;
      solved.emplace(n, needle::solve(n));
    }
    for (const auto& target : targets) {
      for (unsigned k = args.min_k; k <= args.max_k; ++k) {
        if (k < target.s) continue;
        const std::size_t n = (std::size_t{1} << k) + 1;
        const auto& config = solved.at(n).configuration;
        const std::uint64_t index1 =
            target.q * (std::uint64_t{1} << (k - target.s)) + 1;
        csv += std::to_string(target.q) + "/" +
               std::to_string(std::uint64_t{1} << target.s) + "," +
               std::to_string(k) + "," + std::to_string(n) + "," +
               std::to_string(index1) + "," +
               needle::format_double(needle::dyadic_position(config, target)) +
               "\n";
      }
    }
    manifest.wrote(manifest.dir() / "dyadic_table.csv", csv);
  } else if (args.kind == "ratio") {
    manifest.param("ns", args.ns);
    std::string csv = "n,ratio\n";
    for (std::size_t n : parse_count_list(args.ns)) {
      csv += std::to_string(n) + "," +
             needle::format_double(needle::second_charge_ratio(n)) + "\n";
    }
    manifest.wrote(manifest.dir() / "ratio_table.csv", csv);
  } else if (args.kind == "gaps") {
    manifest.param("min_k", args.min_k);
    manifest.param("max_k", args.max_k);
    std::string csv = "k,n,max_gap,min_gap,ratio,spread\n";
    for (unsigned k = args.min_k; k <= args.max_k; ++k) {
      const std::size_t n = (std::size_t{1} << k) + 1;
      const auto stats = needle::gap_stats(needle::solve(n).configuration);
      csv += std::to_string(k) + "," + std::to_string(n) + "," +
             needle::format_double(stats.max_gap) + "," +
             needle::format_double(stats.min_gap) + "," +
             needle::format_double(stats.ratio) + "," +
             needle::format_double(stats.max_gap - stats.min_gap) + "\n";
    }
    manifest.wrote(manifest.dir() / "gaps_table.csv", csv);
  } else if (args.kind == "qfactors") {
    manifest.param("q", args.q);
    manifest.param("s", args.s);
    manifest.param("ns", args.ns);
    std::string csv =
        "n,qminus_sum,qminus_closed,qplus_sum,qplus_closed,"
        "partial_sum,partial_closed,net_signed\n";
    for (std::size_t n : parse_count_list(args.ns)) {
      const auto ratios = needle::nearest_charge_ratios(
          args.q, args.s, static_cast<unsigned>(n));
      const auto partial = needle::partial_force_sum(
          args.q, args.s, static_cast<unsigned>(n));
      const double net = needle::net_signed_force_sum(
          args.q, args.s, static_cast<unsigned>(n));
      csv += std::to_string(n) + "," +
             needle::format_double(ratios.q_minus.finite_sum) + "," +
             needle::format_double(ratios.q_minus.closed_form) + "," +
             needle::format_double(ratios.q_plus.finite_sum) + "," +
             needle::format_double(ratios.q_plus.closed_form) + "," +
             needle::format_double(partial.finite_sum) + "," +
             needle::format_double(partial.closed_form) + "," +
             needle::format_double(net) + "\n";
    }
    manifest.wrote(manifest.dir() / "qfactors_table.csv", csv);
  } else {
    throw CliFailure(kExitValidation, "BadFlag",
                     "unknown table kind '" + args.kind + "'");
  }
  manifest.finish();
  return 0;
}

// ---- fieldmap -------------------------------------------------------------

struct FieldmapArgs {
  std::string source;
  std::size_t n = 17;
  std::string region = "-0.5:1.5,0.05:1";
  std::string res = "40x20";
  std::string out;
};

int run_fieldmap(const FieldmapArgs& args) {
  ManifestWriter manifest("fieldmap", output_dir(args.out));
  manifest.param("source", args.source);
  manifest.param("region", args.region);
  manifest.param("res", args.res);

  const std::vector<std::string> ranges = split(args.region, ',');
  if (ranges.size() != 2) {
    throw CliFailure(kExitValidation, "BadFlag",
                     "region must be xmin:xmax,ymin:ymax");
  }
  double bounds[4];
  for (int axis = 0; axis < 2; ++axis) {
    const std::vector<std::string> pair = split(ranges[axis], ':');
    if (pair.size() != 2) {
      throw CliFailure(kExitValidation, "BadFlag",
                       "range must be lo:hi, got '" + ranges[axis] + "'");
    }
    bounds[2 * axis] = parse_double_flag(pair[0], "region bound");
    bounds[2 * axis + 1] = parse_double_flag(pair[1], "region bound");
  }
  const std::vector<std::string> res_parts = split(args.res, 'x');
  if (res_parts.size() != 2) {
    throw CliFailure(kExitValidation, "BadFlag", "res must be WxH");
  }
  std::size_t nx = 0;
  std::size_t ny = 0;
  try {
    nx = std::stoul(res_parts[0]);
    ny = std::stoul(res_parts[1]);
  } catch (const std::exception&) {
    throw CliFailure(kExitValidation, "BadFlag", "res must be WxH");
  }
  if (nx < 1 || ny < 1) {
    throw CliFailure(kExitValidation, "BadFlag", "resolution must be positive");
  }

  std::optional<needle::ChargeConfiguration> charges;
  std::string source_label = args.source;
  if (args.source == "discrete-equilibrium") {
    manifest.param("n", args.n);
    charges = needle::solve(args.n).configuration;
    source_label = "discrete";
  } else if (args.source == "discrete-uniform") {
    manifest.param("n", args.n);
    charges = needle::equispaced(args.n);
    source_label = "discrete";
  } else if (args.source == "continuous") {
    source_label = "uniform";
  } else {
    throw CliFailure(kExitValidation, "BadFlag",
                     "unknown source '" + args.source + "'");
  }

  std::size_t skipped = 0;
  std::string csv = "x,y,Ex,Ey,source\n";
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double fx = nx == 1 ? 0.0
                                : static_cast<double>(i) /
                                      static_cast<double>(nx - 1);
      const double fy = ny == 1 ? 0.0
                                : static_cast<double>(j) /
                                      static_cast<double>(ny - 1);
      const needle::SpacePoint p{bounds[0] + fx * (bounds[1] - bounds[0]),
                                 bounds[2] + fy * (bounds[3] - bounds[2]), 0.0};
      if (p.y == 0.0 && p.x >= 0.0 && p.x <= 1.0) {
        // On the needle itself: no meaningful sample for any source.
        ++skipped;
        continue;
      }
      try {
        const needle::FieldSample sample =
            charges ? needle::discrete_field(*charges, p)
                    : needle::uniform_field_offneedle(p);
        csv += needle::format_double(p.x) + "," + needle::format_double(p.y) +
               "," + needle::format_double(sample.vector[0]) + "," +
               needle::format_double(sample.vector[1]) + "," + source_label +
               "\n";
      } catch (const needle::Error& e) {
        if (e.code() == needle::Errc::PointOnNeedle ||
            e.code() == needle::Errc::PointOnCharge) {
          ++skipped;
        } else {
          throw;
        }
      }
    }
  }
  if (skipped > 0) manifest.warning_count("points_skipped", skipped);
  manifest.wrote(manifest.dir() / "fieldmap.csv", csv);
  manifest.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point charges in equilibrium on the unit needle"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "Solve the n-charge equilibrium");
  solve_cmd->add_option("--n", solve_args.n, "charge count")->required();
  solve_cmd->add_option("--tol", solve_args.tol,
                        "residual tolerance (default scales with n)");
  solve_cmd->add_option("--method", solve_args.method,
                        "hybrid | fixed-point | descent");
  solve_cmd->add_option("--out", solve_args.out, "output directory");

  SimulateArgs sim_args;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Integrate the charge dynamics");
  sim_cmd->add_option("--system", sim_args.system, "newton | flow");
  sim_cmd->add_option("--n", sim_args.n, "charge count")->required();
  sim_cmd->add_option("--init", sim_args.init,
                      "equispaced | half-needle | file");
  sim_cmd->add_option("--init-file", sim_args.init_file,
                      "positions file for --init file");
  sim_cmd->add_option("--horizon", sim_args.horizon, "end time");
  sim_cmd->add_option("--step", sim_args.step, "sampling step");
  sim_cmd->add_option("--cdf-snapshots", sim_args.cdf_snapshots,
                      "comma-separated times for CDF snapshot files");
  sim_cmd->add_option("--out", sim_args.out, "output directory");

  TableArgs table_args;
  CLI::App* table_cmd =
      app.add_subcommand("table", "Emit an analysis table as CSV");
  table_cmd->add_option("--kind", table_args.kind,
                        "dyadic | ratio | gaps | qfactors")
      ->required();
  table_cmd->add_option("--gammas", table_args.gammas,
                        "dyadic fractions, e.g. 1/4,5/8");
  table_cmd->add_option("--min-k", table_args.min_k, "smallest k (n = 2^k+1)");
  table_cmd->add_option("--max-k", table_args.max_k, "largest k (n = 2^k+1)");
  table_cmd->add_option("--ns", table_args.ns,
                        "counts, e.g. 5,9,17 or 2..8");
  table_cmd->add_option("--q", table_args.q, "dyadic numerator");
  table_cmd->add_option("--s", table_args.s, "dyadic scale (u = q/2^s)");
  table_cmd->add_option("--out", table_args.out, "output directory");

  FieldmapArgs field_args;
  CLI::App* field_cmd =
      app.add_subcommand("fieldmap", "Sample a field on a planar grid");
  field_cmd
      ->add_option("--source", field_args.source,
                   "discrete-equilibrium | discrete-uniform | continuous")
      ->required();
  field_cmd->add_option("--n", field_args.n, "charge count for discrete sources");
  field_cmd->add_option("--region", field_args.region, "xmin:xmax,ymin:ymax");
  field_cmd->add_option("--res", field_args.res, "grid resolution WxH");
  field_cmd->add_option("--out", field_args.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(solve_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (table_cmd->parsed()) return run_table(table_args);
    return run_fieldmap(field_args);
  } catch (const CliFailure& e) {
    json err;
    err["error"] = e.kind;
    err["message"] = e.what();
    std::cout << err.dump() << "\n";
    return e.exit_code;
  } catch (const needle::Error& e) {
    json err;
    err["error"] = errc_name(e.code());
    err["message"] = e.what();
    std::cout << err.dump() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    json err;
    err["error"] = "Unexpected";
    err["message"] = e.what();
    std::cout << err.dump() << "\n";
    return kExitIo;
  }
}
