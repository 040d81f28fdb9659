#include "ghnn/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghnn/bench.hpp"
#include "ghnn/errors.hpp"
#include "ghnn/fredholm.hpp"
#include "ghnn/hopfield.hpp"
#include "ghnn/problem_io.hpp"

namespace ghnn {

namespace {

const std::vector<double> kDefaultAlphas{1, 1.5, 2, 2.5, 3, 3.5, 4, 6, 8, 10};

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string sci9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8e", v);
  return buf;
}

struct SolverFlags {
  double alpha = 1.0;
  double t0 = 0.01;
  double h = 0.5;
  double tol = 1e-11;
  std::int64_t max_steps = 10'000'000;
  std::string activation = "identity";
  double gain = 1.0;
  double scale = 1.0;
  std::string psi = "power";
  double psi_constant = 1.0;
  std::string metric = "cost";
  std::int64_t record_every = 1;
  std::int64_t snapshot_every = 0;
};

struct SourceFlags {
  std::string problem_file;
  bool prototype = false;
  std::string data = "closed";
  int n = 22;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool with_alpha) {
  if (with_alpha) cmd->add_option("--alpha", f.alpha, "LEGD order parameter alpha")->capture_default_str();
  cmd->add_option("--t0", f.t0, "initial learning time (> 0)")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--h", f.h, "LEGD-Euler step")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--tol", f.tol, "stopping tolerance on the stop metric")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-steps", f.max_steps, "step budget")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--activation", f.activation, "neuron activation")
      ->check(CLI::IsMember({"identity", "tanh"}))
      ->capture_default_str();
  cmd->add_option("--gain", f.gain, "tanh gain")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--scale", f.scale, "tanh output scale")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--psi", f.psi, "scale function: power (t^(1-alpha)) or constant")
      ->check(CLI::IsMember({"power", "constant"}))
      ->capture_default_str();
  cmd->add_option("--psi-constant", f.psi_constant, "value of a constant psi")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--metric", f.metric, "stop metric: cost (0.5||Kf-g||^2) or residual (||Kf-g||)")
      ->check(CLI::IsMember({"cost", "residual"}))
      ->capture_default_str();
  cmd->add_option("--record-every", f.record_every, "residual recording stride")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--snapshot-every", f.snapshot_every, "solution snapshot stride (0 = none)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void add_source_flags(CLI::App* cmd, SourceFlags& s) {
  auto* file = cmd->add_option("--problem", s.problem_file, "problem JSON file")->check(CLI::ExistingFile);
  auto* proto = cmd->add_flag("--prototype", s.prototype, "use the built-in (x+y)^-1 prototype (default)");
  file->excludes(proto);
  cmd->add_option("--data", s.data, "prototype data: closed (closed-form g) or crime (g = K f_exact)")
      ->check(CLI::IsMember({"closed", "crime"}))
      ->capture_default_str();
  cmd->add_option("--n", s.n, "prototype grid size")->check(CLI::PositiveNumber)->capture_default_str();
}

SolverConfigd make_config(const SolverFlags& f) {
  SolverConfigd c;
  c.sf = f.psi == "power" ? ScaleFunctiond::power_law(f.alpha) : ScaleFunctiond::constant(f.psi_constant);
  c.activation = f.activation == "identity" ? Activation<double>::identity() : Activation<double>::tanh(f.gain, f.scale);
  c.t0 = f.t0;
  c.h = f.h;
  c.tol = f.tol;
  c.max_steps = f.max_steps;
  c.record_every = f.record_every;
  c.snapshot_every = f.snapshot_every;
  c.stop_metric = f.metric == "cost" ? StopMetric::Cost : StopMetric::ResidualNorm;
  return c;
}

struct Source {
  InverseProblemd problem;
  std::string description;
};

Source load_source(const SourceFlags& s) {
  if (!s.problem_file.empty()) return {load_problem(s.problem_file), "file " + s.problem_file};
  PrototypeSpec<double> spec;
  spec.n = spec.m = s.n;
  spec.data = s.data == "closed" ? DataMode::ClosedForm : DataMode::InverseCrime;
  return {prototype(spec), "prototype n=" + std::to_string(s.n) + " data=" + to_string(spec.data)};
}

double max_relative_error(const Eigen::VectorXd& f, const Eigen::VectorXd& exact) {
  return ((f - exact).array().abs() / exact.array().abs()).maxCoeff();
}

void write_solution_csv(const Eigen::VectorXd& f, const std::string& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + file + " for writing");
  os << "j,f\n";
  for (Eigen::Index j = 0; j < f.size(); ++j) os << j + 1 << ',' << format_number(f[j]) << '\n';
  if (!os) throw IoError("write failed for " + file);
}

const char* status_of(const SolveResultd& r) {
  return r.converged ? "converged" : (r.diverged ? "diverged" : "not converged");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gateaux-Hopfield neural network solver for linear inverse problems", "ghnn"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  std::int64_t proto_n = 22;
  std::int64_t proto_m = 0;
  double proto_a = 1.0;
  double proto_b = 5.0;
  std::string proto_data = "closed";
  std::string proto_out;
  auto* cmd_proto = app.add_subcommand("prototype", "write the discretized (x+y)^-1 prototype as JSON");
  cmd_proto->add_option("--n", proto_n, "number of quadrature nodes")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_proto->add_option("--m", proto_m, "number of collocation points (default: n)")->check(CLI::NonNegativeNumber);
  cmd_proto->add_option("--a", proto_a, "left end of the interval")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_proto->add_option("--b", proto_b, "right end of the interval")->capture_default_str();
  cmd_proto->add_option("--data", proto_data, "closed (closed-form g) or crime (g = K f_exact)")
      ->check(CLI::IsMember({"closed", "crime"}))
      ->capture_default_str();
  cmd_proto->add_option("--out", proto_out, "output JSON file")->required();

  SolverFlags solve_flags;
  SourceFlags solve_source;
  std::string curve_out;
  std::string solution_out;
  auto* cmd_solve = app.add_subcommand("solve", "run one GHNN solve");
  add_solver_flags(cmd_solve, solve_flags, true);
  add_source_flags(cmd_solve, solve_source);
  cmd_solve->add_option("--curve", curve_out, "write t,residual_norm CSV here");
  cmd_solve->add_option("--solution", solution_out, "write the final f as j,f CSV here");

  SolverFlags sweep_flags;
  SourceFlags sweep_source;
  std::vector<double> alphas = kDefaultAlphas;
  std::string sweep_out;
  int repeats = 3;
  bool parallel = false;
  bool snapshots = false;
  auto* cmd_sweep = app.add_subcommand("sweep", "run an alpha sweep and export CSV");
  add_solver_flags(cmd_sweep, sweep_flags, false);
  add_source_flags(cmd_sweep, sweep_source);
  cmd_sweep->add_option("--alphas", alphas, "comma-separated alpha values")->delimiter(',')->capture_default_str();
  cmd_sweep->add_option("--out", sweep_out, "output directory")->required();
  cmd_sweep->add_option("--repeats", repeats, "timing repetitions")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_sweep->add_flag("--parallel", parallel, "run alphas concurrently");
  cmd_sweep->add_flag("--snapshots", snapshots, "also write solution_<alpha>.csv");

  SourceFlags cond_source;
  auto* cmd_cond = app.add_subcommand("cond", "print the condition number of K");
  add_source_flags(cmd_cond, cond_source);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("ghnn");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (cmd_proto->parsed()) {
      PrototypeSpec<double> spec;
      spec.a = proto_a;
      spec.b = proto_b;
      spec.n = proto_n;
      spec.m = proto_m > 0 ? proto_m : proto_n;
      spec.data = proto_data == "closed" ? DataMode::ClosedForm : DataMode::InverseCrime;
      save_problem(prototype(spec), proto_out);
      out << "wrote " << proto_out << " (m=" << spec.m << ", n=" << spec.n << ", data=" << to_string(spec.data)
          << ")\n";
      return kExitOk;
    }

    if (cmd_solve->parsed()) {
      const auto src = load_source(solve_source);
      const auto config = make_config(solve_flags);
      const auto res = solve(src.problem, config);
      out << "problem: " << src.description << '\n'
          << "alpha: " << fmt9(config.sf.alpha) << '\n'
          << "steps: " << res.steps_taken << '\n'
          << "status: " << status_of(res) << '\n'
          << "cost: " << fmt9(res.final_cost) << '\n'
          << "residual_norm: " << fmt9(res.final_residual_norm) << '\n';
      if (src.problem.f_exact) out << "max_rel_error: " << fmt9(max_relative_error(res.f_final, *src.problem.f_exact)) << '\n';
      out << "wall_time_s: " << fmt9(res.wall_time_seconds) << '\n';
      if (!res.message.empty()) out << "note: " << res.message << '\n';
      if (!curve_out.empty()) write_curve_csv(res.trajectory, curve_out);
      if (!solution_out.empty()) write_solution_csv(res.f_final, solution_out);
      return res.converged ? kExitOk : kExitNotConverged;
    }

    if (cmd_sweep->parsed()) {
      SweepConfig cfg;
      cfg.alphas = alphas;
      cfg.base = make_config(sweep_flags);
      cfg.problem = load_source(sweep_source).problem;
      cfg.repeats = repeats;
      cfg.parallel = parallel;
      cfg.snapshots = snapshots;
      const auto report = run_sweep(cfg);
      export_csv(report, sweep_out);
      out << "alpha steps wall_time_s final_norm converged\n";
      bool all = true;
      for (const auto& row : report.rows) {
        out << fmt9(row.alpha) << ' ' << row.steps << ' ' << fmt9(row.wall_time_seconds) << ' ' << fmt9(row.final_norm)
            << ' ' << (row.converged ? "yes" : "no") << '\n';
        all = all && row.converged;
      }
      return all ? kExitOk : kExitNotConverged;
    }

    if (cmd_cond->parsed()) {
      const auto src = load_source(cond_source);
      out << "condition_number: " << sci9(condition_number(src.problem.K)) << '\n';
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ghnn
