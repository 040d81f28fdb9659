// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ghnn/bench.hpp"
#include "ghnn/cli.hpp"
#include "ghnn/fredholm.hpp"
#include "ghnn/hopfield.hpp"
#include "support/oracles.hpp"

using namespace ghnn;

namespace {

const std::vector<double> kAlphas{1, 1.5, 2, 2.5, 3, 3.5, 4, 6, 8, 10};

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
}

void info(const std::string& detail) {
  std::printf("[INFO]    %s\n", detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

double max_rel_error(const Eigen::VectorXd& f, const Eigen::VectorXd& exact) {
  return ((f - exact).array() / exact.array()).abs().maxCoeff();
}

// Residual norm at the first recorded step at or past `fraction` of the run.
double residual_at_fraction(const SolveResultd& run, double fraction) {
  const auto& tr = run.trajectory;
  const double target = fraction * static_cast<double>(run.steps_taken);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (static_cast<double>(tr.steps[i]) >= target) return tr.residual_norms[i];
  }
  return tr.residual_norms.back();
}

std::string steps_list(const SweepReport& r) {
  std::ostringstream os;
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    os << (k ? " " : "") << r.rows[k].alpha << ":" << r.rows[k].steps << (r.rows[k].converged ? "" : "*");
  }
  return os.str();
}

bool strictly_decreasing_steps(const SweepReport& r) {
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    if (!(r.rows[k].steps < r.rows[k - 1].steps)) return false;
  }
  return true;
}

std::int64_t steps_of(const SweepReport& r, double alpha) {
  for (const auto& row : r.rows) {
    if (row.alpha == alpha) return row.steps;
  }
  return -1;
}

void ill_posedness() {
  std::ostringstream out, err;
  const auto start = std::chrono::steady_clock::now();
  const int code = run_cli({"cond", "--prototype"}, out, err);
  const double elapsed = seconds_since(start);
  const std::string text = out.str();
  const auto pos = text.find("condition_number: ");
  const double kappa = pos == std::string::npos ? 0.0 : std::stod(text.substr(pos + 18));
  report(1, "ill-posedness", code == 0 && kappa >= 1e15 && elapsed < 1.0,
         "kappa=" + fmt("%.4e", kappa) + " (need >= 1e15), " + fmt("%.3f", elapsed) + " s (need < 1 s)");
}

SweepReport strict_tolerance_sweep(double& elapsed) {
  SweepConfig cfg;
  cfg.alphas = kAlphas;
  cfg.problem = prototype<double>();
  cfg.base.t0 = 0.01;
  cfg.base.h = 7e-7;
  cfg.base.tol = 1e-11;
  cfg.base.max_steps = 22'000'000;
  cfg.repeats = 1;
  const auto start = std::chrono::steady_clock::now();
  auto report = run_sweep(cfg);
  elapsed = seconds_since(start);
  return report;
}

void convergence(const SweepReport& r, double elapsed) {
  std::size_t converged = 0;
  for (const auto& row : r.rows) converged += row.converged;
  std::ostringstream d;
  d << converged << "/" << r.rows.size() << " alphas reach cost <= 1e-11 (h=7e-7, cap 2.2e7 steps, closed-form data), "
    << "steps " << steps_list(r) << " (* = capped), " << fmt("%.1f", elapsed) << " s";
  report(2, "convergence at 1e-11", converged == r.rows.size() && elapsed < 60.0, d.str());

  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    if (!r.rows[k].converged) continue;
    info("alpha=" + fmt("%g", r.rows[k].alpha) + " stops at ||K f - g|| = " +
         fmt("%.3e", r.runs[k].final_residual_norm) + "; a 1e-11 residual norm is below the least-squares floor");
    break;
  }
}

void alpha_independence(const SweepReport& r) {
  double worst = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (!r.rows[i].converged) continue;
    ++n;
    for (std::size_t j = i + 1; j < r.rows.size(); ++j) {
      if (!r.rows[j].converged) continue;
      worst = std::max(worst, (r.runs[i].f_final - r.runs[j].f_final).cwiseAbs().maxCoeff());
    }
  }
  report(3, "alpha independence", n >= 2 && worst <= 1e-6,
         "max pairwise |f_i - f_j|_inf = " + fmt("%.3e", worst) + " over " + std::to_string(n) +
             " converged alphas (need <= 1e-6, at least 2)");
}

void speedup(const SweepReport& r) {
  const double s1 = static_cast<double>(steps_of(r, 1.0)), s10 = static_cast<double>(steps_of(r, 10.0));
  const bool all = std::all_of(r.rows.begin(), r.rows.end(), [](const SweepRow& row) { return row.converged; });
  const bool pass = all && strictly_decreasing_steps(r) && s1 / s10 >= 5.0;
  report(4, "speedup trend", pass,
         std::string("strictly decreasing: ") + (strictly_decreasing_steps(r) ? "yes" : "no") +
             ", steps(1)/steps(10) = " + fmt("%.2f", s1 / s10) + " (need >= 5), all converged: " + (all ? "yes" : "no"));
}

void learning_time_limit(const SweepReport& r) {
  const auto d_high = steps_of(r, 8.0) - steps_of(r, 10.0);
  const auto d_low = steps_of(r, 1.0) - steps_of(r, 1.5);
  const bool all = std::all_of(r.rows.begin(), r.rows.end(), [](const SweepRow& row) { return row.converged; });
  report(5, "learning-time limit", all && d_high <= d_low,
         "steps(8)-steps(10) = " + std::to_string(d_high) + ", steps(1)-steps(1.5) = " + std::to_string(d_low) +
             ", all converged: " + (all ? "yes" : "no"));
}

void trend_at_loose_tolerance() {
  SweepConfig cfg;
  cfg.alphas = kAlphas;
  cfg.problem = prototype<double>();
  cfg.base.h = 2.5e-4;
  cfg.base.tol = 1e-5;
  cfg.base.max_steps = 5'000'000;
  cfg.repeats = 1;
  const auto r = run_sweep(cfg);
  const double ratio = static_cast<double>(steps_of(r, 1.0)) / static_cast<double>(steps_of(r, 10.0));
  info("cost <= 1e-5, h=2.5e-4: steps " + steps_list(r) + "; strictly decreasing: " +
       (strictly_decreasing_steps(r) ? "yes" : "no") + ", ratio " + fmt("%.1f", ratio) + ", limit " +
       std::to_string(steps_of(r, 8.0) - steps_of(r, 10.0)) + " <= " +
       std::to_string(steps_of(r, 1.0) - steps_of(r, 1.5)));
}

void classical_reduction() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> t0_dist(0.01, 3.0), h_dist(1e-3, 0.2);
  int identical = 0;
  for (int k = 0; k < 100; ++k) {
    InverseProblemd p;
    p.K = oracle::random_matrix(rng, 5, 5);
    p.g = oracle::random_vector(rng, 5);
    SolverConfigd a;
    a.t0 = t0_dist(rng);
    a.h = h_dist(rng);
    a.tol = 1e-300;
    a.max_steps = 200;
    a.snapshot_every = 1;
    a.u0 = oracle::random_vector(rng, 5);
    SolverConfigd b = a;
    a.sf = ScaleFunctiond::power_law(1.0);
    b.sf = ScaleFunctiond::constant(1.0);
    const auto ra = solve(p, a);
    const auto rb = solve(p, b);
    bool same = ra.steps_taken == rb.steps_taken && ra.trajectory.snapshots.size() == rb.trajectory.snapshots.size() &&
                ra.trajectory.residual_norms == rb.trajectory.residual_norms &&
                (ra.u_final.array() == rb.u_final.array()).all();
    for (std::size_t i = 0; same && i < ra.trajectory.snapshots.size(); ++i) {
      same = (ra.trajectory.snapshots[i].f.array() == rb.trajectory.snapshots[i].f.array()).all();
    }
    identical += same;
  }
  report(6, "classical reduction", identical == 100,
         std::to_string(identical) + "/100 random 5x5 runs bit-identical over 200 steps");
}

void calculus_rules() {
  const auto start = std::chrono::steady_clock::now();
  const auto e = oracle::legd_rule_errors(1000, 99);
  const double elapsed = seconds_since(start);
  const double worst = std::max({e.linearity, e.constant, e.product, e.quotient, e.chain, e.consistency});
  std::ostringstream d;
  d << "max rel err linearity " << fmt("%.1e", e.linearity) << ", constant " << fmt("%.1e", e.constant)
    << ", product " << fmt("%.1e", e.product) << ", quotient " << fmt("%.1e", e.quotient) << ", chain "
    << fmt("%.1e", e.chain) << ", consistency " << fmt("%.1e", e.consistency) << " (need <= 1e-6), 1000 cases, "
    << fmt("%.3f", elapsed) << " s";
  report(7, "LEGD calculus rules", worst <= 1e-6 && elapsed < 5.0, d.str());
}

void gradient() {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    InverseProblemd p;
    p.K = oracle::random_matrix(rng, 8, 6);
    p.g = oracle::random_vector(rng, 8);
    const Eigen::VectorXd u = oracle::random_vector(rng, 6);
    const auto fd = oracle::central_gradient(
        [&](const Eigen::VectorXd& f) { return oracle::cost_by_loops(p.K, p.g, f); }, u, 1e-3);
    const Eigen::VectorXd rhs = ghnn_rhs(p, Activation<double>::identity(), u);
    worst = std::max(worst, (rhs + fd).cwiseAbs().maxCoeff());
  }
  report(8, "gradient correctness", worst <= 1e-10,
         "max |rhs + grad_fd| = " + fmt("%.2e", worst) + " over 100 random 8x6 problems (need <= 1e-10)");
}

void accuracy(const SweepReport& r) {
  const auto exact = *prototype<double>().f_exact;
  double worst = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    if (!r.rows[k].converged) continue;
    ++n;
    worst = std::max(worst, max_rel_error(r.runs[k].f_final, exact));
  }
  report(9, "solution accuracy", n >= 1 && worst <= 0.05,
         "max relative error vs 1/y = " + fmt("%.4f", worst) + " over " + std::to_string(n) +
             " converged alphas (need <= 0.05)");
}

void early_flat(const SweepReport& r) {
  const auto drop = [&](double alpha) {
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
      if (r.rows[k].alpha != alpha) continue;
      const double r0 = r.runs[k].trajectory.residual_norms.front();
      return (r0 - residual_at_fraction(r.runs[k], 0.01)) / r0;
    }
    return 0.0;
  };
  const double d10 = drop(10.0), d1 = drop(1.0);
  report(10, "early-flat learning", d10 < 0.10 && d1 > d10,
         "residual drop after 1% of steps: alpha=10 " + fmt("%.4f", d10) + " (need < 0.10), alpha=1 " +
             fmt("%.4f", d1) + " (need > alpha=10)");
}

}  // namespace

int main() {
  ill_posedness();

  double elapsed = 0.0;
  const auto sweep = strict_tolerance_sweep(elapsed);
  convergence(sweep, elapsed);
  alpha_independence(sweep);
  speedup(sweep);
  learning_time_limit(sweep);
  trend_at_loose_tolerance();
  classical_reduction();
  calculus_rules();
  gradient();
  accuracy(sweep);
  early_flat(sweep);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
