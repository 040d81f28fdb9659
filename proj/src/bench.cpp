#include "ghnn/bench.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <future>
#include <sstream>
#include <system_error>

#include "ghnn/errors.hpp"

namespace ghnn {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct AlphaRun {
  SolveResultd result;
  double median_time = 0.0;
};

AlphaRun run_alpha(const SweepConfig& cfg, const SolverConfigd& base, double alpha) {
  SolverConfigd config = base;
  config.sf.alpha = alpha;
  AlphaRun out;
  std::vector<double> times;
  for (int r = 0; r < cfg.repeats; ++r) {
    SolveResultd res = solve(cfg.problem, config);
    times.push_back(res.wall_time_seconds);
    if (r == 0) out.result = std::move(res);
  }
  out.median_time = median(std::move(times));
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + file.string() + " for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& file) {
  os.flush();
  if (!os) throw IoError("write failed for " + file.string());
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw IoError("bad number '" + s + "'");
  return v;
}

}  // namespace

std::int64_t curve_stride(std::int64_t max_steps, std::int64_t max_points) {
  if (max_points < 1) return 1;
  return std::max<std::int64_t>(1, (max_steps + max_points - 1) / max_points);
}

std::int64_t snapshot_stride(std::int64_t max_steps) {
  return std::max<std::int64_t>(1, (max_steps + 499) / 500);
}

SweepReport run_sweep(const SweepConfig& cfg) {
  if (cfg.alphas.empty()) throw ConfigError("sweep needs at least one alpha");
  if (cfg.repeats < 1) throw ConfigError("repeats must be positive");
  if (cfg.base.sf.kind != ScaleKind::PowerLaw) {
    throw ConfigError("alpha sweeps need a power-law scale function");
  }
  cfg.problem.validate();
  cfg.base.validate(cfg.problem.cols());

  SolverConfigd base = cfg.base;
  base.record_every = std::max(base.record_every, curve_stride(base.max_steps, cfg.max_curve_points));
  if (cfg.snapshots) base.snapshot_every = snapshot_stride(base.max_steps);

  std::vector<AlphaRun> runs(cfg.alphas.size());
  if (cfg.parallel) {
    std::vector<std::future<AlphaRun>> futures;
    futures.reserve(cfg.alphas.size());
    for (double alpha : cfg.alphas) {
      futures.push_back(std::async(std::launch::async, [&cfg, &base, alpha] { return run_alpha(cfg, base, alpha); }));
    }
    for (std::size_t k = 0; k < futures.size(); ++k) runs[k] = futures[k].get();
  } else {
    for (std::size_t k = 0; k < cfg.alphas.size(); ++k) runs[k] = run_alpha(cfg, base, cfg.alphas[k]);
  }

  SweepReport report;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& res = runs[k].result;
    report.rows.push_back({cfg.alphas[k], res.steps_taken, runs[k].median_time, res.final_metric, res.converged});
    report.runs.push_back(std::move(runs[k].result));
  }
  return report;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw IoError("number formatting failed");
  return std::string(buf, ptr);
}

std::string alpha_tag(double alpha) { return format_number(alpha); }

void write_curve_csv(const Trajectory<double>& trajectory, const std::filesystem::path& file) {
  auto os = open_for_write(file);
  os << kCurveHeader << '\n';
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    os << format_number(trajectory.times[i]) << ',' << format_number(trajectory.residual_norms[i]) << '\n';
  }
  finish(os, file);
}

void export_csv(const SweepReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const auto summary_path = dir / kSummaryFile;
  auto summary = open_for_write(summary_path);
  summary << kSummaryHeader << '\n';
  for (const auto& row : report.rows) {
    summary << format_number(row.alpha) << ',' << row.steps << ',' << format_number(row.wall_time_seconds) << ','
            << format_number(row.final_norm) << ',' << (row.converged ? "true" : "false") << '\n';
  }
  finish(summary, summary_path);

  for (std::size_t k = 0; k < report.rows.size() && k < report.runs.size(); ++k) {
    const auto tag = alpha_tag(report.rows[k].alpha);
    const auto& traj = report.runs[k].trajectory;

    write_curve_csv(traj, dir / ("curve_" + tag + ".csv"));

    if (traj.snapshots.empty()) continue;
    const auto sol_path = dir / ("solution_" + tag + ".csv");
    auto sol = open_for_write(sol_path);
    sol << 't';
    for (Eigen::Index j = 0; j < traj.snapshots.front().f.size(); ++j) sol << ",f_" << j + 1;
    sol << '\n';
    for (const auto& snap : traj.snapshots) {
      sol << format_number(snap.t);
      for (Eigen::Index j = 0; j < snap.f.size(); ++j) sol << ',' << format_number(snap.f[j]);
      sol << '\n';
    }
    finish(sol, sol_path);
  }
}

std::vector<SweepRow> read_summary_csv(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw IoError("cannot open " + file.string());
  std::string line;
  if (!std::getline(is, line) || line != kSummaryHeader) {
    throw IoError(file.string() + ": missing summary header");
  }
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw IoError(file.string() + ": expected 5 columns in '" + line + "'");
    SweepRow row;
    row.alpha = parse_double(cells[0]);
    row.steps = static_cast<std::int64_t>(std::stoll(cells[1]));
    row.wall_time_seconds = parse_double(cells[2]);
    row.final_norm = parse_double(cells[3]);
    if (cells[4] == "true") {
      row.converged = true;
    } else if (cells[4] != "false") {
      throw IoError(file.string() + ": bad converged flag '" + cells[4] + "'");
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ghnn
