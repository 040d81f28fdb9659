#pragma once

// Alpha sweeps over a shared solver configuration, with CSV export.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ghnn/hopfield.hpp"

namespace ghnn {

struct SweepConfig {
  std::vector<double> alphas;
  SolverConfigd base;
  InverseProblemd problem;
  int repeats = 3;
  bool parallel = false;
  bool snapshots = false;         // periodic solution snapshots
  std::int64_t max_curve_points = 10'000;
};

struct SweepRow {
  double alpha = 0.0;
  std::int64_t steps = 0;
  double wall_time_seconds = 0.0;  // median over repeats
  double final_norm = 0.0;         // stop metric at termination
  bool converged = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<SolveResultd> runs;  // one per row, same order
};

/// Runs solve once per alpha (repeats times for timing). All runs share
/// cfg.base except sf.alpha. A diverged run is recorded, never rethrown.
SweepReport run_sweep(const SweepConfig& cfg);

/// Recording stride used by run_sweep for a given step budget.
std::int64_t curve_stride(std::int64_t max_steps, std::int64_t max_points);

/// Snapshot cadence used when SweepConfig::snapshots is set.
std::int64_t snapshot_stride(std::int64_t max_steps);

/// Shortest round-trip decimal form, "." as decimal point.
std::string format_number(double value);

/// Filename tag for an alpha value, e.g. 1.5 -> "1.5".
std::string alpha_tag(double alpha);

/// t,residual_norm rows of one trajectory.
void write_curve_csv(const Trajectory<double>& trajectory, const std::filesystem::path& file);

/// Writes summary.csv, curve_<alpha>.csv per row and solution_<alpha>.csv
/// for runs that carry snapshots. Creates dir if needed.
void export_csv(const SweepReport& report, const std::filesystem::path& dir);

/// Parses a summary.csv written by export_csv.
std::vector<SweepRow> read_summary_csv(const std::filesystem::path& file);

inline constexpr const char* kSummaryFile = "summary.csv";
inline constexpr const char* kSummaryHeader = "alpha,steps,wall_time_s,final_norm,converged";
inline constexpr const char* kCurveHeader = "t,residual_norm";

}  // namespace ghnn
