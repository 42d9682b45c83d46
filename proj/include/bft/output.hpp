#ifndef BFT_OUTPUT_HPP
#define BFT_OUTPUT_HPP

#include "bft/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace bft {

/// Column names of trace.csv, in order. See README for the layout.
std::vector<std::string> trace_columns(const Trace& trace);

/// One header line, then one row per sample. Numbers use %.17g so rows
/// round-trip exactly.
void write_trace_csv(const Trace& trace, std::ostream& out);

/// Metrics summary and convergence report as JSON.
std::string summary_json(const ScenarioConfig& config, const RunResult& result);

/// Human-readable key-value rendering of the convergence report.
std::string report_text(const ScenarioConfig& config, const RunResult& result);

std::string trajectories_svg(const Trace& trace);
std::string errors_svg(const Trace& trace);
std::string velocities_svg(const Trace& trace);

/// Writes the artifacts enabled by config.output.formats into `dir`
/// (created if needed) and returns their paths. report.txt is always written.
std::vector<std::filesystem::path> write_run(const ScenarioConfig& config, const RunResult& result,
                                             const std::filesystem::path& dir);

struct SweepRun {
  std::uint64_t seed = 0;
  std::filesystem::path directory;
  Verdict verdict = Verdict::kInconclusive;
  double max_position_error = 0.0;
  double max_bearing_error = 0.0;
  double max_velocity_error = 0.0;
  double max_estimator_error = 0.0;  // max(||gamma||, ||delta||), law B
  std::string error;                 // set when the run could not start
};

struct SweepResult {
  std::vector<SweepRun> runs;  // ordered as the requested seeds
  std::filesystem::path summary_path;
  bool all_pass() const;
};

/// Runs `config` once per seed on up to `threads` workers (0 = hardware
/// concurrency). Each run writes to dir/seed-<seed>; the aggregate
/// min/max/mean summary goes to dir/sweep.json.
SweepResult run_sweep(const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds,
                      const std::filesystem::path& dir, unsigned threads = 0);

}  // namespace bft

#endif  // BFT_OUTPUT_HPP
