#pragma once

// Executes external solvers under wall-clock and memory supervision.
//
// Memory is enforced by sampling the resident set of the child's process
// group every poll interval; a spike that starts and ends between two
// samples goes unseen.

#include "mcc/formats.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcc::harness {

/// Exit status convention for solvers driven by the harness (and obeyed by
/// the `mcc count` command).
inline constexpr int kExitSolved = 0;
inline constexpr int kExitGaveUp = 10;
inline constexpr int kExitResourceAbort = 20;

enum class RunStatus { solved, tle, mem, rte };

std::string_view to_string(RunStatus s);
std::optional<RunStatus> run_status_from_string(std::string_view s);

struct ResourceLimits {
  double wall_seconds = 1800.0;
  std::uint64_t memory_bytes = 8'000'000'000ULL;

  /// 1800 s for mc/wmc, 3600 s for pmc; 8 GB.
  static ResourceLimits defaults_for(Track track);
};

enum class InputMode { argument, standard_input };

struct SolverCommand {
  std::string id;
  /// argv; "{instance}" and "{track}" tokens are substituted. In argument
  /// mode the instance path is appended when no "{instance}" token exists.
  std::vector<std::string> argv;
  InputMode input = InputMode::argument;
  /// Designated exact solver for resolving unknown reference counts.
  bool exact = false;
};

struct RunResult {
  std::string instance;
  std::string solver;
  Track track = Track::mc;
  RunStatus status = RunStatus::rte;
  double wall_seconds = 0.0;
  /// Exit code, or -signal when the child died from a signal.
  int exit_code = 0;
  std::uint64_t peak_rss_bytes = 0;
  std::optional<SolutionLine> solution;
  std::string output_path;
};

class SpawnFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::chrono::milliseconds poll_interval{100};
  /// Time between SIGTERM and SIGKILL when the wall limit is hit.
  std::chrono::milliseconds kill_grace{1000};
};

/// Runs one solver on one instance. Standard output goes to `output_path`,
/// standard error to `output_path + ".stderr"`.
RunResult run_solver(const SolverCommand& command, const std::string& instance_path, Track track,
                     const ResourceLimits& limits, const std::string& output_path, const RunOptions& options = {});

/// One benchmark per manifest line: `path track [reference_count]`.
/// Blank lines and lines starting with '#' are skipped.
struct ManifestEntry {
  std::string path;
  Track track = Track::mc;
  std::optional<Rational> reference;
};

std::vector<ManifestEntry> parse_manifest(std::string_view text);

struct BenchmarkConfig {
  std::vector<SolverCommand> solvers;
  /// Overrides of the per-track defaults.
  std::optional<double> wall_seconds;
  std::optional<std::uint64_t> memory_bytes;
  unsigned jobs = 1;
};

/// JSON: {"solvers": [{"id", "command": [...], "input": "argument"|"stdin",
/// "exact": bool}], "timeout": s, "memory": bytes, "jobs": k}.
BenchmarkConfig parse_benchmark_config(std::string_view json_text);

ResourceLimits limits_for(const BenchmarkConfig& config, Track track);

/// Runs every solver on every entry with up to config.jobs children at once.
/// Raw outputs land in `results_dir/raw/<solver>/`. Results are ordered by
/// entry, then solver, independent of scheduling.
std::vector<RunResult> run_benchmark(const std::vector<ManifestEntry>& entries, const BenchmarkConfig& config,
                                     const std::string& results_dir, const RunOptions& options = {});

std::string to_json_line(const RunResult& result);
RunResult run_result_from_json(std::string_view line);
std::vector<RunResult> read_results_jsonl(std::string_view text);

}  // namespace mcc::harness
