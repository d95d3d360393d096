#pragma once

// Accuracy classification, crediting of instances without a reference
// count, and competition ranking.

#include "mcc/harness/runner.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mcc::harness {

/// A record carries the tightest class that applies.
enum class Accuracy {
  exact,
  within_1pct,
  within_10pct,
  outside,
  unknown_ref,
  /// Unknown reference and no consensus among the reporters.
  unresolved,
};

std::string_view to_string(Accuracy a);
std::optional<Accuracy> accuracy_from_string(std::string_view s);

/// Counts towards the solved column (#).
inline bool is_credited(Accuracy a) {
  return a == Accuracy::exact || a == Accuracy::within_1pct || a == Accuracy::within_10pct;
}

/// c_pre - c_pre/10 <= c_solver <= c_pre + c_pre/10 (and 1/100 for the 1%
/// class), evaluated exactly. Without a reference the class is unknown_ref.
Accuracy score(const std::optional<Rational>& reference, const Rational& reported);

/// As above; a log10 report is compared against log10 of the interval
/// bounds, and is exact when it equals log10(reference) rounded to the
/// number of digits the solver printed.
Accuracy score(const std::optional<Rational>& reference, const SolutionLine& reported);

struct ScoreRecord {
  std::string instance;
  std::string solver;
  RunStatus status = RunStatus::rte;
  double wall_seconds = 0.0;
  std::optional<Rational> reference;
  std::optional<SolutionLine> reported;
  /// Set for solved runs only.
  std::optional<Accuracy> accuracy;
};

/// Scores each run against the reference for its instance (missing key or
/// nullopt = unknown reference).
std::vector<ScoreRecord> score_runs(const std::vector<RunResult>& runs,
                                    const std::map<std::string, std::optional<Rational>>& references);

/// Credits instances without a reference count. A sole reporter is credited.
/// Otherwise the consensus is the median of the exact-designated solvers'
/// reports when any reported, else the (lower) median of all reports;
/// reports are classified against the consensus. Without an exact solver a
/// strict majority must agree with the consensus, else every report on that
/// instance is marked unresolved.
std::vector<ScoreRecord> resolve_unknown_refs(std::vector<ScoreRecord> records,
                                              const std::set<std::string>& exact_solvers);

struct LeaderboardEntry {
  /// Competition ranking: equal solved counts share a position, the next
  /// count takes (index of its first occupant + 1).
  int position = 0;
  std::string solver;
  int solved = 0;       // #
  int within_1pct = 0;  // #1
  int exact = 0;        // #0
  int terminated = 0;   // n: runs that printed a solution
  int tle = 0;
  int mem = 0;
  int rte = 0;
  /// Over the n runs that printed a solution.
  double t_avg_seconds = 0.0;
  double t_sum_hours = 0.0;

  friend bool operator==(const LeaderboardEntry&, const LeaderboardEntry&) = default;
};

using Leaderboard = std::vector<LeaderboardEntry>;

/// Orders by # descending; runtime is reported but does not break ties (ties
/// keep first-appearance order of the solver in `records`).
Leaderboard rank(const std::vector<ScoreRecord>& records);

}  // namespace mcc::harness
