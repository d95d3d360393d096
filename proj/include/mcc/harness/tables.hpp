#pragma once

#include "mcc/harness/scoring.hpp"

#include <string>
#include <vector>

namespace mcc::harness {

/// Columns: POS,submission,#,#1,#0,n,TLE,MEM,RTE,t_avg[s],t_sum[h]. t_avg is
/// printed in whole seconds, t_sum in hours with one decimal.
std::string leaderboard_csv(const Leaderboard& board);
Leaderboard parse_leaderboard_csv(std::string_view text);
std::string leaderboard_json(const Leaderboard& board);

/// k-th fastest credited run of a solver.
struct CdfRow {
  std::string solver;
  int index = 0;
  double runtime_seconds = 0.0;

  friend bool operator==(const CdfRow&, const CdfRow&) = default;
};

std::vector<CdfRow> cdf_table(const std::vector<ScoreRecord>& records);
std::string cdf_csv(const std::vector<CdfRow>& rows);

std::string to_json_line(const ScoreRecord& record);

}  // namespace mcc::harness
