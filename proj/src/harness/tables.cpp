#include "mcc/harness/tables.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mcc::harness {

using nlohmann::json;

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

constexpr const char* kLeaderboardHeader = "POS,submission,#,#1,#0,n,TLE,MEM,RTE,t_avg[s],t_sum[h]";

}  // namespace

std::string leaderboard_csv(const Leaderboard& board) {
  std::ostringstream out;
  out << kLeaderboardHeader << '\n';
  for (const auto& e : board) {
    out << e.position << ',' << e.solver << ',' << e.solved << ',' << e.within_1pct << ',' << e.exact << ','
        << e.terminated << ',' << e.tle << ',' << e.mem << ',' << e.rte << ',' << fixed(e.t_avg_seconds, 0) << ','
        << fixed(e.t_sum_hours, 1) << '\n';
  }
  return out.str();
}

Leaderboard parse_leaderboard_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty leaderboard");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLeaderboardHeader) throw std::invalid_argument("unexpected leaderboard header: " + line);
  Leaderboard board;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_row(line);
    if (cells.size() != 11) throw std::invalid_argument("leaderboard row needs 11 cells: " + line);
    LeaderboardEntry e;
    e.position = std::stoi(cells[0]);
    e.solver = cells[1];
    e.solved = std::stoi(cells[2]);
    e.within_1pct = std::stoi(cells[3]);
    e.exact = std::stoi(cells[4]);
    e.terminated = std::stoi(cells[5]);
    e.tle = std::stoi(cells[6]);
    e.mem = std::stoi(cells[7]);
    e.rte = std::stoi(cells[8]);
    e.t_avg_seconds = std::stod(cells[9]);
    e.t_sum_hours = std::stod(cells[10]);
    board.push_back(std::move(e));
  }
  return board;
}

std::string leaderboard_json(const Leaderboard& board) {
  json rows = json::array();
  for (const auto& e : board) {
    rows.push_back({{"position", e.position},
                    {"solver", e.solver},
                    {"solved", e.solved},
                    {"within_1pct", e.within_1pct},
                    {"exact", e.exact},
                    {"terminated", e.terminated},
                    {"tle", e.tle},
                    {"mem", e.mem},
                    {"rte", e.rte},
                    {"t_avg_seconds", e.t_avg_seconds},
                    {"t_sum_hours", e.t_sum_hours}});
  }
  return rows.dump(2) + "\n";
}

std::vector<CdfRow> cdf_table(const std::vector<ScoreRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> times;
  for (const auto& rec : records) {
    if (!times.count(rec.solver)) {
      order.push_back(rec.solver);
      times[rec.solver];
    }
    if (rec.accuracy && is_credited(*rec.accuracy)) times[rec.solver].push_back(rec.wall_seconds);
  }
  std::vector<CdfRow> rows;
  for (const auto& solver : order) {
    auto& t = times[solver];
    std::sort(t.begin(), t.end());
    for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({solver, static_cast<int>(i + 1), t[i]});
  }
  return rows;
}

std::string cdf_csv(const std::vector<CdfRow>& rows) {
  std::ostringstream out;
  out << "solver,index,runtime_seconds\n";
  for (const auto& r : rows) out << r.solver << ',' << r.index << ',' << fixed(r.runtime_seconds, 3) << '\n';
  return out.str();
}

std::string to_json_line(const ScoreRecord& record) {
  json j;
  j["instance"] = record.instance;
  j["solver"] = record.solver;
  j["status"] = std::string(to_string(record.status));
  j["wall_seconds"] = record.wall_seconds;
  j["reference"] = record.reference ? json(record.reference->get_str()) : json(nullptr);
  if (record.reported) {
    j["reported"] = record.reported->text;
    j["log10"] = record.reported->log10;
  } else {
    j["reported"] = nullptr;
  }
  j["accuracy"] = record.accuracy ? json(std::string(to_string(*record.accuracy))) : json(nullptr);
  return j.dump();
}

}  // namespace mcc::harness
