#include "mcc/harness/scoring.hpp"

#include <algorithm>

namespace mcc::harness {

std::string_view to_string(Accuracy a) {
  switch (a) {
    case Accuracy::exact: return "EXACT";
    case Accuracy::within_1pct: return "WITHIN_1PCT";
    case Accuracy::within_10pct: return "WITHIN_10PCT";
    case Accuracy::outside: return "OUTSIDE";
    case Accuracy::unknown_ref: return "UNKNOWN_REF";
    case Accuracy::unresolved: return "UNRESOLVED";
  }
  return "?";
}

std::optional<Accuracy> accuracy_from_string(std::string_view s) {
  for (auto a : {Accuracy::exact, Accuracy::within_1pct, Accuracy::within_10pct, Accuracy::outside,
                 Accuracy::unknown_ref, Accuracy::unresolved}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

namespace {

// Digits carried when mapping interval bounds to log10.
constexpr unsigned kLogDigits = 40;

bool within(const Rational& reference, const Rational& reported, long denominator) {
  Rational slack = abs(reference) / denominator;
  return reference - slack <= reported && reported <= reference + slack;
}

bool log_within(const Rational& reference, const Rational& log_reported, long denominator) {
  Rational slack = reference / denominator;
  Rational lower = log10_approx(reference - slack, kLogDigits);
  Rational upper = log10_approx(reference + slack, kLogDigits);
  return lower <= log_reported && log_reported <= upper;
}

unsigned fractional_digits(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return 0;
  auto end = text.find_first_of("eE", dot);
  if (end == std::string::npos) end = text.size();
  return static_cast<unsigned>(end - dot - 1);
}

Rational linear_value(const SolutionLine& line) {
  if (!line.log10) return line.value;
  if (line.negative_infinity) return Rational(0);
  return exp10_approx(line.value, kLogDigits);
}

}  // namespace

Accuracy score(const std::optional<Rational>& reference, const Rational& reported) {
  if (!reference) return Accuracy::unknown_ref;
  if (reported == *reference) return Accuracy::exact;
  if (within(*reference, reported, 100)) return Accuracy::within_1pct;
  if (within(*reference, reported, 10)) return Accuracy::within_10pct;
  return Accuracy::outside;
}

Accuracy score(const std::optional<Rational>& reference, const SolutionLine& reported) {
  if (!reported.log10) return score(reference, reported.value);
  if (!reference) return Accuracy::unknown_ref;
  if (sgn(*reference) == 0) return reported.negative_infinity ? Accuracy::exact : Accuracy::outside;
  if (reported.negative_infinity || sgn(*reference) < 0) return Accuracy::outside;

  unsigned digits = fractional_digits(reported.text);
  auto rounded = parse_decimal(format_fixed(log10_approx(*reference, digits + kLogDigits), digits));
  if (rounded && *rounded == reported.value) return Accuracy::exact;
  if (log_within(*reference, reported.value, 100)) return Accuracy::within_1pct;
  if (log_within(*reference, reported.value, 10)) return Accuracy::within_10pct;
  return Accuracy::outside;
}

std::vector<ScoreRecord> score_runs(const std::vector<RunResult>& runs,
                                    const std::map<std::string, std::optional<Rational>>& references) {
  std::vector<ScoreRecord> out;
  out.reserve(runs.size());
  for (const auto& run : runs) {
    ScoreRecord rec;
    rec.instance = run.instance;
    rec.solver = run.solver;
    rec.status = run.status;
    rec.wall_seconds = run.wall_seconds;
    if (auto it = references.find(run.instance); it != references.end()) rec.reference = it->second;
    if (run.status == RunStatus::solved && run.solution) {
      rec.reported = run.solution;
      rec.accuracy = score(rec.reference, *run.solution);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ScoreRecord> resolve_unknown_refs(std::vector<ScoreRecord> records,
                                              const std::set<std::string>& exact_solvers) {
  std::map<std::string, std::vector<std::size_t>> pending;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].accuracy == Accuracy::unknown_ref && records[i].reported) pending[records[i].instance].push_back(i);
  }
  auto lower_median = [](std::vector<Rational> values) {
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
  };

  for (const auto& [instance, indices] : pending) {
    std::vector<Rational> all;
    std::vector<Rational> from_exact;
    for (std::size_t i : indices) {
      Rational v = linear_value(*records[i].reported);
      all.push_back(v);
      if (exact_solvers.count(records[i].solver) != 0) from_exact.push_back(v);
    }
    const bool designated = !from_exact.empty();
    Rational consensus = designated ? lower_median(from_exact) : lower_median(all);

    std::size_t agreeing = 0;
    for (const auto& v : all) {
      if (is_credited(score(consensus, v))) ++agreeing;
    }
    const bool majority = 2 * agreeing > all.size();
    for (std::size_t i : indices) {
      auto& rec = records[i];
      if (!designated && !majority) {
        rec.accuracy = Accuracy::unresolved;
        continue;
      }
      rec.accuracy = score(consensus, linear_value(*rec.reported));
    }
  }
  return records;
}

Leaderboard rank(const std::vector<ScoreRecord>& records) {
  Leaderboard board;
  std::map<std::string, std::size_t> slot;
  std::vector<double> runtime_sums;
  for (const auto& rec : records) {
    auto [it, inserted] = slot.emplace(rec.solver, board.size());
    if (inserted) {
      LeaderboardEntry e;
      e.solver = rec.solver;
      board.push_back(e);
      runtime_sums.push_back(0.0);
    }
    auto& e = board[it->second];
    switch (rec.status) {
      case RunStatus::solved:
        ++e.terminated;
        runtime_sums[it->second] += rec.wall_seconds;
        break;
      case RunStatus::tle: ++e.tle; break;
      case RunStatus::mem: ++e.mem; break;
      case RunStatus::rte: ++e.rte; break;
    }
    if (rec.accuracy) {
      if (is_credited(*rec.accuracy)) ++e.solved;
      if (*rec.accuracy == Accuracy::exact || *rec.accuracy == Accuracy::within_1pct) ++e.within_1pct;
      if (*rec.accuracy == Accuracy::exact) ++e.exact;
    }
  }
  for (std::size_t i = 0; i < board.size(); ++i) {
    board[i].t_sum_hours = runtime_sums[i] / 3600.0;
    board[i].t_avg_seconds = board[i].terminated > 0 ? runtime_sums[i] / board[i].terminated : 0.0;
  }
  std::stable_sort(board.begin(), board.end(),
                   [](const LeaderboardEntry& a, const LeaderboardEntry& b) { return a.solved > b.solved; });
  for (std::size_t i = 0; i < board.size(); ++i) {
    board[i].position = (i > 0 && board[i].solved == board[i - 1].solved) ? board[i - 1].position
                                                                          : static_cast<int>(i + 1);
  }
  return board;
}

}  // namespace mcc::harness
