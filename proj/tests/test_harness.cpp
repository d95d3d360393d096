#include "mcc/harness/runner.hpp"
#include "mcc/harness/scoring.hpp"
#include "mcc/harness/selection.hpp"
#include "mcc/harness/tables.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include <csignal>
#include <unistd.h>

using namespace mcc;
using namespace mcc::harness;
namespace fs = std::filesystem;

namespace {

const std::string kStub = MCC_STUB_SOLVER;
const std::string kInstance = std::string(MCC_TEST_DATA_DIR) + "/worked_mc.mcc2020_cnf";

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("mcc_test_harness_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SolutionLine line(const std::string& text, Track track = Track::mc) { return parse_solution(text + "\n", track); }

ScoreRecord solved(const std::string& instance, const std::string& solver, double seconds,
                   std::optional<Accuracy> accuracy) {
  ScoreRecord r;
  r.instance = instance;
  r.solver = solver;
  r.status = RunStatus::solved;
  r.wall_seconds = seconds;
  r.accuracy = accuracy;
  return r;
}

ScoreRecord unknown(const std::string& instance, const std::string& solver, long value) {
  ScoreRecord r = solved(instance, solver, 1.0, Accuracy::unknown_ref);
  r.reported = line("s mc " + std::to_string(value));
  return r;
}

}  // namespace

TEST_CASE("score classes on an integer grid") {
  for (long x = 0; x <= 300; ++x) {
    CAPTURE(x);
    Accuracy a = score(Rational(100), Rational(x));
    CHECK((a == Accuracy::exact) == (x == 100));
    CHECK((a == Accuracy::within_1pct) == (x >= 99 && x <= 101 && x != 100));
    CHECK((a == Accuracy::within_10pct) == (x >= 90 && x <= 110 && (x < 99 || x > 101)));
    CHECK(is_credited(a) == (x >= 90 && x <= 110));
    CHECK(score(Rational(0), Rational(x)) == (x == 0 ? Accuracy::exact : Accuracy::outside));
  }
}

TEST_CASE("score boundaries are inclusive and exact") {
  CHECK(score(Rational(22), Rational(99, 5)) == Accuracy::within_10pct);
  CHECK(score(Rational(22), Rational(121, 5)) == Accuracy::within_10pct);
  CHECK(score(Rational(22), Rational(1979, 100)) == Accuracy::outside);
  CHECK(score(Rational(22), Rational(1089, 50)) == Accuracy::within_1pct);
  CHECK(score(std::nullopt, Rational(5)) == Accuracy::unknown_ref);
}

TEST_CASE("log10 reports") {
  auto wmc = [](const std::string& v) { return line("s log10-wmc " + v, Track::wmc); };
  CHECK(score(Rational(6), wmc("0.778")) == Accuracy::exact);
  CHECK(score(Rational(6), wmc("0.7782")) == Accuracy::exact);
  CHECK(score(Rational(6), wmc("0.78")) == Accuracy::exact);
  CHECK(score(Rational(6), wmc("0.779")) == Accuracy::within_1pct);
  CHECK(score(Rational(6), wmc("0.81")) == Accuracy::within_10pct);
  CHECK(score(Rational(6), wmc("0.82")) == Accuracy::outside);
  CHECK(score(Rational(0), wmc("-inf")) == Accuracy::exact);
  CHECK(score(Rational(6), wmc("-inf")) == Accuracy::outside);
  CHECK(score(Rational(0), wmc("0.5")) == Accuracy::outside);
  CHECK(score(Rational(6), line("s wmc 6.0", Track::wmc)) == Accuracy::exact);
}

TEST_CASE("score_runs classifies solved runs only") {
  RunResult ok{"a", "s1", Track::mc, RunStatus::solved, 1.0, 0, 0, line("s mc 22"), ""};
  RunResult tle{"a", "s2", Track::mc, RunStatus::tle, 2.0, -15, 0, std::nullopt, ""};
  RunResult other{"b", "s1", Track::mc, RunStatus::solved, 1.0, 0, 0, line("s mc 7"), ""};
  auto records = score_runs({ok, tle, other}, {{"a", Rational(22)}});
  CHECK(records[0].accuracy == Accuracy::exact);
  CHECK_FALSE(records[1].accuracy.has_value());
  CHECK(records[2].accuracy == Accuracy::unknown_ref);
}

TEST_CASE("unknown references") {
  SUBCASE("a sole reporter is credited") {
    auto out = resolve_unknown_refs({unknown("i", "a", 42)}, {});
    CHECK(out[0].accuracy == Accuracy::exact);
  }
  SUBCASE("strict majority around the median") {
    auto out = resolve_unknown_refs({unknown("i", "a", 100), unknown("i", "b", 500), unknown("i", "c", 105)}, {});
    CHECK(out[0].accuracy == Accuracy::within_10pct);
    CHECK(out[1].accuracy == Accuracy::outside);
    CHECK(out[2].accuracy == Accuracy::exact);
  }
  SUBCASE("an even number of reports uses the lower median") {
    auto out = resolve_unknown_refs(
        {unknown("i", "a", 100), unknown("i", "b", 104), unknown("i", "c", 108), unknown("i", "d", 900)}, {});
    CHECK(out[0].accuracy == Accuracy::within_10pct);
    CHECK(out[1].accuracy == Accuracy::exact);
    CHECK(out[2].accuracy == Accuracy::within_10pct);
    CHECK(out[3].accuracy == Accuracy::outside);
  }
  SUBCASE("no majority without an exact solver") {
    auto out = resolve_unknown_refs({unknown("i", "a", 100), unknown("i", "b", 500)}, {});
    CHECK(out[0].accuracy == Accuracy::unresolved);
    CHECK(out[1].accuracy == Accuracy::unresolved);
  }
  SUBCASE("an exact solver sets the consensus") {
    auto out = resolve_unknown_refs({unknown("i", "a", 100), unknown("i", "b", 100), unknown("i", "x", 500)}, {"x"});
    CHECK(out[0].accuracy == Accuracy::outside);
    CHECK(out[1].accuracy == Accuracy::outside);
    CHECK(out[2].accuracy == Accuracy::exact);
  }
  SUBCASE("instances are resolved independently and known ones are untouched") {
    auto known = solved("k", "a", 1.0, Accuracy::within_1pct);
    auto out = resolve_unknown_refs({unknown("i", "a", 1), known, unknown("j", "a", 2)}, {});
    CHECK(out[0].accuracy == Accuracy::exact);
    CHECK(out[1].accuracy == Accuracy::within_1pct);
    CHECK(out[2].accuracy == Accuracy::exact);
  }
}

TEST_CASE("rank counts columns and shares positions") {
  std::vector<ScoreRecord> records{
      solved("1", "a", 10.0, Accuracy::exact),
      solved("2", "a", 30.0, Accuracy::within_10pct),
      solved("3", "a", 20.0, Accuracy::outside),
      solved("1", "b", 5.0, Accuracy::within_1pct),
      solved("2", "b", 7.0, Accuracy::exact),
      solved("1", "c", 1.0, Accuracy::exact),
  };
  ScoreRecord t;
  t.instance = "3";
  t.solver = "b";
  t.status = RunStatus::tle;
  t.wall_seconds = 100.0;
  records.push_back(t);
  t.solver = "c";
  t.status = RunStatus::mem;
  records.push_back(t);
  t.status = RunStatus::rte;
  t.instance = "2";
  records.push_back(t);

  auto board = rank(records);
  REQUIRE(board.size() == 3);
  CHECK(board[0].solver == "a");
  CHECK(board[0].position == 1);
  CHECK(board[0].solved == 2);
  CHECK(board[0].within_1pct == 1);
  CHECK(board[0].exact == 1);
  CHECK(board[0].terminated == 3);
  CHECK(board[0].t_avg_seconds == doctest::Approx(20.0));
  CHECK(board[0].t_sum_hours == doctest::Approx(60.0 / 3600.0));
  CHECK(board[1].solver == "b");
  CHECK(board[1].position == 1);
  CHECK(board[1].within_1pct == 2);
  CHECK(board[1].tle == 1);
  CHECK(board[1].t_avg_seconds == doctest::Approx(6.0));
  CHECK(board[2].solver == "c");
  CHECK(board[2].position == 3);
  CHECK(board[2].mem == 1);
  CHECK(board[2].rte == 1);
}

TEST_CASE("hardness buckets") {
  CHECK(classify_hardness(0.0) == Hardness::very_easy);
  CHECK(classify_hardness(9.999) == Hardness::very_easy);
  CHECK(classify_hardness(10.0) == Hardness::easy);
  CHECK(classify_hardness(59.9) == Hardness::easy);
  CHECK(classify_hardness(60.0) == Hardness::medium);
  CHECK(classify_hardness(599.0) == Hardness::medium);
  CHECK(classify_hardness(600.0) == Hardness::hard);
  CHECK(classify_hardness(7199.0) == Hardness::hard);
  CHECK(classify_hardness(7200.0) == Hardness::unsolved_hard);
  CHECK(classify_hardness(std::nullopt) == Hardness::unsolved_hard);
  CHECK_THROWS_AS(classify_hardness(-1.0), std::invalid_argument);
}

namespace {

std::vector<PoolInstance> synthetic_pool(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PoolInstance> pool;
  auto add = [&](const std::string& prefix, int n, double lo, double hi) {
    for (int i = 0; i < n; ++i) {
      pool.push_back({prefix + std::to_string(i), std::uniform_real_distribution<double>(lo, hi)(rng)});
    }
  };
  add("ve", 40, 0, 10);
  add("e", 30, 10, 60);
  add("m", 150, 60, 600);
  add("h", 60, 600, 7200);
  for (int i = 0; i < 30; ++i) pool.push_back({"u" + std::to_string(i), std::nullopt});
  return pool;
}

}  // namespace

TEST_CASE("selection sizes, numbering and split") {
  auto pool = synthetic_pool(1);
  auto sel = select_instances(pool, {}, 42);
  REQUIRE(sel.public_instances.size() == 100);
  REQUIRE(sel.private_instances.size() == 100);
  std::map<Hardness, int> per_bucket;
  std::set<std::string> ids;
  for (const auto& s : sel.public_instances) {
    CHECK(s.number % 2 == 0);
    ++per_bucket[s.category];
    ids.insert(s.id);
  }
  for (const auto& s : sel.private_instances) {
    CHECK(s.number % 2 == 1);
    ++per_bucket[s.category];
    ids.insert(s.id);
  }
  CHECK(ids.size() == 200);
  CHECK(per_bucket[Hardness::very_easy] == 20);
  CHECK(per_bucket[Hardness::easy] == 20);
  CHECK(per_bucket[Hardness::medium] == 90);
  CHECK(per_bucket[Hardness::hard] + per_bucket[Hardness::unsolved_hard] == 70);

  // Numbers run 1..200 by bucket, then ascending runtime.
  std::vector<SelectedInstance> all = sel.private_instances;
  all.insert(all.end(), sel.public_instances.begin(), sel.public_instances.end());
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.number < b.number; });
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].number == i + 1);
  for (std::size_t i = 1; i < all.size(); ++i) {
    auto bucket = [](Hardness h) { return h == Hardness::unsolved_hard ? 3 : static_cast<int>(h); };
    int b0 = bucket(all[i - 1].category);
    int b1 = bucket(all[i].category);
    CHECK(b0 <= b1);
    if (b0 == b1 && all[i].runtime_seconds) CHECK(all[i - 1].runtime_seconds <= all[i].runtime_seconds);
  }
}

TEST_CASE("selection is deterministic in the seed and ignores pool order") {
  auto pool = synthetic_pool(2);
  auto a = select_instances(pool, {}, 7);
  auto shuffled = pool;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(3));
  auto b = select_instances(shuffled, {}, 7);
  auto ids = [](const Selection& s) {
    std::vector<std::string> out;
    for (const auto& x : s.public_instances) out.push_back(x.id);
    for (const auto& x : s.private_instances) out.push_back(x.id);
    return out;
  };
  CHECK(ids(a) == ids(b));
  CHECK(ids(a) != ids(select_instances(pool, {}, 8)));
}

TEST_CASE("selection reports short buckets") {
  auto pool = synthetic_pool(4);
  Distribution d;
  d.easy = 31;
  try {
    select_instances(pool, d, 1);
    FAIL("expected InsufficientPool");
  } catch (const InsufficientPool& e) {
    CHECK(e.bucket() == "easy");
    CHECK(e.need() == 31);
    CHECK(e.have() == 30);
  }
}

TEST_CASE("manifest and configuration parsing") {
  auto entries = parse_manifest("# header\n\na.mcc2020_cnf mc 22\nb.mcc2020_wcnf wmc 6.0\nc.mcc2020_pcnf pmc\n");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].reference == Rational(22));
  CHECK(entries[1].track == Track::wmc);
  CHECK_FALSE(entries[2].reference.has_value());
  CHECK_THROWS_AS(parse_manifest("a mcx 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_manifest("a mc abc\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_manifest("a mc 1 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_manifest("a\n"), std::invalid_argument);

  auto config = parse_benchmark_config(
      R"({"solvers": [{"id": "x", "command": ["x", "{instance}"], "exact": true},
                      {"id": "y", "command": ["y"], "input": "stdin"}], "timeout": 5, "jobs": 2})");
  REQUIRE(config.solvers.size() == 2);
  CHECK(config.solvers[0].exact);
  CHECK(config.solvers[1].input == InputMode::standard_input);
  CHECK(limits_for(config, Track::pmc).wall_seconds == 5.0);
  CHECK(limits_for(config, Track::mc).memory_bytes == 8'000'000'000ULL);
  CHECK(limits_for(BenchmarkConfig{}, Track::pmc).wall_seconds == 3600.0);
  CHECK(limits_for(BenchmarkConfig{}, Track::wmc).wall_seconds == 1800.0);
  CHECK_THROWS(parse_benchmark_config(R"({"solvers": [{"id": "x", "command": ["x"], "input": "pipe"}]})"));
  CHECK_THROWS(parse_benchmark_config(R"({"solvers": [], "timeout": 0})"));
}

TEST_CASE("result lines round-trip") {
  RunResult r{"inst", "solver", Track::wmc, RunStatus::solved, 1.5, 0, 1234, line("s wmc 6.0", Track::wmc), "o"};
  auto back = run_result_from_json(to_json_line(r));
  CHECK(back.instance == "inst");
  CHECK(back.status == RunStatus::solved);
  CHECK(back.solution->value == Rational(6));
  CHECK(back.peak_rss_bytes == 1234);
  RunResult t{"inst", "solver", Track::pmc, RunStatus::tle, 2.0, -9, 0, std::nullopt, ""};
  auto both = read_results_jsonl(to_json_line(r) + "\n\n" + to_json_line(t) + "\n");
  REQUIRE(both.size() == 2);
  CHECK(both[1].status == RunStatus::tle);
  CHECK_FALSE(both[1].solution.has_value());
}

TEST_CASE("leaderboard CSV round-trips and CDF is sorted") {
  Leaderboard board{{1, "a", 75, 70, 60, 80, 5, 1, 2, 132.0, 2.9}, {2, "b", 73, 73, 73, 73, 9, 0, 0, 40.0, 0.8}};
  auto csv = leaderboard_csv(board);
  CHECK(csv.rfind("POS,submission,#,#1,#0,n,TLE,MEM,RTE,t_avg[s],t_sum[h]\n", 0) == 0);
  CHECK(csv.find("1,a,75,70,60,80,5,1,2,132,2.9\n") != std::string::npos);
  CHECK(parse_leaderboard_csv(csv) == board);
  CHECK(leaderboard_json(board).find("\"solver\": \"b\"") != std::string::npos);

  std::vector<ScoreRecord> records{solved("1", "a", 3.0, Accuracy::exact), solved("2", "a", 1.0, Accuracy::exact),
                                   solved("3", "a", 2.0, Accuracy::outside), solved("1", "b", 9.0, Accuracy::exact)};
  auto cdf = cdf_table(records);
  CHECK(cdf == std::vector<CdfRow>{{"a", 1, 1.0}, {"a", 2, 3.0}, {"b", 1, 9.0}});
  CHECK(cdf_csv(cdf) == "solver,index,runtime_seconds\na,1,1.000\na,2,3.000\nb,1,9.000\n");
}

TEST_CASE("runner statuses") {
  auto dir = scratch_dir("runner");
  ResourceLimits limits{2.0, 100'000'000};
  auto run = [&](std::vector<std::string> argv, const std::string& name) {
    SolverCommand cmd{name, std::move(argv), InputMode::argument, false};
    return run_solver(cmd, kInstance, Track::mc, limits, (dir / (name + ".out")).string());
  };
  auto ok = run({kStub, "correct", "{track}", "22"}, "correct");
  CHECK(ok.status == RunStatus::solved);
  CHECK(ok.solution->value == Rational(22));
  CHECK(ok.exit_code == 0);

  auto crash = run({kStub, "crasher"}, "crasher");
  CHECK(crash.status == RunStatus::rte);
  CHECK(crash.exit_code == -SIGABRT);

  auto sleeper = run({kStub, "sleeper"}, "sleeper");
  CHECK(sleeper.status == RunStatus::tle);
  CHECK(sleeper.wall_seconds == doctest::Approx(2.0).epsilon(0.5));

  auto hog = run({kStub, "memory-hog"}, "hog");
  CHECK(hog.status == RunStatus::mem);
  CHECK(hog.peak_rss_bytes > 100'000'000ULL);

  CHECK_THROWS_AS(run({(dir / "no-such-solver").string()}, "missing"), SpawnFailure);
  fs::remove_all(dir);
}

TEST_CASE("runner feeds standard input") {
  auto dir = scratch_dir("stdin");
  SolverCommand cmd{"sh", {"/bin/sh", "-c", "grep -c ' 0$' | sed 's/^/s mc /'"}, InputMode::standard_input, false};
  auto r = run_solver(cmd, kInstance, Track::mc, {5.0, 1'000'000'000}, (dir / "out").string());
  CHECK(r.status == RunStatus::solved);
  CHECK(r.solution->value == Rational(4));
  fs::remove_all(dir);
}

TEST_CASE("run_benchmark orders results by entry then solver") {
  auto dir = scratch_dir("bench");
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < 4; ++i) entries.push_back({kInstance, Track::mc, Rational(22)});
  BenchmarkConfig config;
  config.solvers = {{"good", {kStub, "correct", "mc", "22"}, InputMode::argument, true},
                    {"bad", {kStub, "wrong-answer", "mc", "22"}, InputMode::argument, false}};
  config.jobs = 4;
  config.wall_seconds = 5.0;
  auto results = run_benchmark(entries, config, dir.string());
  REQUIRE(results.size() == 8);
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(results[i].solver == (i % 2 == 0 ? "good" : "bad"));
    CHECK(results[i].status == RunStatus::solved);
    CHECK(fs::exists(results[i].output_path));
  }
  CHECK(results[1].solution->value == Rational(45));
  fs::remove_all(dir);
}
