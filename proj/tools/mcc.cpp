// mcc: model counting toolkit command-line entry point.
//
//   mcc count   FILE            exact count, one "s" line
//   mcc oracle  FILE            brute-force count for small instances
//   mcc verify  FILE CLAIM      accuracy class of a claimed count
//   mcc run     MANIFEST        run solvers under resource limits
//   mcc score   RESULTS         classify runs, write leaderboard and CDF
//   mcc select  POOL            stratified public/private selection
//   mcc convert FILE            canonical re-serialization

#include "mcc/counter.hpp"
#include "mcc/formats.hpp"
#include "mcc/harness/runner.hpp"
#include "mcc/harness/scoring.hpp"
#include "mcc/harness/selection.hpp"
#include "mcc/harness/tables.hpp"
#include "mcc/oracle.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <new>
#include <sstream>
#include <thread>

#include <pthread.h>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace mcc;
using namespace mcc::harness;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRejected = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  std::ostringstream os;
  if (path == "-") {
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

Track resolve_track(const std::string& path, const std::string& flag) {
  if (!flag.empty()) {
    auto t = track_from_string(flag);
    if (!t) throw UsageError("unknown track '" + flag + "' (mc, wmc, pmc)");
    return *t;
  }
  if (path == "-") throw UsageError("--track is required when reading standard input");
  auto t = track_from_path(path);
  if (!t) throw UsageError("cannot infer track from '" + path + "'; pass --track");
  return *t;
}

// A parsed instance of any track, reduced to what the counters consume.
struct Instance {
  Track track = Track::mc;
  Formula formula;
  WeightFunction weights{0};
  ProjectionSet projection;
};

Instance load_instance(const std::string& path, Track track, bool strict) {
  std::vector<std::string> warnings;
  ParseOptions options{strict, &warnings};
  std::string text = read_input(path);
  Instance inst;
  inst.track = track;
  switch (track) {
    case Track::mc:
      inst.formula = to_formula(parse_mc(text, options));
      break;
    case Track::wmc: {
      auto doc = parse_wmc(text, options);
      inst.formula = to_formula(doc.base);
      inst.weights = WeightFunction::from_document(doc);
      break;
    }
    case Track::pmc: {
      auto doc = parse_pmc(text, options);
      inst.formula = to_formula(doc.base);
      inst.projection = doc.projection_vars;
      break;
    }
  }
  if (inst.track != Track::wmc) inst.weights = WeightFunction(inst.formula.num_vars);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return inst;
}

void print_stats(const SolverStats& s) {
  std::cout << "c decisions " << s.decisions << '\n'
            << "c propagations " << s.propagations << '\n'
            << "c cache_hits " << s.cache_hits << '\n'
            << "c cache_misses " << s.cache_misses << '\n'
            << "c cache_evictions " << s.cache_evictions << '\n'
            << "c cache_checks " << s.cache_checks << '\n'
            << "c peak_components " << s.peak_components << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", s.wall_seconds);
  std::cout << "c wall_seconds " << buf << '\n';
}

// Termination signals are taken synchronously by a watcher thread. The
// watcher raises the interrupt flag, and if the search has not returned
// within the grace period it exits the process itself.
class SignalWatcher {
 public:
  SignalWatcher() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGTERM);
    sigaddset(&set_, SIGINT);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    thread_ = std::thread([this] { watch(); });
  }

  ~SignalWatcher() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      done_ = true;
    }
    cv_.notify_all();
    // Wakes sigwait; the signal stays blocked and is discarded on exit.
    pthread_kill(thread_.native_handle(), SIGINT);
    thread_.join();
  }

  const std::atomic<bool>* flag() const { return &interrupted_; }

 private:
  void watch() {
    int sig = 0;
    sigwait(&set_, &sig);
    std::unique_lock<std::mutex> lock(mutex_);
    if (done_) return;
    interrupted_ = true;
    if (!cv_.wait_for(lock, std::chrono::milliseconds(800), [this] { return done_; })) {
      static const char msg[] = "c interrupted before the search stopped\n";
      ssize_t ignored = ::write(STDOUT_FILENO, msg, sizeof msg - 1);
      (void)ignored;
      ::_exit(kExitResourceAbort);
    }
  }

  sigset_t set_;
  std::atomic<bool> interrupted_{false};
  std::mutex mutex_;
  std::condition_variable cv_;
  bool done_ = false;
  std::thread thread_;
};

struct CountFlags {
  std::string file;
  std::string track;
  double timeout = 0;
  std::size_t memory = 0;
  std::uint64_t seed = 0;
  unsigned precision = 20;
  bool log10 = false;
  bool strict = false;
  std::string heuristic = "max-occurrence";
  bool no_cache = false;
};

int cmd_count(const CountFlags& f) {
  SignalWatcher watcher;
  Track track = resolve_track(f.file, f.track);
  Instance inst = load_instance(f.file, track, f.strict);

  SolverConfig config;
  auto h = heuristic_from_string(f.heuristic);
  if (!h) throw UsageError("unknown heuristic '" + f.heuristic + "'");
  config.heuristic = *h;
  config.use_cache = !f.no_cache;
  if (f.memory > 0) config.cache_capacity_bytes = f.memory;
  config.seed = f.seed;
  config.precision = f.precision;
  config.log10 = f.log10;
  if (f.timeout > 0) {
    config.deadline = std::chrono::steady_clock::now() +
                      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(f.timeout));
  }
  config.interrupt = watcher.flag();

  SolverStats stats;
  try {
    Rational value;
    switch (track) {
      case Track::mc: value = Rational(count(inst.formula, config, &stats)); break;
      case Track::wmc: value = wcount(inst.formula, inst.weights, config, &stats); break;
      case Track::pmc: value = Rational(pcount(inst.formula, inst.projection, config, &stats)); break;
    }
    print_stats(stats);
    std::cout << render_count(value, track, config) << '\n' << std::flush;
    return kExitSolved;
  } catch (const ResourceExhausted& e) {
    std::cout << "c aborted: " << e.what() << '\n';
    print_stats(stats);
    std::cout << std::flush;
    return kExitResourceAbort;
  } catch (const std::bad_alloc&) {
    std::cout << "c aborted: out of memory\n";
    print_stats(stats);
    std::cout << std::flush;
    return kExitResourceAbort;
  }
}

struct OracleFlags {
  std::string file;
  std::string track;
  std::string method = "enum";
  unsigned max_vars = 24;
  std::size_t max_clauses = 20;
  bool strict = false;
};

Rational oracle_value(const Instance& inst, const std::string& method, const oracle::OracleLimit& limit) {
  if (method == "ie") {
    if (inst.track != Track::mc) throw UsageError("inclusion-exclusion counts the mc track only");
    return Rational(oracle::ie_count(inst.formula, limit));
  }
  if (method != "enum") throw UsageError("unknown oracle method '" + method + "' (enum, ie)");
  switch (inst.track) {
    case Track::mc: return Rational(oracle::enum_count(inst.formula, limit));
    case Track::wmc: return oracle::enum_wcount(inst.formula, inst.weights, limit);
    case Track::pmc: return Rational(oracle::enum_pcount(inst.formula, inst.projection, limit));
  }
  return Rational(0);
}

int cmd_oracle(const OracleFlags& f) {
  Track track = resolve_track(f.file, f.track);
  Instance inst = load_instance(f.file, track, f.strict);
  oracle::OracleLimit limit{f.max_vars, f.max_clauses};
  SolverConfig render;
  render.precision = 30;
  std::cout << render_count(oracle_value(inst, f.method, limit), track, render) << '\n';
  return kExitSolved;
}

struct VerifyFlags {
  std::string file;
  std::string claim;
  std::string track;
  std::string reference;
  bool log10 = false;
  bool strict = false;
  unsigned max_vars = 24;
};

int cmd_verify(const VerifyFlags& f) {
  Track track = resolve_track(f.file, f.track);
  std::optional<Rational> reference;
  if (!f.reference.empty()) {
    reference = parse_decimal(f.reference);
    if (!reference) throw UsageError("bad reference count '" + f.reference + "'");
  } else {
    Instance inst = load_instance(f.file, track, f.strict);
    reference = oracle_value(inst, "enum", oracle::OracleLimit{f.max_vars, std::size_t{20}});
  }
  std::string tag = f.log10 ? "log10-wmc" : std::string(to_string(track));
  if (f.log10 && track != Track::wmc) throw UsageError("--log10 applies to the wmc track only");
  SolutionLine claimed;
  try {
    claimed = parse_solution("s " + tag + " " + f.claim + "\n", track);
  } catch (const FormatError&) {
    throw UsageError("bad claimed value '" + f.claim + "'");
  }
  Accuracy a = score(reference, claimed);
  std::cout << to_string(a) << '\n';
  return is_credited(a) ? 0 : kExitRejected;
}

struct RunFlags {
  std::string manifest;
  std::string config;
  std::string out;
  double timeout = 0;
  std::uint64_t memory = 0;
  unsigned jobs = 0;
};

int cmd_run(const RunFlags& f) {
  auto entries = parse_manifest(read_input(f.manifest));
  auto config = parse_benchmark_config(read_input(f.config));
  if (f.timeout > 0) config.wall_seconds = f.timeout;
  if (f.memory > 0) config.memory_bytes = f.memory;
  if (f.jobs > 0) config.jobs = f.jobs;
  fs::create_directories(f.out);
  auto results = run_benchmark(entries, config, f.out);
  std::ofstream out(fs::path(f.out) / "results.jsonl");
  for (const auto& r : results) {
    out << to_json_line(r) << '\n';
    std::cout << "c " << r.solver << ' ' << r.instance << ' ' << to_string(r.status) << '\n';
  }
  return 0;
}

struct ScoreFlags {
  std::string results;
  std::string manifest;
  std::string config;
  std::string out;
};

int cmd_score(const ScoreFlags& f) {
  auto runs = read_results_jsonl(read_input(f.results));
  std::map<std::string, std::optional<Rational>> references;
  for (const auto& e : parse_manifest(read_input(f.manifest))) references[e.path] = e.reference;
  std::set<std::string> exact_solvers;
  if (!f.config.empty()) {
    for (const auto& s : parse_benchmark_config(read_input(f.config)).solvers) {
      if (s.exact) exact_solvers.insert(s.id);
    }
  }
  auto records = resolve_unknown_refs(score_runs(runs, references), exact_solvers);
  auto board = rank(records);

  fs::create_directories(f.out);
  std::ofstream scores(fs::path(f.out) / "scores.jsonl");
  for (const auto& r : records) scores << to_json_line(r) << '\n';
  write_output((fs::path(f.out) / "leaderboard.csv").string(), leaderboard_csv(board));
  write_output((fs::path(f.out) / "leaderboard.json").string(), leaderboard_json(board));
  write_output((fs::path(f.out) / "cdf.csv").string(), cdf_csv(cdf_table(records)));
  std::cout << leaderboard_csv(board);
  return 0;
}

struct SelectFlags {
  std::string pool;
  std::string out;
  std::uint64_t seed = 0;
  Distribution distribution;
};

std::vector<PoolInstance> parse_pool(std::string_view text) {
  std::vector<PoolInstance> pool;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id;
    std::string runtime;
    if (!(fields >> id) || id.front() == '#') continue;
    if (!(fields >> runtime)) throw UsageError("pool line " + std::to_string(line_no) + ": missing runtime");
    PoolInstance p{id, std::nullopt};
    if (runtime != "none") {
      try {
        std::size_t used = 0;
        p.runtime_seconds = std::stod(runtime, &used);
        if (used != runtime.size()) throw std::invalid_argument(runtime);
      } catch (const std::exception&) {
        throw UsageError("pool line " + std::to_string(line_no) + ": bad runtime '" + runtime + "'");
      }
    }
    pool.push_back(std::move(p));
  }
  return pool;
}

std::string selection_text(const std::vector<SelectedInstance>& list) {
  std::ostringstream out;
  for (const auto& s : list) {
    out << s.number << ' ' << s.id << ' ' << to_string(s.category) << ' ';
    if (s.runtime_seconds) {
      out << *s.runtime_seconds;
    } else {
      out << "none";
    }
    out << '\n';
  }
  return out.str();
}

int cmd_select(const SelectFlags& f) {
  auto selection = select_instances(parse_pool(read_input(f.pool)), f.distribution, f.seed);
  fs::create_directories(f.out);
  write_output((fs::path(f.out) / "public.txt").string(), selection_text(selection.public_instances));
  write_output((fs::path(f.out) / "private.txt").string(), selection_text(selection.private_instances));
  std::cout << "c public " << selection.public_instances.size() << '\n'
            << "c private " << selection.private_instances.size() << '\n';
  return 0;
}

struct ConvertFlags {
  std::string file;
  std::string track;
  std::string out;
  bool strict = false;
};

int cmd_convert(const ConvertFlags& f) {
  Track track = resolve_track(f.file, f.track);
  std::vector<std::string> warnings;
  ParseOptions options{f.strict, &warnings};
  std::string text = read_input(f.file);
  std::string canonical;
  switch (track) {
    case Track::mc: canonical = serialize(parse_mc(text, options)); break;
    case Track::wmc: canonical = serialize(parse_wmc(text, options)); break;
    case Track::pmc: canonical = serialize(parse_pmc(text, options)); break;
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  write_output(f.out, canonical);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact, weighted and projected model counting toolkit"};
  app.require_subcommand(1);

  CountFlags count_flags;
  auto* count_cmd = app.add_subcommand("count", "Count models of a .mcc2020_cnf/_wcnf/_pcnf instance");
  count_cmd->add_option("file", count_flags.file, "Instance path, or - for standard input")->required();
  count_cmd->add_option("--track", count_flags.track, "mc, wmc or pmc (default: from extension)");
  count_cmd->add_option("--timeout", count_flags.timeout, "Wall-clock limit in seconds");
  count_cmd->add_option("--memory", count_flags.memory, "Component cache budget in bytes");
  count_cmd->add_option("--seed", count_flags.seed, "Seed for the random heuristic");
  count_cmd->add_option("--precision", count_flags.precision, "Decimal digits for weighted counts");
  count_cmd->add_flag("--log10", count_flags.log10, "Print s log10-wmc");
  count_cmd->add_flag("--strict", count_flags.strict, "Strict input parsing");
  count_cmd->add_option("--heuristic", count_flags.heuristic, "max-occurrence, min-index or random");
  count_cmd->add_flag("--no-cache", count_flags.no_cache, "Disable component caching");

  OracleFlags oracle_flags;
  auto* oracle_cmd = app.add_subcommand("oracle", "Count by enumeration or inclusion-exclusion");
  oracle_cmd->add_option("file", oracle_flags.file)->required();
  oracle_cmd->add_option("--track", oracle_flags.track);
  oracle_cmd->add_option("--method", oracle_flags.method, "enum or ie");
  oracle_cmd->add_option("--max-vars", oracle_flags.max_vars);
  oracle_cmd->add_option("--max-clauses", oracle_flags.max_clauses);
  oracle_cmd->add_flag("--strict", oracle_flags.strict);

  VerifyFlags verify_flags;
  auto* verify_cmd = app.add_subcommand("verify", "Classify a claimed count; exit 0 iff within 10%");
  verify_cmd->add_option("file", verify_flags.file)->required();
  verify_cmd->add_option("claim", verify_flags.claim)->required();
  verify_cmd->add_option("--track", verify_flags.track);
  verify_cmd->add_option("--reference", verify_flags.reference, "Reference count (skips the oracle)");
  verify_cmd->add_flag("--log10", verify_flags.log10, "The claim is a log10 weighted count");
  verify_cmd->add_flag("--strict", verify_flags.strict);
  verify_cmd->add_option("--max-vars", verify_flags.max_vars);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run solvers over a manifest");
  run_cmd->add_option("manifest", run_flags.manifest)->required();
  run_cmd->add_option("--config", run_flags.config, "Solver configuration (JSON)")->required();
  run_cmd->add_option("--out", run_flags.out, "Results directory")->required();
  run_cmd->add_option("--timeout", run_flags.timeout, "Wall-clock limit per run in seconds");
  run_cmd->add_option("--memory", run_flags.memory, "Memory limit per run in bytes");
  run_cmd->add_option("--jobs", run_flags.jobs, "Concurrent runs");

  ScoreFlags score_flags;
  auto* score_cmd = app.add_subcommand("score", "Score results and build the leaderboard");
  score_cmd->add_option("results", score_flags.results, "results.jsonl")->required();
  score_cmd->add_option("--manifest", score_flags.manifest, "Manifest with reference counts")->required();
  score_cmd->add_option("--config", score_flags.config, "Solver configuration naming exact solvers");
  score_cmd->add_option("--out", score_flags.out, "Output directory")->required();

  SelectFlags select_flags;
  auto* select_cmd = app.add_subcommand("select", "Select public/private instances from a pool");
  select_cmd->add_option("pool", select_flags.pool, "Lines of 'id runtime_seconds|none'")->required();
  select_cmd->add_option("--seed", select_flags.seed)->required();
  select_cmd->add_option("--out", select_flags.out, "Output directory")->required();
  select_cmd->add_option("--very-easy", select_flags.distribution.very_easy);
  select_cmd->add_option("--easy", select_flags.distribution.easy);
  select_cmd->add_option("--medium", select_flags.distribution.medium);
  select_cmd->add_option("--hard", select_flags.distribution.hard);

  ConvertFlags convert_flags;
  auto* convert_cmd = app.add_subcommand("convert", "Re-serialize an instance canonically");
  convert_cmd->add_option("file", convert_flags.file)->required();
  convert_cmd->add_option("--track", convert_flags.track);
  convert_cmd->add_option("--out", convert_flags.out, "Output path (default: standard output)");
  convert_cmd->add_flag("--strict", convert_flags.strict);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*count_cmd) return cmd_count(count_flags);
    if (*oracle_cmd) return cmd_oracle(oracle_flags);
    if (*verify_cmd) return cmd_verify(verify_flags);
    if (*run_cmd) return cmd_run(run_flags);
    if (*score_cmd) return cmd_score(score_flags);
    if (*select_cmd) return cmd_select(select_flags);
    if (*convert_cmd) return cmd_convert(convert_flags);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
