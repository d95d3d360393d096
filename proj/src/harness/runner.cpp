#include "mcc/harness/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <dirent.h>
#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace mcc::harness {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::solved: return "SOLVED";
    case RunStatus::tle: return "TLE";
    case RunStatus::mem: return "MEM";
    case RunStatus::rte: return "RTE";
  }
  return "?";
}

std::optional<RunStatus> run_status_from_string(std::string_view s) {
  if (s == "SOLVED") return RunStatus::solved;
  if (s == "TLE") return RunStatus::tle;
  if (s == "MEM") return RunStatus::mem;
  if (s == "RTE") return RunStatus::rte;
  return std::nullopt;
}

ResourceLimits ResourceLimits::defaults_for(Track track) {
  ResourceLimits limits;
  limits.wall_seconds = track == Track::pmc ? 3600.0 : 1800.0;
  limits.memory_bytes = 8'000'000'000ULL;
  return limits;
}

namespace {

using Clock = std::chrono::steady_clock;

class FileDescriptor {
 public:
  explicit FileDescriptor(int fd = -1) : fd_(fd) {}
  ~FileDescriptor() { reset(); }
  FileDescriptor(const FileDescriptor&) = delete;
  FileDescriptor& operator=(const FileDescriptor&) = delete;
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

std::string errno_text(const std::string& what) { return what + ": " + std::strerror(errno); }

// Sum of resident set sizes of all processes in process group `pgid`.
std::uint64_t group_rss_bytes(pid_t pgid) {
  static const long page = ::sysconf(_SC_PAGESIZE);
  std::uint64_t total = 0;
  DIR* proc = ::opendir("/proc");
  if (proc == nullptr) return 0;
  while (dirent* entry = ::readdir(proc)) {
    const char* name = entry->d_name;
    if (name[0] < '0' || name[0] > '9') continue;
    std::ifstream stat(std::string("/proc/") + name + "/stat");
    std::string line;
    if (!std::getline(stat, line)) continue;
    auto close_paren = line.rfind(')');
    if (close_paren == std::string::npos) continue;
    std::istringstream fields(line.substr(close_paren + 2));
    // After "pid (comm) ": state ppid pgrp session tty tpgid flags minflt
    // cminflt majflt cmajflt utime stime cutime cstime priority nice
    // num_threads itrealvalue starttime vsize rss
    std::string state;
    long long ppid = 0;
    long long pgrp = 0;
    fields >> state >> ppid >> pgrp;
    if (pgrp != pgid) continue;
    std::string skip;
    for (int i = 0; i < 18; ++i) fields >> skip;
    long long rss_pages = 0;
    fields >> rss_pages;
    if (rss_pages > 0) total += static_cast<std::uint64_t>(rss_pages) * static_cast<std::uint64_t>(page);
  }
  ::closedir(proc);
  return total;
}

std::vector<std::string> expand_argv(const SolverCommand& command, const std::string& instance, Track track) {
  std::vector<std::string> argv;
  bool placed = false;
  for (const auto& arg : command.argv) {
    if (arg == "{instance}") {
      argv.push_back(instance);
      placed = true;
    } else if (arg == "{track}") {
      argv.emplace_back(to_string(track));
    } else {
      argv.push_back(arg);
    }
  }
  if (!placed && command.input == InputMode::argument) argv.push_back(instance);
  return argv;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

RunResult run_solver(const SolverCommand& command, const std::string& instance_path, Track track,
                     const ResourceLimits& limits, const std::string& output_path, const RunOptions& options) {
  if (command.argv.empty()) throw SpawnFailure("solver '" + command.id + "' has an empty command");
  if (!fs::exists(instance_path)) throw SpawnFailure("instance not found: " + instance_path);

  RunResult result;
  result.instance = instance_path;
  result.solver = command.id;
  result.track = track;
  result.output_path = output_path;

  auto argv_strings = expand_argv(command, instance_path, track);
  std::vector<char*> argv;
  for (auto& s : argv_strings) argv.push_back(s.data());
  argv.push_back(nullptr);

  FileDescriptor out_fd(::open(output_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
  if (out_fd.get() < 0) throw SpawnFailure(errno_text("open " + output_path));
  std::string err_path = output_path + ".stderr";
  FileDescriptor err_fd(::open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
  if (err_fd.get() < 0) throw SpawnFailure(errno_text("open " + err_path));
  const char* in_path = command.input == InputMode::standard_input ? instance_path.c_str() : "/dev/null";
  FileDescriptor in_fd(::open(in_path, O_RDONLY | O_CLOEXEC));
  if (in_fd.get() < 0) throw SpawnFailure(errno_text(std::string("open ") + in_path));

  // exec failures are reported through a close-on-exec pipe.
  int status_pipe[2];
  if (::pipe2(status_pipe, O_CLOEXEC) != 0) throw SpawnFailure(errno_text("pipe"));
  FileDescriptor pipe_read(status_pipe[0]);
  FileDescriptor pipe_write(status_pipe[1]);

  auto start = Clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw SpawnFailure(errno_text("fork"));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_fd.get(), STDIN_FILENO);
    ::dup2(out_fd.get(), STDOUT_FILENO);
    ::dup2(err_fd.get(), STDERR_FILENO);
    ::execvp(argv[0], argv.data());
    int err = errno;
    ssize_t ignored = ::write(pipe_write.get(), &err, sizeof(err));
    (void)ignored;
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  pipe_write.reset();
  int exec_errno = 0;
  if (::read(pipe_read.get(), &exec_errno, sizeof(exec_errno)) == static_cast<ssize_t>(sizeof(exec_errno))) {
    ::waitpid(pid, nullptr, 0);
    errno = exec_errno;
    throw SpawnFailure(errno_text("exec " + argv_strings.front()));
  }

  enum class Verdict { none, time, memory } verdict = Verdict::none;
  int wait_status = 0;
  const auto wall_limit = std::chrono::duration<double>(limits.wall_seconds);
  while (true) {
    pid_t r = ::waitpid(pid, &wait_status, WNOHANG);
    if (r == pid) break;
    std::uint64_t rss = group_rss_bytes(pid);
    result.peak_rss_bytes = std::max(result.peak_rss_bytes, rss);
    if (rss > limits.memory_bytes) {
      verdict = Verdict::memory;
      ::killpg(pid, SIGKILL);
      ::waitpid(pid, &wait_status, 0);
      break;
    }
    if (Clock::now() - start >= wall_limit) {
      verdict = Verdict::time;
      ::killpg(pid, SIGTERM);
      auto grace_end = Clock::now() + options.kill_grace;
      bool exited = false;
      while (Clock::now() < grace_end) {
        if (::waitpid(pid, &wait_status, WNOHANG) == pid) {
          exited = true;
          break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      if (!exited) {
        ::killpg(pid, SIGKILL);
        ::waitpid(pid, &wait_status, 0);
      }
      break;
    }
    std::this_thread::sleep_for(options.poll_interval);
  }
  // Nothing of the solver may outlive the run.
  ::killpg(pid, SIGKILL);
  result.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  if (WIFEXITED(wait_status)) {
    result.exit_code = WEXITSTATUS(wait_status);
  } else if (WIFSIGNALED(wait_status)) {
    result.exit_code = -WTERMSIG(wait_status);
  }

  if (verdict == Verdict::memory) {
    result.status = RunStatus::mem;
    return result;
  }
  if (verdict == Verdict::time) {
    result.status = RunStatus::tle;
    return result;
  }
  try {
    result.solution = parse_solution(read_file(output_path), track);
    result.status = RunStatus::solved;
  } catch (const FormatError&) {
    result.status = RunStatus::rte;
  }
  return result;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string path;
    std::string track_text;
    std::string reference;
    if (!(fields >> path) || path.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      return std::invalid_argument("manifest line " + std::to_string(line_no) + ": " + why);
    };
    if (!(fields >> track_text)) throw fail("missing track");
    auto track = track_from_string(track_text);
    if (!track) throw fail("unknown track '" + track_text + "'");
    ManifestEntry entry{path, *track, std::nullopt};
    if (fields >> reference) {
      auto value = parse_decimal(reference);
      if (!value || sgn(*value) < 0) throw fail("bad reference count '" + reference + "'");
      entry.reference = *value;
    }
    std::string extra;
    if (fields >> extra) throw fail("trailing field '" + extra + "'");
    entries.push_back(std::move(entry));
  }
  return entries;
}

BenchmarkConfig parse_benchmark_config(std::string_view json_text) {
  json doc = json::parse(json_text);
  BenchmarkConfig config;
  for (const auto& s : doc.at("solvers")) {
    SolverCommand cmd;
    cmd.id = s.at("id").get<std::string>();
    cmd.argv = s.at("command").get<std::vector<std::string>>();
    std::string input = s.value("input", std::string("argument"));
    if (input == "stdin") {
      cmd.input = InputMode::standard_input;
    } else if (input != "argument") {
      throw std::invalid_argument("solver '" + cmd.id + "': input must be 'argument' or 'stdin'");
    }
    cmd.exact = s.value("exact", false);
    config.solvers.push_back(std::move(cmd));
  }
  if (doc.contains("timeout")) config.wall_seconds = doc["timeout"].get<double>();
  if (doc.contains("memory")) config.memory_bytes = doc["memory"].get<std::uint64_t>();
  config.jobs = doc.value("jobs", 1u);
  if (config.jobs == 0) config.jobs = 1;
  if (config.wall_seconds && *config.wall_seconds <= 0) throw std::invalid_argument("timeout must be positive");
  if (config.memory_bytes && *config.memory_bytes == 0) throw std::invalid_argument("memory must be positive");
  return config;
}

ResourceLimits limits_for(const BenchmarkConfig& config, Track track) {
  ResourceLimits limits = ResourceLimits::defaults_for(track);
  if (config.wall_seconds) limits.wall_seconds = *config.wall_seconds;
  if (config.memory_bytes) limits.memory_bytes = *config.memory_bytes;
  return limits;
}

std::vector<RunResult> run_benchmark(const std::vector<ManifestEntry>& entries, const BenchmarkConfig& config,
                                     const std::string& results_dir, const RunOptions& options) {
  struct Task {
    const ManifestEntry* entry;
    const SolverCommand* solver;
    std::string output_path;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (const auto& solver : config.solvers) {
      fs::path dir = fs::path(results_dir) / "raw" / solver.id;
      fs::create_directories(dir);
      std::ostringstream name;
      name << i << '_' << fs::path(entries[i].path).filename().string() << ".out";
      tasks.push_back(Task{&entries[i], &solver, (dir / name.str()).string()});
    }
  }

  std::vector<RunResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      try {
        results[i] = run_solver(*t.solver, t.entry->path, t.entry->track, limits_for(config, t.entry->track),
                                t.output_path, options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

std::string to_json_line(const RunResult& r) {
  json j;
  j["instance"] = r.instance;
  j["solver"] = r.solver;
  j["track"] = std::string(to_string(r.track));
  j["status"] = std::string(to_string(r.status));
  j["wall_seconds"] = r.wall_seconds;
  j["exit_code"] = r.exit_code;
  j["peak_rss_bytes"] = r.peak_rss_bytes;
  j["output_path"] = r.output_path;
  if (r.solution) {
    j["solution"] = {{"log10", r.solution->log10}, {"value", r.solution->text}};
  } else {
    j["solution"] = nullptr;
  }
  return j.dump();
}

RunResult run_result_from_json(std::string_view line) {
  json j = json::parse(line);
  RunResult r;
  r.instance = j.at("instance").get<std::string>();
  r.solver = j.at("solver").get<std::string>();
  auto track = track_from_string(j.at("track").get<std::string>());
  auto status = run_status_from_string(j.at("status").get<std::string>());
  if (!track || !status) throw std::invalid_argument("bad track or status in result line");
  r.track = *track;
  r.status = *status;
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.exit_code = j.value("exit_code", 0);
  r.peak_rss_bytes = j.value("peak_rss_bytes", std::uint64_t{0});
  r.output_path = j.value("output_path", std::string());
  if (j.contains("solution") && !j["solution"].is_null()) {
    const auto& s = j["solution"];
    std::string tag = s.value("log10", false) ? "log10-wmc" : std::string(to_string(r.track));
    r.solution = parse_solution("s " + tag + " " + s.at("value").get<std::string>() + "\n", r.track);
  }
  if (r.status == RunStatus::solved && !r.solution) throw std::invalid_argument("SOLVED result without a solution");
  return r;
}

std::vector<RunResult> read_results_jsonl(std::string_view text) {
  std::vector<RunResult> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(run_result_from_json(line));
  }
  return out;
}

}  // namespace mcc::harness
