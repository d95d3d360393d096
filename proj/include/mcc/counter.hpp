#pragma once

// Exact counting by exhaustive DPLL search with unit propagation, dynamic
// decomposition of the residual formula into variable-disjoint components,
// and caching of component counts. Counts are over the declared universe
// 1..n: a variable in no remaining clause contributes a factor 2 (mc),
// w(v) + w(-v) (wmc), or 2/1 for projection/other variables (pmc).
//
// No pure-literal elimination: it discards models and is unsound for
// counting.

#include "mcc/core.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcc {

enum class Heuristic {
  /// Variable occurring in the most unsatisfied clauses of the component.
  max_occurrence,
  /// Smallest variable index.
  min_index,
  /// Uniform among candidates, seeded.
  random,
};

std::optional<Heuristic> heuristic_from_string(std::string_view s);

struct SolverConfig {
  Heuristic heuristic = Heuristic::max_occurrence;
  std::size_t cache_capacity_bytes = std::size_t{6} << 30;
  bool use_cache = true;
  std::uint64_t seed = 0;
  /// Decimal digits for wmc output.
  unsigned precision = 20;
  /// Emit "s log10-wmc X" instead of "s wmc X".
  bool log10 = false;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Polled during search; set from a signal handler to abort.
  const std::atomic<bool>* interrupt = nullptr;
  /// Every k-th cache hit is recomputed with the cache bypassed and compared;
  /// 0 disables the check.
#ifdef NDEBUG
  std::uint64_t cache_check_interval = 0;
#else
  std::uint64_t cache_check_interval = 1024;
#endif
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t cache_evictions = 0;
  std::uint64_t cache_checks = 0;
  std::uint64_t peak_components = 0;
  double wall_seconds = 0.0;
};

/// The search was stopped (deadline, interrupt); no count is available.
class ResourceExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Connected piece of a residual formula.
struct Component {
  std::vector<Var> vars;
  std::vector<Clause> clauses;

  friend bool operator==(const Component&, const Component&) = default;
};

struct PropagationResult {
  bool conflict = false;
  Assignment assignment;
  /// reduce(formula, assignment); empty when conflict is set.
  Formula residual;
};

/// Unit propagation to fixpoint starting from `tau`.
PropagationResult propagate(const Formula& formula, const Assignment& tau);

/// Connected components of the primal graph of `residual`, ordered by
/// smallest variable. Variables without clauses form no component.
std::vector<Component> decompose(const Formula& residual);

/// Satisfiability by DPLL with unit propagation.
bool embedded_sat(const Formula& formula, const SolverConfig& config = {});

BigInt count(const Formula& formula, const SolverConfig& config = {}, SolverStats* stats = nullptr);

Rational wcount(const Formula& formula, const WeightFunction& weights, const SolverConfig& config = {},
                SolverStats* stats = nullptr);

BigInt pcount(const Formula& formula, const ProjectionSet& projection, const SolverConfig& config = {},
              SolverStats* stats = nullptr);

/// "s mc N", "s pmc N", "s wmc X" (X rounded half-even to config.precision
/// digits, trailing zeros trimmed to one), or "s log10-wmc X" in log mode
/// ("-inf" for a zero count).
std::string render_count(const Rational& value, Track track, const SolverConfig& config);

}  // namespace mcc
