#include "mcc/counter.hpp"

#include "mcc/component_cache.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace mcc {

std::optional<Heuristic> heuristic_from_string(std::string_view s) {
  if (s == "max-occurrence") return Heuristic::max_occurrence;
  if (s == "min-index") return Heuristic::min_index;
  if (s == "random") return Heuristic::random;
  return std::nullopt;
}

namespace {

constexpr std::uint32_t kClauseSeparator = 0xFFFFFFFFu;

inline std::size_t lit_index(Lit l) { return 2 * static_cast<std::size_t>(var_of(l)) + (l < 0 ? 1 : 0); }

struct CountPolicy {
  using Value = BigInt;
  static constexpr bool kProjected = false;

  void apply_literal(Value&, Lit) const {}
  void apply_free(Value& acc, Var) const { mpz_mul_2exp(acc.get_mpz_t(), acc.get_mpz_t(), 1); }
  bool branchable(Var) const { return true; }
  // Counts depend only on the renamed structure.
  void key_prefix(ComponentKey&, const std::vector<Var>&) const {}
};

struct WeightPolicy {
  using Value = Rational;
  static constexpr bool kProjected = false;
  const WeightFunction* weights;

  void apply_literal(Value& acc, Lit l) const { acc *= weights->weight(l); }
  void apply_free(Value& acc, Var v) const { acc *= weights->pair_sum(v); }
  bool branchable(Var) const { return true; }
  // Weights are attached to variable names, so the names are part of the key.
  void key_prefix(ComponentKey& key, const std::vector<Var>& vars) const { key.insert(key.end(), vars.begin(), vars.end()); }
};

struct ProjectionPolicy {
  using Value = BigInt;
  static constexpr bool kProjected = true;
  std::vector<char> in_projection;  // indexed by variable

  void apply_literal(Value&, Lit) const {}
  void apply_free(Value& acc, Var v) const {
    if (in_projection[v] != 0) mpz_mul_2exp(acc.get_mpz_t(), acc.get_mpz_t(), 1);
  }
  bool branchable(Var v) const { return in_projection[v] != 0; }
  void key_prefix(ComponentKey& key, const std::vector<Var>& vars) const {
    for (Var v : vars) key.push_back(in_projection[v] != 0 ? 1u : 0u);
  }
};

template <typename Policy>
class SearchEngine {
 public:
  using Value = typename Policy::Value;

  SearchEngine(const Formula& formula, Policy policy, const SolverConfig& config)
      : n_(formula.num_vars),
        policy_(std::move(policy)),
        config_(config),
        cache_(config.cache_capacity_bytes),
        rng_(config.seed),
        value_(n_ + 1, kUnassigned),
        var_mark_(n_ + 1, 0),
        dense_(n_ + 1, 0),
        occ_var_(n_ + 1),
        occ_lit_(2 * (n_ + 1)) {
    if (config.cache_capacity_bytes == 0) throw std::invalid_argument("cache capacity must be positive");
    load(formula);
  }

  Value count() {
    if (has_empty_) return Value(0);
    if (!propagate_root()) return Value(0);
    Value acc(1);
    for (Lit l : trail_) policy_.apply_literal(acc, l);
    if (sgn(acc) == 0) return acc;
    std::vector<Var> all;
    for (Var v = 1; v <= n_; ++v) {
      if (value_[v] == kUnassigned) all.push_back(v);
    }
    acc *= solve_scope(all);
    return acc;
  }

  bool satisfiable() {
    if (has_empty_) return false;
    if (!propagate_root()) return false;
    Scope all;
    for (Var v = 1; v <= n_; ++v) {
      if (value_[v] == kUnassigned) all.vars.push_back(v);
    }
    return sat_component(all);
  }

  void fill(SolverStats& stats) const {
    stats.decisions = decisions_;
    stats.propagations = propagations_;
    stats.cache_hits = cache_.stats().hits;
    stats.cache_misses = cache_.stats().misses;
    stats.cache_evictions = cache_.stats().evictions;
    stats.cache_checks = cache_checks_;
    stats.peak_components = peak_components_;
  }

 private:
  static constexpr std::int8_t kUnassigned = -1;

  struct Scope {
    std::vector<Var> vars;
    std::vector<std::uint32_t> clauses;
  };

  void load(const Formula& formula) {
    std::vector<Clause> normalized;
    normalized.reserve(formula.clauses.size());
    for (Clause c : formula.clauses) {
      for (Lit l : c) {
        if (l == 0 || var_of(l) > n_) throw std::invalid_argument("literal outside the declared universe");
      }
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      if (c.empty()) has_empty_ = true;
      if (is_tautology(c)) continue;
      normalized.push_back(std::move(c));
    }
    std::sort(normalized.begin(), normalized.end());
    normalized.erase(std::unique(normalized.begin(), normalized.end()), normalized.end());
    clauses_ = std::move(normalized);
    clause_mark_.assign(clauses_.size(), 0);
    for (std::uint32_t id = 0; id < clauses_.size(); ++id) {
      for (Lit l : clauses_[id]) {
        occ_var_[var_of(l)].push_back(id);
        occ_lit_[lit_index(l)].push_back(id);
      }
    }
  }

  bool is_true(Lit l) const {
    auto v = value_[var_of(l)];
    return v != kUnassigned && (v == 1) == (l > 0);
  }
  bool is_free(Lit l) const { return value_[var_of(l)] == kUnassigned; }

  bool is_satisfied(std::uint32_t id) const {
    return std::any_of(clauses_[id].begin(), clauses_[id].end(), [this](Lit l) { return is_true(l); });
  }

  void assign(Lit l) {
    value_[var_of(l)] = l > 0 ? 1 : 0;
    trail_.push_back(l);
  }

  // Unit propagation over the clauses watching the negation of each newly
  // true literal. Returns false on an empty clause.
  bool propagate_from(std::size_t head) {
    while (head < trail_.size()) {
      Lit now_true = trail_[head++];
      for (std::uint32_t id : occ_lit_[lit_index(-now_true)]) {
        Lit unit = 0;
        int unassigned = 0;
        bool satisfied = false;
        for (Lit l : clauses_[id]) {
          if (is_true(l)) {
            satisfied = true;
            break;
          }
          if (is_free(l)) {
            ++unassigned;
            unit = l;
            if (unassigned > 1) break;
          }
        }
        if (satisfied || unassigned > 1) continue;
        if (unassigned == 0) return false;
        assign(unit);
        ++propagations_;
      }
    }
    return true;
  }

  bool propagate_root() {
    for (const auto& c : clauses_) {
      if (c.size() != 1) continue;
      if (is_true(c[0])) continue;
      if (!is_free(c[0])) return false;
      assign(c[0]);
    }
    return propagate_from(0);
  }

  bool decide(Lit l) {
    std::size_t head = trail_.size();
    assign(l);
    return propagate_from(head);
  }

  void backtrack(std::size_t mark) {
    while (trail_.size() > mark) {
      value_[var_of(trail_.back())] = kUnassigned;
      trail_.pop_back();
    }
  }

  void poll_limits() {
    if (config_.interrupt != nullptr && config_.interrupt->load(std::memory_order_relaxed)) {
      throw ResourceExhausted("interrupted");
    }
    if (config_.deadline && (++poll_counter_ & 255u) == 0 && std::chrono::steady_clock::now() >= *config_.deadline) {
      throw ResourceExhausted("time limit reached");
    }
  }

  // Components of the unsatisfied clauses restricted to the unassigned
  // variables in `vars` (ascending); variables of `vars` in no such clause are
  // returned in `free_vars`.
  std::vector<Scope> components_of(const std::vector<Var>& vars, std::vector<Var>& free_vars) {
    ++epoch_;
    std::vector<Scope> comps;
    std::vector<Var> stack;
    for (Var root : vars) {
      if (value_[root] != kUnassigned || var_mark_[root] == epoch_) continue;
      Scope comp;
      var_mark_[root] = epoch_;
      stack.push_back(root);
      while (!stack.empty()) {
        Var x = stack.back();
        stack.pop_back();
        comp.vars.push_back(x);
        for (std::uint32_t id : occ_var_[x]) {
          if (clause_mark_[id] == epoch_ || is_satisfied(id)) continue;
          clause_mark_[id] = epoch_;
          comp.clauses.push_back(id);
          for (Lit l : clauses_[id]) {
            Var u = var_of(l);
            if (value_[u] == kUnassigned && var_mark_[u] != epoch_) {
              var_mark_[u] = epoch_;
              stack.push_back(u);
            }
          }
        }
      }
      if (comp.clauses.empty()) {
        free_vars.push_back(root);
        continue;
      }
      std::sort(comp.vars.begin(), comp.vars.end());
      std::sort(comp.clauses.begin(), comp.clauses.end());
      comps.push_back(std::move(comp));
    }
    return comps;
  }

  Value solve_scope(const std::vector<Var>& vars) {
    std::vector<Var> free_vars;
    auto comps = components_of(vars, free_vars);
    peak_components_ = std::max<std::uint64_t>(peak_components_, comps.size());
    Value acc(1);
    for (Var v : free_vars) policy_.apply_free(acc, v);
    for (const auto& comp : comps) {
      if (sgn(acc) == 0) break;
      acc *= count_component(comp);
    }
    return acc;
  }

  ComponentKey key_of(const Scope& comp) {
    ComponentKey key;
    key.push_back(static_cast<std::uint32_t>(comp.vars.size()));
    policy_.key_prefix(key, comp.vars);
    for (std::size_t i = 0; i < comp.vars.size(); ++i) dense_[comp.vars[i]] = static_cast<std::uint32_t>(i);
    std::vector<std::vector<std::uint32_t>> residual;
    residual.reserve(comp.clauses.size());
    for (std::uint32_t id : comp.clauses) {
      std::vector<std::uint32_t> lits;
      for (Lit l : clauses_[id]) {
        if (is_free(l)) lits.push_back(2 * dense_[var_of(l)] + (l < 0 ? 1u : 0u));
      }
      std::sort(lits.begin(), lits.end());
      residual.push_back(std::move(lits));
    }
    std::sort(residual.begin(), residual.end());
    for (const auto& c : residual) {
      key.insert(key.end(), c.begin(), c.end());
      key.push_back(kClauseSeparator);
    }
    return key;
  }

  Var choose_branch(const Scope& comp) {
    std::vector<Var> candidates;
    for (Var v : comp.vars) {
      if (policy_.branchable(v)) candidates.push_back(v);
    }
    switch (config_.heuristic) {
      case Heuristic::min_index:
        return candidates.front();
      case Heuristic::random:
        return candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
      case Heuristic::max_occurrence:
        break;
    }
    Var best = candidates.front();
    std::size_t best_score = 0;
    for (Var v : candidates) {
      std::size_t score = 0;
      for (std::uint32_t id : occ_var_[v]) {
        if (!is_satisfied(id)) ++score;
      }
      if (score > best_score) {
        best = v;
        best_score = score;
      }
    }
    return best;
  }

  bool has_branchable(const Scope& comp) const {
    return std::any_of(comp.vars.begin(), comp.vars.end(), [this](Var v) { return policy_.branchable(v); });
  }

  Value count_component(const Scope& comp) {
    poll_limits();
    const bool cached = config_.use_cache && !bypass_cache_;
    ComponentKey key;
    if (cached) {
      key = key_of(comp);
      if (const Value* hit = cache_.find(key)) {
        Value result = *hit;
        if (config_.cache_check_interval != 0 && ++hits_since_check_ % config_.cache_check_interval == 0) {
          verify_hit(comp, result);
        }
        return result;
      }
    }

    Value total(0);
    if (Policy::kProjected && !has_branchable(comp)) {
      // No projection variable left: the component contributes one projected
      // model if it is satisfiable, none otherwise.
      total = sat_component(comp) ? 1 : 0;
    } else {
      Var v = choose_branch(comp);
      ++decisions_;
      for (Lit lit : {static_cast<Lit>(v), -static_cast<Lit>(v)}) {
        std::size_t mark = trail_.size();
        if (decide(lit)) {
          Value branch(1);
          for (std::size_t i = mark; i < trail_.size(); ++i) policy_.apply_literal(branch, trail_[i]);
          if (sgn(branch) != 0) {
            std::vector<Var> remaining;
            for (Var u : comp.vars) {
              if (value_[u] == kUnassigned) remaining.push_back(u);
            }
            branch *= solve_scope(remaining);
          }
          total += branch;
        }
        backtrack(mark);
      }
    }
    if (cached) cache_.insert(std::move(key), total);
    return total;
  }

  void verify_hit(const Scope& comp, const Value& cached_value) {
    bool saved = bypass_cache_;
    bypass_cache_ = true;
    Value recomputed = count_component(comp);
    bypass_cache_ = saved;
    ++cache_checks_;
    if (recomputed != cached_value) throw std::logic_error("component cache returned a stale or colliding entry");
  }

  // Plain DPLL over the unsatisfied clauses touching comp.vars.
  bool sat_component(const Scope& comp) {
    poll_limits();
    Var pick = 0;
    for (Var v : comp.vars) {
      if (value_[v] != kUnassigned) continue;
      bool constrained = std::any_of(occ_var_[v].begin(), occ_var_[v].end(),
                                     [this](std::uint32_t id) { return !is_satisfied(id); });
      if (constrained) {
        pick = v;
        break;
      }
    }
    if (pick == 0) return true;
    ++decisions_;
    for (Lit lit : {static_cast<Lit>(pick), -static_cast<Lit>(pick)}) {
      std::size_t mark = trail_.size();
      bool ok = decide(lit) && sat_component(comp);
      backtrack(mark);
      if (ok) return true;
    }
    return false;
  }

  Var n_;
  Policy policy_;
  const SolverConfig& config_;
  ComponentCache<Value> cache_;
  std::mt19937_64 rng_;

  std::vector<Clause> clauses_;
  bool has_empty_ = false;
  std::vector<std::int8_t> value_;
  std::vector<Lit> trail_;

  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> var_mark_;
  std::vector<std::uint32_t> clause_mark_;
  std::vector<std::uint32_t> dense_;
  std::vector<std::vector<std::uint32_t>> occ_var_;
  std::vector<std::vector<std::uint32_t>> occ_lit_;

  bool bypass_cache_ = false;
  std::uint64_t hits_since_check_ = 0;
  std::uint64_t cache_checks_ = 0;
  std::uint64_t decisions_ = 0;
  std::uint64_t propagations_ = 0;
  std::uint64_t peak_components_ = 0;
  std::uint32_t poll_counter_ = 0;
};

template <typename Policy>
typename Policy::Value run_count(const Formula& formula, Policy policy, const SolverConfig& config,
                                 SolverStats* stats) {
  auto start = std::chrono::steady_clock::now();
  SearchEngine<Policy> engine(formula, std::move(policy), config);
  auto finish = [&] {
    if (stats == nullptr) return;
    engine.fill(*stats);
    stats->wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    auto result = engine.count();
    finish();
    return result;
  } catch (const ResourceExhausted&) {
    finish();
    throw;
  }
}

}  // namespace

PropagationResult propagate(const Formula& formula, const Assignment& tau) {
  if (tau.num_vars() != formula.num_vars) throw std::invalid_argument("assignment universe differs from formula");
  PropagationResult out;
  out.assignment = tau;
  while (true) {
    Formula residual = reduce(formula, out.assignment);
    bool progressed = false;
    for (const auto& clause : residual.clauses) {
      if (clause.empty()) {
        out.conflict = true;
        return out;
      }
    }
    for (const auto& clause : residual.clauses) {
      if (clause.size() == 1) {
        out.assignment.make_true(clause.front());
        progressed = true;
        break;
      }
    }
    if (!progressed) {
      out.residual = std::move(residual);
      return out;
    }
  }
}

std::vector<Component> decompose(const Formula& residual) {
  // Union-find over variables that occur in clauses.
  std::vector<Var> parent(residual.num_vars + 1);
  std::iota(parent.begin(), parent.end(), Var{0});
  auto find = [&](Var v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::vector<char> occurs(residual.num_vars + 1, 0);
  for (const auto& clause : residual.clauses) {
    for (Lit l : clause) {
      occurs[var_of(l)] = 1;
      Var a = find(var_of(clause.front()));
      Var b = find(var_of(l));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<Component> out;
  // Empty clauses have no variables; each forms its own component up front.
  for (const auto& clause : residual.clauses) {
    if (clause.empty()) out.push_back(Component{{}, {clause}});
  }
  std::vector<std::size_t> slot(residual.num_vars + 1, SIZE_MAX);
  for (Var v = 1; v <= residual.num_vars; ++v) {
    if (occurs[v] == 0) continue;
    Var root = find(v);
    if (slot[root] == SIZE_MAX) {
      slot[root] = out.size();
      out.emplace_back();
    }
    out[slot[root]].vars.push_back(v);
  }
  for (const auto& clause : residual.clauses) {
    if (!clause.empty()) out[slot[find(var_of(clause.front()))]].clauses.push_back(clause);
  }
  return out;
}

bool embedded_sat(const Formula& formula, const SolverConfig& config) {
  SearchEngine<CountPolicy> engine(formula, CountPolicy{}, config);
  return engine.satisfiable();
}

BigInt count(const Formula& formula, const SolverConfig& config, SolverStats* stats) {
  return run_count(formula, CountPolicy{}, config, stats);
}

Rational wcount(const Formula& formula, const WeightFunction& weights, const SolverConfig& config,
                SolverStats* stats) {
  if (weights.num_vars() != formula.num_vars) throw std::invalid_argument("weight universe differs from formula");
  return run_count(formula, WeightPolicy{&weights}, config, stats);
}

BigInt pcount(const Formula& formula, const ProjectionSet& projection, const SolverConfig& config,
              SolverStats* stats) {
  ProjectionPolicy policy;
  policy.in_projection.assign(formula.num_vars + 1, 0);
  for (Var v : projection) {
    if (v == 0 || v > formula.num_vars) throw std::invalid_argument("projection variable outside universe");
    policy.in_projection[v] = 1;
  }
  return run_count(formula, std::move(policy), config, stats);
}

std::string render_count(const Rational& value, Track track, const SolverConfig& config) {
  std::string line = "s ";
  if (track != Track::wmc) {
    if (value.get_den() != 1 || sgn(value) < 0) throw std::invalid_argument("mc/pmc counts are non-negative integers");
    return line + std::string(to_string(track)) + " " + value.get_num().get_str();
  }
  if (config.log10) {
    line += "log10-wmc ";
    if (sgn(value) == 0) return line + "-inf";
    return line + format_fixed(log10_approx(value, config.precision), config.precision);
  }
  return line + "wmc " + format_trimmed(value, config.precision);
}

}  // namespace mcc
