#pragma once

// Reference semantics: formulas, partial assignments, reduction F|tau,
// satisfaction, literal weights and projection. Everything here is exact
// and deliberately simple; engines and oracles are checked against it.

#include "mcc/formats.hpp"
#include "mcc/number.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace mcc {

/// A CNF over the declared universe 1..num_vars. All counts are taken over
/// the whole universe, so a variable that occurs in no clause still counts.
struct Formula {
  Var num_vars = 0;
  std::vector<Clause> clauses;

  friend bool operator==(const Formula&, const Formula&) = default;
};

Formula to_formula(const CnfDocument& doc);

/// Partial map from variables 1..n to {0,1}.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(Var num_vars) : values_(num_vars + 1, kUnassigned) {}

  /// Total assignment whose bit (v-1) of `bits` is the value of v; n <= 64.
  static Assignment from_bits(Var num_vars, std::uint64_t bits);

  Var num_vars() const { return values_.empty() ? 0 : static_cast<Var>(values_.size() - 1); }

  void assign(Var v, bool value);
  /// Sets the variable of `lit` so that `lit` becomes true.
  void make_true(Lit lit) { assign(var_of(lit), lit > 0); }
  void unassign(Var v);

  bool is_assigned(Var v) const { return v < values_.size() && values_[v] != kUnassigned; }
  std::optional<bool> value(Var v) const;
  /// tau(-x) = 1 - tau(x).
  std::optional<bool> value_of(Lit lit) const;

  bool is_total() const;
  std::size_t size() const;
  std::vector<Lit> literals() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  static constexpr std::int8_t kUnassigned = -1;
  std::vector<std::int8_t> values_;
};

/// Set of variables assigned true.
using Model = std::set<Var>;
using ProjectionSet = std::set<Var>;

/// Total weight map lits -> [0,1], defaulting to 1.
class WeightFunction {
 public:
  WeightFunction() = default;
  explicit WeightFunction(Var num_vars);
  static WeightFunction from_document(const WcnfDocument& doc);

  Var num_vars() const { return num_vars_; }
  const Rational& weight(Lit lit) const;
  void set(Lit lit, const Rational& w);
  /// w(v) + w(-v).
  Rational pair_sum(Var v) const;
  bool is_identity() const;

 private:
  Var num_vars_ = 0;
  std::vector<Rational> positive_;
  std::vector<Rational> negative_;
};

/// F under tau: drop clauses with a true literal, then drop false literals
/// from the remaining clauses. num_vars is unchanged.
Formula reduce(const Formula& formula, const Assignment& tau);

/// True iff reduce(formula, tau) has no clauses.
bool satisfies(const Formula& formula, const Assignment& tau);

/// prod_{v in M} w(v) * prod_{v in 1..n \ M} w(-v).
Rational weight_of_model(const WeightFunction& w, Var num_vars, const Model& model);

Model project(const Model& model, const ProjectionSet& projection);

/// Model of a total assignment.
Model model_of(const Assignment& tau);

bool is_tautology(const Clause& clause);

}  // namespace mcc
