#include "mcc/core.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <string>

namespace mcc {

Formula to_formula(const CnfDocument& doc) { return Formula{doc.num_vars, doc.clauses}; }

Assignment Assignment::from_bits(Var num_vars, std::uint64_t bits) {
  if (num_vars > 64) throw std::invalid_argument("from_bits supports at most 64 variables");
  Assignment tau(num_vars);
  for (Var v = 1; v <= num_vars; ++v) tau.assign(v, ((bits >> (v - 1)) & 1U) != 0);
  return tau;
}

void Assignment::assign(Var v, bool value) {
  if (v == 0 || v >= values_.size()) throw std::out_of_range("variable " + std::to_string(v) + " outside universe");
  values_[v] = value ? 1 : 0;
}

void Assignment::unassign(Var v) {
  if (v < values_.size()) values_[v] = kUnassigned;
}

std::optional<bool> Assignment::value(Var v) const {
  if (!is_assigned(v)) return std::nullopt;
  return values_[v] == 1;
}

std::optional<bool> Assignment::value_of(Lit lit) const {
  auto v = value(var_of(lit));
  if (!v) return std::nullopt;
  return lit > 0 ? *v : !*v;
}

bool Assignment::is_total() const {
  return std::all_of(values_.begin() + (values_.empty() ? 0 : 1), values_.end(),
                     [](std::int8_t x) { return x != kUnassigned; });
}

std::size_t Assignment::size() const {
  if (values_.empty()) return 0;
  return static_cast<std::size_t>(
      std::count_if(values_.begin() + 1, values_.end(), [](std::int8_t x) { return x != kUnassigned; }));
}

std::vector<Lit> Assignment::literals() const {
  std::vector<Lit> out;
  for (Var v = 1; v < values_.size(); ++v) {
    if (values_[v] != kUnassigned) out.push_back(values_[v] == 1 ? static_cast<Lit>(v) : -static_cast<Lit>(v));
  }
  return out;
}

WeightFunction::WeightFunction(Var num_vars)
    : num_vars_(num_vars), positive_(num_vars + 1, Rational(1)), negative_(num_vars + 1, Rational(1)) {}

WeightFunction WeightFunction::from_document(const WcnfDocument& doc) {
  WeightFunction w(doc.base.num_vars);
  for (const auto& [lit, value] : doc.weights) w.set(lit, value);
  return w;
}

const Rational& WeightFunction::weight(Lit lit) const {
  Var v = var_of(lit);
  if (v == 0 || v > num_vars_) throw std::out_of_range("literal " + std::to_string(lit) + " outside weight universe");
  return lit > 0 ? positive_[v] : negative_[v];
}

void WeightFunction::set(Lit lit, const Rational& w) {
  Var v = var_of(lit);
  if (v == 0 || v > num_vars_) throw std::out_of_range("literal " + std::to_string(lit) + " outside weight universe");
  Rational canonical = w;
  canonical.canonicalize();
  if (sgn(canonical) < 0 || canonical > 1) throw std::invalid_argument("weight outside [0,1]");
  (lit > 0 ? positive_ : negative_)[v] = std::move(canonical);
}

Rational WeightFunction::pair_sum(Var v) const { return weight(static_cast<Lit>(v)) + weight(-static_cast<Lit>(v)); }

bool WeightFunction::is_identity() const {
  for (Var v = 1; v <= num_vars_; ++v) {
    if (positive_[v] != 1 || negative_[v] != 1) return false;
  }
  return true;
}

Formula reduce(const Formula& formula, const Assignment& tau) {
  Formula out{formula.num_vars, {}};
  for (const auto& clause : formula.clauses) {
    bool satisfied = std::any_of(clause.begin(), clause.end(), [&](Lit l) { return tau.value_of(l) == true; });
    if (satisfied) continue;
    Clause rest;
    for (Lit l : clause) {
      if (!tau.value_of(l).has_value()) rest.push_back(l);
    }
    out.clauses.push_back(std::move(rest));
  }
  return out;
}

bool satisfies(const Formula& formula, const Assignment& tau) { return reduce(formula, tau).clauses.empty(); }

Rational weight_of_model(const WeightFunction& w, Var num_vars, const Model& model) {
  Rational product(1);
  for (Var v = 1; v <= num_vars; ++v) {
    product *= model.count(v) != 0 ? w.weight(static_cast<Lit>(v)) : w.weight(-static_cast<Lit>(v));
  }
  return product;
}

Model project(const Model& model, const ProjectionSet& projection) {
  Model out;
  std::set_intersection(model.begin(), model.end(), projection.begin(), projection.end(),
                        std::inserter(out, out.end()));
  return out;
}

Model model_of(const Assignment& tau) {
  Model m;
  for (Var v = 1; v <= tau.num_vars(); ++v) {
    if (tau.value(v) == true) m.insert(v);
  }
  return m;
}

bool is_tautology(const Clause& clause) {
  for (Lit l : clause) {
    if (std::find(clause.begin(), clause.end(), -l) != clause.end()) return true;
  }
  return false;
}

}  // namespace mcc
