#include "mcc/oracle.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace mcc::oracle {

TooLarge::TooLarge(std::string what_is_large, std::uint64_t size, std::uint64_t limit)
    : std::runtime_error("TooLarge: " + what_is_large + " " + std::to_string(size) + " exceeds oracle limit " +
                         std::to_string(limit)),
      size_(size),
      limit_(limit) {}

namespace {

constexpr Var kHardVarCap = 40;

// Clause as two bit masks over variables 1..n (bit v-1): a total assignment
// `bits` satisfies it iff (bits & pos) | (~bits & neg) != 0.
struct MaskClause {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

std::vector<MaskClause> to_masks(const Formula& f) {
  std::vector<MaskClause> out;
  out.reserve(f.clauses.size());
  for (const auto& clause : f.clauses) {
    MaskClause mc;
    for (Lit l : clause) {
      std::uint64_t bit = std::uint64_t{1} << (var_of(l) - 1);
      (l > 0 ? mc.pos : mc.neg) |= bit;
    }
    out.push_back(mc);
  }
  return out;
}

bool satisfied_by(const std::vector<MaskClause>& clauses, std::uint64_t bits) {
  for (const auto& c : clauses) {
    if (((bits & c.pos) | (~bits & c.neg)) == 0) return false;
  }
  return true;
}

void check_vars(const Formula& f, const OracleLimit& limit) {
  Var cap = std::min(limit.max_vars, kHardVarCap);
  if (f.num_vars > cap) throw TooLarge("variable count", f.num_vars, cap);
}

template <typename Fn>
void for_each_model(const Formula& f, Fn&& fn) {
  auto clauses = to_masks(f);
  const std::uint64_t total = std::uint64_t{1} << f.num_vars;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    if (satisfied_by(clauses, bits)) fn(bits);
  }
}

// Sum over the full binary tree of assignments, variable `v` deciding bit
// v-1. Leaves contribute 1 when the assignment satisfies every clause;
// inner nodes weight their subtrees with integer-scaled literal weights.
class WeightedEnumerator {
 public:
  WeightedEnumerator(const Formula& f, const WeightFunction& w) : n_(f.num_vars), clauses_(to_masks(f)) {
    BigInt common(1);
    for (Var v = 1; v <= n_; ++v) {
      for (Lit l : {static_cast<Lit>(v), -static_cast<Lit>(v)}) {
        mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), w.weight(l).get_den().get_mpz_t());
      }
    }
    denominator_ = common;
    pos_.resize(n_ + 1);
    neg_.resize(n_ + 1);
    for (Var v = 1; v <= n_; ++v) {
      pos_[v] = scaled(w.weight(static_cast<Lit>(v)));
      neg_[v] = scaled(w.weight(-static_cast<Lit>(v)));
    }
  }

  Rational run() {
    BigInt numerator = sum(1, 0);
    BigInt scale;
    mpz_pow_ui(scale.get_mpz_t(), denominator_.get_mpz_t(), n_);
    Rational out(numerator, scale);
    out.canonicalize();
    return out;
  }

 private:
  BigInt scaled(const Rational& w) const { return w.get_num() * (denominator_ / w.get_den()); }

  BigInt sum(Var v, std::uint64_t bits) {
    if (v > n_) return satisfied_by(clauses_, bits) ? BigInt(1) : BigInt(0);
    BigInt hi = sum(v + 1, bits | (std::uint64_t{1} << (v - 1)));
    BigInt lo = sum(v + 1, bits);
    BigInt out;
    if (hi != 0) out = pos_[v] * hi;
    if (lo != 0) out += neg_[v] * lo;
    return out;
  }

  Var n_;
  std::vector<MaskClause> clauses_;
  BigInt denominator_;
  std::vector<BigInt> pos_;
  std::vector<BigInt> neg_;
};

// Dynamic bitset over variables for the inclusion-exclusion walk.
using VarBits = std::vector<std::uint64_t>;

struct ForcedClause {
  VarBits to_false;  // variables a falsifying assignment sets to 0
  VarBits to_true;   // variables a falsifying assignment sets to 1
};

class InclusionExclusion {
 public:
  InclusionExclusion(Var n, std::vector<ForcedClause> clauses)
      : n_(n), words_((n + 63) / 64), clauses_(std::move(clauses)), even_(n + 1, 0), odd_(n + 1, 0) {}

  BigInt run() {
    VarBits zero(words_, 0);
    even_[0] += 1;  // empty clause subset: all 2^n assignments
    walk(0, zero, zero, false);
    BigInt total(0);
    for (Var k = 0; k <= n_; ++k) {
      std::int64_t coeff = even_[k] - odd_[k];
      if (coeff == 0) continue;
      BigInt block;
      mpz_ui_pow_ui(block.get_mpz_t(), 2, n_ - k);
      total += BigInt(static_cast<long>(coeff)) * block;
    }
    return total;
  }

 private:
  // Extends the current subset with clauses i, i+1, ...; an inconsistent
  // forcing has an empty intersection, and so do all of its supersets.
  void walk(std::size_t first, const VarBits& to_false, const VarBits& to_true, bool odd) {
    for (std::size_t i = first; i < clauses_.size(); ++i) {
      VarBits f(words_);
      VarBits t(words_);
      bool consistent = true;
      Var count = 0;
      for (std::size_t w = 0; w < words_; ++w) {
        f[w] = to_false[w] | clauses_[i].to_false[w];
        t[w] = to_true[w] | clauses_[i].to_true[w];
        if ((f[w] & t[w]) != 0) {
          consistent = false;
          break;
        }
        count += static_cast<Var>(__builtin_popcountll(f[w] | t[w]));
      }
      if (!consistent) continue;
      bool now_odd = !odd;
      (now_odd ? odd_ : even_)[count] += 1;
      walk(i + 1, f, t, now_odd);
    }
  }

  Var n_;
  std::size_t words_;
  std::vector<ForcedClause> clauses_;
  std::vector<std::int64_t> even_;
  std::vector<std::int64_t> odd_;
};

}  // namespace

BigInt enum_count(const Formula& formula, const OracleLimit& limit) {
  check_vars(formula, limit);
  std::uint64_t models = 0;
  for_each_model(formula, [&](std::uint64_t) { ++models; });
  BigInt out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(models), 0, 0, &models);
  return out;
}

Rational enum_wcount(const Formula& formula, const WeightFunction& weights, const OracleLimit& limit) {
  check_vars(formula, limit);
  if (weights.num_vars() != formula.num_vars) throw std::invalid_argument("weight universe differs from formula");
  return WeightedEnumerator(formula, weights).run();
}

BigInt enum_pcount(const Formula& formula, const ProjectionSet& projection, const OracleLimit& limit) {
  check_vars(formula, limit);
  std::uint64_t pmask = 0;
  for (Var v : projection) {
    if (v == 0 || v > formula.num_vars) throw std::invalid_argument("projection variable outside universe");
    pmask |= std::uint64_t{1} << (v - 1);
  }
  std::unordered_set<std::uint64_t> seen;
  for_each_model(formula, [&](std::uint64_t bits) { seen.insert(bits & pmask); });
  return BigInt(static_cast<unsigned long>(seen.size()));
}

BigInt ie_count(const Formula& formula, const OracleLimit& limit) {
  if (formula.clauses.size() > limit.max_clauses) {
    throw TooLarge("clause count", formula.clauses.size(), limit.max_clauses);
  }
  // Normalize, drop tautologies (E_c is empty) and duplicates (E_c u E_c = E_c).
  std::vector<Clause> distinct;
  for (Clause c : formula.clauses) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (is_tautology(c)) continue;
    distinct.push_back(std::move(c));
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  const std::size_t words = (formula.num_vars + 63) / 64;
  std::vector<ForcedClause> forced;
  forced.reserve(distinct.size());
  for (const auto& c : distinct) {
    ForcedClause fc{VarBits(words, 0), VarBits(words, 0)};
    for (Lit l : c) {
      Var v = var_of(l) - 1;
      (l > 0 ? fc.to_false : fc.to_true)[v / 64] |= std::uint64_t{1} << (v % 64);
    }
    forced.push_back(std::move(fc));
  }
  BigInt result = InclusionExclusion(formula.num_vars, std::move(forced)).run();
  if (sgn(result) < 0) throw std::logic_error("inclusion-exclusion produced a negative count");
  return result;
}

}  // namespace mcc::oracle
