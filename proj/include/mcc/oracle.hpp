#pragma once

// Ground-truth counters for small instances. These share no code with the
// search engine in counter.hpp: exhaustive enumeration over all 2^n total
// assignments, and inclusion-exclusion over the sets of assignments each
// clause eliminates.

#include "mcc/core.hpp"

#include <stdexcept>

namespace mcc::oracle {

struct OracleLimit {
  Var max_vars = 24;
  std::size_t max_clauses = 20;
};

class TooLarge : public std::runtime_error {
 public:
  TooLarge(std::string what_is_large, std::uint64_t size, std::uint64_t limit);
  std::uint64_t size() const { return size_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t size_;
  std::uint64_t limit_;
};

BigInt enum_count(const Formula& formula, const OracleLimit& limit = {});
Rational enum_wcount(const Formula& formula, const WeightFunction& weights, const OracleLimit& limit = {});
BigInt enum_pcount(const Formula& formula, const ProjectionSet& projection, const OracleLimit& limit = {});

/// 2^n - |union of E_c| by inclusion-exclusion, E_c being the assignments
/// falsifying clause c. Exponential in the number of clauses, not in n.
BigInt ie_count(const Formula& formula, const OracleLimit& limit = {});

}  // namespace mcc::oracle
