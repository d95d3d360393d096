#pragma once

// Hardness buckets from reference runtimes and stratified public/private
// instance selection.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcc::harness {

/// [0,10), [10,60), [60,600), [600,7200), and no answer within 7200 s.
enum class Hardness { very_easy, easy, medium, hard, unsolved_hard };

std::string_view to_string(Hardness h);

/// nullopt means the reference solvers gave no answer. Throws
/// std::invalid_argument for negative runtimes.
Hardness classify_hardness(std::optional<double> runtime_seconds);

struct PoolInstance {
  std::string id;
  std::optional<double> runtime_seconds;
};

/// Instances per bucket; `hard` draws from hard and unsolved-hard together.
struct Distribution {
  unsigned very_easy = 20;
  unsigned easy = 20;
  unsigned medium = 90;
  unsigned hard = 70;

  unsigned total() const { return very_easy + easy + medium + hard; }
};

struct SelectedInstance {
  unsigned number = 0;
  std::string id;
  Hardness category = Hardness::very_easy;
  std::optional<double> runtime_seconds;
};

struct Selection {
  std::vector<SelectedInstance> public_instances;
  std::vector<SelectedInstance> private_instances;
};

class InsufficientPool : public std::runtime_error {
 public:
  InsufficientPool(std::string bucket, std::size_t need, std::size_t have);
  const std::string& bucket() const { return bucket_; }
  std::size_t need() const { return need_; }
  std::size_t have() const { return have_; }

 private:
  std::string bucket_;
  std::size_t need_;
  std::size_t have_;
};

/// Samples each bucket uniformly without replacement (seeded), numbers the
/// picks 1..N by bucket then ascending runtime, and splits odd numbers to
/// private and even numbers to public.
Selection select_instances(const std::vector<PoolInstance>& pool, const Distribution& distribution,
                           std::uint64_t seed);

}  // namespace mcc::harness
