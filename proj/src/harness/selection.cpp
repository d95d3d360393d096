#include "mcc/harness/selection.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace mcc::harness {

std::string_view to_string(Hardness h) {
  switch (h) {
    case Hardness::very_easy: return "very-easy";
    case Hardness::easy: return "easy";
    case Hardness::medium: return "medium";
    case Hardness::hard: return "hard";
    case Hardness::unsolved_hard: return "unsolved-hard";
  }
  return "?";
}

Hardness classify_hardness(std::optional<double> runtime_seconds) {
  if (!runtime_seconds) return Hardness::unsolved_hard;
  const double t = *runtime_seconds;
  if (!(t >= 0.0)) throw std::invalid_argument("negative or NaN runtime");
  if (t < 10.0) return Hardness::very_easy;
  if (t < 60.0) return Hardness::easy;
  if (t < 600.0) return Hardness::medium;
  if (t < 7200.0) return Hardness::hard;
  return Hardness::unsolved_hard;
}

InsufficientPool::InsufficientPool(std::string bucket, std::size_t need, std::size_t have)
    : std::runtime_error("pool bucket '" + bucket + "' has " + std::to_string(have) + " instances, need " +
                         std::to_string(need)),
      bucket_(std::move(bucket)),
      need_(need),
      have_(have) {}

namespace {

// splitmix64; the draw sequence is fixed across platforms and standard
// library implementations, unlike std::uniform_int_distribution.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

double sort_runtime(const std::optional<double>& t) {
  return t ? *t : std::numeric_limits<double>::infinity();
}

}  // namespace

Selection select_instances(const std::vector<PoolInstance>& pool, const Distribution& distribution,
                           std::uint64_t seed) {
  // Bucket order also fixes the numbering order.
  struct Bucket {
    const char* name;
    unsigned need;
    std::vector<std::size_t> members;
  };
  std::array<Bucket, 4> buckets{{{"very-easy", distribution.very_easy, {}},
                                 {"easy", distribution.easy, {}},
                                 {"medium", distribution.medium, {}},
                                 {"hard", distribution.hard, {}}}};
  for (std::size_t i = 0; i < pool.size(); ++i) {
    auto h = classify_hardness(pool[i].runtime_seconds);
    std::size_t b = h == Hardness::unsolved_hard ? 3 : static_cast<std::size_t>(h);
    buckets[b].members.push_back(i);
  }

  // Pool order must not influence the draw.
  auto by_id = [&](std::size_t a, std::size_t b) { return pool[a].id < pool[b].id; };
  SplitMix64 rng(seed);
  std::vector<SelectedInstance> picked;
  for (auto& bucket : buckets) {
    if (bucket.members.size() < bucket.need) throw InsufficientPool(bucket.name, bucket.need, bucket.members.size());
    std::sort(bucket.members.begin(), bucket.members.end(), by_id);
    for (std::size_t i = 0; i < bucket.need; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(bucket.members.size() - i));
      std::swap(bucket.members[i], bucket.members[j]);
    }
    std::vector<std::size_t> chosen(bucket.members.begin(), bucket.members.begin() + bucket.need);
    std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
      double ta = sort_runtime(pool[a].runtime_seconds);
      double tb = sort_runtime(pool[b].runtime_seconds);
      if (ta != tb) return ta < tb;
      return pool[a].id < pool[b].id;
    });
    for (std::size_t idx : chosen) {
      SelectedInstance s;
      s.id = pool[idx].id;
      s.category = classify_hardness(pool[idx].runtime_seconds);
      s.runtime_seconds = pool[idx].runtime_seconds;
      picked.push_back(std::move(s));
    }
  }

  Selection out;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    picked[i].number = static_cast<unsigned>(i + 1);
    (picked[i].number % 2 == 1 ? out.private_instances : out.public_instances).push_back(picked[i]);
  }
  return out;
}

}  // namespace mcc::harness
