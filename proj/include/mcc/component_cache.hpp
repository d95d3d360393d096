#pragma once

// Least-recently-used map from canonical component encodings to counts,
// bounded by an estimate of the bytes it holds. Keys are compared in full;
// the hash only selects a bucket.

#include "mcc/number.hpp"

#include <cstdint>
#include <list>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mcc {

using ComponentKey = std::vector<std::uint32_t>;

struct ComponentKeyHash {
  std::size_t operator()(const ComponentKey& key) const noexcept {
    return std::hash<std::string_view>{}(
        std::string_view(reinterpret_cast<const char*>(key.data()), key.size() * sizeof(std::uint32_t)));
  }
};

inline std::size_t value_bytes(const BigInt& v) { return sizeof(v) + mpz_size(v.get_mpz_t()) * sizeof(mp_limb_t); }
inline std::size_t value_bytes(const Rational& v) {
  return sizeof(v) + (mpz_size(v.get_num_mpz_t()) + mpz_size(v.get_den_mpz_t())) * sizeof(mp_limb_t);
}

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t peak_bytes = 0;
};

template <typename Value>
class ComponentCache {
 public:
  // Per-entry bookkeeping beyond key and value payload (list node, bucket).
  static constexpr std::size_t kEntryOverhead = 96;

  explicit ComponentCache(std::size_t capacity_bytes) : capacity_(capacity_bytes) {}

  const Value* find(const ComponentKey& key) {
    auto it = index_.find(key);
    if (it == index_.end()) {
      ++stats_.misses;
      return nullptr;
    }
    ++stats_.hits;
    entries_.splice(entries_.begin(), entries_, it->second);
    return &it->second->second;
  }

  void insert(ComponentKey key, Value value) {
    std::size_t cost = entry_bytes(key, value);
    if (cost > capacity_) return;
    if (auto it = index_.find(key); it != index_.end()) {
      bytes_ -= entry_bytes(it->second->first, it->second->second);
      entries_.erase(it->second);
      index_.erase(it);
    }
    while (bytes_ + cost > capacity_ && !entries_.empty()) evict_one();
    entries_.emplace_front(std::move(key), std::move(value));
    index_.emplace(entries_.front().first, entries_.begin());
    bytes_ += cost;
    if (bytes_ > stats_.peak_bytes) stats_.peak_bytes = bytes_;
  }

  std::size_t size() const { return index_.size(); }
  std::size_t bytes() const { return bytes_; }
  std::size_t capacity() const { return capacity_; }
  const CacheStats& stats() const { return stats_; }

 private:
  using Entry = std::pair<ComponentKey, Value>;

  static std::size_t entry_bytes(const ComponentKey& key, const Value& value) {
    // The key is stored twice: in the list entry and in the index.
    return 2 * key.size() * sizeof(std::uint32_t) + value_bytes(value) + kEntryOverhead;
  }

  void evict_one() {
    auto& victim = entries_.back();
    bytes_ -= entry_bytes(victim.first, victim.second);
    index_.erase(victim.first);
    entries_.pop_back();
    ++stats_.evictions;
  }

  std::size_t capacity_;
  std::size_t bytes_ = 0;
  std::list<Entry> entries_;
  std::unordered_map<ComponentKey, typename std::list<Entry>::iterator, ComponentKeyHash> index_;
  CacheStats stats_;
};

}  // namespace mcc
