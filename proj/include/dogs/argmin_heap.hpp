#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dogs {

/// Min-heap over keys[0..n) with lazy invalidation. update() pushes a fresh
/// entry and bumps the index's version; stale entries are discarded when
/// they reach the top. Ties on the key resolve to the lower index.
class ArgminHeap {
 public:
  struct Entry {
    double key;
    std::size_t index;
    std::uint32_t version;
  };

  void reset(std::span<const double> keys) {
    version_.assign(keys.size(), 0);
    heap_.clear();
    heap_.reserve(2 * keys.size() + 16);
    for (std::size_t i = 0; i < keys.size(); ++i) heap_.push_back({keys[i], i, 0});
    std::make_heap(heap_.begin(), heap_.end(), after);
  }

  void update(std::size_t i, double key) {
    heap_.push_back({key, i, ++version_[i]});
    std::push_heap(heap_.begin(), heap_.end(), after);
  }

  /// Smallest fresh entry. Compacts when stale entries dominate.
  Entry top(std::span<const double> keys) {
    if (heap_.size() > 2 * version_.size() + 16) reset(keys);
    drop_stale();
    return heap_.front();
  }

  /// Fresh entry just behind top(), if any.
  std::optional<Entry> runner_up() {
    drop_stale();
    if (heap_.empty()) return std::nullopt;
    Entry first = heap_.front();
    std::pop_heap(heap_.begin(), heap_.end(), after);
    heap_.pop_back();
    drop_stale();
    std::optional<Entry> second;
    if (!heap_.empty()) second = heap_.front();
    heap_.push_back(first);
    std::push_heap(heap_.begin(), heap_.end(), after);
    return second;
  }

  std::size_t size() const noexcept { return version_.size(); }

 private:
  static bool after(const Entry& a, const Entry& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.index > b.index;
  }

  void drop_stale() {
    while (!heap_.empty() && heap_.front().version != version_[heap_.front().index]) {
      std::pop_heap(heap_.begin(), heap_.end(), after);
      heap_.pop_back();
    }
  }

  std::vector<Entry> heap_;
  std::vector<std::uint32_t> version_;
};

}  // namespace dogs
