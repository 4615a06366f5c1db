#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace dispex {

// Fixed-width bit vector over tuple ids 0..n-1.
class TupleSet {
 public:
  TupleSet() = default;
  explicit TupleSet(std::size_t n, bool full = false);

  static TupleSet from_ids(std::size_t n, const std::vector<std::size_t>& ids);

  std::size_t universe() const { return n_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool contains(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void insert(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void erase(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  TupleSet& operator&=(const TupleSet& other);
  TupleSet& operator|=(const TupleSet& other);
  // Set difference: this \ other.
  TupleSet& subtract(const TupleSet& other);
  TupleSet complement() const;

  friend TupleSet operator&(TupleSet a, const TupleSet& b) { return a &= b; }
  friend TupleSet operator|(TupleSet a, const TupleSet& b) { return a |= b; }
  bool operator==(const TupleSet& other) const = default;

  // |this ∩ other| without materializing the intersection.
  std::size_t intersect_count(const TupleSet& other) const;
  std::size_t union_count(const TupleSet& other) const;

  std::vector<std::size_t> ids() const;

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void clear_tail();

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace dispex
