#include "dispex/tuple_set.hpp"

#include <cassert>

namespace dispex {

TupleSet::TupleSet(std::size_t n, bool full)
    : n_(n), words_((n + 63) / 64, full ? ~std::uint64_t{0} : 0) {
  clear_tail();
}

TupleSet TupleSet::from_ids(std::size_t n, const std::vector<std::size_t>& ids) {
  TupleSet s(n);
  for (auto i : ids) {
    assert(i < n);
    s.insert(i);
  }
  return s;
}

void TupleSet::clear_tail() {
  if (n_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  }
}

std::size_t TupleSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

TupleSet& TupleSet::operator&=(const TupleSet& other) {
  assert(n_ == other.n_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

TupleSet& TupleSet::operator|=(const TupleSet& other) {
  assert(n_ == other.n_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

TupleSet& TupleSet::subtract(const TupleSet& other) {
  assert(n_ == other.n_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

TupleSet TupleSet::complement() const {
  TupleSet out = *this;
  for (auto& w : out.words_) w = ~w;
  out.clear_tail();
  return out;
}

std::size_t TupleSet::intersect_count(const TupleSet& other) const {
  assert(n_ == other.n_);
  std::size_t c = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
  }
  return c;
}

std::size_t TupleSet::union_count(const TupleSet& other) const {
  assert(n_ == other.n_);
  std::size_t c = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    c += static_cast<std::size_t>(std::popcount(words_[i] | other.words_[i]));
  }
  return c;
}

std::vector<std::size_t> TupleSet::ids() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each([&](std::size_t i) { out.push_back(i); });
  return out;
}

}  // namespace dispex
