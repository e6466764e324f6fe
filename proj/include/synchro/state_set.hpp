#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "synchro/util.hpp"

namespace synchro {

// Characteristic vector of a subset of Q with a cached cardinality.
//
// Packing is MSB-first: state 0 occupies the most significant bit of the
// first word, so comparing the word arrays as unsigned integers orders sets
// lexicographically by their characteristic vectors (state 0 most
// significant). All bits past n-1 stay zero.
class StateSet {
 public:
  StateSet() = default;

  explicit StateSet(u32 n) : nbits_(n), words_(words_for(n), 0), card_(0) {}

  StateSet(u32 n, std::initializer_list<u32> states) : StateSet(n) {
    for (u32 q : states) insert(q);
  }

  static StateSet empty_set(u32 n) { return StateSet(n); }

  static StateSet universe(u32 n) {
    StateSet s(n);
    for (std::size_t i = 0; i < s.words_.size(); ++i) s.words_[i] = ~u64{0};
    s.mask_tail();
    s.card_ = n;
    return s;
  }

  static StateSet singleton(u32 n, u32 q) {
    StateSet s(n);
    s.insert(q);
    return s;
  }

  static constexpr std::size_t words_for(u32 n) { return (n + 63) / 64; }

  u32 nbits() const { return nbits_; }
  u32 size() const { return card_; }
  bool empty() const { return card_ == 0; }

  bool test(u32 q) const { return (words_[q >> 6] >> (63 - (q & 63))) & 1; }

  void insert(u32 q) {
    const u64 m = u64{1} << (63 - (q & 63));
    if (!(words_[q >> 6] & m)) {
      words_[q >> 6] |= m;
      ++card_;
    }
  }

  void erase(u32 q) {
    const u64 m = u64{1} << (63 - (q & 63));
    if (words_[q >> 6] & m) {
      words_[q >> 6] &= ~m;
      --card_;
    }
  }

  void clear() {
    std::fill(words_.begin(), words_.end(), 0);
    card_ = 0;
  }

  void complement() {
    for (auto& w : words_) w = ~w;
    mask_tail();
    card_ = nbits_ - card_;
  }

  bool is_subset_of(const StateSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  bool operator==(const StateSet& other) const {
    return nbits_ == other.nbits_ && words_ == other.words_;
  }
  bool operator!=(const StateSet& other) const { return !(*this == other); }

  // Lexicographic order of characteristic vectors, bit 0 most significant.
  bool lex_less(const StateSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] != other.words_[i]) return words_[i] < other.words_[i];
    return false;
  }

  template <typename Fn>
  void for_each_state(Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      u64 w = words_[i];
      while (w) {
        const int b = std::countl_zero(w);
        fn(static_cast<u32>(i * 64 + b));
        w &= ~(u64{1} << (63 - b));
      }
    }
  }

  u32 first_state() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i]) return static_cast<u32>(i * 64 + std::countl_zero(words_[i]));
    return nbits_;
  }

  u32 recompute_cardinality() {
    u32 c = 0;
    for (u64 w : words_) c += static_cast<u32>(std::popcount(w));
    card_ = c;
    return c;
  }

  const u64* words() const { return words_.data(); }
  u64* mutable_words() { return words_.data(); }
  std::size_t word_count() const { return words_.size(); }

  void set_cardinality(u32 c) { card_ = c; }

  std::string to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for_each_state([&](u32 q) {
      if (!first) os << ',';
      os << q;
      first = false;
    });
    os << '}';
    return os.str();
  }

 private:
  void mask_tail() {
    if (nbits_ == 0 || words_.empty()) return;
    const u32 rem = nbits_ & 63;
    if (rem != 0) words_.back() &= ~u64{0} << (64 - rem);
  }

  u32 nbits_ = 0;
  std::vector<u64> words_;
  u32 card_ = 0;
};

}  // namespace synchro
