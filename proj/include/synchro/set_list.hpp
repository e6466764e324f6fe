#pragma once

#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>
#include <vector>

#include "synchro/state_set.hpp"
#include "synchro/util.hpp"

namespace synchro {

// Read-only view of one element of a SetList.
struct SetView {
  const u64* w = nullptr;
  u32 wps = 0;
  u32 card = 0;

  bool test(u32 q) const { return (w[q >> 6] >> (63 - (q & 63))) & 1; }

  bool subset_of(const SetView& other) const {
    for (u32 i = 0; i < wps; ++i)
      if (w[i] & ~other.w[i]) return false;
    return true;
  }

  bool equals(const SetView& other) const {
    for (u32 i = 0; i < wps; ++i)
      if (w[i] != other.w[i]) return false;
    return true;
  }

  bool lex_less(const SetView& other) const {
    for (u32 i = 0; i < wps; ++i)
      if (w[i] != other.w[i]) return w[i] < other.w[i];
    return false;
  }
};

// Contiguous random-access sequence of StateSets with cached cardinalities.
// Elements may carry an opaque 64-bit tag (used for predecessor links); every
// reordering operation moves tags together with their sets.
class SetList {
 public:
  SetList() = default;

  explicit SetList(u32 nbits, bool tagged = false)
      : nbits_(nbits), wps_(static_cast<u32>(StateSet::words_for(nbits))), tagged_(tagged) {}

  u32 nbits() const { return nbits_; }
  u32 words_per_set() const { return wps_; }
  bool tagged() const { return tagged_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  void reserve(std::size_t n) {
    words_.reserve(n * wps_);
    cards_.reserve(n);
    if (tagged_) tags_.reserve(n);
  }

  void resize(std::size_t n) {
    words_.resize(n * wps_, 0);
    cards_.resize(n, 0);
    if (tagged_) tags_.resize(n, 0);
    size_ = n;
  }

  void clear() {
    words_.clear();
    cards_.clear();
    tags_.clear();
    size_ = 0;
  }

  SetView view(std::size_t i) const { return {words_.data() + i * wps_, wps_, cards_[i]}; }

  u64* mutable_words(std::size_t i) { return words_.data() + i * wps_; }
  const u64* words(std::size_t i) const { return words_.data() + i * wps_; }
  u32 card(std::size_t i) const { return cards_[i]; }
  void set_card(std::size_t i, u32 c) { cards_[i] = c; }
  u64 tag(std::size_t i) const { return tags_[i]; }
  void set_tag(std::size_t i, u64 t) { tags_[i] = t; }
  const std::vector<u64>& tags() const { return tags_; }

  void push_back(const StateSet& s, u64 tag = 0) {
    words_.insert(words_.end(), s.words(), s.words() + wps_);
    cards_.push_back(s.size());
    if (tagged_) tags_.push_back(tag);
    ++size_;
  }

  void push_back_view(const SetView& v, u64 tag = 0) {
    words_.insert(words_.end(), v.w, v.w + wps_);
    cards_.push_back(v.card);
    if (tagged_) tags_.push_back(tag);
    ++size_;
  }

  StateSet at(std::size_t i) const {
    StateSet s(nbits_);
    std::memcpy(s.mutable_words(), words(i), wps_ * sizeof(u64));
    s.set_cardinality(cards_[i]);
    return s;
  }

  void swap_items(std::size_t i, std::size_t j) {
    if (i == j) return;
    u64* a = words_.data() + i * wps_;
    u64* b = words_.data() + j * wps_;
    for (u32 t = 0; t < wps_; ++t) std::swap(a[t], b[t]);
    std::swap(cards_[i], cards_[j]);
    if (tagged_) std::swap(tags_[i], tags_[j]);
  }

  void truncate(std::size_t n) {
    if (n >= size_) return;
    words_.resize(n * wps_);
    cards_.resize(n);
    if (tagged_) tags_.resize(n);
    size_ = n;
  }

  // Keeps elements whose flag is nonzero, preserving order.
  void compact_keep(const std::vector<char>& keep) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < size_; ++i) {
      if (!keep[i]) continue;
      if (out != i) {
        std::memmove(words_.data() + out * wps_, words_.data() + i * wps_, wps_ * sizeof(u64));
        cards_[out] = cards_[i];
        if (tagged_) tags_[out] = tags_[i];
      }
      ++out;
    }
    truncate(out);
  }

  // Reorders into a fresh buffer following perm (new position i takes old
  // element perm[i]).
  void apply_permutation(const std::vector<u32>& perm) {
    SetList out(nbits_, tagged_);
    out.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      std::memcpy(out.mutable_words(i), words(perm[i]), wps_ * sizeof(u64));
      out.cards_[i] = cards_[perm[i]];
      if (tagged_) out.tags_[i] = tags_[perm[i]];
    }
    *this = std::move(out);
  }

  void complement_all() {
    const u32 rem = nbits_ & 63;
    const u64 tail = rem == 0 ? ~u64{0} : (~u64{0} << (64 - rem));
    for (std::size_t i = 0; i < size_; ++i) {
      u64* w = words_.data() + i * wps_;
      for (u32 t = 0; t < wps_; ++t) w[t] = ~w[t];
      w[wps_ - 1] &= tail;
      cards_[i] = nbits_ - cards_[i];
    }
  }

  u64 sum_cards() const {
    u64 s = 0;
    for (u32 c : cards_) s += c;
    return s;
  }

  // Mean fraction of set bits; 0 for an empty list.
  double density() const {
    if (size_ == 0 || nbits_ == 0) return 0.0;
    return static_cast<double>(sum_cards()) / (static_cast<double>(nbits_) * size_);
  }

  u32 max_card() const {
    u32 m = 0;
    for (u32 c : cards_) m = std::max(m, c);
    return m;
  }

  u32 min_card() const {
    u32 m = nbits_;
    for (u32 c : cards_) m = std::min(m, c);
    return m;
  }

  // Accounting model: ceil(n/64) words per set plus fixed list overhead.
  u64 byte_footprint() const { return byte_footprint(size_); }
  u64 byte_footprint(std::size_t count) const {
    return MemoryLedger::kListOverhead + static_cast<u64>(count) * wps_ * sizeof(u64);
  }
  static u64 byte_footprint(u32 nbits, std::size_t count) {
    return MemoryLedger::kListOverhead +
           static_cast<u64>(count) * StateSet::words_for(nbits) * sizeof(u64);
  }

 private:
  u32 nbits_ = 0;
  u32 wps_ = 0;
  bool tagged_ = false;
  std::size_t size_ = 0;
  std::vector<u64> words_;
  std::vector<u32> cards_;
  std::vector<u64> tags_;
};

// Deterministic lexicographic sort (index tie-break keeps equal sets in
// input order, which pins which duplicate's tag survives a later dedupe).
inline void sort_lex(SetList& l) {
  std::vector<u32> perm(l.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](u32 a, u32 b) {
    const SetView va = l.view(a), vb = l.view(b);
    if (va.lex_less(vb)) return true;
    if (vb.lex_less(va)) return false;
    return a < b;
  });
  l.apply_permutation(perm);
}

// Descending cardinality, lexicographic tie-break (then index).
inline void sort_card_desc_lex(SetList& l) {
  std::vector<u32> perm(l.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](u32 a, u32 b) {
    const SetView va = l.view(a), vb = l.view(b);
    if (va.card != vb.card) return va.card > vb.card;
    if (va.lex_less(vb)) return true;
    if (vb.lex_less(va)) return false;
    return a < b;
  });
  l.apply_permutation(perm);
}

inline bool is_lex_sorted_unique(const SetList& l) {
  for (std::size_t i = 1; i < l.size(); ++i)
    if (!l.view(i - 1).lex_less(l.view(i))) return false;
  return true;
}

// Removes adjacent duplicates from a sorted list, keeping the first
// occurrence. Returns the number removed.
inline std::size_t dedupe_sorted(SetList& l) {
  if (l.size() <= 1) return 0;
  std::vector<char> keep(l.size(), 1);
  std::size_t removed = 0;
  for (std::size_t i = 1; i < l.size(); ++i) {
    if (l.view(i).equals(l.view(i - 1))) {
      keep[i] = 0;
      ++removed;
    }
  }
  if (removed) l.compact_keep(keep);
  return removed;
}

// Lexicographic sort + dedupe; returns removed/input fraction.
inline double lex_sort_dedupe(SetList& l) {
  if (l.empty()) return 0.0;
  const std::size_t before = l.size();
  sort_lex(l);
  const std::size_t removed = dedupe_sorted(l);
  return static_cast<double>(removed) / static_cast<double>(before);
}

}  // namespace synchro
