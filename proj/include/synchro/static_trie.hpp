#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "synchro/set_list.hpp"
#include "synchro/util.hpp"

namespace synchro {

struct TrieFind {
  std::size_t stored_index;  // position in the list the trie was built from
  u64 query_tag;             // tag of the matching query element
};

// Immutable radix trie over a duplicate-free SetList, answering "does the
// trie store a subset of some query set". Each node splits on a division
// state chosen to cover as many of its sets as possible (never one contained
// in all of them, which also compresses paths), stores the minimum
// cardinality of its subtree for size elimination, and keeps subtrees of at
// most min_leaf sets inline as a payload. A node whose zero side is small
// absorbs it as payload instead of creating a child.
class StaticTrie {
 public:
  static StaticTrie build(const SetList& l, u32 min_leaf = 10) {
    if (l.empty()) throw std::invalid_argument("StaticTrie: list must be non-empty");
    StaticTrie t;
    t.min_leaf_ = std::max<u32>(1, min_leaf);
    t.sets_ = SetList(l.nbits(), true);
    t.sets_.reserve(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) t.sets_.push_back_view(l.view(i), i);
    t.root_ = t.build_node(0, t.sets_.size());
    return t;
  }

  std::size_t size() const { return sets_.size(); }
  std::size_t node_count() const { return nodes_.size(); }
  u32 min_cardinality() const { return nodes_[root_].min_card; }

  // Accounting model: the reordered set copy plus one fixed-size record per
  // node.
  u64 byte_footprint() const {
    return sets_.byte_footprint() + nodes_.size() * sizeof(Node);
  }

  // Joint containment query for a group of sets sharing cardinality `card`:
  // true iff some stored set is a subset of some query in [lo, hi). The
  // group interval may be permuted. Early-exits on the first hit; the
  // witness goes to `out` when given.
  bool contains_subset_of_any(SetList& queries, std::size_t lo, std::size_t hi, u32 card,
                              TrieFind* out = nullptr) const {
    if (lo >= hi) return false;
    return query_node(root_, queries, lo, hi, card, out);
  }

  // Convenience single-set query.
  bool contains_subset_of(const StateSet& y) const {
    SetList one(sets_.nbits());
    one.push_back(y);
    return contains_subset_of_any(one, 0, 1, y.size());
  }

  template <typename Fn>
  void enumerate(Fn&& fn) const {
    for (std::size_t i = 0; i < sets_.size(); ++i) fn(sets_.view(i), sets_.tag(i));
  }

  // Structural checks used by tests: min_card values and payload sizes.
  bool validate() const { return validate_node(root_).ok; }

 private:
  static constexpr u32 kNoChild = std::numeric_limits<u32>::max();
  static constexpr u32 kNoState = std::numeric_limits<u32>::max();

  struct Node {
    u32 div_state = kNoState;
    u32 min_card = 0;
    u32 zero = kNoChild;
    u32 one = kNoChild;
    u32 payload_lo = 0;
    u32 payload_hi = 0;  // payload interval in sets_, empty when lo == hi
  };

  u32 build_node(std::size_t lo, std::size_t hi) {
    const u32 id = static_cast<u32>(nodes_.size());
    nodes_.emplace_back();
    u32 mc = sets_.nbits();
    for (std::size_t i = lo; i < hi; ++i) mc = std::min(mc, sets_.card(i));
    nodes_[id].min_card = mc;

    if (hi - lo <= min_leaf_) {
      nodes_[id].payload_lo = static_cast<u32>(lo);
      nodes_[id].payload_hi = static_cast<u32>(hi);
      return id;
    }

    const u32 x = pick_division_state(lo, hi);
    nodes_[id].div_state = x;

    // Partition: sets without x first.
    std::size_t i = lo, j = hi;
    while (i < j) {
      if (!sets_.view(i).test(x)) {
        ++i;
      } else {
        sets_.swap_items(i, --j);
      }
    }
    const std::size_t split = i;

    if (split - lo <= min_leaf_) {
      nodes_[id].payload_lo = static_cast<u32>(lo);
      nodes_[id].payload_hi = static_cast<u32>(split);
    } else {
      const u32 z = build_node(lo, split);
      nodes_[id].zero = z;
    }
    const u32 o = build_node(split, hi);
    nodes_[id].one = o;
    return id;
  }

  // The state contained in the largest number (but not all) of the
  // interval's sets; ties go to the smallest state index. Distinct sets
  // guarantee such a state exists.
  u32 pick_division_state(std::size_t lo, std::size_t hi) {
    std::vector<u32> counts(sets_.nbits(), 0);
    for (std::size_t i = lo; i < hi; ++i) {
      const u64* w = sets_.words(i);
      for (u32 t = 0; t < sets_.words_per_set(); ++t) {
        u64 word = w[t];
        while (word) {
          const int b = std::countl_zero(word);
          ++counts[t * 64 + b];
          word &= ~(u64{1} << (63 - b));
        }
      }
    }
    const u32 total = static_cast<u32>(hi - lo);
    u32 best = kNoState, best_count = 0;
    for (u32 q = 0; q < sets_.nbits(); ++q) {
      if (counts[q] > best_count && counts[q] < total) {
        best_count = counts[q];
        best = q;
      }
    }
    if (best == kNoState)
      throw std::invalid_argument("StaticTrie: list must not contain duplicates");
    return best;
  }

  bool query_node(u32 id, SetList& q, std::size_t lo, std::size_t hi, u32 card,
                  TrieFind* out) const {
    const Node& node = nodes_[id];
    if (node.min_card > card) return false;

    for (std::size_t s = node.payload_lo; s < node.payload_hi; ++s) {
      const SetView x = sets_.view(s);
      if (x.card > card) continue;
      for (std::size_t i = lo; i < hi; ++i) {
        if (x.subset_of(q.view(i))) {
          if (out) {
            out->stored_index = static_cast<std::size_t>(sets_.tag(s));
            out->query_tag = q.tagged() ? q.tag(i) : 0;
          }
          return true;
        }
      }
    }
    if (node.div_state == kNoState) return false;

    if (node.zero != kNoChild && query_node(node.zero, q, lo, hi, card, out)) return true;

    if (node.one != kNoChild) {
      // Only queries containing the division state can have subsets there.
      std::size_t i = lo, j = hi;
      while (i < j) {
        if (!q.view(i).test(node.div_state)) {
          ++i;
        } else {
          q.swap_items(i, --j);
        }
      }
      if (i < hi && query_node(node.one, q, i, hi, card, out)) return true;
    }
    return false;
  }

  struct Validation {
    bool ok;
    u32 min_card;
  };

  Validation validate_node(u32 id) const {
    const Node& node = nodes_[id];
    u32 mc = sets_.nbits();
    bool ok = node.payload_hi - node.payload_lo <= min_leaf_;
    for (std::size_t s = node.payload_lo; s < node.payload_hi; ++s) {
      mc = std::min(mc, sets_.card(s));
      if (node.div_state != kNoState && sets_.view(s).test(node.div_state)) ok = false;
    }
    if (node.zero != kNoChild) {
      const auto v = validate_node(node.zero);
      ok = ok && v.ok;
      mc = std::min(mc, v.min_card);
    }
    if (node.one != kNoChild) {
      const auto v = validate_node(node.one);
      ok = ok && v.ok;
      mc = std::min(mc, v.min_card);
    }
    return {ok && mc == node.min_card, mc};
  }

  u32 min_leaf_ = 10;
  u32 root_ = 0;
  SetList sets_;
  std::vector<Node> nodes_;
};

}  // namespace synchro
