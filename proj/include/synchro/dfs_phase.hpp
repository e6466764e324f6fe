#pragma once

#include <algorithm>
#include <ostream>
#include <vector>

#include "synchro/automaton.hpp"
#include "synchro/set_list.hpp"
#include "synchro/static_trie.hpp"
#include "synchro/subset_algebra.hpp"
#include "synchro/util.hpp"

namespace synchro {

struct DfsParams {
  u32 dedupe_cadence = 2;          // 0 = never, 1 = every level
  u32 reduce_cadence = 3;          // cadence of MarkSubsets against the largest sets
  std::size_t largest_window = 20000;  // how many of the largest sets prune the rest
  std::size_t min_brute = 64;
};

struct DfsFind {
  bool found = false;
  std::size_t trie_index = 0;  // position in the list the trie was built over
  std::size_t root_index = 0;  // position in the initial (IBFS) list
  Word middle;                 // letters from the found level back to the initial list
};

// Inverse depth-first search below a static trie over the frozen BFS list.
// Each level computes preimages of its slice, sorts by descending
// cardinality, periodically dedupes and prunes subsets of the largest sets,
// queries the trie per cardinality group, and recurses over slices sized so
// the remaining levels fit the memory budget.
class DfsPhase {
 public:
  DfsPhase(const TransitionKernel& kernel, const StaticTrie& trie, MemoryLedger& ledger,
           const DfsParams& params, Deadline deadline, bool tracking)
      : kernel_(kernel),
        trie_(trie),
        ledger_(ledger),
        params_(params),
        deadline_(deadline),
        tracking_(tracking) {}

  // Explores word lengths r0, r0+1, ..., bound-1; returns the final bound
  // (the reset threshold whenever the initial bound upper-bounds it).
  u64 run(const SetList& initial, u64 r0, u64 bound) {
    bound_ = bound;
    if (r0 >= bound_ || initial.empty()) return bound_;
    // Top-level split: the initial list plays the role of the previous
    // level's output.
    const std::size_t cap = slice_cap(r0 - 1);
    for (std::size_t lo = 0; lo < initial.size(); lo += cap) {
      recurse(initial, lo, std::min(initial.size(), lo + cap), r0, 0, nullptr);
      if (r0 >= bound_) break;
    }
    return bound_;
  }

  const DfsFind& find() const { return find_; }

 private:
  struct Frame {
    const Frame* up;
    const std::vector<u64>* tags;
  };

  struct ChargeGuard {
    MemoryLedger& ledger;
    u64 amount;
    ~ChargeGuard() { ledger.release(amount); }
  };

  std::size_t slice_cap(u64 r) const {
    const u64 set_bytes = StateSet::words_for(kernel_.state_count()) * sizeof(u64);
    const u64 levels = bound_ > r ? bound_ - r : 1;
    const u64 denom = (kernel_.alphabet_size() + 1) * levels * set_bytes;
    const u64 cap = ledger_.available() / std::max<u64>(denom, 1);
    return static_cast<std::size_t>(std::max<u64>(cap, 1));
  }

  void recurse(const SetList& list, std::size_t lo, std::size_t hi, u64 r, u32 level,
               const Frame* parent) {
    deadline_.check();
    const u32 k = kernel_.alphabet_size();
    const u32 n = kernel_.state_count();

    SetList next(n, tracking_);
    u64 charged = SetList::byte_footprint(n, (hi - lo) * k);
    ledger_.charge_or_throw(charged);
    ChargeGuard guard{ledger_, charged};
    next.resize((hi - lo) * k);
    for (std::size_t i = lo; i < hi; ++i) {
      for (u32 a = 0; a < k; ++a) {
        const std::size_t o = (i - lo) * k + a;
        kernel_.preimage(list.words(i), next.mutable_words(o), a);
        u32 c = 0;
        for (u32 t = 0; t < next.words_per_set(); ++t)
          c += static_cast<u32>(std::popcount(next.words(o)[t]));
        next.set_card(o, c);
        if (tracking_) next.set_tag(o, (static_cast<u64>(i) << 16) | a);
      }
    }

    sort_card_desc_lex(next);
    if (params_.dedupe_cadence && level % params_.dedupe_cadence == 0) dedupe_sorted(next);
    if (params_.reduce_cadence && level % params_.reduce_cadence == 0 &&
        next.size() > params_.largest_window) {
      // Proper-subset semantics so the largest sets do not erase themselves.
      SetList largest(n);
      largest.reserve(params_.largest_window);
      for (std::size_t i = 0; i < params_.largest_window; ++i)
        largest.push_back_view(next.view(i));
      largest.complement_all();
      lex_sort_dedupe(largest);
      next.complement_all();
      const std::size_t m = [&] {
        detail::MarkCtx ctx;
        ctx.proper = true;
        ctx.min_brute = params_.min_brute;
        ctx.nbits = n;
        detail::DirectB bs{&next};
        return detail::mark_rec(largest, 0, largest.size(), bs, 0, next.size(), 0, ctx);
      }();
      next.complement_all();
      next.truncate(m);
      sort_card_desc_lex(next);
    }
    // Reflect the reduced size in the ledger.
    const u64 now = SetList::byte_footprint(n, next.size());
    if (now < charged) {
      ledger_.release(charged - now);
      guard.amount = now;
    }

    // Trie query per cardinality group.
    std::size_t i = 0;
    while (i < next.size()) {
      const u32 c = next.card(i);
      std::size_t j = i + 1;
      while (j < next.size() && next.card(j) == c) ++j;
      TrieFind tf;
      if (trie_.contains_subset_of_any(next, i, j, c, tracking_ ? &tf : nullptr)) {
        bound_ = r;
        if (tracking_) record_find(tf, parent);
        return;
      }
      i = j;
    }

    if (r >= bound_ - 1) return;

    const Frame frame{parent, &next.tags()};
    const std::size_t cap = slice_cap(r);
    for (std::size_t plo = 0; plo < next.size(); plo += cap) {
      recurse(next, plo, std::min(next.size(), plo + cap), r + 1, level + 1, &frame);
      if (r >= bound_ - 1) return;
    }
  }

  void record_find(const TrieFind& tf, const Frame* parent) {
    find_.found = true;
    find_.trie_index = tf.stored_index;
    find_.middle.clear();
    u64 tag = tf.query_tag;
    const Frame* f = parent;
    while (true) {
      find_.middle.push_back(static_cast<u32>(tag & 0xFFFF));
      const std::size_t idx = static_cast<std::size_t>(tag >> 16);
      if (!f) {
        find_.root_index = idx;
        break;
      }
      tag = (*f->tags)[idx];
      f = f->up;
    }
  }

  const TransitionKernel& kernel_;
  const StaticTrie& trie_;
  MemoryLedger& ledger_;
  DfsParams params_;
  Deadline deadline_;
  bool tracking_;
  u64 bound_ = 0;
  DfsFind find_;
};

}  // namespace synchro
