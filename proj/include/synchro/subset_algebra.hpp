#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "synchro/set_list.hpp"

namespace synchro {

struct MarkParams {
  // Interval size below which the recursion switches to pairwise checks.
  std::size_t min_brute = 64;
};

namespace detail {

struct MarkCtx {
  bool proper = false;
  bool early_exit = false;
  bool found = false;
  std::size_t found_a = 0;
  u64 found_b_tag = 0;
  std::size_t min_brute = 64;
  u32 nbits = 0;
};

// B side accessed directly: swaps move the stored sets.
struct DirectB {
  SetList* b;

  SetView view(std::size_t i) const { return b->view(i); }
  bool test(std::size_t i, u32 d) const { return b->view(i).test(d); }
  void swap(std::size_t i, std::size_t j) { b->swap_items(i, j); }
  u64 tag(std::size_t i) const { return b->tagged() ? b->tag(i) : 0; }
};

// B side as an index permutation over an immutable list; used when A and B
// are the same list (self-reduction), so A stays lexicographically sorted.
struct IndexedB {
  const SetList* l;
  std::vector<u32>* idx;

  SetView view(std::size_t i) const { return l->view((*idx)[i]); }
  bool test(std::size_t i, u32 d) const { return l->view((*idx)[i]).test(d); }
  void swap(std::size_t i, std::size_t j) { std::swap((*idx)[i], (*idx)[j]); }
  u64 tag(std::size_t i) const { return l->tagged() ? l->tag((*idx)[i]) : 0; }
};

// Recursive core of MarkSupersets. A is a lex-sorted unique interval
// [alo, ahi); marked elements of B accumulate at the tail of [blo, bend).
// Returns the new bend (first marked position).
template <typename BSide>
std::size_t mark_rec(const SetList& a, std::size_t alo, std::size_t ahi, BSide& b,
                     std::size_t blo, std::size_t bend, u32 d, MarkCtx& ctx) {
  if (alo == ahi || blo == bend) return bend;

  if (ahi - alo < ctx.min_brute || d >= ctx.nbits) {
    for (std::size_t j = blo; j < bend;) {
      const SetView y = b.view(j);
      bool hit = false;
      for (std::size_t i = alo; i < ahi; ++i) {
        const SetView x = a.view(i);
        if (x.card > y.card) continue;
        if (ctx.proper && x.card == y.card) continue;
        if (!x.subset_of(y)) continue;
        if (ctx.proper && x.equals(y)) continue;
        hit = true;
        if (ctx.early_exit) {
          ctx.found = true;
          ctx.found_a = i;
          ctx.found_b_tag = b.tag(j);
          return bend;
        }
        break;
      }
      if (hit) {
        b.swap(j, --bend);
      } else {
        ++j;
      }
    }
    return bend;
  }

  // A agrees on bits < d and is sorted, so the d-th bit splits it at a
  // binary-search boundary: zeros first, ones after.
  std::size_t asplit = alo;
  {
    std::size_t lo = alo, hi = ahi;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (a.view(mid).test(d)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    asplit = lo;
  }

  // Sets without the d-th state can be contained in any B element.
  bend = mark_rec(a, alo, asplit, b, blo, bend, d + 1, ctx);
  if (ctx.found) return bend;

  if (asplit == ahi) return bend;

  // Partition the unmarked part of B by the d-th bit; only elements with the
  // bit set can contain a set from the ones side of A.
  std::size_t i = blo, j = bend;
  while (i < j) {
    if (!b.test(i, d)) {
      ++i;
    } else {
      b.swap(i, --j);
    }
  }
  const std::size_t ones_lo = i;  // elements with the bit set occupy [ones_lo, bend)
  const std::size_t new_bend = mark_rec(a, asplit, ahi, b, ones_lo, bend, d + 1, ctx);
  if (ctx.found) return new_bend;
  // Unmarked: [blo, ones_lo) plus [ones_lo, new_bend) — already contiguous.
  return new_bend;
}

inline void require_sorted_unique(const SetList& a, const char* who) {
  if (!is_lex_sorted_unique(a))
    throw std::invalid_argument(std::string(who) + ": first list must be lex-sorted and unique");
}

}  // namespace detail

// Swaps the elements of b that are supersets (including equality) of at
// least one element of a to the tail. Returns the partition point: b[0..m)
// are the non-supersets, b[m..size) the marked supersets. Order within the
// two segments is unspecified.
inline std::size_t mark_supersets(const SetList& a, SetList& b, const MarkParams& p = {}) {
  detail::require_sorted_unique(a, "mark_supersets");
  detail::MarkCtx ctx;
  ctx.min_brute = p.min_brute;
  ctx.nbits = b.nbits();
  detail::DirectB bs{&b};
  return detail::mark_rec(a, 0, a.size(), bs, 0, b.size(), 0, ctx);
}

// As mark_supersets, but equal sets are not marked.
inline std::size_t mark_proper_supersets(const SetList& a, SetList& b, const MarkParams& p = {}) {
  detail::require_sorted_unique(a, "mark_proper_supersets");
  detail::MarkCtx ctx;
  ctx.proper = true;
  ctx.min_brute = p.min_brute;
  ctx.nbits = b.nbits();
  detail::DirectB bs{&b};
  return detail::mark_rec(a, 0, a.size(), bs, 0, b.size(), 0, ctx);
}

// Marks elements of b that are subsets of some element of a, by
// complementing both sides and marking supersets.
inline std::size_t mark_subsets(const SetList& a, SetList& b, const MarkParams& p = {}) {
  SetList ac(b.nbits());
  ac.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) ac.push_back_view(a.view(i));
  ac.complement_all();
  lex_sort_dedupe(ac);
  b.complement_all();
  detail::MarkCtx ctx;
  ctx.min_brute = p.min_brute;
  ctx.nbits = b.nbits();
  detail::DirectB bs{&b};
  const std::size_t m = detail::mark_rec(ac, 0, ac.size(), bs, 0, b.size(), 0, ctx);
  b.complement_all();
  return m;
}

// Removes elements that are proper supersets of another element, in place;
// the list stays lex-sorted. Returns the number removed. l must be
// lex-sorted and unique.
inline std::size_t self_reduce_minimal(SetList& l, const MarkParams& p = {}) {
  detail::require_sorted_unique(l, "self_reduce_minimal");
  if (l.size() <= 1) return 0;
  std::vector<u32> idx(l.size());
  std::iota(idx.begin(), idx.end(), 0);
  detail::MarkCtx ctx;
  ctx.proper = true;
  ctx.min_brute = p.min_brute;
  ctx.nbits = l.nbits();
  detail::IndexedB bs{&l, &idx};
  const std::size_t m = detail::mark_rec(l, 0, l.size(), bs, 0, l.size(), 0, ctx);
  const std::size_t removed = l.size() - m;
  if (removed) {
    std::vector<char> keep(l.size(), 0);
    for (std::size_t i = 0; i < m; ++i) keep[idx[i]] = 1;
    l.compact_keep(keep);
  }
  return removed;
}

// True iff some X in l_bfs is a subset of some Y in l_ibfs. Early-exits on
// the first containment; l_ibfs may be permuted.
inline bool meet_check(const SetList& l_bfs, SetList& l_ibfs, const MarkParams& p = {}) {
  detail::require_sorted_unique(l_bfs, "meet_check");
  detail::MarkCtx ctx;
  ctx.early_exit = true;
  ctx.min_brute = p.min_brute;
  ctx.nbits = l_ibfs.nbits();
  detail::DirectB bs{&l_ibfs};
  detail::mark_rec(l_bfs, 0, l_bfs.size(), bs, 0, l_ibfs.size(), 0, ctx);
  return ctx.found;
}

struct MeetWitness {
  std::size_t bfs_index;  // position in l_bfs
  u64 ibfs_tag;           // tag of the containing l_ibfs element
};

// meet_check that reports which pair met; works on a copy so l_ibfs keeps
// its order (needed when predecessor tags must stay aligned with levels).
inline std::optional<MeetWitness> meet_find(const SetList& l_bfs, const SetList& l_ibfs,
                                            const MarkParams& p = {}) {
  detail::require_sorted_unique(l_bfs, "meet_find");
  SetList copy = l_ibfs;
  detail::MarkCtx ctx;
  ctx.early_exit = true;
  ctx.min_brute = p.min_brute;
  ctx.nbits = copy.nbits();
  detail::DirectB bs{&copy};
  detail::mark_rec(l_bfs, 0, l_bfs.size(), bs, 0, copy.size(), 0, ctx);
  if (!ctx.found) return std::nullopt;
  return MeetWitness{ctx.found_a, ctx.found_b_tag};
}

}  // namespace synchro
