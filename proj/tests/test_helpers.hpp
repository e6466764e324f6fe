#pragma once

#include <set>
#include <vector>

#include "synchro/set_list.hpp"
#include "synchro/state_set.hpp"
#include "synchro/util.hpp"

namespace synchro::testing {

inline StateSet make_set(u32 n, const std::vector<u32>& states) {
  StateSet s(n);
  for (u32 q : states) s.insert(q);
  return s;
}

inline SetList make_list(u32 n, const std::vector<std::vector<u32>>& sets, bool tagged = false) {
  SetList l(n, tagged);
  for (std::size_t i = 0; i < sets.size(); ++i) l.push_back(make_set(n, sets[i]), i);
  return l;
}

inline SetList random_list(u32 n, std::size_t count, SplitMix64& rng, double density = 0.5) {
  SetList l(n);
  for (std::size_t i = 0; i < count; ++i) {
    StateSet s(n);
    for (u32 q = 0; q < n; ++q)
      if (rng.unit() < density) s.insert(q);
    l.push_back(s);
  }
  return l;
}

inline std::multiset<std::vector<u64>> as_multiset(const SetList& l) {
  std::multiset<std::vector<u64>> out;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const u64* w = l.words(i);
    out.insert(std::vector<u64>(w, w + l.words_per_set()));
  }
  return out;
}

// O(|A| * |B|) reference for the marking procedures.
inline std::multiset<std::vector<u64>> naive_supersets(const SetList& a, const SetList& b,
                                                       bool proper) {
  std::multiset<std::vector<u64>> out;
  for (std::size_t j = 0; j < b.size(); ++j) {
    bool marked = false;
    for (std::size_t i = 0; i < a.size() && !marked; ++i) {
      if (!a.view(i).subset_of(b.view(j))) continue;
      if (proper && a.view(i).equals(b.view(j))) continue;
      marked = true;
    }
    if (marked) {
      const u64* w = b.words(j);
      out.insert(std::vector<u64>(w, w + b.words_per_set()));
    }
  }
  return out;
}

inline std::multiset<std::vector<u64>> naive_subsets(const SetList& a, const SetList& b) {
  std::multiset<std::vector<u64>> out;
  for (std::size_t j = 0; j < b.size(); ++j) {
    bool marked = false;
    for (std::size_t i = 0; i < a.size() && !marked; ++i)
      if (b.view(j).subset_of(a.view(i))) marked = true;
    if (marked) {
      const u64* w = b.words(j);
      out.insert(std::vector<u64>(w, w + b.words_per_set()));
    }
  }
  return out;
}

inline std::multiset<std::vector<u64>> marked_suffix(const SetList& b, std::size_t boundary) {
  std::multiset<std::vector<u64>> out;
  for (std::size_t j = boundary; j < b.size(); ++j) {
    const u64* w = b.words(j);
    out.insert(std::vector<u64>(w, w + b.words_per_set()));
  }
  return out;
}

}  // namespace synchro::testing
