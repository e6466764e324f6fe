#pragma once

#include <algorithm>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "synchro/set_list.hpp"
#include "synchro/state_set.hpp"
#include "synchro/util.hpp"

namespace synchro {

// Deterministic finite complete automaton: n states, k letters, total
// transition table. State indices are 0-based everywhere.
class Automaton {
 public:
  Automaton(u32 n, u32 k, std::vector<u32> delta) : n_(n), k_(k), delta_(std::move(delta)) {
    if (n_ < 1 || k_ < 1) throw std::invalid_argument("automaton needs n >= 1 and k >= 1");
    if (delta_.size() != static_cast<std::size_t>(n_) * k_)
      throw std::invalid_argument("transition table has wrong size");
    for (u32 t : delta_)
      if (t >= n_) throw std::invalid_argument("transition target out of range");
  }

  u32 state_count() const { return n_; }
  u32 alphabet_size() const { return k_; }

  u32 next(u32 q, u32 a) const { return delta_[static_cast<std::size_t>(q) * k_ + a]; }

  const std::vector<u32>& table() const { return delta_; }

  bool operator==(const Automaton& o) const {
    return n_ == o.n_ && k_ == o.k_ && delta_ == o.delta_;
  }

 private:
  u32 n_;
  u32 k_;
  std::vector<u32> delta_;  // row q, column a
};

// CSR lists of delta-preimages: for (a, q) the states p with delta(p,a)=q.
class InverseTransitions {
 public:
  explicit InverseTransitions(const Automaton& aut)
      : n_(aut.state_count()), k_(aut.alphabet_size()) {
    offsets_.assign(static_cast<std::size_t>(k_) * n_ + 1, 0);
    for (u32 q = 0; q < n_; ++q)
      for (u32 a = 0; a < k_; ++a) ++offsets_[static_cast<std::size_t>(a) * n_ + aut.next(q, a) + 1];
    for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
    sources_.resize(static_cast<std::size_t>(n_) * k_);
    std::vector<u32> fill(offsets_.begin(), offsets_.end() - 1);
    for (u32 q = 0; q < n_; ++q)
      for (u32 a = 0; a < k_; ++a)
        sources_[fill[static_cast<std::size_t>(a) * n_ + aut.next(q, a)]++] = q;
  }

  u32 state_count() const { return n_; }
  u32 alphabet_size() const { return k_; }

  std::pair<const u32*, const u32*> sources(u32 a, u32 q) const {
    const std::size_t i = static_cast<std::size_t>(a) * n_ + q;
    return {sources_.data() + offsets_[i], sources_.data() + offsets_[i + 1]};
  }

  std::size_t total_size() const { return sources_.size(); }

 private:
  u32 n_, k_;
  std::vector<u32> offsets_;
  std::vector<u32> sources_;
};

inline StateSet image(const Automaton& aut, const StateSet& s, u32 a) {
  StateSet out(aut.state_count());
  s.for_each_state([&](u32 q) { out.insert(aut.next(q, a)); });
  return out;
}

inline StateSet preimage(const InverseTransitions& inv, const StateSet& s, u32 a) {
  StateSet out(inv.state_count());
  s.for_each_state([&](u32 q) {
    auto [b, e] = inv.sources(a, q);
    for (; b != e; ++b) out.insert(*b);
  });
  return out;
}

inline StateSet preimage(const Automaton& aut, const StateSet& s, u32 a) {
  StateSet out(aut.state_count());
  for (u32 q = 0; q < aut.state_count(); ++q)
    if (s.test(aut.next(q, a))) out.insert(q);
  return out;
}

inline StateSet apply_word(const Automaton& aut, StateSet s, const Word& w) {
  for (u32 a : w) s = image(aut, s, a);
  return s;
}

inline bool is_reset_word(const Automaton& aut, const Word& w) {
  return apply_word(aut, StateSet::universe(aut.state_count()), w).size() == 1;
}

namespace detail {

inline std::size_t pair_index(u32 p, u32 q) {
  // p <= q
  return static_cast<std::size_t>(q) * (q + 1) / 2 + p;
}

// Backward BFS in the pair automaton from the diagonal. dist[{p,q}] is the
// length of a shortest word merging p and q, or UINT32_MAX if none exists.
inline std::vector<u32> pair_merge_distances(const Automaton& aut, const InverseTransitions& inv) {
  const u32 n = aut.state_count();
  const u32 k = aut.alphabet_size();
  std::vector<u32> dist(pair_index(n - 1, n - 1) + 1, std::numeric_limits<u32>::max());
  std::deque<std::pair<u32, u32>> queue;
  for (u32 q = 0; q < n; ++q) {
    dist[pair_index(q, q)] = 0;
    queue.emplace_back(q, q);
  }
  while (!queue.empty()) {
    auto [u, v] = queue.front();
    queue.pop_front();
    const u32 d = dist[pair_index(std::min(u, v), std::max(u, v))];
    for (u32 a = 0; a < k; ++a) {
      auto [pb, pe] = inv.sources(a, u);
      auto [qb, qe] = inv.sources(a, v);
      for (const u32* pi = pb; pi != pe; ++pi) {
        for (const u32* qi = qb; qi != qe; ++qi) {
          const u32 p = std::min(*pi, *qi), q = std::max(*pi, *qi);
          auto& dd = dist[pair_index(p, q)];
          if (dd == std::numeric_limits<u32>::max()) {
            dd = d + 1;
            queue.emplace_back(p, q);
          }
        }
      }
    }
  }
  return dist;
}

}  // namespace detail

// Every pair of states can be merged iff the automaton is synchronizing.
inline bool is_synchronizing(const Automaton& aut) {
  InverseTransitions inv(aut);
  const auto dist = detail::pair_merge_distances(aut, inv);
  return std::find(dist.begin(), dist.end(), std::numeric_limits<u32>::max()) == dist.end();
}

inline Automaton random_automaton(u32 n, u32 k, u64 seed) {
  SplitMix64 rng(seed);
  std::vector<u32> delta(static_cast<std::size_t>(n) * k);
  for (auto& t : delta) t = static_cast<u32>(rng.below(n));
  return Automaton(n, k, std::move(delta));
}

// Two letters: a cyclic shift and a letter that moves only state 0 (to 1).
// Reset threshold is (n-1)^2.
inline Automaton cerny_automaton(u32 n) {
  if (n < 2) throw std::invalid_argument("cerny automaton needs n >= 2");
  std::vector<u32> delta(static_cast<std::size_t>(n) * 2);
  for (u32 q = 0; q < n; ++q) {
    delta[q * 2 + 0] = (q + 1) % n;
    delta[q * 2 + 1] = q == 0 ? 1 : q;
  }
  return Automaton(n, 2, std::move(delta));
}

// Text format: first non-comment line "n k", then n lines of k targets,
// line q column a holding delta(q, a). '#' starts a comment.
inline Automaton parse_automaton(std::istream& in) {
  std::vector<u32> numbers;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long v;
    while (ls >> v) {
      if (v < 0) throw ParseError("negative value in automaton file");
      numbers.push_back(static_cast<u32>(v));
    }
    if (!ls.eof()) throw ParseError("invalid token in automaton file");
  }
  if (numbers.size() < 2) throw ParseError("missing automaton header");
  const u32 n = numbers[0], k = numbers[1];
  if (n < 1 || k < 1) throw ParseError("automaton header must satisfy n >= 1, k >= 1");
  if (numbers.size() != 2 + static_cast<std::size_t>(n) * k)
    throw ParseError("wrong number of transitions in automaton file");
  std::vector<u32> delta(numbers.begin() + 2, numbers.end());
  for (u32 t : delta)
    if (t >= n) throw ParseError("transition target out of range");
  return Automaton(n, k, std::move(delta));
}

inline Automaton parse_automaton(const std::string& text) {
  std::istringstream in(text);
  return parse_automaton(in);
}

inline void write_automaton(std::ostream& out, const Automaton& aut) {
  out << aut.state_count() << ' ' << aut.alphabet_size() << '\n';
  for (u32 q = 0; q < aut.state_count(); ++q) {
    for (u32 a = 0; a < aut.alphabet_size(); ++a) {
      if (a) out << ' ';
      out << aut.next(q, a);
    }
    out << '\n';
  }
}

// Byte-indexed transition tables: the image (or preimage) of a set is the OR
// of precomputed masks, one lookup per byte of the input vector. This is the
// hot kernel of the BFS/IBFS/DFS phases.
class TransitionKernel {
 public:
  explicit TransitionKernel(const Automaton& aut)
      : n_(aut.state_count()),
        k_(aut.alphabet_size()),
        wps_(static_cast<u32>(StateSet::words_for(n_))),
        bytes_(wps_ * 8) {
    InverseTransitions inv(aut);
    img_.resize(table_words());
    pre_.resize(table_words());
    StateSet tmp(n_);
    for (u32 a = 0; a < k_; ++a) {
      build_table(img_.data() + table_offset(a), [&](u32 q) {
        tmp.clear();
        tmp.insert(aut.next(q, a));
        return tmp.words();
      });
      build_table(pre_.data() + table_offset(a), [&](u32 q) {
        tmp.clear();
        auto [b, e] = inv.sources(a, q);
        for (; b != e; ++b) tmp.insert(*b);
        return tmp.words();
      });
    }
  }

  u32 state_count() const { return n_; }
  u32 alphabet_size() const { return k_; }
  u32 words_per_set() const { return wps_; }

  void image(const u64* src, u64* dst, u32 a) const { apply(img_.data() + table_offset(a), src, dst); }

  void preimage(const u64* src, u64* dst, u32 a) const {
    apply(pre_.data() + table_offset(a), src, dst);
  }

 private:
  std::size_t table_offset(u32 a) const {
    return static_cast<std::size_t>(a) * bytes_ * 256 * wps_;
  }
  std::size_t table_words() const { return static_cast<std::size_t>(k_) * bytes_ * 256 * wps_; }

  template <typename MaskOf>
  void build_table(u64* table, MaskOf&& mask_of) {
    // Entry for (byte position b, byte value v) is the OR of the single-state
    // masks of the states whose bit lies in that byte; built incrementally
    // from v with its lowest bit cleared.
    for (u32 b = 0; b < bytes_; ++b) {
      u64* rows = table + static_cast<std::size_t>(b) * 256 * wps_;
      std::fill(rows, rows + wps_, 0);
      for (u32 v = 1; v < 256; ++v) {
        const u32 low = v & (v - 1);
        const int bit = std::countr_zero(v);  // bit index from LSB of the byte
        const u32 state = b * 8 + (7 - bit);
        u64* row = rows + static_cast<std::size_t>(v) * wps_;
        const u64* base = rows + static_cast<std::size_t>(low) * wps_;
        if (state < n_) {
          const u64* m = mask_of(state);
          for (u32 t = 0; t < wps_; ++t) row[t] = base[t] | m[t];
        } else {
          std::copy(base, base + wps_, row);
        }
      }
    }
  }

  void apply(const u64* table, const u64* src, u64* dst) const {
    for (u32 t = 0; t < wps_; ++t) dst[t] = 0;
    for (u32 b = 0; b < bytes_; ++b) {
      const u32 v = static_cast<u32>((src[b >> 3] >> (56 - 8 * (b & 7))) & 0xFF);
      if (!v) continue;
      const u64* row = table + (static_cast<std::size_t>(b) * 256 + v) * wps_;
      for (u32 t = 0; t < wps_; ++t) dst[t] |= row[t];
    }
  }

  u32 n_, k_, wps_, bytes_;
  std::vector<u64> img_;
  std::vector<u64> pre_;
};

}  // namespace synchro
