#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "synchro/automaton.hpp"
#include "synchro/set_list.hpp"
#include "synchro/util.hpp"

namespace synchro {

struct HeuristicResult {
  Word word;
  u64 length = 0;  // == word.size(); an upper bound on the reset threshold
};

struct EppsteinStats {
  HeuristicResult result;
  u32 merge_phases = 0;
};

// Greedy merging: repeatedly map two states of the current image together
// via a shortest pair-merging word until a singleton remains. The pair
// distance table is recomputed each phase.
inline EppsteinStats eppstein_with_stats(const Automaton& aut, const Deadline& deadline = {}) {
  const u32 n = aut.state_count();
  const u32 k = aut.alphabet_size();
  EppsteinStats out;
  if (n == 1) return out;

  InverseTransitions inv(aut);
  StateSet cur = StateSet::universe(n);
  constexpr u32 kUnreachable = std::numeric_limits<u32>::max();

  while (cur.size() > 1) {
    deadline.check();
    const auto dist = detail::pair_merge_distances(aut, inv);

    u32 bp = 0, bq = 0, bd = kUnreachable;
    std::vector<u32> states;
    states.reserve(cur.size());
    cur.for_each_state([&](u32 q) { states.push_back(q); });
    for (std::size_t i = 0; i < states.size() && bd > 1; ++i) {
      for (std::size_t j = i + 1; j < states.size(); ++j) {
        const u32 d = dist[detail::pair_index(states[i], states[j])];
        if (d < bd) {
          bd = d;
          bp = states[i];
          bq = states[j];
          if (bd == 1) break;
        }
      }
    }
    if (bd == kUnreachable) throw NotSynchronizingError();

    u32 u = bp, v = bq;
    while (u != v) {
      const u32 d = dist[detail::pair_index(std::min(u, v), std::max(u, v))];
      for (u32 a = 0; a < k; ++a) {
        const u32 nu = aut.next(u, a), nv = aut.next(v, a);
        if (dist[detail::pair_index(std::min(nu, nv), std::max(nu, nv))] == d - 1) {
          out.result.word.push_back(a);
          cur = image(aut, cur, a);
          u = nu;
          v = nv;
          break;
        }
      }
    }
    ++out.merge_phases;
    if (out.merge_phases >= n) break;  // each phase shrinks the image
  }

  out.result.length = out.result.word.size();
  if (!is_reset_word(aut, out.result.word))
    throw std::logic_error("eppstein produced an invalid word");
  return out;
}

inline HeuristicResult eppstein(const Automaton& aut, const Deadline& deadline = {}) {
  return eppstein_with_stats(aut, deadline).result;
}

// Inverse BFS from all singletons keeping the beam_size largest sets per
// level (ties broken lexicographically). Succeeds when a kept set equals Q;
// may fail — the caller falls back to another bound then.
inline std::optional<HeuristicResult> beam_ibfs(const Automaton& aut, u64 beam_size,
                                                const Deadline& deadline = {}) {
  const u32 n = aut.state_count();
  const u32 k = aut.alphabet_size();
  if (beam_size < 1) beam_size = 1;
  if (n == 1) return HeuristicResult{};

  TransitionKernel kernel(aut);
  SetList cur(n, true);
  cur.reserve(n);
  for (u32 q = 0; q < n; ++q) cur.push_back(StateSet::singleton(n, q), q);

  std::vector<std::vector<u64>> level_tags;
  const u64 level_cap = static_cast<u64>(n) * k * beam_size;

  for (u64 level = 1; level <= level_cap; ++level) {
    deadline.check();
    SetList next(n, true);
    next.resize(cur.size() * k);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (u32 a = 0; a < k; ++a) {
        const std::size_t o = i * k + a;
        kernel.preimage(cur.words(i), next.mutable_words(o), a);
        u32 c = 0;
        for (u32 t = 0; t < next.words_per_set(); ++t)
          c += static_cast<u32>(std::popcount(next.words(o)[t]));
        next.set_card(o, c);
        next.set_tag(o, (static_cast<u64>(i) << 16) | a);
      }
    }
    sort_card_desc_lex(next);
    dedupe_sorted(next);
    next.truncate(beam_size);
    level_tags.push_back(next.tags());

    if (next.card(0) == n) {
      // Q is first after the cardinality sort; walk predecessors back to a
      // singleton. Each level's tag holds the letter that was prepended, so
      // the walk emits the word front to back.
      HeuristicResult res;
      std::size_t idx = 0;
      for (std::size_t lvl = level_tags.size(); lvl-- > 0;) {
        const u64 tag = level_tags[lvl][idx];
        res.word.push_back(static_cast<u32>(tag & 0xFFFF));
        idx = static_cast<std::size_t>(tag >> 16);
      }
      res.length = res.word.size();
      if (!is_reset_word(aut, res.word))
        throw std::logic_error("beam_ibfs produced an invalid word");
      return res;
    }
    cur = std::move(next);
  }
  return std::nullopt;
}

struct AdaptiveOptions {
  u64 memory = u64{4} << 30;
  u64 initial_beam = 0;  // 0 -> max(64, n)
  double cost_fraction = 0.05;
  double set_cost = 512.0;
  Deadline deadline{};
};

// Eppstein first, then a small beam, then one beam rerun sized so its cost
// stays a small fraction of the predicted exact-search cost. Always returns
// at least the Eppstein bound.
inline HeuristicResult adaptive_upper_bound(const Automaton& aut, const AdaptiveOptions& opt = {}) {
  const u32 n = aut.state_count();
  const u32 k = aut.alphabet_size();
  HeuristicResult best = eppstein(aut, opt.deadline);
  if (n == 1 || best.length <= 1) return best;

  const u64 initial = opt.initial_beam ? opt.initial_beam : std::max<u64>(64, n);
  if (auto b = beam_ibfs(aut, initial, opt.deadline); b && b->length < best.length)
    best = std::move(*b);

  const double r_bound = static_cast<double>(best.length);
  // Rough bidirectional cost: n * k^(R/2) sets, set_cost work per set.
  const double exact_estimate =
      opt.set_cost * n * std::pow(static_cast<double>(k), std::ceil(r_bound / 2.0));
  const double beam_level_cost = opt.set_cost * k * r_bound;
  const double target = opt.cost_fraction * exact_estimate / std::max(beam_level_cost, 1.0);

  const u64 set_bytes = StateSet::words_for(n) * sizeof(u64);
  const u64 mem_cap = opt.memory / ((k + 1) * set_bytes + 16);
  u64 grown = initial;
  if (std::isfinite(target) && target > static_cast<double>(initial))
    grown = static_cast<u64>(std::min(target, 1e9));
  grown = std::min(grown, std::max<u64>(mem_cap, 1));

  if (grown > initial) {
    if (auto b = beam_ibfs(aut, grown, opt.deadline); b && b->length < best.length)
      best = std::move(*b);
  }
  return best;
}

}  // namespace synchro
