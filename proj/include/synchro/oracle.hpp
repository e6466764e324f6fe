#pragma once

#include <bit>
#include <stdexcept>
#include <vector>

#include "synchro/automaton.hpp"
#include "synchro/util.hpp"

namespace synchro {

inline constexpr u32 kOracleMaxStates = 20;

// Exact reset threshold by breadth-first search over the power automaton,
// from Q down to any singleton. Ground truth for small instances; refuses
// n > 20 (the frontier is 2^n).
inline u64 power_set_bfs_oracle(const Automaton& aut, const Deadline& deadline = {}) {
  const u32 n = aut.state_count();
  const u32 k = aut.alphabet_size();
  if (n > kOracleMaxStates)
    throw std::invalid_argument("power_set_bfs_oracle: n > 20 not supported");
  if (n == 1) return 0;

  // Subsets as LSB-indexed masks, local to the oracle.
  std::vector<u32> bit_of(n);
  for (u32 q = 0; q < n; ++q) bit_of[q] = u32{1} << q;

  const u32 full = n == 32 ? ~u32{0} : (u32{1} << n) - 1;
  std::vector<char> visited(static_cast<std::size_t>(full) + 1, 0);
  std::vector<u32> frontier{full}, next;
  visited[full] = 1;

  u64 depth = 0;
  while (!frontier.empty()) {
    deadline.check();
    ++depth;
    next.clear();
    for (u32 s : frontier) {
      for (u32 a = 0; a < k; ++a) {
        u32 img = 0;
        u32 rest = s;
        while (rest) {
          const u32 q = static_cast<u32>(std::countr_zero(rest));
          rest &= rest - 1;
          img |= bit_of[aut.next(q, a)];
        }
        if (!visited[img]) {
          if ((img & (img - 1)) == 0) return depth;  // singleton
          visited[img] = 1;
          next.push_back(img);
        }
      }
    }
    frontier.swap(next);
  }
  throw NotSynchronizingError();
}

}  // namespace synchro
