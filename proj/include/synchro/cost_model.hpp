#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "synchro/util.hpp"

namespace synchro {

enum class StepKind { BFS = 0, BFS_NH = 1, IBFS = 2, IBFS_NH = 3, DFS = 4 };

inline const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::BFS: return "BFS";
    case StepKind::BFS_NH: return "BFS_NH";
    case StepKind::IBFS: return "IBFS";
    case StepKind::IBFS_NH: return "IBFS_NH";
    case StepKind::DFS: return "DFS";
  }
  return "?";
}

struct TuningParams {
  double set_cost = 512.0;
  // Defaults to 1/k when unset.
  std::optional<double> dfs_reduction_of_reduction;
  double dfs_set_cost_weight = 0.25;
  double dfs_check_cost_weight = 0.25;

  double reduction_of_reduction(double k) const {
    return dfs_reduction_of_reduction ? *dfs_reduction_of_reduction : 1.0 / k;
  }
};

// Snapshot of one search side feeding the step-cost formulas. Ratios are the
// exponentially-weighted fractions removed by the three reductions.
struct SideStats {
  double list_size = 0;
  double list_density = 0;
  double hist_size = 0;
  double hist_density = 0;
  double r_dupl = 0;
  double r_self = 0;
  double r_hist = 0;
  bool hist_dropped = false;   // NH step taken earlier; plain step is gone for good
  bool step_feasible = true;   // enough memory for the with-history step
  bool nh_feasible = true;     // enough memory for the history-free step
};

struct SearchStats {
  SideStats bfs;
  SideStats ibfs;
  double k = 2;
  double r = 0;  // current iteration (about to start)
  double R = 1;  // upper bound on the reset threshold
  bool dfs_feasible = true;
};

inline constexpr double kDensityEps = 1e-6;

// Expected number of subset-check operations for marking list B against a
// lex-sorted list A of given sizes and densities. Degenerate densities are
// clamped to [eps, 1-eps] so the formula never divides by zero.
inline double exp_mark(double a_s, double b_s, double a_d, double b_d) {
  if (a_s <= 0 || b_s <= 0) return 0.0;
  a_d = std::clamp(a_d, kDensityEps, 1.0 - kDensityEps);
  b_d = std::clamp(b_d, kDensityEps, 1.0 - kDensityEps);
  const double w = (1.0 + b_d) / (1.0 + a_d * b_d - a_d);
  const double exponent = std::log(1.0 + b_d) / std::log(w);
  return b_s * ((1.0 + b_d) / b_d + 1.0 / (a_d - a_d * b_d)) * std::pow(a_s, exponent);
}

// f = k * (1 - r^dupl_IBFS * DFSReductionOfReduction), the expected
// branching factor of the DFS phase after duplicate removal.
inline double dfs_branching_factor(const SearchStats& s, const TuningParams& p) {
  return s.k * (1.0 - s.ibfs.r_dupl * p.reduction_of_reduction(s.k));
}

namespace detail {

// f * (f^m - 1) / (f - 1); the analytic limit m at f = 1.
inline double geometric_levels(double f, double m) {
  if (m <= 0) return 0.0;
  if (f == 1.0) return m;
  return f * (std::pow(f, m) - 1.0) / (f - 1.0);
}

}  // namespace detail

// Single-step cost of the four list steps (Eq.-style sums of a set cost,
// a self-reduction term, a history term for the with-history kinds, and the
// meet-condition check). IBFS reductions run on complemented vectors, hence
// the 1-density arguments in the IBFS self and history terms.
inline double step_cost(StepKind kind, const SearchStats& s, const TuningParams& p) {
  const double k = s.k;
  const auto& B = s.bfs;
  const auto& I = s.ibfs;
  switch (kind) {
    case StepKind::BFS:
      return p.set_cost * k * B.list_size +
             exp_mark(k * (1 - B.r_dupl) * B.list_size, k * (1 - B.r_dupl) * B.list_size,
                      B.list_density, B.list_density) +
             exp_mark(B.hist_size, k * (1 - B.r_dupl) * (1 - B.r_self) * B.list_size,
                      B.hist_density, B.list_density) +
             exp_mark(k * (1 - B.r_dupl) * (1 - B.r_self) * (1 - B.r_hist) * B.list_size,
                      I.list_size, B.list_density, I.list_density);
    case StepKind::BFS_NH:
      return p.set_cost * k * B.list_size +
             exp_mark(k * (1 - B.r_dupl) * B.list_size, k * (1 - B.r_dupl) * B.list_size,
                      B.list_density, B.list_density) +
             exp_mark(k * (1 - B.r_dupl) * (1 - B.r_self) * B.list_size, I.list_size,
                      B.list_density, I.list_density);
    case StepKind::IBFS:
      return p.set_cost * k * I.list_size +
             exp_mark(k * (1 - I.r_dupl) * I.list_size, k * (1 - I.r_dupl) * I.list_size,
                      1 - I.list_density, 1 - I.list_density) +
             exp_mark(I.hist_size, k * (1 - I.r_dupl) * (1 - I.r_self) * I.list_size,
                      1 - I.hist_density, 1 - I.list_density) +
             exp_mark(B.list_size,
                      k * (1 - I.r_dupl) * (1 - I.r_self) * (1 - I.r_hist) * I.list_size,
                      B.list_density, I.list_density);
    case StepKind::IBFS_NH:
      return p.set_cost * k * I.list_size +
             exp_mark(k * (1 - I.r_dupl) * I.list_size, k * (1 - I.r_dupl) * I.list_size,
                      1 - I.list_density, 1 - I.list_density) +
             exp_mark(B.list_size, k * (1 - I.r_dupl) * (1 - I.r_self) * I.list_size,
                      B.list_density, I.list_density);
    case StepKind::DFS:
      break;
  }
  throw std::logic_error("step_cost: DFS has no single-step cost");
}

// Predicted full cost: the step cost plus a DFS tail over the remaining
// horizon (R - r for the DFS option itself, R - r - 1 after taking one more
// list step), with the meet-check ExpMark evaluated at the post-reduction
// list sizes.
inline double predicted_cost(StepKind kind, const SearchStats& s, const TuningParams& p) {
  const double k = s.k;
  const auto& B = s.bfs;
  const auto& I = s.ibfs;
  const double f = dfs_branching_factor(s, p);
  const double set_term = p.set_cost * p.dfs_set_cost_weight * k / f;

  if (kind == StepKind::DFS) {
    return detail::geometric_levels(f, s.R - s.r) *
           (set_term + p.dfs_check_cost_weight *
                           exp_mark(B.list_size, I.list_size, B.list_density, I.list_density));
  }

  const double tail_levels = detail::geometric_levels(f, s.R - s.r - 1);
  double check;
  switch (kind) {
    case StepKind::BFS:
      check = exp_mark(k * (1 - B.r_dupl) * (1 - B.r_self) * (1 - B.r_hist) * B.list_size,
                       I.list_size, B.list_density, I.list_density);
      break;
    case StepKind::BFS_NH:
      check = exp_mark(k * (1 - B.r_dupl) * (1 - B.r_self) * B.list_size, I.list_size,
                       B.list_density, I.list_density);
      break;
    case StepKind::IBFS:
      check = exp_mark(B.list_size,
                       k * (1 - I.r_dupl) * (1 - I.r_self) * (1 - I.r_hist) * I.list_size,
                       B.list_density, I.list_density);
      break;
    default:  // IBFS_NH
      check = exp_mark(B.list_size, k * (1 - I.r_dupl) * (1 - I.r_self) * I.list_size,
                       B.list_density, I.list_density);
      break;
  }
  return step_cost(kind, s, p) + tail_levels * (set_term + p.dfs_check_cost_weight * check);
}

struct StepCosts {
  // Indexed by StepKind; step[DFS] unused. Infeasible kinds carry infinite
  // costs and a cleared feasible flag (a prediction can also overflow to
  // infinity for a feasible kind, hence the separate mask).
  std::array<double, 5> step{};
  std::array<double, 5> pred{};
  std::array<bool, 5> feasible{};
};

inline StepCosts compute_step_costs(const SearchStats& s, const TuningParams& p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  StepCosts c;
  c.step[4] = inf;
  const auto gate = [&](StepKind kind) {
    switch (kind) {
      case StepKind::BFS: return s.bfs.step_feasible && !s.bfs.hist_dropped;
      case StepKind::BFS_NH: return s.bfs.nh_feasible;
      case StepKind::IBFS: return s.ibfs.step_feasible && !s.ibfs.hist_dropped;
      case StepKind::IBFS_NH: return s.ibfs.nh_feasible;
      case StepKind::DFS: return s.dfs_feasible;
    }
    return false;
  };
  for (StepKind kind : {StepKind::BFS, StepKind::BFS_NH, StepKind::IBFS, StepKind::IBFS_NH}) {
    const auto i = static_cast<std::size_t>(kind);
    c.feasible[i] = gate(kind);
    if (c.feasible[i]) {
      c.step[i] = step_cost(kind, s, p);
      c.pred[i] = predicted_cost(kind, s, p);
    } else {
      c.step[i] = inf;
      c.pred[i] = inf;
    }
  }
  c.feasible[4] = gate(StepKind::DFS);
  c.pred[4] = c.feasible[4] ? predicted_cost(StepKind::DFS, s, p) : inf;
  return c;
}

// Deterministic selection: if both history-free step costs exceed their
// with-history counterparts, the switch to DFS is not imminent and the
// cheaper of BFS/IBFS is taken greedily by single-step cost; otherwise the
// lowest predicted full cost wins, ties resolved in the fixed order
// BFS > IBFS > BFS_NH > IBFS_NH > DFS. Throws when every option is
// infeasible.
inline StepKind select_step(const StepCosts& c) {
  const auto idx = [](StepKind k) { return static_cast<std::size_t>(k); };
  bool any = false;
  for (bool f : c.feasible) any = any || f;
  if (!any) throw OutOfMemoryError("no feasible search step");

  if (c.step[idx(StepKind::BFS_NH)] > c.step[idx(StepKind::BFS)] &&
      c.step[idx(StepKind::IBFS_NH)] > c.step[idx(StepKind::IBFS)]) {
    return c.step[idx(StepKind::BFS)] <= c.step[idx(StepKind::IBFS)] ? StepKind::BFS
                                                                     : StepKind::IBFS;
  }

  constexpr StepKind order[5] = {StepKind::BFS, StepKind::IBFS, StepKind::BFS_NH,
                                 StepKind::IBFS_NH, StepKind::DFS};
  bool have_best = false;
  StepKind best = StepKind::DFS;
  double best_cost = 0;
  for (StepKind k : order) {
    if (!c.feasible[idx(k)]) continue;
    const double v = c.pred[idx(k)];
    if (!have_best || v < best_cost) {
      have_best = true;
      best_cost = v;
      best = k;
    }
  }
  return best;
}

inline StepKind choose_step(const SearchStats& s, const TuningParams& p) {
  return select_step(compute_step_costs(s, p));
}

}  // namespace synchro
