#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "synchro/automaton.hpp"
#include "synchro/cost_model.hpp"
#include "synchro/dfs_phase.hpp"
#include "synchro/heuristics.hpp"
#include "synchro/set_list.hpp"
#include "synchro/static_trie.hpp"
#include "synchro/subset_algebra.hpp"
#include "synchro/util.hpp"

namespace synchro {

enum class Schedule {
  Auto,          // cost-model driven
  BfsOnly,       // forward steps until memory forces DFS
  IbfsOnly,      // inverse steps until memory forces DFS
  DfsImmediate,  // hand off to DFS on the first iteration
};

struct EngineTuning {
  TuningParams cost;
  std::size_t min_brute = 64;
  u32 min_leaf = 10;
  std::size_t dfs_largest = 20000;
  u32 dfs_dedupe_cadence = 2;
  u32 dfs_reduce_cadence = 3;
  double history_growth = 2.0;  // reduce H once it doubles
  u64 beam_initial = 0;         // 0 -> max(64, n)
  double beam_cost_fraction = 0.05;
};

struct SolveOptions {
  u64 memory = u64{4} << 30;
  std::optional<double> time_limit{};
  bool track_word = false;
  Schedule schedule = Schedule::Auto;
  EngineTuning tuning{};
  std::ostream* trace = nullptr;
  // Skips the heuristic phase when set; must be a length of some reset word.
  std::optional<u64> upper_bound{};
};

struct SolveResult {
  u64 threshold = 0;
  std::optional<Word> word;
  u64 upper_bound = 0;
  u64 iterations = 0;
  u64 bfs_steps = 0;
  u64 ibfs_steps = 0;
  bool used_dfs = false;
  u64 peak_memory = 0;
};

namespace detail {

// One bidirectional search. L_BFS is kept lex-sorted and unique between
// steps; the IBFS history is stored complemented so the BFS-side reduction
// machinery applies unchanged (subset relations flip under complement).
class BibfsEngine {
 public:
  BibfsEngine(const Automaton& aut, u64 upper_bound, const SolveOptions& opt)
      : aut_(aut),
        opt_(opt),
        kernel_(aut),
        ledger_(opt.memory),
        deadline_(Deadline::from_limit(opt.time_limit)),
        n_(aut.state_count()),
        k_(aut.alphabet_size()),
        R_(upper_bound),
        lbfs_(n_, opt.track_word),
        libfs_(n_, opt.track_word),
        hbfs_(n_),
        hibfs_c_(n_) {
    lbfs_.push_back(StateSet::universe(n_), 0);
    hbfs_.push_back(StateSet::universe(n_));
    libfs_.reserve(n_);
    hibfs_c_.reserve(n_);
    for (u32 q = 0; q < n_; ++q) {
      libfs_.push_back(StateSet::singleton(n_, q), q);
      StateSet c = StateSet::singleton(n_, q);
      c.complement();
      hibfs_c_.push_back(c);
    }
    ledger_.charge_or_throw(lbfs_.byte_footprint() + libfs_.byte_footprint() +
                            hbfs_.byte_footprint() + hibfs_c_.byte_footprint());
    h_bfs_last_reduced_ = hbfs_.size();
    h_ibfs_last_reduced_ = hibfs_c_.size();
  }

  const SetList& l_bfs() const { return lbfs_; }
  const SetList& l_ibfs() const { return libfs_; }
  const SetList& h_bfs() const { return hbfs_; }
  const SetList& h_ibfs_complement() const { return hibfs_c_; }
  MemoryLedger& ledger() { return ledger_; }
  u64 bound() const { return R_; }
  u64 iteration() const { return r_; }
  bool bfs_history_dropped() const { return bfs_hist_dropped_; }
  bool ibfs_history_dropped() const { return ibfs_hist_dropped_; }

  SearchStats make_stats() const {
    SearchStats s;
    s.k = k_;
    s.r = static_cast<double>(r_);
    s.R = static_cast<double>(R_);
    const u64 used = ledger_.used();
    const u64 budget = ledger_.budget();
    const auto fits = [&](u64 extra, u64 freed) {
      const u64 base = used > freed ? used - freed : 0;
      return extra <= budget && base <= budget - extra;
    };

    s.bfs.list_size = static_cast<double>(lbfs_.size());
    s.bfs.list_density = lbfs_.density();
    s.bfs.hist_size = static_cast<double>(hbfs_.size());
    s.bfs.hist_density = hbfs_.density();
    s.bfs.r_dupl = ratio_bfs_[0];
    s.bfs.r_self = ratio_bfs_[1];
    s.bfs.r_hist = ratio_bfs_[2];
    s.bfs.hist_dropped = bfs_hist_dropped_;
    const u64 next_bfs = SetList::byte_footprint(n_, lbfs_.size() * k_);
    s.bfs.step_feasible = !failed_[0] && fits(next_bfs, 0);
    s.bfs.nh_feasible =
        !failed_[1] && fits(next_bfs, bfs_hist_dropped_ ? 0 : hbfs_.byte_footprint());

    s.ibfs.list_size = static_cast<double>(libfs_.size());
    s.ibfs.list_density = libfs_.density();
    s.ibfs.hist_size = static_cast<double>(hibfs_c_.size());
    s.ibfs.hist_density = hibfs_c_.empty() ? 0.0 : 1.0 - hibfs_c_.density();
    s.ibfs.r_dupl = ratio_ibfs_[0];
    s.ibfs.r_self = ratio_ibfs_[1];
    s.ibfs.r_hist = ratio_ibfs_[2];
    s.ibfs.hist_dropped = ibfs_hist_dropped_;
    const u64 next_ibfs = SetList::byte_footprint(n_, libfs_.size() * k_);
    s.ibfs.step_feasible = !failed_[2] && fits(next_ibfs, 0);
    s.ibfs.nh_feasible =
        !failed_[3] && fits(next_ibfs, ibfs_hist_dropped_ ? 0 : hibfs_c_.byte_footprint());

    s.dfs_feasible = true;
    return s;
  }

  // One forward step. Replaces L_BFS with its reduced image list and, with
  // history enabled, prunes the history first when it has grown and merges
  // the new frontier into it afterwards.
  void bfs_step(bool with_history) {
    if (!with_history) drop_bfs_history();
    if (with_history &&
        static_cast<double>(hbfs_.size()) >=
            opt_.tuning.history_growth * static_cast<double>(h_bfs_last_reduced_)) {
      const u64 before = hbfs_.byte_footprint();
      // Sets larger than everything in the frontier can never prune again.
      const u32 maxc = lbfs_.max_card();
      std::vector<char> keep(hbfs_.size());
      for (std::size_t i = 0; i < hbfs_.size(); ++i) keep[i] = hbfs_.card(i) <= maxc;
      hbfs_.compact_keep(keep);
      self_reduce_minimal(hbfs_, {opt_.tuning.min_brute});
      h_bfs_last_reduced_ = hbfs_.size();
      ledger_.release(before - hbfs_.byte_footprint());
    }

    SetList next = compute_layer(lbfs_, /*inverse=*/false);
    LayerRollback rollback{this};
    double r_dupl = lex_sort_dedupe(next);
    const std::size_t after_dupl = next.size();
    const std::size_t removed_self = self_reduce_minimal(next, {opt_.tuning.min_brute});
    const double r_self =
        after_dupl ? static_cast<double>(removed_self) / static_cast<double>(after_dupl) : 0.0;
    double r_hist = 0.0;
    if (with_history) {
      const std::size_t before = next.size();
      const std::size_t m = mark_supersets(hbfs_, next, {opt_.tuning.min_brute});
      next.truncate(m);
      r_hist = before ? static_cast<double>(before - m) / static_cast<double>(before) : 0.0;
      sort_lex(next);
    }
    shrink_charge(next);
    if (with_history) merge_history(hbfs_, next);
    commit_list(lbfs_, std::move(next));
    rollback.armed = false;
    if (opt_.track_word) bfs_levels_.push_back(lbfs_.tags());
    ++bfs_depth_;
    update_ratios(ratio_bfs_, r_dupl, r_self, r_hist, with_history);
    last_step_ = with_history ? StepKind::BFS : StepKind::BFS_NH;
  }

  // One inverse step; all reductions run on complemented vectors, so
  // maximal-set semantics on the plain side reuse the minimal-set machinery.
  void ibfs_step(bool with_history) {
    if (!with_history) drop_ibfs_history();
    if (with_history &&
        static_cast<double>(hibfs_c_.size()) >=
            opt_.tuning.history_growth * static_cast<double>(h_ibfs_last_reduced_)) {
      const u64 before = hibfs_c_.byte_footprint();
      // Mirror rule: history sets smaller than the whole current frontier
      // cannot contain any future set.
      const u32 minc = libfs_.min_card();
      std::vector<char> keep(hibfs_c_.size());
      for (std::size_t i = 0; i < hibfs_c_.size(); ++i)
        keep[i] = n_ - hibfs_c_.card(i) >= minc;
      hibfs_c_.compact_keep(keep);
      self_reduce_minimal(hibfs_c_, {opt_.tuning.min_brute});
      h_ibfs_last_reduced_ = hibfs_c_.size();
      ledger_.release(before - hibfs_c_.byte_footprint());
    }

    SetList next = compute_layer(libfs_, /*inverse=*/true);
    LayerRollback rollback{this};
    next.complement_all();
    double r_dupl = lex_sort_dedupe(next);
    const std::size_t after_dupl = next.size();
    const std::size_t removed_self = self_reduce_minimal(next, {opt_.tuning.min_brute});
    const double r_self =
        after_dupl ? static_cast<double>(removed_self) / static_cast<double>(after_dupl) : 0.0;
    double r_hist = 0.0;
    if (with_history) {
      const std::size_t before = next.size();
      const std::size_t m = mark_supersets(hibfs_c_, next, {opt_.tuning.min_brute});
      next.truncate(m);
      r_hist = before ? static_cast<double>(before - m) / static_cast<double>(before) : 0.0;
      sort_lex(next);
    }
    shrink_charge(next);
    if (with_history) merge_history(hibfs_c_, next);
    next.complement_all();
    commit_list(libfs_, std::move(next));
    rollback.armed = false;
    if (opt_.track_word) ibfs_levels_.push_back(libfs_.tags());
    ++ibfs_depth_;
    update_ratios(ratio_ibfs_, r_dupl, r_self, r_hist, with_history);
    last_step_ = with_history ? StepKind::IBFS : StepKind::IBFS_NH;
  }

  void perform(StepKind kind) {
    switch (kind) {
      case StepKind::BFS: bfs_step(true); return;
      case StepKind::BFS_NH: bfs_step(false); return;
      case StepKind::IBFS: ibfs_step(true); return;
      case StepKind::IBFS_NH: ibfs_step(false); return;
      case StepKind::DFS: break;
    }
    throw std::logic_error("perform: DFS is not a list step");
  }

  bool meet() { return meet_check(lbfs_, libfs_, {opt_.tuning.min_brute}); }

  std::optional<MeetWitness> meet_witness() const {
    return meet_find(lbfs_, libfs_, {opt_.tuning.min_brute});
  }

  void set_iteration(u64 r) { r_ = r; }
  void clear_failures() { failed_ = {false, false, false, false}; }
  void mark_failed(StepKind kind) { failed_[static_cast<std::size_t>(kind)] = true; }

  void drop_bfs_history() {
    if (bfs_hist_dropped_) return;
    ledger_.release(hbfs_.byte_footprint());
    hbfs_.clear();
    bfs_hist_dropped_ = true;
  }

  void drop_ibfs_history() {
    if (ibfs_hist_dropped_) return;
    ledger_.release(hibfs_c_.byte_footprint());
    hibfs_c_.clear();
    ibfs_hist_dropped_ = true;
  }

  u64 run_dfs(u64 r, DfsFind* find_out) {
    drop_bfs_history();
    drop_ibfs_history();
    if (lbfs_.empty()) return R_;
    StaticTrie trie = StaticTrie::build(lbfs_, opt_.tuning.min_leaf);
    ledger_.charge_or_throw(trie.byte_footprint());
    // The frontier sets now live inside the trie.
    ledger_.release(lbfs_.byte_footprint());
    {
      SetList drop(n_, opt_.track_word);
      std::swap(drop, lbfs_);
    }
    DfsParams params;
    params.dedupe_cadence = opt_.tuning.dfs_dedupe_cadence;
    params.reduce_cadence = opt_.tuning.dfs_reduce_cadence;
    params.largest_window = opt_.tuning.dfs_largest;
    params.min_brute = opt_.tuning.min_brute;
    DfsPhase dfs(kernel_, trie, ledger_, params, deadline_, opt_.track_word);
    const u64 final_bound = dfs.run(libfs_, r, R_);
    if (find_out) *find_out = dfs.find();
    ledger_.release(trie.byte_footprint());
    R_ = final_bound;
    return final_bound;
  }

  // Predecessor-link reconstruction (tracking mode only).
  Word bfs_prefix(std::size_t index) const {
    Word w;
    std::size_t idx = index;
    for (std::size_t lvl = bfs_levels_.size(); lvl-- > 0;) {
      const u64 tag = bfs_levels_[lvl][idx];
      w.push_back(static_cast<u32>(tag & 0xFFFF));
      idx = static_cast<std::size_t>(tag >> 16);
    }
    std::reverse(w.begin(), w.end());
    return w;
  }

  Word ibfs_suffix_from_tag(u64 tag) const {
    Word w;
    std::size_t lvl = ibfs_levels_.size();
    while (lvl-- > 0) {
      w.push_back(static_cast<u32>(tag & 0xFFFF));
      const std::size_t idx = static_cast<std::size_t>(tag >> 16);
      if (lvl == 0) break;
      tag = ibfs_levels_[lvl - 1][idx];
    }
    return w;
  }

  Word ibfs_suffix_from_index(std::size_t index) const {
    if (ibfs_levels_.empty()) return {};
    return ibfs_suffix_from_tag(ibfs_levels_.back()[index]);
  }

  const Deadline& deadline() const { return deadline_; }
  StepKind last_step() const { return last_step_; }

 private:
  struct LayerRollback {
    BibfsEngine* e;
    bool armed = true;
    ~LayerRollback() {
      if (armed) {
        e->ledger_.release(e->charged_layer_);
        e->charged_layer_ = 0;
      }
    }
  };

  SetList compute_layer(const SetList& src, bool inverse) {
    const u64 bytes = SetList::byte_footprint(n_, src.size() * k_);
    ledger_.charge_or_throw(bytes);
    SetList next(n_, opt_.track_word);
    next.resize(src.size() * k_);
    for (std::size_t i = 0; i < src.size(); ++i) {
      for (u32 a = 0; a < k_; ++a) {
        const std::size_t o = i * k_ + a;
        if (inverse) {
          kernel_.preimage(src.words(i), next.mutable_words(o), a);
        } else {
          kernel_.image(src.words(i), next.mutable_words(o), a);
        }
        u32 c = 0;
        for (u32 t = 0; t < next.words_per_set(); ++t)
          c += static_cast<u32>(std::popcount(next.words(o)[t]));
        next.set_card(o, c);
        if (opt_.track_word) next.set_tag(o, (static_cast<u64>(i) << 16) | a);
      }
    }
    charged_layer_ = bytes;
    return next;
  }

  void shrink_charge(const SetList& next) {
    const u64 now = next.byte_footprint();
    if (now < charged_layer_) ledger_.release(charged_layer_ - now);
    charged_layer_ = now;
  }

  void commit_list(SetList& dst, SetList&& next) {
    ledger_.release(dst.byte_footprint());
    dst = std::move(next);
    charged_layer_ = 0;
  }

  // h and add are sorted unique and disjoint (history reduction removed
  // anything contained in history, equality included).
  void merge_history(SetList& h, const SetList& add) {
    if (add.empty()) return;
    const u64 before = h.byte_footprint();
    SetList merged(n_);
    merged.reserve(h.size() + add.size());
    ledger_.charge_or_throw(merged.byte_footprint(h.size() + add.size()));
    std::size_t i = 0, j = 0;
    while (i < h.size() && j < add.size()) {
      if (h.view(i).lex_less(add.view(j))) {
        merged.push_back_view(h.view(i));
        ++i;
      } else {
        merged.push_back_view(add.view(j));
        ++j;
      }
    }
    for (; i < h.size(); ++i) merged.push_back_view(h.view(i));
    for (; j < add.size(); ++j) merged.push_back_view(add.view(j));
    h = std::move(merged);
    ledger_.release(before);
  }

  static void update_ratios(std::array<double, 3>& r, double dupl, double self, double hist,
                            bool with_history) {
    r[0] = 0.5 * r[0] + 0.5 * dupl;
    r[1] = 0.5 * r[1] + 0.5 * self;
    if (with_history) r[2] = 0.5 * r[2] + 0.5 * hist;
  }

  const Automaton& aut_;
  const SolveOptions& opt_;
  TransitionKernel kernel_;
  MemoryLedger ledger_;
  Deadline deadline_;
  u32 n_, k_;
  u64 R_;
  u64 r_ = 0;

  SetList lbfs_;
  SetList libfs_;
  SetList hbfs_;     // lex-sorted unique
  SetList hibfs_c_;  // complements, lex-sorted unique

  std::size_t h_bfs_last_reduced_ = 1;
  std::size_t h_ibfs_last_reduced_ = 1;
  bool bfs_hist_dropped_ = false;
  bool ibfs_hist_dropped_ = false;
  std::array<double, 3> ratio_bfs_{0, 0, 0};   // dupl, self, hist
  std::array<double, 3> ratio_ibfs_{0, 0, 0};
  std::array<bool, 4> failed_{false, false, false, false};
  u64 charged_layer_ = 0;
  u64 bfs_depth_ = 0;
  u64 ibfs_depth_ = 0;
  StepKind last_step_ = StepKind::BFS;

  std::vector<std::vector<u64>> bfs_levels_;
  std::vector<std::vector<u64>> ibfs_levels_;
};

inline void trace_line(std::ostream* trace, const BibfsEngine& eng, const SearchStats& s,
                       const StepCosts& c, StepKind kind) {
  if (!trace) return;
  std::ostringstream os;
  os << "iter=" << eng.iteration() << " step=" << step_kind_name(kind)
     << " lbfs=" << static_cast<u64>(s.bfs.list_size)
     << " libfs=" << static_cast<u64>(s.ibfs.list_size)
     << " hbfs=" << static_cast<u64>(s.bfs.hist_size)
     << " hibfs=" << static_cast<u64>(s.ibfs.hist_size) << " d_lbfs=" << s.bfs.list_density
     << " d_libfs=" << s.ibfs.list_density << " rdupl_bfs=" << s.bfs.r_dupl
     << " rself_bfs=" << s.bfs.r_self << " rhist_bfs=" << s.bfs.r_hist
     << " rdupl_ibfs=" << s.ibfs.r_dupl << " rself_ibfs=" << s.ibfs.r_self
     << " rhist_ibfs=" << s.ibfs.r_hist << " cost_bfs=" << c.step[0]
     << " cost_bfs_nh=" << c.step[1] << " cost_ibfs=" << c.step[2]
     << " cost_ibfs_nh=" << c.step[3] << " pred_bfs=" << c.pred[0]
     << " pred_bfs_nh=" << c.pred[1] << " pred_ibfs=" << c.pred[2]
     << " pred_ibfs_nh=" << c.pred[3] << " pred_dfs=" << c.pred[4];
  *trace << os.str() << '\n';
}

}  // namespace detail

// Exact reset threshold via bidirectional BFS with a DFS second phase.
// Requires a synchronizing automaton. With track_word set, also returns a
// verified shortest reset word.
inline SolveResult solve_exact(const Automaton& aut, const SolveOptions& opt = {}) {
  if (!is_synchronizing(aut)) throw NotSynchronizingError();
  SolveResult res;
  if (aut.state_count() == 1) {
    res.threshold = 0;
    res.upper_bound = 0;
    if (opt.track_word) res.word = Word{};
    return res;
  }

  std::optional<HeuristicResult> heur;
  u64 R;
  if (opt.upper_bound) {
    R = *opt.upper_bound;
  } else {
    AdaptiveOptions aopt;
    aopt.memory = opt.memory;
    aopt.initial_beam = opt.tuning.beam_initial;
    aopt.cost_fraction = opt.tuning.beam_cost_fraction;
    aopt.set_cost = opt.tuning.cost.set_cost;
    aopt.deadline = Deadline::from_limit(opt.time_limit);
    heur = adaptive_upper_bound(aut, aopt);
    R = heur->length;
  }
  res.upper_bound = R;

  detail::BibfsEngine eng(aut, R, opt);
  const auto finish = [&](u64 threshold, std::optional<Word> word) {
    res.threshold = threshold;
    res.word = std::move(word);
    res.peak_memory = eng.ledger().peak();
    return res;
  };

  for (u64 r = 1; r + 1 <= R; ++r) {
    eng.deadline().check();
    eng.set_iteration(r);
    eng.clear_failures();
    ++res.iterations;

    StepKind kind;
    SearchStats decision_stats;
    StepCosts decision_costs;
    while (true) {
      decision_stats = eng.make_stats();
      decision_costs = compute_step_costs(decision_stats, opt.tuning.cost);
      switch (opt.schedule) {
        case Schedule::Auto: kind = select_step(decision_costs); break;
        case Schedule::BfsOnly:
          kind = decision_costs.feasible[0]
                     ? StepKind::BFS
                     : (decision_costs.feasible[1] ? StepKind::BFS_NH : StepKind::DFS);
          break;
        case Schedule::IbfsOnly:
          kind = decision_costs.feasible[2]
                     ? StepKind::IBFS
                     : (decision_costs.feasible[3] ? StepKind::IBFS_NH : StepKind::DFS);
          break;
        case Schedule::DfsImmediate: kind = StepKind::DFS; break;
      }
      if (kind == StepKind::DFS) break;
      try {
        eng.perform(kind);
        break;
      } catch (const OutOfMemoryError&) {
        // Mid-step failure: the engine rolled back; exclude the step kind
        // and pick again.
        eng.mark_failed(kind);
      }
    }

    if (kind == StepKind::DFS) {
      res.used_dfs = true;
      if (opt.trace) *opt.trace << "iter=" << r << " step=DFS handoff\n";
      DfsFind find;
      const u64 threshold = eng.run_dfs(r, &find);
      if (opt.trace) *opt.trace << "result=" << threshold << " phase=dfs\n";
      std::optional<Word> word;
      if (opt.track_word) {
        if (find.found) {
          Word w = eng.bfs_prefix(find.trie_index);
          w.insert(w.end(), find.middle.begin(), find.middle.end());
          const Word tail = eng.ibfs_suffix_from_index(find.root_index);
          w.insert(w.end(), tail.begin(), tail.end());
          if (w.size() != threshold || !is_reset_word(aut, w))
            throw std::logic_error("reconstructed word is not a valid witness");
          word = std::move(w);
        } else if (heur && heur->length == threshold) {
          word = heur->word;
        }
      }
      return finish(threshold, std::move(word));
    }

    if (kind == StepKind::BFS || kind == StepKind::BFS_NH) {
      ++res.bfs_steps;
    } else {
      ++res.ibfs_steps;
    }
    detail::trace_line(opt.trace, eng, decision_stats, decision_costs, kind);

    if (opt.track_word) {
      if (auto w = eng.meet_witness()) {
        Word full = eng.bfs_prefix(w->bfs_index);
        const Word tail = eng.ibfs_suffix_from_tag(w->ibfs_tag);
        full.insert(full.end(), tail.begin(), tail.end());
        if (full.size() != r || !is_reset_word(aut, full))
          throw std::logic_error("reconstructed word is not a valid witness");
        if (opt.trace) *opt.trace << "result=" << r << " phase=meet\n";
        return finish(r, std::move(full));
      }
    } else if (eng.meet()) {
      if (opt.trace) *opt.trace << "result=" << r << " phase=meet\n";
      return finish(r, std::nullopt);
    }
  }

  if (opt.trace) *opt.trace << "result=" << R << " phase=bound\n";
  std::optional<Word> word;
  if (opt.track_word && heur) word = heur->word;
  return finish(R, std::move(word));
}

}  // namespace synchro
