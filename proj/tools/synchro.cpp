// Command-line frontend: exact and heuristic reset-threshold computation,
// automaton generation, the power-set oracle, the experiment runner, and the
// power-law fit.
//
// Exit codes: 0 success, 2 input not synchronizing, 3 parse/input error,
// 4 memory budget exhausted, 5 refused (oracle too large), 6 time limit.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "synchro/synchro.hpp"

namespace {

constexpr int kExitNotSynchronizing = 2;
constexpr int kExitParseError = 3;
constexpr int kExitOutOfMemory = 4;
constexpr int kExitRefused = 5;
constexpr int kExitTimeout = 6;

struct SourceOptions {
  std::string input_file;
  std::string gen_spec;
};

synchro::Automaton load_automaton(const SourceOptions& src) {
  if (!src.gen_spec.empty()) {
    const auto colon = src.gen_spec.find(':');
    const std::string kind = src.gen_spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : src.gen_spec.substr(colon + 1);
    if (kind == "cerny") {
      return synchro::cerny_automaton(static_cast<synchro::u32>(std::stoul(args)));
    }
    if (kind == "random") {
      std::istringstream ss(args);
      std::string part;
      std::vector<synchro::u64> v;
      while (std::getline(ss, part, ',')) v.push_back(std::stoull(part));
      if (v.size() != 3) throw synchro::ParseError("random generator needs N,K,SEED");
      return synchro::random_automaton(static_cast<synchro::u32>(v[0]),
                                       static_cast<synchro::u32>(v[1]), v[2]);
    }
    throw synchro::ParseError("unknown generator: " + kind);
  }
  if (src.input_file == "-") return synchro::parse_automaton(std::cin);
  std::ifstream in(src.input_file);
  if (!in) throw synchro::ParseError("cannot open " + src.input_file);
  return synchro::parse_automaton(in);
}

void add_source_options(CLI::App* cmd, SourceOptions& src) {
  auto* input = cmd->add_option("--input", src.input_file, "Automaton file ('-' for stdin)");
  auto* gen = cmd->add_option("--gen", src.gen_spec, "Generator: cerny:N or random:N,K,SEED");
  input->excludes(gen);
  cmd->callback([input, gen] {
    if (input->count() == 0 && gen->count() == 0)
      throw CLI::ValidationError("one of --input or --gen is required");
  });
}

struct TuningFlags {
  double set_cost = 512.0;
  std::size_t min_brute = 64;
  synchro::u32 min_leaf = 10;
  std::string dfs_weights;    // "SET,CHECK"
  std::string reduce_cadence; // "DEDUPE,MARK"

  void add_to(CLI::App* cmd) {
    cmd->add_option("--set-cost", set_cost, "Cost-model weight of computing one set");
    cmd->add_option("--min-brute", min_brute, "Pairwise fallback threshold of the set marking");
    cmd->add_option("--min-leaf", min_leaf, "Leaf payload bound of the static trie");
    cmd->add_option("--dfs-weights", dfs_weights,
                    "DFS set/check cost weights as SET,CHECK (default 0.25,0.25)");
    cmd->add_option("--reduce-cadence", reduce_cadence,
                    "DFS dedupe/mark cadences as DEDUPE,MARK (default 2,3; 0 = never)");
  }

  void apply(synchro::EngineTuning& t) const {
    t.cost.set_cost = set_cost;
    t.min_brute = min_brute;
    t.min_leaf = min_leaf;
    if (!dfs_weights.empty()) {
      std::istringstream ss(dfs_weights);
      char comma;
      if (!(ss >> t.cost.dfs_set_cost_weight >> comma >> t.cost.dfs_check_cost_weight))
        throw synchro::ParseError("--dfs-weights expects SET,CHECK");
    }
    if (!reduce_cadence.empty()) {
      std::istringstream ss(reduce_cadence);
      char comma;
      if (!(ss >> t.dfs_dedupe_cadence >> comma >> t.dfs_reduce_cadence))
        throw synchro::ParseError("--reduce-cadence expects DEDUPE,MARK");
    }
  }
};

std::string word_to_string(const synchro::Word& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ' ';
    os << w[i];
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reset-threshold computations for synchronizing automata"};
  app.require_subcommand(1);

  // exact
  auto* exact = app.add_subcommand("exact", "Exact reset threshold");
  SourceOptions exact_src;
  add_source_options(exact, exact_src);
  synchro::u64 memory = synchro::u64{4} << 30;
  double time_limit = 0.0;
  synchro::u32 threads = 1;
  bool track_word = false;
  std::string schedule = "auto";
  std::string trace_file;
  TuningFlags tuning;
  exact->add_option("--memory", memory, "Memory budget in bytes");
  exact->add_option("--time-limit", time_limit, "Time limit in seconds (0 = none)");
  exact->add_option("--threads", threads, "Worker threads (reference behavior is 1)");
  exact->add_flag("--track-word", track_word, "Also reconstruct and print a shortest word");
  exact->add_option("--schedule", schedule, "auto | bfs | ibfs | dfs")
      ->check(CLI::IsMember({"auto", "bfs", "ibfs", "dfs"}));
  exact->add_option("--trace", trace_file, "Write the per-iteration trace log to a file");
  tuning.add_to(exact);

  // heuristic
  auto* heur = app.add_subcommand("heuristic", "Upper bound on the reset threshold");
  SourceOptions heur_src;
  add_source_options(heur, heur_src);
  std::string algorithm = "adaptive";
  synchro::u64 beam_size = 0;
  heur->add_option("--algorithm", algorithm, "eppstein | beam | adaptive")
      ->check(CLI::IsMember({"eppstein", "beam", "adaptive"}));
  heur->add_option("--beam-size", beam_size, "Beam size (beam algorithm)");
  heur->add_option("--memory", memory, "Memory budget in bytes");
  heur->add_option("--time-limit", time_limit, "Time limit in seconds (0 = none)");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an automaton in the text format");
  SourceOptions gen_src;
  add_source_options(gen, gen_src);
  std::string out_file;
  gen->add_option("-o,--output", out_file, "Output file (default stdout)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Power-set BFS threshold (n <= 20)");
  SourceOptions oracle_src;
  add_source_options(oracle, oracle_src);
  oracle->add_option("--time-limit", time_limit, "Time limit in seconds (0 = none)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Random-automaton batch runner (CSV)");
  std::vector<synchro::u32> ns;
  std::string n_range;
  synchro::u32 exp_k = 2, samples = 100;
  synchro::u64 seed_base = 0;
  std::string solver = "exact";
  std::string exp_out;
  bool deterministic = false;
  exp->add_option("--n", ns, "State counts (repeatable)");
  exp->add_option("--n-range", n_range, "State counts as LO:HI:STEP");
  exp->add_option("--k", exp_k, "Alphabet size");
  exp->add_option("--samples", samples, "Instances per state count");
  exp->add_option("--seed-base", seed_base, "Base seed of the instance streams");
  exp->add_option("--solver", solver, "exact | oracle | eppstein | beam | adaptive")
      ->check(CLI::IsMember({"exact", "oracle", "eppstein", "beam", "adaptive"}));
  exp->add_option("--beam-size", beam_size, "Beam size for solver=beam");
  exp->add_option("--memory", memory, "Per-instance memory budget in bytes");
  exp->add_option("--time-limit", time_limit, "Per-instance time limit in seconds (0 = none)");
  exp->add_option("--threads", threads, "Concurrent instances");
  exp->add_option("-o,--output", exp_out, "CSV output file (default stdout)");
  exp->add_flag("--deterministic", deterministic,
                "Zero the time_s column so identical runs are byte-identical");
  tuning.add_to(exp);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit mean thresholds to a*n^c");
  std::string fit_input;
  fit->add_option("--input", fit_input, "Experiment CSV ('-' for stdin)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (exact->parsed()) {
      const synchro::Automaton aut = load_automaton(exact_src);
      synchro::SolveOptions opt;
      opt.memory = memory;
      if (time_limit > 0) opt.time_limit = time_limit;
      opt.track_word = track_word;
      if (schedule == "bfs") opt.schedule = synchro::Schedule::BfsOnly;
      if (schedule == "ibfs") opt.schedule = synchro::Schedule::IbfsOnly;
      if (schedule == "dfs") opt.schedule = synchro::Schedule::DfsImmediate;
      tuning.apply(opt.tuning);
      std::ofstream trace;
      if (!trace_file.empty()) {
        trace.open(trace_file);
        opt.trace = &trace;
      }
      const auto start = std::chrono::steady_clock::now();
      const synchro::SolveResult res = synchro::solve_exact(aut, opt);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      std::cout << "threshold " << res.threshold << '\n';
      if (res.word) {
        if (!synchro::is_reset_word(aut, *res.word)) throw std::logic_error("invalid word");
        std::cout << "word " << word_to_string(*res.word) << '\n';
      }
      std::cerr << "time_s=" << elapsed.count() << " peak_mem_bytes=" << res.peak_memory
                << " upper_bound=" << res.upper_bound << " iterations=" << res.iterations
                << " bfs_steps=" << res.bfs_steps << " ibfs_steps=" << res.ibfs_steps
                << " dfs=" << (res.used_dfs ? 1 : 0) << '\n';
      return 0;
    }

    if (heur->parsed()) {
      const synchro::Automaton aut = load_automaton(heur_src);
      if (!synchro::is_synchronizing(aut)) throw synchro::NotSynchronizingError();
      const synchro::Deadline deadline =
          time_limit > 0 ? synchro::Deadline::after_seconds(time_limit) : synchro::Deadline();
      synchro::HeuristicResult res;
      if (algorithm == "eppstein") {
        res = synchro::eppstein(aut, deadline);
      } else if (algorithm == "beam") {
        const synchro::u64 beam =
            beam_size ? beam_size : std::max<synchro::u64>(64, aut.state_count());
        auto b = synchro::beam_ibfs(aut, beam, deadline);
        if (!b) {
          std::cerr << "beam search found no reset word at beam size " << beam << '\n';
          return kExitRefused;
        }
        res = std::move(*b);
      } else {
        synchro::AdaptiveOptions aopt;
        aopt.memory = memory;
        aopt.deadline = deadline;
        res = synchro::adaptive_upper_bound(aut, aopt);
      }
      if (!synchro::is_reset_word(aut, res.word)) throw std::logic_error("invalid word");
      std::cout << "bound " << res.length << '\n';
      std::cout << "word " << word_to_string(res.word) << '\n';
      return 0;
    }

    if (gen->parsed()) {
      const synchro::Automaton aut = load_automaton(gen_src);
      if (out_file.empty()) {
        synchro::write_automaton(std::cout, aut);
      } else {
        std::ofstream out(out_file);
        if (!out) throw synchro::ParseError("cannot open " + out_file);
        synchro::write_automaton(out, aut);
      }
      return 0;
    }

    if (oracle->parsed()) {
      const synchro::Automaton aut = load_automaton(oracle_src);
      if (aut.state_count() > synchro::kOracleMaxStates) {
        std::cerr << "oracle refuses n > " << synchro::kOracleMaxStates << '\n';
        return kExitRefused;
      }
      const synchro::Deadline deadline =
          time_limit > 0 ? synchro::Deadline::after_seconds(time_limit) : synchro::Deadline();
      std::cout << "threshold " << synchro::power_set_bfs_oracle(aut, deadline) << '\n';
      return 0;
    }

    if (exp->parsed()) {
      synchro::ExperimentSpec spec;
      spec.ns = ns;
      if (!n_range.empty()) {
        std::istringstream ss(n_range);
        synchro::u32 lo, hi, step;
        char c1, c2;
        if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step == 0)
          throw synchro::ParseError("--n-range expects LO:HI:STEP");
        for (synchro::u32 n = lo; n <= hi; n += step) spec.ns.push_back(n);
      }
      if (spec.ns.empty()) throw synchro::ParseError("no state counts given (--n or --n-range)");
      spec.k = exp_k;
      spec.samples = samples;
      spec.seed_base = seed_base;
      spec.solver = solver;
      spec.beam_size = beam_size;
      spec.time_limit = time_limit > 0 ? std::optional<double>(time_limit) : std::nullopt;
      spec.memory = memory;
      spec.threads = threads;
      spec.deterministic = deterministic;
      tuning.apply(spec.tuning);
      if (exp_out.empty()) {
        synchro::run_experiment(spec, std::cout, &std::cerr);
      } else {
        std::ofstream out(exp_out);
        if (!out) throw synchro::ParseError("cannot open " + exp_out);
        synchro::run_experiment(spec, out, &std::cerr);
      }
      return 0;
    }

    if (fit->parsed()) {
      std::vector<synchro::ExperimentRecord> records;
      if (fit_input == "-") {
        records = synchro::parse_csv(std::cin);
      } else {
        std::ifstream in(fit_input);
        if (!in) throw synchro::ParseError("cannot open " + fit_input);
        records = synchro::parse_csv(in);
      }
      const synchro::FitResult res = synchro::fit_records(records);
      std::cout << "a " << res.a << '\n';
      std::cout << "c " << res.c << '\n';
      std::cout << "residual " << res.residual << '\n';
      return 0;
    }
  } catch (const synchro::NotSynchronizingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotSynchronizing;
  } catch (const synchro::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const synchro::OutOfMemoryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOutOfMemory;
  } catch (const synchro::TimeoutError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTimeout;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
