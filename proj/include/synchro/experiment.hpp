#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <condition_variable>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "synchro/automaton.hpp"
#include "synchro/bibfs_engine.hpp"
#include "synchro/heuristics.hpp"
#include "synchro/oracle.hpp"
#include "synchro/util.hpp"

namespace synchro {

inline constexpr const char* kCsvHeader = "n,k,seed,solver,threshold,status,time_s,peak_mem_bytes";

struct ExperimentRecord {
  u32 n = 0;
  u32 k = 0;
  u64 seed = 0;
  std::string solver;
  u64 threshold = 0;
  std::string status;  // ok, nonsync, timeout, oom, refused, error
  double time_s = 0.0;
  u64 peak_mem_bytes = 0;
};

struct ExperimentSpec {
  std::vector<u32> ns;
  u32 k = 2;
  u32 samples = 100;
  u64 seed_base = 0;
  std::string solver = "exact";  // exact | oracle | eppstein | beam | adaptive
  std::optional<double> time_limit = 60.0;
  u64 memory = u64{4} << 30;
  u32 threads = 1;
  u64 beam_size = 0;  // for solver=beam; 0 -> max(64, n)
  bool deterministic = false;  // zero the time column so reruns are byte-identical
  EngineTuning tuning{};
};

// Instance seed: documented mix so every (n, i) cell gets an independent
// stream regardless of the base seed.
inline u64 instance_seed(u64 seed_base, u32 n, u32 index) {
  return seed_base ^ mix_u64((static_cast<u64>(n) << 32) ^ index);
}

inline void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

inline void write_csv_row(std::ostream& out, const ExperimentRecord& r) {
  std::ostringstream os;
  os << r.n << ',' << r.k << ',' << r.seed << ',' << r.solver << ',' << r.threshold << ','
     << r.status << ',' << std::fixed << std::setprecision(6) << r.time_s << ','
     << r.peak_mem_bytes;
  out << os.str() << '\n';
}

namespace detail {

inline ExperimentRecord run_instance(const ExperimentSpec& spec, u32 n, u32 index) {
  ExperimentRecord rec;
  rec.n = n;
  rec.k = spec.k;
  rec.seed = instance_seed(spec.seed_base, n, index);
  rec.solver = spec.solver;
  rec.status = "ok";

  const Automaton aut = random_automaton(n, spec.k, rec.seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (spec.solver == "exact") {
      SolveOptions opt;
      opt.memory = spec.memory;
      opt.time_limit = spec.time_limit;
      opt.tuning = spec.tuning;
      const SolveResult res = solve_exact(aut, opt);
      rec.threshold = res.threshold;
      rec.peak_mem_bytes = res.peak_memory;
    } else if (spec.solver == "oracle") {
      rec.threshold = power_set_bfs_oracle(aut, Deadline::from_limit(spec.time_limit));
    } else if (spec.solver == "eppstein") {
      if (!is_synchronizing(aut)) throw NotSynchronizingError();
      rec.threshold = eppstein(aut, Deadline::from_limit(spec.time_limit)).length;
    } else if (spec.solver == "beam") {
      if (!is_synchronizing(aut)) throw NotSynchronizingError();
      const u64 beam = spec.beam_size ? spec.beam_size : std::max<u64>(64, n);
      auto res = beam_ibfs(aut, beam, Deadline::from_limit(spec.time_limit));
      if (res) {
        rec.threshold = res->length;
      } else {
        rec.status = "error";
      }
    } else if (spec.solver == "adaptive") {
      if (!is_synchronizing(aut)) throw NotSynchronizingError();
      AdaptiveOptions aopt;
      aopt.memory = spec.memory;
      aopt.deadline = Deadline::from_limit(spec.time_limit);
      rec.threshold = adaptive_upper_bound(aut, aopt).length;
    } else {
      throw std::invalid_argument("unknown solver: " + spec.solver);
    }
  } catch (const NotSynchronizingError&) {
    rec.status = "nonsync";
  } catch (const TimeoutError&) {
    rec.status = "timeout";
  } catch (const OutOfMemoryError&) {
    rec.status = "oom";
  } catch (const std::invalid_argument&) {
    rec.status = "refused";
  }
  const auto stop = std::chrono::steady_clock::now();
  rec.time_s = spec.deterministic ? 0.0 : std::chrono::duration<double>(stop - start).count();
  return rec;
}

}  // namespace detail

// Runs the grid (n in spec.ns) x (index in [0, samples)), one CSV row per
// instance. Rows appear in (n, index) order, flushed as soon as the next row
// in order is ready, so interrupted runs keep a usable prefix. Instances may
// run on several threads; per-instance failures become status markers, never
// batch aborts.
inline void run_experiment(const ExperimentSpec& spec, std::ostream& csv,
                           std::ostream* log = nullptr) {
  if (log)
    *log << "experiment rng=" << kRngId << " seed_base=" << spec.seed_base
         << " solver=" << spec.solver << " threads=" << spec.threads << '\n';
  write_csv_header(csv);
  csv.flush();

  const std::size_t total = spec.ns.size() * spec.samples;
  if (total == 0) return;

  std::vector<ExperimentRecord> results(total);
  std::vector<char> done(total, 0);
  std::mutex mu;
  std::condition_variable cv;
  std::size_t next_task = 0;

  const auto worker = [&] {
    while (true) {
      std::size_t task;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next_task >= total) return;
        task = next_task++;
      }
      const u32 n = spec.ns[task / spec.samples];
      const u32 index = static_cast<u32>(task % spec.samples);
      ExperimentRecord rec = detail::run_instance(spec, n, index);
      {
        std::lock_guard<std::mutex> lock(mu);
        results[task] = std::move(rec);
        done[task] = 1;
      }
      cv.notify_one();
    }
  };

  const u32 nthreads = std::max<u32>(1, spec.threads);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (u32 t = 0; t < nthreads; ++t) pool.emplace_back(worker);

  std::size_t written = 0;
  {
    std::unique_lock<std::mutex> lock(mu);
    while (written < total) {
      cv.wait(lock, [&] { return done[written]; });
      while (written < total && done[written]) {
        write_csv_row(csv, results[written]);
        ++written;
      }
      csv.flush();
    }
  }
  for (auto& t : pool) t.join();
}

inline std::vector<ExperimentRecord> parse_csv(std::istream& in) {
  std::vector<ExperimentRecord> out;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV");
  if (line != kCsvHeader) throw ParseError("unexpected CSV header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 8> field;
    std::size_t pos = 0;
    for (int f = 0; f < 8; ++f) {
      const auto comma = line.find(',', pos);
      if (f < 7 && comma == std::string::npos) throw ParseError("short CSV row: " + line);
      field[f] = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      pos = comma + 1;
    }
    ExperimentRecord r;
    try {
      r.n = static_cast<u32>(std::stoul(field[0]));
      r.k = static_cast<u32>(std::stoul(field[1]));
      r.seed = std::stoull(field[2]);
      r.solver = field[3];
      r.threshold = std::stoull(field[4]);
      r.status = field[5];
      r.time_s = std::stod(field[6]);
      r.peak_mem_bytes = std::stoull(field[7]);
    } catch (const std::exception&) {
      throw ParseError("bad CSV row: " + line);
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct FitResult {
  double a = 0;
  double c = 0;
  double residual = 0;  // L2 norm in log space
};

// Least squares on (log n, log mean) for the model a * n^c. Needs at least
// two distinct n values with positive means.
inline FitResult fit_power_law(const std::vector<std::pair<double, double>>& n_mean) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [n, mean] : n_mean) {
    if (n <= 0 || mean <= 0)
      throw std::invalid_argument("fit_power_law: n and mean must be positive");
    pts.emplace_back(std::log(n), std::log(mean));
  }
  {
    auto distinct = pts;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end(),
                               [](const auto& a, const auto& b) { return a.first == b.first; }),
                   distinct.end());
    if (distinct.size() < 2)
      throw std::invalid_argument("fit_power_law: need at least two distinct n");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(pts.size());
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  const double c = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - c * sx) / m;
  double rss = 0;
  for (const auto& [x, y] : pts) {
    const double e = y - (intercept + c * x);
    rss += e * e;
  }
  return {std::exp(intercept), c, std::sqrt(rss)};
}

// Groups ok-rows by n, averages thresholds, and fits.
inline FitResult fit_records(const std::vector<ExperimentRecord>& records) {
  std::map<u32, std::pair<double, u64>> groups;
  for (const auto& r : records) {
    if (r.status != "ok") continue;
    auto& [sum, count] = groups[r.n];
    sum += static_cast<double>(r.threshold);
    ++count;
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& [n, agg] : groups)
    if (agg.second > 0) pts.emplace_back(n, agg.first / static_cast<double>(agg.second));
  return fit_power_law(pts);
}

}  // namespace synchro
