#ifndef HDWN_HARNESS_HPP
#define HDWN_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "hdwn/config.hpp"
#include "hdwn/dgp.hpp"
#include "hdwn/error.hpp"
#include "hdwn/report.hpp"
#include "hdwn/rng.hpp"

namespace hdwn {

enum class ExperimentKind { Size, Power };

/// One grid point of an experiment.
struct Cell {
  Scenario scenario = Scenario::NullI;
  Innovation innovation = Innovation::Gaussian;
  Eigen::Index n = 100;
  Eigen::Index p = 30;
  int K = 1;
  std::optional<int> m;

  /// Canonical text form; its hash names the cell's RNG stream family.
  std::string descriptor() const {
    std::ostringstream os;
    os << "scenario=" << to_string(scenario) << ";innovation=" << to_string(innovation) << ";n=" << n << ";p=" << p
       << ";K=" << K << ";m=";
    if (m) os << *m; else os << '-';
    return os.str();
  }

  std::uint64_t stream_id() const { return fnv1a64(descriptor()); }

  void validate() const {
    DgpSpec{scenario, innovation, n, p, m, 0}.validate();
    check_lag_budget(K, n);
  }
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Size;
  std::vector<Cell> grid;
  int replications = 1000;
  double alpha = 0.05;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;  // 0 = hardware concurrency
  std::string out_path;
  std::string format = "csv";
  std::string curves_dir;
};

struct TestRates {
  double max = 0.0;
  double sum = 0.0;
  double fc = 0.0;
};

struct CellResult {
  Cell cell;
  TestRates rejection_rate;
  TestRates standard_error;
  int replications_used = 0;
  double wall_time = 0.0;  // seconds
};

inline double binomial_se(double rate, int reps) {
  return reps > 0 ? std::sqrt(rate * (1.0 - rate) / reps) : 0.0;
}

// ---- parallel execution ----------------------------------------------------

/// Runs body(i) for i in [0, count) on up to `workers` threads. Work items are
/// claimed dynamically; the first exception is rethrown after all threads join.
template <class Body>
void parallel_for(int count, unsigned workers, Body&& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(count, 1)));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count || stop.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---- replication -----------------------------------------------------------

/// Draws panel `index` of a cell from its own stream.
class CellSampler {
 public:
  explicit CellSampler(const Cell& cell) : cell_(cell) {
    cell_.validate();
    if (!is_alternative(cell.scenario)) null_.emplace(cell.scenario, cell.innovation, cell.n, cell.p);
  }

  TimeSeriesPanel draw(std::uint64_t master_seed, std::uint64_t index) const {
    auto rng = make_stream(master_seed, cell_.stream_id(), index);
    if (null_) return (*null_)(rng);
    const auto a = draw_stationary_coeff(cell_.scenario, *cell_.m, cell_.p, rng);
    return simulate_alternative(cell_.scenario, a, cell_.innovation, cell_.n, rng);
  }

 private:
  Cell cell_;
  std::optional<NullGenerator> null_;
};

/// All R test reports for one cell, indexed by replication.
inline std::vector<TestReport> replicate(const Cell& cell, int replications, double alpha, std::uint64_t master_seed,
                                         unsigned workers = 1) {
  if (replications < 1) fail(ErrorCode::InvalidInput, "replications must be >= 1");
  const CellSampler sampler(cell);
  std::vector<TestReport> reports(static_cast<std::size_t>(replications));
  parallel_for(replications, workers, [&](int j) {
    reports[static_cast<std::size_t>(j)] = run_all(sampler.draw(master_seed, static_cast<std::uint64_t>(j)), cell.K, alpha);
  });
  return reports;
}

inline CellResult summarize(const Cell& cell, const std::vector<TestReport>& reports) {
  CellResult r;
  r.cell = cell;
  r.replications_used = static_cast<int>(reports.size());
  long long rej_max = 0, rej_sum = 0, rej_fc = 0;
  for (const auto& rep : reports) {
    rej_max += rep.decisions.max;
    rej_sum += rep.decisions.sum;
    rej_fc += rep.decisions.fc;
  }
  const double reps = static_cast<double>(reports.size());
  r.rejection_rate = {rej_max / reps, rej_sum / reps, rej_fc / reps};
  r.standard_error = {binomial_se(r.rejection_rate.max, r.replications_used),
                      binomial_se(r.rejection_rate.sum, r.replications_used),
                      binomial_se(r.rejection_rate.fc, r.replications_used)};
  return r;
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) fail(ErrorCode::Config, "replications: must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail(ErrorCode::Config, "alpha: must lie in (0, 1)");
  if (cfg.grid.empty()) fail(ErrorCode::Config, "grid: no cells");
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    const auto& c = cfg.grid[i];
    const std::string where = "grid[" + std::to_string(i) + "] (" + c.descriptor() + ")";
    if (cfg.kind == ExperimentKind::Size && is_alternative(c.scenario))
      fail(ErrorCode::Config, where + ": size experiments take null scenarios only");
    if (cfg.kind == ExperimentKind::Power && !is_alternative(c.scenario))
      fail(ErrorCode::Config, where + ": power experiments take alternative scenarios only");
    try {
      c.validate();
    } catch (const Error& e) {
      fail(ErrorCode::Config, where + ": " + e.what());
    }
  }
}

/// Runs every cell of the grid. Cells run in grid order; replications within a
/// cell run on cfg.workers threads. Output does not depend on the worker count.
inline std::vector<CellResult> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<CellResult> results;
  results.reserve(cfg.grid.size());
  for (const auto& cell : cfg.grid) {
    const auto start = std::chrono::steady_clock::now();
    const auto reports = replicate(cell, cfg.replications, cfg.alpha, cfg.master_seed, cfg.workers);
    auto r = summarize(cell, reports);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(r);
  }
  return results;
}

// ---- config file -----------------------------------------------------------

/// Builds an experiment from a config file. The grid is the Cartesian product
/// scenarios x innovations x n x p x K (x m for power runs).
inline ExperimentConfig experiment_from_config(const config::KeyValueFile& kv) {
  kv.require_known({"kind", "scenarios", "innovations", "n", "p", "K", "m", "replications", "alpha", "master_seed",
                    "workers", "out", "format", "curves"});
  ExperimentConfig cfg;
  const auto kind = kv.scalar("kind");
  if (kind == "size") cfg.kind = ExperimentKind::Size;
  else if (kind == "power") cfg.kind = ExperimentKind::Power;
  else kv.error(kv.entry("kind").line, "kind: expected 'size' or 'power', got '" + kind + "'");

  std::vector<Scenario> scenarios;
  const auto& sc = kv.list("scenarios");
  for (std::size_t i = 0; i < sc.size(); ++i) {
    auto s = parse_scenario(sc[i]);
    if (!s) kv.error(kv.entry("scenarios").line, "scenarios[" + std::to_string(i) + "]: unknown scenario '" + sc[i] + "'");
    scenarios.push_back(*s);
  }
  std::vector<Innovation> laws{Innovation::Gaussian};
  if (kv.has("innovations")) {
    laws.clear();
    const auto& in = kv.list("innovations");
    for (std::size_t i = 0; i < in.size(); ++i) {
      auto l = parse_innovation(in[i]);
      if (!l) kv.error(kv.entry("innovations").line, "innovations[" + std::to_string(i) + "]: unknown law '" + in[i] + "'");
      laws.push_back(*l);
    }
  }
  const auto ns = kv.numbers<long long>("n");
  const auto ps = kv.numbers<long long>("p");
  const auto Ks = kv.numbers<int>("K");
  std::vector<std::optional<int>> ms{std::nullopt};
  if (cfg.kind == ExperimentKind::Power) {
    ms.clear();
    for (int m : kv.numbers<int>("m")) ms.emplace_back(m);
  } else if (kv.has("m")) {
    kv.error(kv.entry("m").line, "m: only valid for power experiments");
  }
  for (auto s : scenarios)
    for (auto l : laws)
      for (auto n : ns)
        for (auto p : ps)
          for (auto K : Ks)
            for (auto m : ms) cfg.grid.push_back({s, l, n, p, K, m});

  if (kv.has("replications")) cfg.replications = kv.number<int>("replications");
  else cfg.replications = cfg.kind == ExperimentKind::Size ? 1000 : 500;
  if (kv.has("alpha")) cfg.alpha = kv.number<double>("alpha");
  if (kv.has("master_seed")) cfg.master_seed = kv.number<std::uint64_t>("master_seed");
  if (kv.has("workers")) cfg.workers = kv.number<unsigned>("workers");
  if (kv.has("out")) cfg.out_path = kv.scalar("out");
  if (kv.has("format")) cfg.format = kv.scalar("format");
  if (kv.has("curves")) cfg.curves_dir = kv.scalar("curves");
  if (cfg.format != "csv" && cfg.format != "markdown")
    kv.error(kv.entry("format").line, "format: expected 'csv' or 'markdown'");
  validate(cfg);
  return cfg;
}

// ---- output ----------------------------------------------------------------

namespace detail {

inline std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

enum class TableFormat { Csv, Markdown };

inline constexpr const char* kTableCsvHeader =
    "scenario,innovation,m,n,p,K,alpha,replications,rej_max,rej_sum,rej_fc,se_max,se_sum,se_fc";

/// One row per cell, in result order. Markdown groups cells into
/// (scenario, innovation) blocks with (n, p) rows and (K, test) columns.
inline void emit_table(const std::vector<CellResult>& results, TableFormat format, double alpha, std::ostream& out) {
  if (results.empty()) fail(ErrorCode::InvalidInput, "emit_table: no results");
  if (format == TableFormat::Csv) {
    out << kTableCsvHeader << '\n';
    for (const auto& r : results) {
      const auto& c = r.cell;
      out << to_string(c.scenario) << ',' << to_string(c.innovation) << ',' << (c.m ? std::to_string(*c.m) : "")
          << ',' << c.n << ',' << c.p << ',' << c.K << ',' << detail::fixed(alpha, 4) << ',' << r.replications_used
          << ',' << detail::fixed(r.rejection_rate.max) << ',' << detail::fixed(r.rejection_rate.sum) << ','
          << detail::fixed(r.rejection_rate.fc) << ',' << detail::fixed(r.standard_error.max) << ','
          << detail::fixed(r.standard_error.sum) << ',' << detail::fixed(r.standard_error.fc) << '\n';
    }
    return;
  }

  using Block = std::pair<Scenario, Innovation>;
  using Row = std::tuple<Eigen::Index, Eigen::Index, int>;  // n, p, m (0 when absent)
  std::vector<Block> blocks;
  std::map<Block, std::set<Row>> rows;
  std::map<Block, std::set<int>> lags;
  std::map<std::tuple<Block, Row, int>, const CellResult*> lookup;
  for (const auto& r : results) {
    const Block b{r.cell.scenario, r.cell.innovation};
    if (std::find(blocks.begin(), blocks.end(), b) == blocks.end()) blocks.push_back(b);
    const Row row{r.cell.n, r.cell.p, r.cell.m.value_or(0)};
    rows[b].insert(row);
    lags[b].insert(r.cell.K);
    lookup[{b, row, r.cell.K}] = &r;
  }
  bool first = true;
  for (const auto& b : blocks) {
    if (!first) out << '\n';
    first = false;
    const bool with_m = is_alternative(b.first);
    out << "**" << to_string(b.first) << ", " << to_string(b.second) << "**\n\n";
    out << "| n | p |" << (with_m ? " m |" : "");
    for (int K : lags[b]) out << " K=" << K << " MAX | K=" << K << " SUM | K=" << K << " FC |";
    out << "\n|---|---|" << (with_m ? "---|" : "");
    for (std::size_t i = 0; i < lags[b].size(); ++i) out << "---|---|---|";
    out << '\n';
    for (const auto& row : rows[b]) {
      out << "| " << std::get<0>(row) << " | " << std::get<1>(row) << " |";
      if (with_m) out << ' ' << std::get<2>(row) << " |";
      for (int K : lags[b]) {
        auto it = lookup.find({b, row, K});
        if (it == lookup.end()) {
          out << " - | - | - |";
        } else {
          const auto& rate = it->second->rejection_rate;
          out << ' ' << detail::fixed(rate.max, 3) << " | " << detail::fixed(rate.sum, 3) << " | "
              << detail::fixed(rate.fc, 3) << " |";
        }
      }
      out << '\n';
    }
  }
}

inline void emit_table(const std::vector<CellResult>& results, TableFormat format, double alpha,
                       const std::string& path) {
  if (results.empty()) fail(ErrorCode::InvalidInput, "emit_table: no results");
  auto out = detail::open_for_write(path);
  emit_table(results, format, alpha, out);
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

inline constexpr const char* kPowerCurveHeader = "m,rate_MAX,rate_SUM,rate_FC,se_MAX,se_SUM,se_FC";

inline std::vector<int> default_curve_abscissae() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

/// Power-curve CSV for cells that share (scenario, innovation, n, p, K) and
/// differ only in m. Every m in `expected` must be present exactly once.
inline void emit_power_curve(const std::vector<CellResult>& results, std::ostream& out,
                             const std::vector<int>& expected = default_curve_abscissae()) {
  if (results.empty()) fail(ErrorCode::InvalidGrouping, "emit_power_curve: no results");
  const auto& ref = results.front().cell;
  std::map<int, const CellResult*> by_m;
  for (const auto& r : results) {
    const auto& c = r.cell;
    if (!c.m || !is_alternative(c.scenario))
      fail(ErrorCode::InvalidGrouping, "power curve needs alternative cells with m; got " + c.descriptor());
    if (c.scenario != ref.scenario || c.innovation != ref.innovation || c.n != ref.n || c.p != ref.p || c.K != ref.K)
      fail(ErrorCode::InvalidGrouping, "mixed cells: " + ref.descriptor() + " vs " + c.descriptor());
    if (!by_m.emplace(*c.m, &r).second) fail(ErrorCode::InvalidGrouping, "duplicate m = " + std::to_string(*c.m));
  }
  std::vector<int> missing;
  for (int m : expected)
    if (!by_m.count(m)) missing.push_back(m);
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + std::to_string(missing[i]);
    fail(ErrorCode::InvalidGrouping, "power curve missing m = " + list);
  }
  out << kPowerCurveHeader << '\n';
  for (const auto& [m, r] : by_m) {
    out << m << ',' << detail::fixed(r->rejection_rate.max) << ',' << detail::fixed(r->rejection_rate.sum) << ','
        << detail::fixed(r->rejection_rate.fc) << ',' << detail::fixed(r->standard_error.max) << ','
        << detail::fixed(r->standard_error.sum) << ',' << detail::fixed(r->standard_error.fc) << '\n';
  }
}

inline void emit_power_curve(const std::vector<CellResult>& results, const std::string& path,
                             const std::vector<int>& expected = default_curve_abscissae()) {
  std::ostringstream buffer;
  emit_power_curve(results, buffer, expected);
  auto out = detail::open_for_write(path);
  out << buffer.str();
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

/// Splits power results into curve groups keyed by (scenario, innovation, n, p, K).
inline std::vector<std::vector<CellResult>> group_for_curves(const std::vector<CellResult>& results) {
  std::vector<std::vector<CellResult>> groups;
  for (const auto& r : results) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
      const auto& c = g.front().cell;
      return c.scenario == r.cell.scenario && c.innovation == r.cell.innovation && c.n == r.cell.n &&
             c.p == r.cell.p && c.K == r.cell.K;
    });
    if (it == groups.end()) groups.push_back({r});
    else it->push_back(r);
  }
  return groups;
}

inline nlohmann::json to_json(const CellResult& r) {
  nlohmann::json j{{"scenario", std::string(to_string(r.cell.scenario))},
                   {"innovation", std::string(to_string(r.cell.innovation))},
                   {"n", r.cell.n},
                   {"p", r.cell.p},
                   {"K", r.cell.K},
                   {"replications", r.replications_used},
                   {"rate", {{"max", r.rejection_rate.max}, {"sum", r.rejection_rate.sum}, {"fc", r.rejection_rate.fc}}},
                   {"se", {{"max", r.standard_error.max}, {"sum", r.standard_error.sum}, {"fc", r.standard_error.fc}}},
                   {"wall_time", r.wall_time}};
  if (r.cell.m) j["m"] = *r.cell.m;
  return j;
}

}  // namespace hdwn

#endif  // HDWN_HARNESS_HPP
