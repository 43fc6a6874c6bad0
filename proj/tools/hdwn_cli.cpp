// Command-line front end: Monte Carlo experiments, single-panel tests, power
// calculators and the factor-residual application.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 data error, 4 I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "hdwn/hdwn.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitIo = 4;

int exit_code_for(hdwn::ErrorCode code) {
  switch (code) {
    case hdwn::ErrorCode::Config: return kExitConfig;
    case hdwn::ErrorCode::Io: return kExitIo;
    default: return kExitData;
  }
}

struct ExperimentArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
  std::string format;
  std::string curves;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a, bool with_curves) {
  cmd->add_option("--config", a.config, "experiment config file")->required();
  cmd->add_option("--seed", a.seed, "master seed (overrides config)");
  cmd->add_option("--workers", a.workers, "worker threads, 0 = all cores (overrides config)");
  cmd->add_option("--out", a.out, "output table path (default: stdout)");
  cmd->add_option("--format", a.format, "csv or markdown (overrides config)")->check(CLI::IsMember({"csv", "markdown"}));
  if (with_curves) cmd->add_option("--curves", a.curves, "directory for one power-curve CSV per group");
}

std::string curve_file_name(const hdwn::Cell& c) {
  std::ostringstream os;
  os << "power_" << hdwn::to_string(c.scenario) << '_' << hdwn::to_string(c.innovation) << "_n" << c.n << "_p" << c.p
     << "_K" << c.K << ".csv";
  return os.str();
}

int run_experiment_command(const ExperimentArgs& a, hdwn::ExperimentKind expected) {
  auto kv = hdwn::config::KeyValueFile::parse_file(a.config);
  auto cfg = hdwn::experiment_from_config(kv);
  if (cfg.kind != expected)
    hdwn::fail(hdwn::ErrorCode::Config, a.config + ": kind does not match the subcommand");
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.workers) cfg.workers = *a.workers;
  if (!a.out.empty()) cfg.out_path = a.out;
  if (!a.format.empty()) cfg.format = a.format;
  if (!a.curves.empty()) cfg.curves_dir = a.curves;

  std::vector<hdwn::CellResult> results;
  results.reserve(cfg.grid.size());
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    auto single = cfg;
    single.grid = {cfg.grid[i]};
    results.push_back(hdwn::run_experiment(single).front());
    const auto& r = results.back();
    std::cerr << '[' << i + 1 << '/' << cfg.grid.size() << "] " << r.cell.descriptor() << "  max=" << r.rejection_rate.max
              << " sum=" << r.rejection_rate.sum << " fc=" << r.rejection_rate.fc << "  (" << r.wall_time << " s)\n";
  }

  const auto format = cfg.format == "markdown" ? hdwn::TableFormat::Markdown : hdwn::TableFormat::Csv;
  if (cfg.out_path.empty()) hdwn::emit_table(results, format, cfg.alpha, std::cout);
  else hdwn::emit_table(results, format, cfg.alpha, cfg.out_path);

  if (!cfg.curves_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.curves_dir, ec);
    if (ec) hdwn::fail(hdwn::ErrorCode::Io, "cannot create '" + cfg.curves_dir + "': " + ec.message());
    for (const auto& group : hdwn::group_for_curves(results)) {
      const auto path = (std::filesystem::path(cfg.curves_dir) / curve_file_name(group.front().cell)).string();
      hdwn::emit_power_curve(group, path);
      std::cerr << "wrote " << path << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional white-noise tests"};
  app.require_subcommand(1);

  ExperimentArgs size_args, power_args;
  add_experiment_options(app.add_subcommand("size", "empirical size over a grid of null scenarios"), size_args, false);
  add_experiment_options(app.add_subcommand("power", "empirical power over a grid of alternatives"), power_args, true);

  auto* test = app.add_subcommand("test", "run all three tests on one panel");
  std::string input, test_format = "json";
  int K = 1;
  double alpha = 0.05;
  bool header = false, center = false;
  test->add_option("--input", input, "panel CSV, rows = time, columns = components")->required();
  test->add_option("--K", K, "maximum lag")->check(CLI::PositiveNumber);
  test->add_option("--alpha", alpha, "nominal level");
  test->add_flag("--header", header, "first CSV line is a header");
  test->add_flag("--center", center, "subtract column means first");
  test->add_option("--format", test_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* theory = app.add_subcommand("power-theory", "asymptotic sum-test power for e_t = A0 z_t + A1 z_{t-1}");
  std::string a0_path, a1_path;
  long long theory_n = 200;
  double nu4 = 3.0, theory_alpha = 0.05;
  theory->add_option("--A0", a0_path, "CSV matrix A0 (no header)")->required();
  theory->add_option("--A1", a1_path, "CSV matrix A1 (no header)")->required();
  theory->add_option("--n", theory_n, "sample size");
  theory->add_option("--nu4", nu4, "fourth moment of the innovations");
  theory->add_option("--alpha", theory_alpha, "nominal level");

  auto* residual = app.add_subcommand("residual-test", "sliding-window tests on three-factor regression residuals");
  std::string returns_path, factors_path;
  long long window = 50;
  int residual_K = 2;
  double residual_alpha = 0.05;
  unsigned residual_workers = 1;
  bool already_excess = false, check_dates = false;
  residual->add_option("--returns", returns_path, "returns CSV: date column then one column per asset")->required();
  residual->add_option("--factors", factors_path, "factors CSV: date, mkt-rf, SMB, HML, RF")->required();
  residual->add_option("--window", window, "window length n");
  residual->add_option("--K", residual_K, "maximum lag")->check(CLI::PositiveNumber);
  residual->add_option("--alpha", residual_alpha, "nominal level");
  residual->add_option("--workers", residual_workers, "worker threads, 0 = all cores");
  residual->add_flag("--already-excess", already_excess, "returns already have the risk-free rate removed");
  residual->add_flag("--check-dates", check_dates, "require identical date labels in both files");

  auto* simulate = app.add_subcommand("simulate", "write one simulated panel as CSV");
  std::string dgp_config, sim_out;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--config", dgp_config, "generator config (scenario, innovation, n, p, m, seed)")->required();
  simulate->add_option("--seed", sim_seed, "seed (overrides config)");
  simulate->add_option("--out", sim_out, "output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (app.got_subcommand("size")) return run_experiment_command(size_args, hdwn::ExperimentKind::Size);
    if (app.got_subcommand("power")) return run_experiment_command(power_args, hdwn::ExperimentKind::Power);

    if (app.got_subcommand("test")) {
      const auto panel =
          hdwn::read_panel_csv(input, header, center ? hdwn::Centering::SubtractMean : hdwn::Centering::None);
      const auto report = hdwn::run_all(panel, K, alpha);
      if (test_format == "csv") std::cout << hdwn::kReportCsvHeader << '\n' << hdwn::to_csv_record(report) << '\n';
      else std::cout << hdwn::to_json(report).dump(2) << '\n';
      return 0;
    }

    if (app.got_subcommand("power-theory")) {
      hdwn::PowerInputs in;
      in.A0 = hdwn::csv::read_file(a0_path, {}).values;
      in.A1 = hdwn::csv::read_file(a1_path, {}).values;
      in.n = theory_n;
      in.nu4 = nu4;
      in.alpha = theory_alpha;
      const auto b = hdwn::sum_power(in);
      nlohmann::json terms = nlohmann::json::array();
      for (double t : b.variance_terms) terms.push_back(t);
      const nlohmann::json j{{"mu_s", b.mu_s},       {"sigma_s1", b.sigma_s1}, {"xi0", b.xi0},
                             {"z_alpha", b.z_alpha}, {"beta_sum", b.beta_sum}, {"variance_terms", terms}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (app.got_subcommand("residual-test")) {
      const auto data = hdwn::load_factor_data(returns_path, factors_path, already_excess, check_dates);
      const auto resid = hdwn::ols_residuals(data);
      const auto summary = hdwn::sliding_window_rates(resid, window, residual_K, residual_alpha, residual_workers);
      auto j = hdwn::to_json(summary);
      j["T"] = data.T();
      j["p"] = data.p();
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (app.got_subcommand("simulate")) {
      auto spec = hdwn::config::dgp_spec_from_config(hdwn::config::KeyValueFile::parse_file(dgp_config));
      if (sim_seed) spec.seed = *sim_seed;
      const auto panel = hdwn::gen_panel(spec);
      if (sim_out.empty()) {
        hdwn::write_panel_csv(std::cout, panel);
      } else {
        std::ofstream out(sim_out);
        if (!out) hdwn::fail(hdwn::ErrorCode::Io, "cannot open '" + sim_out + "' for writing");
        hdwn::write_panel_csv(out, panel);
      }
      return 0;
    }
  } catch (const hdwn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return 0;
}
