// Command-line driver for the IFRK experiments.
//
//   ifrk converge     convergence orders against an IFRK4 benchmark
//   ifrk coarsen      coarsening run(s) with sup-norm / energy series
//   ifrk violate      run a non-admissible scheme until the bound breaks
//   ifrk compare      two (scheme, tau) pairs on the same problem
//   ifrk tableau-info coefficients, MBP constants and tau_max

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "ifrk/errors.hpp"
#include "ifrk/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;

struct Flags {
  std::vector<std::string> schemes;
  std::string grid;
  std::optional<double> eps2;
  std::optional<std::string> term;
  std::optional<double> theta;
  std::optional<double> theta_c;
  std::vector<double> taus;
  std::string ladder;
  std::optional<double> bench_tau;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> record_every;
  std::optional<std::string> config;
  std::optional<std::string> init;
  std::vector<double> snapshots;
  std::optional<std::string> snapshot_format;
  std::optional<std::size_t> fit_window;
  std::optional<unsigned> jobs;
  bool enforce = false;
  bool no_enforce = false;
  std::string stage_form;
  bool json = false;
};

void add_shared(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scheme", f.schemes, "Scheme name(s): IF1 IFRK2 IFRK3 IFRK4 IFRK3_SHUOSHER");
  cmd->add_option("--grid", f.grid, "Grid as DIMxPOINTS, e.g. 2x512");
  cmd->add_option("--eps2", f.eps2, "Diffusion coefficient epsilon^2");
  cmd->add_option("--term", f.term, "Reaction term: flory_huggins or cubic");
  cmd->add_option("--theta", f.theta, "Flory-Huggins theta");
  cmd->add_option("--theta-c", f.theta_c, "Flory-Huggins theta_c");
  cmd->add_option("--tau", f.taus, "Time step(s)");
  cmd->add_option("--t-end", f.t_end, "Final time");
  cmd->add_option("--seed", f.seed, "Seed for random initial data");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--record-every", f.record_every, "Record diagnostics every N steps");
  cmd->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--init", f.init, "paper_smooth | random:LO:HI | constant:V | file:PATH");
  cmd->add_option("--snapshots", f.snapshots, "Times at which to write field snapshots")->delimiter(',');
  cmd->add_option("--snapshot-format", f.snapshot_format, "raw or csv");
  cmd->add_flag("--enforce-mbp", f.enforce, "Refuse steps outside the MBP guarantee");
  cmd->add_flag("--no-enforce-mbp", f.no_enforce, "Run regardless of the MBP step bound");
  cmd->add_option("--stage-form", f.stage_form, "Stage evaluation: shu_osher or butcher (violate defaults to butcher)");
}

ifrk::RunConfig build_config(ifrk::Experiment e, const Flags& f) {
  ifrk::RunConfig cfg = ifrk::default_config(e);
  if (f.config) {
    std::ifstream in(*f.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& ex) {
      throw ifrk::ConfigError(std::string("cannot parse config: ") + ex.what());
    }
    cfg = ifrk::config_from_json(j, cfg);
    cfg.experiment = e;
  }
  if (!f.schemes.empty()) cfg.schemes = f.schemes;
  if (!f.grid.empty()) {
    const auto x = f.grid.find('x');
    if (x == std::string::npos) throw ifrk::ConfigError("grid must look like DIMxPOINTS");
    try {
      cfg.dim = std::stoi(f.grid.substr(0, x));
      cfg.points = static_cast<std::size_t>(std::stoul(f.grid.substr(x + 1)));
    } catch (const std::exception&) {
      throw ifrk::ConfigError("grid must look like DIMxPOINTS");
    }
  }
  if (f.eps2) cfg.eps2 = *f.eps2;
  if (f.term) cfg.term.kind = *f.term;
  if (f.theta) cfg.term.theta = *f.theta;
  if (f.theta_c) cfg.term.theta_c = *f.theta_c;
  if (!f.taus.empty()) cfg.taus = f.taus;
  if (!f.ladder.empty()) {
    const auto colon = f.ladder.find(':');
    if (colon == std::string::npos) throw ifrk::ConfigError("ladder must look like KMIN:KMAX");
    const int lo = std::stoi(f.ladder.substr(0, colon));
    const int hi = std::stoi(f.ladder.substr(colon + 1));
    cfg.taus.clear();
    for (int k = lo; k <= hi; ++k) cfg.taus.push_back(std::ldexp(1.0, -k));
  }
  if (f.bench_tau) cfg.benchmark_tau = *f.bench_tau;
  if (f.t_end) cfg.t_end = *f.t_end;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.record_every) cfg.record_every = *f.record_every;
  if (f.init) cfg.init = ifrk::parse_initial_condition(*f.init);
  if (!f.snapshots.empty()) cfg.snapshot_times = f.snapshots;
  if (f.snapshot_format) cfg.snapshot_format = *f.snapshot_format;
  if (f.fit_window) cfg.fit_window = *f.fit_window;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.enforce && f.no_enforce) throw ifrk::ConfigError("--enforce-mbp and --no-enforce-mbp conflict");
  if (f.enforce) cfg.enforce_mbp = true;
  if (f.no_enforce) cfg.enforce_mbp = false;
  if (!f.stage_form.empty()) cfg.stage_form = ifrk::parse_stage_form(f.stage_form);
  return cfg;
}

void print_run(const ifrk::RunResult& r) {
  const auto& s = r.run.series;
  const auto first = s.first_violation_time();
  double max_sup = 0.0;
  for (const auto& rec : s.records) max_sup = std::max(max_sup, rec.sup_norm);
  std::cout << r.scheme << " tau=" << ifrk::format_double(r.tau) << " status=" << ifrk::to_string(s.status)
            << " steps=" << r.run.steps << " max_sup=" << ifrk::format_double(max_sup)
            << " rho=" << ifrk::format_double(r.rho)
            << " first_violation=" << (first ? ifrk::format_double(*first) : std::string("none"))
            << " wall=" << r.wall_seconds << "s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrating factor Runge-Kutta experiments"};
  app.require_subcommand(1);
  Flags f;

  auto* converge = app.add_subcommand("converge", "Convergence study against an IFRK4 benchmark");
  add_shared(converge, f);
  converge->add_option("--ladder", f.ladder, "Time steps 2^-k for k in KMIN:KMAX");
  converge->add_option("--bench-tau", f.bench_tau, "Benchmark step (default 2^-13; smallest tau / 10 when unset in a config file)");
  converge->add_option("--fit-window", f.fit_window, "Number of points in the order fit");
  converge->add_option("--jobs", f.jobs, "Concurrent (scheme, tau) cells");

  auto* coarsen = app.add_subcommand("coarsen", "Coarsening dynamics from random data");
  add_shared(coarsen, f);
  auto* violate = app.add_subcommand("violate", "MBP violation demonstration");
  add_shared(violate, f);
  auto* compare = app.add_subcommand("compare", "Compare two (scheme, tau) pairs");
  add_shared(compare, f);
  auto* info = app.add_subcommand("tableau-info", "Print tableau, MBP constants and tau_max");
  add_shared(info, f);
  info->add_flag("--json", f.json, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (info->parsed()) {
      const auto cfg = build_config(ifrk::Experiment::tableau_info, f);
      const std::string scheme = f.schemes.empty() ? "IFRK4" : f.schemes.front();
      const auto j = ifrk::tableau_info(scheme, cfg.term);
      if (f.json)
        std::cout << j.dump(2) << "\n";
      else
        std::cout << ifrk::tableau_info_text(j);
      return 0;
    }
    if (converge->parsed()) {
      const auto cfg = build_config(ifrk::Experiment::converge, f);
      const auto res = ifrk::run_convergence_study(cfg);
      std::cout << "benchmark IFRK4 tau=" << ifrk::format_double(res.benchmark_tau)
                << " noise_floor=" << ifrk::format_double(res.noise_floor) << "\n";
      for (const auto& row : res.rows)
        std::cout << row.scheme << " tau=" << ifrk::format_double(row.tau)
                  << " error=" << ifrk::format_double(row.error) << "\n";
      bool blown = false;
      for (const auto& fit : res.fits) {
        std::cout << fit.scheme << " order=" << ifrk::format_double(fit.slope) << " (" << fit.window.size()
                  << " points)\n";
        blown = blown || !std::isfinite(fit.slope);
      }
      for (const auto& row : res.rows) blown = blown || !std::isfinite(row.error);
      return blown ? kExitBlowUp : 0;
    }
    if (coarsen->parsed()) {
      const auto cfg = build_config(ifrk::Experiment::coarsen, f);
      int code = 0;
      for (const auto& r : ifrk::run_coarsening(cfg)) {
        print_run(r);
        if (r.run.series.status == ifrk::RunStatus::blow_up) code = kExitBlowUp;
        if (r.run.series.status == ifrk::RunStatus::refused && code == 0) code = kExitConfig;
      }
      return code;
    }
    if (violate->parsed()) {
      const auto cfg = build_config(ifrk::Experiment::violation_demo, f);
      print_run(ifrk::run_violation_demo(cfg));
      return 0;
    }
    if (compare->parsed()) {
      const auto cfg = build_config(ifrk::Experiment::compare, f);
      const auto c = ifrk::run_compare(cfg);
      print_run(c.first);
      print_run(c.second);
      std::cout << "wall_ratio=" << ifrk::format_double(c.wall_ratio)
                << " final_distance=" << ifrk::format_double(c.final_distance) << "\n";
      for (const auto* r : {&c.first, &c.second}) {
        if (r->run.series.status == ifrk::RunStatus::blow_up) return kExitBlowUp;
        if (r->run.series.status == ifrk::RunStatus::refused) return kExitConfig;
      }
      return 0;
    }
  } catch (const ifrk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ifrk::StepRefused& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
