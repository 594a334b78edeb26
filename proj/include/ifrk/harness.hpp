#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifrk/integrator.hpp"

namespace ifrk {

enum class Experiment { converge, coarsen, violation_demo, compare, tableau_info };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& s);
/// "shu_osher" or "butcher".
StageForm parse_stage_form(const std::string& s);

struct InitialCondition {
  enum class Kind { paper_smooth, random_uniform, constant, from_file };
  Kind kind = Kind::random_uniform;
  double lo = -0.8;
  double hi = 0.8;
  double value = 0.0;
  std::string path;
};

/// Parses "paper_smooth", "random:LO:HI", "constant:V" or "file:PATH".
InitialCondition parse_initial_condition(const std::string& s);
std::string to_string(const InitialCondition& ic);

struct TermSpec {
  std::string kind = "flory_huggins";  // or "cubic"
  double theta = 0.8;
  double theta_c = 1.6;
};

struct RunConfig {
  Experiment experiment = Experiment::coarsen;
  std::vector<std::string> schemes{"IFRK4"};
  int dim = 2;
  std::size_t points = 512;
  double eps2 = 0.01;
  TermSpec term;
  std::vector<double> taus{0.08};
  std::optional<double> benchmark_tau;  // converge only; default smallest tau / 10
  double t_end = 30.0;
  std::uint64_t seed = 1;
  InitialCondition init;
  std::string out_dir;                  // empty: write nothing
  std::size_t record_every = 1;
  std::optional<bool> enforce_mbp;      // default depends on the experiment
  StageForm stage_form = StageForm::shu_osher;  // violation_demo defaults to butcher
  std::vector<double> snapshot_times;
  std::string snapshot_format = "raw";  // raw or csv
  std::size_t fit_window = 5;
  unsigned jobs = 1;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep the values already in `base`. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// Defaults for each experiment, matching the published setups at the
/// grid sizes given.
RunConfig default_config(Experiment e);

GridSpec make_grid(const RunConfig& cfg);
ReactionTerm make_term(const TermSpec& spec);
LinearOperator make_operator(const RunConfig& cfg);

/// Row-major initial data. Random data uses std::mt19937_64 seeded with
/// cfg.seed; each draw maps the top 53 bits to [0, 1).
Field initial_field(const RunConfig& cfg, const GridSpec& grid);

/// Checks the invariants of a configuration; throws ConfigError.
void validate_config(const RunConfig& cfg);

struct ConvergenceRow {
  std::string scheme;
  double tau;
  double error;
};

struct OrderFit {
  std::string scheme;
  double slope;
  std::vector<double> window;  // taus used in the fit
  bool monotone;               // errors decrease with tau inside the window
};

struct ConvergenceResult {
  double benchmark_tau = 0.0;
  double benchmark_sup_norm = 0.0;
  double benchmark_uncertainty = 0.0;  // ||u(bench) - u(2 bench)||_inf
  double noise_floor = 0.0;            // errors at or below this are saturated
  std::vector<ConvergenceRow> rows;
  std::vector<OrderFit> fits;
};

/// Least-squares slope of log2(error) against log2(tau) over the `window`
/// smallest taus whose errors exceed `noise_floor`.
OrderFit fit_order(const std::string& scheme, std::vector<std::pair<double, double>> tau_error,
                   double noise_floor, std::size_t window);

/// Errors against an IFRK4 benchmark. The fit excludes errors at or below
/// max(100 eps ||u_bench||_inf, 10 ||u_bench - u_2bench||_inf).
ConvergenceResult run_convergence_study(const RunConfig& cfg);

struct RunResult {
  std::string scheme;
  double tau = 0.0;
  IntegrationResult run;
  double wall_seconds = 0.0;
  double rho = 0.0;
  std::optional<double> first_energy_anomaly;  // energy NaN or increasing
};

/// One integration per scheme in cfg (taus broadcast or paired).
std::vector<RunResult> run_coarsening(const RunConfig& cfg);

/// Runs a (typically non-admissible) scheme with enforcement off.
RunResult run_violation_demo(const RunConfig& cfg);

struct CompareResult {
  RunResult first;
  RunResult second;
  double wall_ratio = 0.0;  // second / first
  double final_distance = 0.0;
};

/// Both runs share one configuration; needs two (scheme, tau) pairs.
CompareResult run_compare(const RunConfig& cfg);
/// Throws ConfigError unless the two configurations describe the same problem.
CompareResult run_compare(const RunConfig& a, const RunConfig& b);

/// Validation report, MBP constants and tau_max for a named scheme and term.
nlohmann::json tableau_info(const std::string& scheme, const TermSpec& term);
std::string tableau_info_text(const nlohmann::json& info);

}  // namespace ifrk
