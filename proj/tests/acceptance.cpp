// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: ifrk_acceptance [N ...] runs only the listed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ifrk/harness.hpp"
#include "oracles.hpp"

using namespace ifrk;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kGammaRef = 0.9575;
constexpr double kGammaTol = 5e-5;
constexpr double kRadiusRelTol = 1e-8;
constexpr double kOracleTol = 1e-11;
constexpr double kRk4Tol = 1e-14;
constexpr double kExpTol = 1e-12;
constexpr double kMbpRelTol = 1e-12;
constexpr double kSlopeTol = 0.25;
constexpr double kEnergyRelTol = 1e-8;
constexpr double kSteadySpreadTol = 1e-3;
constexpr double kSteadyGammaTol = 1e-3;
constexpr double kWallRatioMax = 0.15;
constexpr double kCompareDistanceMax = 1e-2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path artifact_root() { return fs::current_path() / "acceptance_out"; }

fs::path fresh_dir(const std::string& name) {
  const auto p = artifact_root() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome tableau_constants() {
  const auto k1 = mbp_constant(builtin(BuiltinScheme::IF1));
  const auto k2 = mbp_constant(builtin(BuiltinScheme::IFRK2));
  const auto k3 = mbp_constant(builtin(BuiltinScheme::IFRK3));
  const auto k4 = mbp_constant(builtin(BuiltinScheme::IFRK4));
  const auto r3n = validate(builtin(BuiltinScheme::IFRK3_SHUOSHER));
  // For IFRK4 the constant that binds is min(C+, C-) = 2/3.
  const bool c4 = k4.c_minus && k4.c_plus && std::min(*k4.c_plus, *k4.c_minus) == Rational(2, 3);
  const bool ok = k1.c_plus == Rational(1) && !k1.c_minus && k2.c_plus == Rational(1) && !k2.c_minus &&
                  k3.c_plus == Rational(3, 4) && !k3.c_minus && c4 && k4.has_negative_beta &&
                  !r3n.nondecreasing_abscissas;
  return {ok, fmt("C = %s, %s, %s, %s; IFRK4 negative beta %d; IFRK3_SHUOSHER abscissas ok %d",
                  k1.c_plus->str().c_str(), k2.c_plus->str().c_str(), k3.c_plus->str().c_str(),
                  k4.c_minus ? k4.c_minus->str().c_str() : "-", k4.has_negative_beta, r3n.nondecreasing_abscissas)};
}

Outcome stability_radii_check() {
  const auto cubic = ReactionTerm::cubic();
  const auto fh = ReactionTerm::flory_huggins(0.8, 1.6);
  const auto num = numeric_stability_radii([&](double x) { return fh.fprime(x); }, fh.rho());
  const double rel = std::abs(num.omega_plus - fh.omega_plus()) / fh.omega_plus();
  const bool ok = cubic.omega_plus() == 0.5 && cubic.omega_minus() == 1.0 &&
                  std::abs(fh.rho() - kGammaRef) <= kGammaTol && fh.omega_minus() == 1.25 && rel <= kRadiusRelTol;
  return {ok, fmt("cubic (%.17g, %.17g); gamma %.16f; omega- %.17g; omega+ %.12f, numeric rel diff %.2e",
                  cubic.omega_plus(), cubic.omega_minus(), fh.rho(), fh.omega_minus(), fh.omega_plus(), rel)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> wdist(-1.0, 1.0);
  const double eps2 = 0.01;
  double worst = 0.0;
  int pairs = 0;
  for (const auto& [dim, n] : {std::pair{1, std::size_t{8}}, std::pair{2, std::size_t{4}}}) {
    const auto grid = GridSpec::unit(dim, n);
    const auto op = LinearOperator::periodic_laplacian(grid, eps2);
    const auto dense = LinearOperator::dense(oracle::kronecker_laplacian(dim, static_cast<int>(n), grid.h, eps2),
                                             grid, eps2);
    for (int k = 0; k < 50; ++k, ++pairs) {
      const Field u(grid, oracle::random_vector(grid.size(), -1, 1, gen()));
      const double w = wdist(gen);
      worst = std::max(worst, oracle::max_abs_diff(apply_exponential(op, u, w).values,
                                                   apply_exponential(dense, u, w).values));
    }
  }
  return {worst <= kOracleTol, fmt("%d pairs, omega in [-1, 1], max diff %.3e", pairs, worst)};
}

Outcome reductions() {
  Stepper rk(LinearOperator::dense(Eigen::MatrixXd::Zero(1, 1)), ReactionTerm::cubic(), builtin(BuiltinScheme::IFRK4),
             0.1);
  const double u1 = rk.step(Field(GridSpec::unit(1, 1), 0.5))[0];
  const double rk_err = std::abs(u1 - oracle::classic_rk4([](double x) { return x - x * x * x; }, 0.5, 0.1));

  const auto grid = GridSpec::unit(2, 64);
  const auto op = LinearOperator::periodic_laplacian(grid, 0.01);
  const Field u(grid, oracle::random_vector(grid.size(), -1, 1, 77));
  const Field ref = apply_exponential(op, u, 0.08);
  double exp_err = 0.0;
  for (const auto& name : builtin_names()) {
    Stepper st(op, ReactionTerm::zero(), builtin(name), 0.08);
    exp_err = std::max(exp_err, oracle::max_abs_diff(st.step(u).values, ref.values));
  }
  return {rk_err <= kRk4Tol && exp_err <= kExpTol,
          fmt("RK4 scalar diff %.2e; f = 0 max diff %.2e over %zu schemes", rk_err, exp_err, builtin_names().size())};
}

Outcome mbp_invariance() {
  const auto grid = GridSpec::unit(2, 64);
  const auto op = LinearOperator::periodic_laplacian(grid, 0.01);
  double worst_ratio = 0.0;
  int runs = 0;
  for (const auto& term : {ReactionTerm::cubic(), ReactionTerm::flory_huggins(0.8, 1.6)}) {
    const double rho = term.rho();
    for (const auto& name : builtin_names()) {
      const auto t = builtin(name);
      if (!validate(t).mbp_admissible) continue;
      Stepper st(op, term, t, max_timestep(t, term));
      for (std::uint64_t seed = 1; seed <= 50; ++seed, ++runs) {
        Field u(grid, oracle::random_vector(grid.size(), -rho, rho, seed));
        for (int n = 0; n < 100; ++n) {
          st.advance(u);
          worst_ratio = std::max(worst_ratio, sup_norm(u) / rho);
        }
      }
    }
  }
  return {worst_ratio <= 1 + kMbpRelTol, fmt("%d runs x 100 steps, max ||u||/rho - 1 = %.3e", runs, worst_ratio - 1)};
}

Outcome convergence_orders() {
  RunConfig cfg = default_config(Experiment::converge);
  cfg.points = 256;
  cfg.eps2 = 0.01;
  cfg.t_end = 2.0;
  cfg.benchmark_tau = std::ldexp(1.0, -13);
  cfg.out_dir = fresh_dir("converge").string();
  const auto r = run_convergence_study(cfg);
  bool ok = r.fits.size() == 4;
  std::string detail = fmt("noise floor %.2e; slopes", r.noise_floor);
  const double want[] = {1, 2, 3, 4};
  for (std::size_t i = 0; i < r.fits.size() && i < 4; ++i) {
    ok = ok && std::abs(r.fits[i].slope - want[i]) <= kSlopeTol;
    detail += fmt(" %s=%.3f", r.fits[i].scheme.c_str(), r.fits[i].slope);
  }
  return {ok, detail};
}

RunConfig coarsen_config() {
  RunConfig cfg = default_config(Experiment::coarsen);
  cfg.points = 512;
  cfg.eps2 = 0.01;
  cfg.taus = {0.08};
  cfg.t_end = 30.0;
  cfg.schemes = {"IF1", "IFRK2", "IFRK3", "IFRK4"};
  cfg.record_every = 1;
  return cfg;
}

Outcome mbp_experiment() {
  RunConfig cfg = coarsen_config();
  cfg.out_dir = fresh_dir("coarsen_a").string();
  const auto runs = run_coarsening(cfg);
  bool ok = runs.size() == 4;
  std::string detail;
  for (const auto& r : runs) {
    double worst = 0.0;
    for (const auto& rec : r.run.series.records) worst = std::max(worst, rec.sup_norm);
    const bool run_ok = r.run.series.status == RunStatus::completed && worst <= r.rho * (1 + kMbpRelTol);
    ok = ok && run_ok;
    detail += fmt("%s%s max sup %.15f", detail.empty() ? "" : "; ", r.scheme.c_str(), worst);
  }
  return {ok, detail + fmt(" (gamma %.15f)", runs.empty() ? 0.0 : runs.front().rho)};
}

Outcome violation_demo() {
  RunConfig cfg = default_config(Experiment::violation_demo);
  cfg.points = 512;
  cfg.eps2 = 0.01;
  cfg.record_every = 1;

  cfg.taus = {0.005};
  cfg.t_end = 10.0;
  cfg.out_dir = fresh_dir("violate_0.005").string();
  const auto big = run_violation_demo(cfg);
  const auto first = big.run.series.first_violation_time();
  const auto anomaly = big.first_energy_anomaly;
  const bool big_ok = first && *first < 10.0 && anomaly && *anomaly >= *first;

  cfg.taus = {0.004};
  cfg.t_end = 5.0;
  cfg.out_dir = fresh_dir("violate_0.004").string();
  const auto small = run_violation_demo(cfg);
  const bool small_ok = small.run.series.status == RunStatus::completed && small.run.series.all_mbp_ok();

  auto show = [](const std::optional<double>& t) { return t ? fmt("%.3f", *t) : std::string("none"); };
  return {big_ok && small_ok,
          fmt("tau 0.005: violation at t=%s, energy anomaly at t=%s, status %s; tau 0.004: status %s, violation %s",
              show(first).c_str(), show(anomaly).c_str(), to_string(big.run.series.status).c_str(),
              to_string(small.run.series.status).c_str(), show(small.run.series.first_violation_time()).c_str())};
}

Outcome steady_state() {
  RunConfig cfg = default_config(Experiment::coarsen);
  cfg.points = 512;
  cfg.eps2 = 1e-4;
  cfg.taus = {0.08};
  cfg.t_end = 610.0;
  cfg.record_every = 10;
  cfg.out_dir = fresh_dir("steady").string();
  const auto runs = run_coarsening(cfg);
  const auto& r = runs.front();
  const auto& u = r.run.final.values;
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  const double spread = *hi - *lo;
  const double gap = std::abs(sup_norm(r.run.final) - r.rho);
  const double rise = max_relative_energy_increase(r.run.series);
  const bool ok = r.run.series.status == RunStatus::completed && spread < kSteadySpreadTol &&
                  gap < kSteadyGammaTol && rise <= kEnergyRelTol;
  return {ok, fmt("final value %.10f, max-min %.3e, | ||u|| - gamma | %.3e, max relative energy rise %.3e", *lo,
                  spread, gap, rise)};
}

Outcome efficiency() {
  RunConfig cfg = default_config(Experiment::compare);
  cfg.points = 512;
  cfg.eps2 = 1e-4;
  cfg.t_end = 50.0;
  cfg.out_dir = fresh_dir("compare").string();
  const auto c = run_compare(cfg);
  const double share = c.second.wall_seconds / c.first.wall_seconds;
  const bool ok = c.first.run.series.status == RunStatus::completed &&
                  c.second.run.series.status == RunStatus::completed && share <= kWallRatioMax &&
                  c.final_distance < kCompareDistanceMax;
  return {ok, fmt("IFRK2 %.1f s, IFRK4 %.1f s, share %.2f%%, final distance %.3e", c.first.wall_seconds,
                  c.second.wall_seconds, 100 * share, c.final_distance)};
}

Outcome determinism() {
  const auto a = artifact_root() / "coarsen_a";
  if (!fs::exists(a)) {
    RunConfig cfg = coarsen_config();
    cfg.out_dir = fresh_dir("coarsen_a").string();
    run_coarsening(cfg);
  }
  RunConfig cfg = coarsen_config();
  cfg.out_dir = fresh_dir("coarsen_b").string();
  run_coarsening(cfg);
  int compared = 0;
  bool same = true;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    ++compared;
    const auto other = fs::path(cfg.out_dir) / e.path().filename();
    same = same && fs::exists(other) && slurp(e.path()) == slurp(other);
  }
  return {same && compared == 4, fmt("%d CSV files compared, identical %d", compared, same)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "tableau constants", tableau_constants},
      {2, "stability radii", stability_radii_check},
      {3, "spectral vs dense exponential", oracle_equivalence},
      {4, "reduction to RK4 and to the exponential", reductions},
      {5, "MBP invariance on random fields", mbp_invariance},
      {6, "convergence orders", convergence_orders},
      {7, "MBP during coarsening", mbp_experiment},
      {8, "violation demonstration", violation_demo},
      {9, "long-time steady state", steady_state},
      {10, "efficiency ratio", efficiency},
      {11, "determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    ++ran;
    if (!o.pass) ++failed;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
