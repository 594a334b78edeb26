#include "ifrk/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ifrk/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ifrk {

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::converge:
      return "converge";
    case Experiment::coarsen:
      return "coarsen";
    case Experiment::violation_demo:
      return "violation_demo";
    case Experiment::compare:
      return "compare";
    case Experiment::tableau_info:
      return "tableau_info";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& s) {
  if (s == "converge") return Experiment::converge;
  if (s == "coarsen") return Experiment::coarsen;
  if (s == "violate" || s == "violation_demo") return Experiment::violation_demo;
  if (s == "compare") return Experiment::compare;
  if (s == "tableau-info" || s == "tableau_info") return Experiment::tableau_info;
  throw ConfigError("unknown experiment '" + s + "'");
}

StageForm parse_stage_form(const std::string& s) {
  if (s == "shu_osher" || s == "shu-osher") return StageForm::shu_osher;
  if (s == "butcher") return StageForm::butcher;
  throw ConfigError("unknown stage form: " + s);
}

namespace {

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

InitialCondition parse_initial_condition(const std::string& s) {
  InitialCondition ic;
  if (s == "paper_smooth") {
    ic.kind = InitialCondition::Kind::paper_smooth;
    return ic;
  }
  if (s.rfind("file:", 0) == 0) {
    ic.kind = InitialCondition::Kind::from_file;
    ic.path = s.substr(5);
    return ic;
  }
  const auto parts = split(s, ':');
  if (!parts.empty() && parts[0] == "random" && (parts.size() == 1 || parts.size() == 3)) {
    ic.kind = InitialCondition::Kind::random_uniform;
    if (parts.size() == 3) {
      ic.lo = parse_number(parts[1], "random lower bound");
      ic.hi = parse_number(parts[2], "random upper bound");
      if (!(ic.lo < ic.hi)) throw ConfigError("random bounds need LO < HI");
    }
    return ic;
  }
  if (parts.size() == 2 && parts[0] == "constant") {
    ic.kind = InitialCondition::Kind::constant;
    ic.value = parse_number(parts[1], "constant value");
    return ic;
  }
  throw ConfigError("unknown initial condition '" + s + "'");
}

std::string to_string(const InitialCondition& ic) {
  switch (ic.kind) {
    case InitialCondition::Kind::paper_smooth:
      return "paper_smooth";
    case InitialCondition::Kind::random_uniform:
      return "random:" + format_double(ic.lo) + ":" + format_double(ic.hi);
    case InitialCondition::Kind::constant:
      return "constant:" + format_double(ic.value);
    case InitialCondition::Kind::from_file:
      return "file:" + ic.path;
  }
  return "";
}

json to_json(const RunConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["schemes"] = cfg.schemes;
  j["dim"] = cfg.dim;
  j["points"] = cfg.points;
  j["eps2"] = cfg.eps2;
  j["term"] = {{"kind", cfg.term.kind}, {"theta", cfg.term.theta}, {"theta_c", cfg.term.theta_c}};
  j["taus"] = cfg.taus;
  j["benchmark_tau"] = cfg.benchmark_tau ? json(*cfg.benchmark_tau) : json(nullptr);
  j["t_end"] = cfg.t_end;
  j["seed"] = cfg.seed;
  j["init"] = to_string(cfg.init);
  j["out_dir"] = cfg.out_dir;
  j["record_every"] = cfg.record_every;
  j["enforce_mbp"] = cfg.enforce_mbp ? json(*cfg.enforce_mbp) : json(nullptr);
  j["stage_form"] = cfg.stage_form == StageForm::butcher ? "butcher" : "shu_osher";
  j["snapshot_times"] = cfg.snapshot_times;
  j["snapshot_format"] = cfg.snapshot_format;
  j["fit_window"] = cfg.fit_window;
  j["jobs"] = cfg.jobs;
  return j;
}

RunConfig config_from_json(const json& j, RunConfig cfg) {
  try {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    if (j.contains("experiment")) cfg.experiment = parse_experiment(j.at("experiment").get<std::string>());
    if (j.contains("schemes")) cfg.schemes = j.at("schemes").get<std::vector<std::string>>();
    if (j.contains("scheme")) cfg.schemes = {j.at("scheme").get<std::string>()};
    if (j.contains("dim")) cfg.dim = j.at("dim").get<int>();
    if (j.contains("points")) cfg.points = j.at("points").get<std::size_t>();
    if (j.contains("eps2")) cfg.eps2 = j.at("eps2").get<double>();
    if (j.contains("term")) {
      const auto& t = j.at("term");
      if (t.contains("kind")) cfg.term.kind = t.at("kind").get<std::string>();
      if (t.contains("theta")) cfg.term.theta = t.at("theta").get<double>();
      if (t.contains("theta_c")) cfg.term.theta_c = t.at("theta_c").get<double>();
    }
    if (j.contains("taus")) cfg.taus = j.at("taus").get<std::vector<double>>();
    if (j.contains("tau")) cfg.taus = {j.at("tau").get<double>()};
    if (j.contains("benchmark_tau") && !j.at("benchmark_tau").is_null())
      cfg.benchmark_tau = j.at("benchmark_tau").get<double>();
    if (j.contains("t_end")) cfg.t_end = j.at("t_end").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("init")) cfg.init = parse_initial_condition(j.at("init").get<std::string>());
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("record_every")) cfg.record_every = j.at("record_every").get<std::size_t>();
    if (j.contains("enforce_mbp") && !j.at("enforce_mbp").is_null())
      cfg.enforce_mbp = j.at("enforce_mbp").get<bool>();
    if (j.contains("stage_form")) cfg.stage_form = parse_stage_form(j.at("stage_form").get<std::string>());
    if (j.contains("snapshot_times")) cfg.snapshot_times = j.at("snapshot_times").get<std::vector<double>>();
    if (j.contains("snapshot_format")) cfg.snapshot_format = j.at("snapshot_format").get<std::string>();
    if (j.contains("fit_window")) cfg.fit_window = j.at("fit_window").get<std::size_t>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<unsigned>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad configuration: ") + e.what());
  }
  return cfg;
}

RunConfig default_config(Experiment e) {
  RunConfig cfg;
  cfg.experiment = e;
  switch (e) {
    case Experiment::converge:
      cfg.schemes = {"IF1", "IFRK2", "IFRK3", "IFRK4"};
      cfg.points = 256;
      cfg.eps2 = 0.01;
      cfg.taus.clear();
      for (int k = 3; k <= 9; ++k) cfg.taus.push_back(std::ldexp(1.0, -k));
      cfg.benchmark_tau = std::ldexp(1.0, -13);
      cfg.t_end = 2.0;
      cfg.init.kind = InitialCondition::Kind::paper_smooth;
      cfg.record_every = 1u << 30;
      break;
    case Experiment::coarsen:
      cfg.schemes = {"IFRK4"};
      cfg.eps2 = 0.01;
      cfg.taus = {0.08};
      cfg.t_end = 30.0;
      break;
    case Experiment::violation_demo:
      cfg.schemes = {"IFRK3_SHUOSHER"};
      cfg.eps2 = 0.01;
      cfg.taus = {0.005};
      cfg.t_end = 10.0;
      cfg.stage_form = StageForm::butcher;
      break;
    case Experiment::compare:
      cfg.schemes = {"IFRK2", "IFRK4"};
      cfg.eps2 = 1e-4;
      cfg.taus = {0.001, 0.08};
      cfg.t_end = 50.0;
      cfg.record_every = 100;
      break;
    case Experiment::tableau_info:
      break;
  }
  return cfg;
}

GridSpec make_grid(const RunConfig& cfg) { return GridSpec::unit(cfg.dim, cfg.points); }

ReactionTerm make_term(const TermSpec& spec) {
  if (spec.kind == "cubic") return ReactionTerm::cubic();
  if (spec.kind == "flory_huggins" || spec.kind == "fh" || spec.kind == "log")
    return ReactionTerm::flory_huggins(spec.theta, spec.theta_c);
  throw ConfigError("unknown reaction term '" + spec.kind + "'");
}

LinearOperator make_operator(const RunConfig& cfg) {
  return LinearOperator::periodic_laplacian(make_grid(cfg), cfg.eps2);
}

namespace {

Field read_field_file(const std::string& path, const GridSpec& grid) {
  std::vector<double> v;
  const bool csv = fs::path(path).extension() == ".csv" || fs::path(path).extension() == ".txt";
  if (csv) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open initial data file " + path);
    std::string tok;
    while (in >> tok) {
      for (auto& part : split(tok, ','))
        if (!part.empty()) v.push_back(parse_number(part, "initial data value"));
    }
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open initial data file " + path);
    v.resize(grid.size());
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(v.size() * sizeof(double)))
      throw ConfigError("initial data file " + path + " is too short");
  }
  if (v.size() != grid.size())
    throw ConfigError("initial data file has " + std::to_string(v.size()) + " values, grid needs " +
                      std::to_string(grid.size()));
  return Field(grid, std::move(v));
}

}  // namespace

Field initial_field(const RunConfig& cfg, const GridSpec& grid) {
  Field u(grid);
  const std::size_t m = grid.size();
  const std::size_t n = grid.points;
  switch (cfg.init.kind) {
    case InitialCondition::Kind::constant:
      std::fill(u.values.begin(), u.values.end(), cfg.init.value);
      break;
    case InitialCondition::Kind::random_uniform: {
      std::mt19937_64 gen(cfg.seed);
      const double width = cfg.init.hi - cfg.init.lo;
      for (std::size_t i = 0; i < m; ++i) {
        const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        u[i] = cfg.init.lo + width * unit;
      }
      break;
    }
    case InitialCondition::Kind::paper_smooth: {
      // 0.1 (prod_a sin(a_k pi x_a) + prod_a sin(5 pi x_a)), a = (3, 2, 2).
      constexpr double first[3] = {3.0, 2.0, 2.0};
      const double pi = std::numbers::pi;
      for (std::size_t idx = 0; idx < m; ++idx) {
        double p1 = 1.0, p2 = 1.0;
        std::size_t stride = m / n;
        for (int a = 0; a < grid.dim; ++a) {
          const double x = static_cast<double>((idx / stride) % n) * grid.h;
          p1 *= std::sin(first[a] * pi * x);
          p2 *= std::sin(5.0 * pi * x);
          stride /= n;
        }
        u[idx] = 0.1 * (p1 + p2);
      }
      break;
    }
    case InitialCondition::Kind::from_file:
      u = read_field_file(cfg.init.path, grid);
      break;
  }
  return u;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("dim must be 1, 2 or 3");
  if (cfg.points == 0) throw ConfigError("points must be positive");
  if (!(cfg.eps2 >= 0.0)) throw ConfigError("eps2 must be non-negative");
  if (cfg.experiment != Experiment::tableau_info) {
    if (cfg.schemes.empty()) throw ConfigError("no scheme given");
    for (const auto& s : cfg.schemes) builtin(s);
    if (cfg.taus.empty()) throw ConfigError("no time step given");
    for (double t : cfg.taus)
      if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("time steps must be positive");
    auto sorted = cfg.taus;
    std::sort(sorted.begin(), sorted.end());
    if (cfg.experiment != Experiment::compare &&
        std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("time step ladder contains duplicate values");
    if (!(cfg.t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  }
  const ReactionTerm term = make_term(cfg.term);
  if (cfg.init.kind == InitialCondition::Kind::random_uniform) {
    if (!(cfg.init.lo <= cfg.init.hi)) throw ConfigError("random bounds out of order");
    if (!term.in_domain(cfg.init.lo) || !term.in_domain(cfg.init.hi))
      throw ConfigError("random initial data leaves the domain of the reaction term");
  }
  if (cfg.init.kind == InitialCondition::Kind::constant && !term.in_domain(cfg.init.value))
    throw ConfigError("constant initial value outside the domain of the reaction term");
  if (cfg.snapshot_format != "raw" && cfg.snapshot_format != "csv")
    throw ConfigError("snapshot format must be raw or csv");
  if (cfg.experiment == Experiment::converge) {
    const double smallest = *std::min_element(cfg.taus.begin(), cfg.taus.end());
    const double bench = cfg.benchmark_tau.value_or(smallest / 10.0);
    if (!(bench < smallest)) throw ConfigError("benchmark step must be smaller than every ladder step");
  }
}

// ---------------------------------------------------------------------------
// Artifacts

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

std::string tag_for(const std::string& scheme, double tau) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_tau%g", scheme.c_str(), tau);
  return buf;
}

void write_snapshot(const RunConfig& cfg, const fs::path& dir, const std::string& tag, double t,
                    const Field& u) {
  char stem[128];
  std::snprintf(stem, sizeof stem, "%s_t%g", tag.c_str(), t);
  json header = {{"dim", u.grid.dim},  {"points", u.grid.points}, {"h", u.grid.h},
                 {"t", t},             {"dtype", "float64"},      {"byte_order", "little"},
                 {"layout", "row-major, last axis fastest"}};
  if (cfg.snapshot_format == "csv") {
    std::ostringstream os;
    const std::size_t row = u.grid.points;
    for (std::size_t i = 0; i < u.size(); ++i)
      os << format_double(u[i]) << ((i + 1) % row == 0 ? '\n' : ',');
    write_text(dir / (std::string(stem) + ".csv"), os.str());
    header["file"] = std::string(stem) + ".csv";
  } else {
    std::ofstream out(dir / (std::string(stem) + ".bin"), std::ios::binary);
    static_assert(std::endian::native == std::endian::little, "raw snapshots assume a little-endian host");
    out.write(reinterpret_cast<const char*>(u.values.data()),
              static_cast<std::streamsize>(u.size() * sizeof(double)));
    header["file"] = std::string(stem) + ".bin";
  }
  write_json(dir / (std::string(stem) + ".json"), header);
}

std::optional<double> first_energy_anomaly(const TimeSeries& s) {
  for (std::size_t k = 1; k < s.records.size(); ++k) {
    const double prev = s.records[k - 1].energy;
    const double cur = s.records[k].energy;
    if (!std::isfinite(cur) || (cur - prev) > 1e-8 * std::abs(prev)) return s.records[k].t;
  }
  return std::nullopt;
}

json run_summary(const RunResult& r) {
  json j = summary_json(r.run.series, r.run.steps);
  j["scheme"] = r.scheme;
  j["tau"] = r.tau;
  j["rho"] = r.rho;
  j["wall_seconds"] = r.wall_seconds;
  j["first_energy_anomaly_time"] = r.first_energy_anomaly ? json(*r.first_energy_anomaly) : json(nullptr);
  return j;
}

void write_series_plot(const fs::path& dir, const std::vector<std::string>& csv_files, double rho) {
  std::ostringstream gp;
  gp << "# gnuplot script: sup norm and energy against time\n"
     << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\n"
     << "set terminal pngcairo size 1200,480\nset output 'series.png'\nset multiplot layout 1,2\n"
     << "set ylabel 'sup norm'\nplot " << format_double(rho) << " title 'rho' dt 2";
  for (const auto& f : csv_files) gp << ", '" << f << "' using 1:2 with lines title '" << f << "'";
  gp << "\nset ylabel 'energy'\nplot ";
  for (std::size_t i = 0; i < csv_files.size(); ++i)
    gp << (i ? ", " : "") << "'" << csv_files[i] << "' using 1:3 with lines title '" << csv_files[i] << "'";
  gp << "\nunset multiplot\n";
  write_text(dir / "plot_series.gp", gp.str());
}

bool default_enforcement(const RunConfig& cfg) {
  if (cfg.enforce_mbp) return *cfg.enforce_mbp;
  return cfg.experiment == Experiment::coarsen || cfg.experiment == Experiment::compare;
}

RunResult run_single(const RunConfig& cfg, const std::string& scheme, double tau, bool enforce) {
  RunResult r;
  r.scheme = scheme;
  r.tau = tau;
  const GridSpec grid = make_grid(cfg);
  const LinearOperator op = make_operator(cfg);
  const ReactionTerm term = make_term(cfg.term);
  r.rho = term.rho();
  const Field u0 = initial_field(cfg, grid);
  const std::string tag = tag_for(scheme, tau);

  fs::path dir;
  if (!cfg.out_dir.empty()) {
    dir = cfg.out_dir;
    fs::create_directories(dir);
  }

  IntegrateOptions opts;
  opts.record_every = cfg.record_every;
  opts.snapshot_times = cfg.snapshot_times;
  if (!dir.empty() && !cfg.snapshot_times.empty())
    opts.on_snapshot = [&](double t, const Field& u) { write_snapshot(cfg, dir, tag, t, u); };

  const auto start = std::chrono::steady_clock::now();
  try {
    Stepper stepper(op, term, builtin(scheme), tau, StepperOptions{enforce, cfg.stage_form});
    r.run = integrate(stepper, u0, cfg.t_end, opts);
  } catch (const StepRefused& e) {
    std::cerr << "warning: " << e.what() << "\n";
    r.run.final = u0;
    r.run.series.status = RunStatus::refused;
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.first_energy_anomaly = first_energy_anomaly(r.run.series);

  if (!dir.empty()) {
    write_text(dir / (tag + "_series.csv"), to_csv(r.run.series));
    write_json(dir / (tag + "_summary.json"), run_summary(r));
  }
  return r;
}

void write_manifest(const RunConfig& cfg, const std::vector<std::string>& artifacts) {
  if (cfg.out_dir.empty()) return;
  json m;
  m["config"] = to_json(cfg);
  m["artifacts"] = artifacts;
  write_json(fs::path(cfg.out_dir) / "manifest.json", m);
}

std::vector<std::pair<std::string, double>> scheme_tau_pairs(const RunConfig& cfg) {
  std::vector<std::pair<std::string, double>> pairs;
  if (cfg.taus.size() == cfg.schemes.size()) {
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i) pairs.emplace_back(cfg.schemes[i], cfg.taus[i]);
  } else if (cfg.taus.size() == 1) {
    for (const auto& s : cfg.schemes) pairs.emplace_back(s, cfg.taus.front());
  } else {
    throw ConfigError("give one time step, or one per scheme");
  }
  return pairs;
}

}  // namespace

// ---------------------------------------------------------------------------
// Experiments

OrderFit fit_order(const std::string& scheme, std::vector<std::pair<double, double>> tau_error,
                   double noise_floor, std::size_t window) {
  OrderFit fit{scheme, std::numeric_limits<double>::quiet_NaN(), {}, true};
  std::sort(tau_error.begin(), tau_error.end());
  std::vector<std::pair<double, double>> pts;
  for (const auto& [tau, err] : tau_error)
    if (std::isfinite(err) && err > noise_floor && pts.size() < window) pts.emplace_back(tau, err);
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (!(pts[k].second > pts[k - 1].second)) fit.monotone = false;
  for (const auto& p : pts) fit.window.push_back(p.first);
  if (pts.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (const auto& [tau, err] : pts) {
    const double x = std::log2(tau), y = std::log2(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

ConvergenceResult run_convergence_study(const RunConfig& cfg) {
  validate_config(cfg);
  ConvergenceResult result;
  const GridSpec grid = make_grid(cfg);
  const LinearOperator op = make_operator(cfg);
  const ReactionTerm term = make_term(cfg.term);
  const Field u0 = initial_field(cfg, grid);
  const bool enforce = default_enforcement(cfg);
  const double smallest = *std::min_element(cfg.taus.begin(), cfg.taus.end());
  result.benchmark_tau = cfg.benchmark_tau.value_or(smallest / 10.0);

  IntegrateOptions opts;
  opts.record_every = std::max<std::size_t>(cfg.record_every, 1);
  opts.record_energy = false;

  auto solve = [&](const std::string& scheme, double tau) {
    Stepper st(op, term, builtin(scheme), tau, StepperOptions{enforce, cfg.stage_form});
    return integrate(st, u0, cfg.t_end, opts).final;
  };

  const Field bench = solve("IFRK4", result.benchmark_tau);
  result.benchmark_sup_norm = sup_norm(bench);
  // Distance to a companion benchmark at twice the step: its truncation error
  // is negligible, so this measures the rounding accumulated over the run.
  const Field companion = solve("IFRK4", 2.0 * result.benchmark_tau);
  double uncertainty = 0.0;
  for (std::size_t i = 0; i < bench.size(); ++i)
    uncertainty = std::max(uncertainty, std::abs(companion[i] - bench[i]));
  result.benchmark_uncertainty = uncertainty;

  std::vector<std::pair<std::string, double>> cells;
  for (const auto& s : cfg.schemes)
    for (double tau : cfg.taus) cells.emplace_back(s, tau);
  auto error_of = [&](const std::pair<std::string, double>& cell) {
    const Field u = solve(cell.first, cell.second);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = std::abs(u[i] - bench[i]);
      err = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(err, d);
    }
    return err;
  };

  std::vector<double> errors(cells.size());
  if (cfg.jobs > 1) {
    for (std::size_t start = 0; start < cells.size(); start += cfg.jobs) {
      std::vector<std::future<double>> batch;
      const std::size_t stop = std::min(cells.size(), start + cfg.jobs);
      for (std::size_t k = start; k < stop; ++k)
        batch.push_back(std::async(std::launch::async, error_of, cells[k]));
      for (std::size_t k = start; k < stop; ++k) errors[k] = batch[k - start].get();
    }
  } else {
    for (std::size_t k = 0; k < cells.size(); ++k) errors[k] = error_of(cells[k]);
  }
  for (std::size_t k = 0; k < cells.size(); ++k)
    result.rows.push_back({cells[k].first, cells[k].second, errors[k]});

  result.noise_floor = std::max(100.0 * std::numeric_limits<double>::epsilon() * result.benchmark_sup_norm,
                                10.0 * result.benchmark_uncertainty);
  const double floor = result.noise_floor;
  for (const auto& s : cfg.schemes) {
    std::vector<std::pair<double, double>> te;
    for (const auto& row : result.rows)
      if (row.scheme == s) te.emplace_back(row.tau, row.error);
    result.fits.push_back(fit_order(s, te, floor, cfg.fit_window));
  }

  if (!cfg.out_dir.empty()) {
    const fs::path dir = cfg.out_dir;
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "scheme,tau,sup_error\n";
    for (const auto& row : result.rows)
      csv << row.scheme << ',' << format_double(row.tau) << ',' << format_double(row.error) << '\n';
    write_text(dir / "convergence.csv", csv.str());
    json orders = json::array();
    for (const auto& f : result.fits)
      orders.push_back({{"scheme", f.scheme},
                        {"slope", std::isfinite(f.slope) ? json(f.slope) : json(nullptr)},
                        {"window", f.window},
                        {"monotone", f.monotone}});
    write_json(dir / "orders.json", {{"benchmark_tau", result.benchmark_tau},
                                     {"benchmark_sup_norm", result.benchmark_sup_norm},
                                     {"benchmark_uncertainty", result.benchmark_uncertainty},
                                     {"noise_floor", result.noise_floor},
                                     {"fits", orders}});
    std::ostringstream gp;
    gp << "# gnuplot script: sup-norm error against time step\n"
       << "set datafile separator ','\nset logscale xy 2\nset xlabel 'tau'\nset ylabel 'error'\n"
       << "set terminal pngcairo size 800,600\nset output 'convergence.png'\nplot ";
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i)
      gp << (i ? ", " : "") << "'convergence.csv' using (strcol(1) eq '" << cfg.schemes[i]
         << "' ? $2 : NaN):3 with linespoints title '" << cfg.schemes[i] << "'";
    gp << "\n";
    write_text(dir / "plot_convergence.gp", gp.str());
    write_manifest(cfg, {"convergence.csv", "orders.json", "plot_convergence.gp"});
  }
  return result;
}

std::vector<RunResult> run_coarsening(const RunConfig& cfg) {
  validate_config(cfg);
  const bool enforce = default_enforcement(cfg);
  std::vector<RunResult> results;
  std::vector<std::string> artifacts, csvs;
  for (const auto& [scheme, tau] : scheme_tau_pairs(cfg)) {
    results.push_back(run_single(cfg, scheme, tau, enforce));
    const std::string tag = tag_for(scheme, tau);
    csvs.push_back(tag + "_series.csv");
    artifacts.push_back(tag + "_series.csv");
    artifacts.push_back(tag + "_summary.json");
  }
  if (!cfg.out_dir.empty()) {
    write_series_plot(cfg.out_dir, csvs, results.front().rho);
    artifacts.push_back("plot_series.gp");
    write_manifest(cfg, artifacts);
  }
  return results;
}

RunResult run_violation_demo(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.schemes.size() != 1 || cfg.taus.size() != 1)
    throw ConfigError("violation demo takes one scheme and one time step");
  const auto report = validate(builtin(cfg.schemes.front()));
  if (!report.mbp_admissible)
    std::cerr << "warning: " << cfg.schemes.front()
              << " is not MBP admissible; running without enforcement\n";
  RunResult r = run_single(cfg, cfg.schemes.front(), cfg.taus.front(), false);
  if (!cfg.out_dir.empty()) {
    const std::string tag = tag_for(r.scheme, r.tau);
    write_series_plot(cfg.out_dir, {tag + "_series.csv"}, r.rho);
    write_manifest(cfg, {tag + "_series.csv", tag + "_summary.json", "plot_series.gp"});
  }
  return r;
}

CompareResult run_compare(const RunConfig& cfg) {
  if (cfg.schemes.size() != 2 || cfg.taus.size() != 2)
    throw ConfigError("compare needs exactly two schemes and two time steps");
  RunConfig a = cfg, b = cfg;
  a.schemes = {cfg.schemes[0]};
  a.taus = {cfg.taus[0]};
  b.schemes = {cfg.schemes[1]};
  b.taus = {cfg.taus[1]};
  return run_compare(a, b);
}

CompareResult run_compare(const RunConfig& a, const RunConfig& b) {
  validate_config(a);
  validate_config(b);
  if (a.schemes.size() != 1 || b.schemes.size() != 1 || a.taus.size() != 1 || b.taus.size() != 1)
    throw ConfigError("each side of a comparison takes one scheme and one time step");
  if (a.dim != b.dim || a.points != b.points)
    throw ConfigError("compared runs must use the same grid");
  if (a.eps2 != b.eps2 || to_json(a)["term"] != to_json(b)["term"] || a.seed != b.seed ||
      to_string(a.init) != to_string(b.init) || a.t_end != b.t_end)
    throw ConfigError("compared runs must share the problem configuration");

  CompareResult c;
  c.first = run_single(a, a.schemes.front(), a.taus.front(), default_enforcement(a));
  c.second = run_single(b, b.schemes.front(), b.taus.front(), default_enforcement(b));
  c.wall_ratio = c.first.wall_seconds > 0.0 ? c.second.wall_seconds / c.first.wall_seconds : 0.0;
  const auto& u = c.first.run.final;
  const auto& v = c.second.run.final;
  c.final_distance = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = std::abs(u[i] - v[i]);
    c.final_distance = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(c.final_distance, d);
  }

  if (!a.out_dir.empty()) {
    const std::string ta = tag_for(c.first.scheme, c.first.tau);
    const std::string tb = tag_for(c.second.scheme, c.second.tau);
    write_json(fs::path(a.out_dir) / "compare.json",
               {{"first", run_summary(c.first)},
                {"second", run_summary(c.second)},
                {"wall_ratio", c.wall_ratio},
                {"final_distance", c.final_distance}});
    write_series_plot(a.out_dir, {ta + "_series.csv", tb + "_series.csv"}, c.first.rho);
    RunConfig both = a;
    both.schemes = {a.schemes.front(), b.schemes.front()};
    both.taus = {a.taus.front(), b.taus.front()};
    write_manifest(both, {ta + "_series.csv", ta + "_summary.json", tb + "_series.csv",
                          tb + "_summary.json", "compare.json", "plot_series.gp"});
  }
  return c;
}

json tableau_info(const std::string& scheme, const TermSpec& term_spec) {
  const ShuOsherTableau t = builtin(scheme);
  const ReactionTerm term = make_term(term_spec);
  const ValidationReport v = validate(t);
  const MbpConstant k = mbp_constant(t);

  auto table = [&](const StageTable& s) {
    json rows = json::array();
    for (int i = 1; i <= s.stages(); ++i) {
      json row = json::array();
      for (int j = 0; j < i; ++j) row.push_back(s(i, j).str());
      rows.push_back(row);
    }
    return rows;
  };
  json c = json::array();
  for (const auto& ci : t.c) c.push_back(ci.str());

  json j;
  j["scheme"] = t.name;
  j["stages"] = t.stages();
  j["order"] = t.order;
  j["alpha"] = table(t.alpha);
  j["beta"] = table(t.beta);
  j["c"] = c;
  if (t.butcher) j["d"] = table(*t.butcher);
  j["C_plus"] = k.c_plus ? json(k.c_plus->str()) : json(nullptr);
  j["C_minus"] = k.c_minus ? json(k.c_minus->str()) : json(nullptr);
  j["has_negative_beta"] = k.has_negative_beta;
  j["has_negative_exponent_shift"] = t.has_negative_exponent_shift();
  j["validation"] = {{"convex_rows", v.convex_rows},
                     {"nonnegative_alpha", v.nonnegative_alpha},
                     {"nondecreasing_abscissas", v.nondecreasing_abscissas},
                     {"zero_pairing", v.zero_pairing},
                     {"endpoints", v.endpoints},
                     {"abscissas_match_butcher", v.abscissas_match_butcher},
                     {"mbp_admissible", v.mbp_admissible},
                     {"messages", v.messages}};
  j["term"] = {{"kind", term.name()},
               {"rho", term.rho()},
               {"omega_plus", term.omega_plus()},
               {"omega_minus", term.omega_minus()}};
  if (term.kind() == ReactionTerm::Kind::flory_huggins) {
    j["term"]["theta"] = term.theta();
    j["term"]["theta_c"] = term.theta_c();
  }
  const double tau_max = max_timestep(t, term);
  j["tau_max"] = std::isfinite(tau_max) ? json(tau_max) : json(nullptr);
  return j;
}

std::string tableau_info_text(const json& info) {
  std::ostringstream os;
  os << "scheme            " << info["scheme"].get<std::string>() << " (" << info["stages"]
     << " stages, order " << info["order"] << ")\n";
  os << "abscissas         ";
  for (const auto& c : info["c"]) os << c.get<std::string>() << ' ';
  os << "\nalpha / beta\n";
  for (std::size_t i = 0; i < info["alpha"].size(); ++i) {
    os << "  stage " << i + 1 << ":";
    for (std::size_t j = 0; j < info["alpha"][i].size(); ++j)
      os << "  " << info["alpha"][i][j].get<std::string>() << " / " << info["beta"][i][j].get<std::string>();
    os << '\n';
  }
  auto opt = [](const json& v) { return v.is_null() ? std::string("-") : v.get<std::string>(); };
  os << "C_plus            " << opt(info["C_plus"]) << "\n";
  os << "C_minus           " << opt(info["C_minus"]) << "\n";
  os << "negative beta     " << (info["has_negative_beta"].get<bool>() ? "yes" : "no") << "\n";
  os << "negative shift    " << (info["has_negative_exponent_shift"].get<bool>() ? "yes" : "no") << "\n";
  const auto& v = info["validation"];
  os << "MBP admissible    " << (v["mbp_admissible"].get<bool>() ? "yes" : "no") << "\n";
  for (const auto& m : v["messages"]) os << "  - " << m.get<std::string>() << "\n";
  const auto& t = info["term"];
  os << "term              " << t["kind"].get<std::string>() << ": rho = " << format_double(t["rho"].get<double>())
     << ", omega+ = " << format_double(t["omega_plus"].get<double>())
     << ", omega- = " << format_double(t["omega_minus"].get<double>()) << "\n";
  os << "tau_max           "
     << (info["tau_max"].is_null() ? std::string("inf") : format_double(info["tau_max"].get<double>())) << "\n";
  return os.str();
}

}  // namespace ifrk
