#include "ifrk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "ifrk/errors.hpp"
#include "ifrk/operators.hpp"

namespace ifrk {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::blow_up:
      return "blow_up";
    case RunStatus::refused:
      return "refused";
  }
  return "unknown";
}

void TimeSeries::push(const SeriesRecord& r) {
  if (!records.empty() && !(r.t > records.back().t))
    throw Error("time series records must have strictly increasing t");
  records.push_back(r);
}

bool TimeSeries::all_mbp_ok() const {
  return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.mbp_ok; });
}

std::optional<double> TimeSeries::first_violation_time() const {
  for (const auto& r : records)
    if (!r.mbp_ok) return r.t;
  return std::nullopt;
}

double sup_norm(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) {
    if (std::isnan(v)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(v));
  }
  return m;
}

double discrete_energy(const Field& u, double diffusion, const ReactionTerm& term) {
  const GridSpec& g = u.grid;
  const std::size_t n = g.points;
  const std::size_t m = u.size();
  const double inv_h2 = 1.0 / (g.h * g.h);
  double grad = 0.0;
  double bulk = 0.0;
  for (std::size_t idx = 0; idx < m; ++idx) {
    const double v = u[idx];
    std::size_t stride = 1;
    for (int a = 0; a < g.dim; ++a) {
      const std::size_t k = (idx / stride) % n;
      const std::size_t next = k + 1 == n ? idx - k * stride : idx + stride;
      const double diff = u[next] - v;
      grad += diff * diff;
      stride *= n;
    }
    bulk += term.potential(v);
  }
  return g.cell_volume() * (0.5 * diffusion * grad * inv_h2 + bulk);
}

double operator_energy(const LinearOperator& op, const Field& u, const ReactionTerm& term) {
  if (op.is_spectral()) return discrete_energy(u, op.diffusion(), term);
  Eigen::Map<const Eigen::VectorXd> x(u.values.data(), static_cast<Eigen::Index>(u.size()));
  double bulk = 0.0;
  for (double v : u.values) bulk += term.potential(v);
  return u.grid.cell_volume() * (-0.5 * x.dot(op.matrix() * x) + bulk);
}

MbpReport mbp_check(std::span<const double> u, double rho, double tol) {
  if (tol < 0.0) tol = 1e-12 * rho;
  MbpReport r;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::isnan(u[i]) ? std::numeric_limits<double>::infinity() : std::abs(u[i]);
    if (a > r.sup_norm || i == 0) {
      r.sup_norm = a;
      r.worst_index = i;
    }
  }
  r.overshoot = std::max(0.0, r.sup_norm - rho);
  r.ok = r.sup_norm <= rho + tol;
  return r;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const TimeSeries& series) {
  os << "t,sup_norm,energy,mbp_ok\n";
  for (const auto& r : series.records)
    os << format_double(r.t) << ',' << format_double(r.sup_norm) << ',' << format_double(r.energy)
       << ',' << (r.mbp_ok ? 1 : 0) << '\n';
}

std::string to_csv(const TimeSeries& series) {
  std::ostringstream os;
  write_csv(os, series);
  return os.str();
}

namespace {

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json summary_json(const TimeSeries& series, std::size_t total_steps) {
  nlohmann::json j;
  j["status"] = to_string(series.status);
  j["records"] = series.records.size();
  j["total_steps"] = total_steps;
  j["mbp_ok"] = series.all_mbp_ok();
  const auto first = series.first_violation_time();
  j["first_violation_time"] = first ? nlohmann::json(*first) : nlohmann::json(nullptr);
  double emin = std::numeric_limits<double>::infinity();
  double emax = -emin;
  double smax = 0.0;
  for (const auto& r : series.records) {
    if (std::isfinite(r.energy)) {
      emin = std::min(emin, r.energy);
      emax = std::max(emax, r.energy);
    }
    smax = std::max(smax, r.sup_norm);
  }
  j["min_energy"] = number_or_null(emin);
  j["max_energy"] = number_or_null(emax);
  j["max_sup_norm"] = number_or_null(smax);
  if (!series.records.empty()) j["final_time"] = series.records.back().t;
  return j;
}

double max_relative_energy_increase(const TimeSeries& series) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < series.records.size(); ++k) {
    const double prev = series.records[k - 1].energy;
    const double cur = series.records[k].energy;
    if (!std::isfinite(prev) || !std::isfinite(cur)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, (cur - prev) / std::max(std::abs(prev), 1e-300));
  }
  return worst;
}

}  // namespace ifrk
