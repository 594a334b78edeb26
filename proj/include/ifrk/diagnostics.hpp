#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifrk/grid.hpp"
#include "ifrk/nonlinearity.hpp"

namespace ifrk {

class LinearOperator;

struct SeriesRecord {
  double t = 0.0;
  double sup_norm = 0.0;
  double energy = 0.0;
  bool mbp_ok = true;
};

enum class RunStatus { completed, blow_up, refused };
std::string to_string(RunStatus s);

struct TimeSeries {
  std::vector<SeriesRecord> records;
  RunStatus status = RunStatus::completed;

  /// Appends a record; t must exceed the previous record's time.
  void push(const SeriesRecord& r);
  bool empty() const { return records.empty(); }
  /// Sticky: false as soon as any record failed the bound.
  bool all_mbp_ok() const;
  std::optional<double> first_violation_time() const;
};

/// max_i |u_i|, +inf if any entry is NaN.
double sup_norm(std::span<const double> u);
inline double sup_norm(const Field& u) { return sup_norm(u.span()); }

/// h^d sum_x [ (eps2/2) sum_axes ((u(x + h e_a) - u(x)) / h)^2 + F(u(x)) ]
/// with periodic forward differences. NaN when F is undefined somewhere.
double discrete_energy(const Field& u, double diffusion, const ReactionTerm& term);

/// Energy matching the operator: the forward-difference energy for a periodic
/// Laplacian, h^d [ -u^T L u / 2 + sum F(u) ] for a dense operator.
double operator_energy(const LinearOperator& op, const Field& u, const ReactionTerm& term);

struct MbpReport {
  bool ok = true;
  double sup_norm = 0.0;
  double overshoot = 0.0;   // max(0, sup_norm - rho)
  std::size_t worst_index = 0;
};

/// ok iff sup_norm(u) <= rho + tol; tol < 0 selects the default 1e-12 rho.
MbpReport mbp_check(std::span<const double> u, double rho, double tol = -1.0);
inline MbpReport mbp_check(const Field& u, double rho, double tol = -1.0) {
  return mbp_check(u.span(), rho, tol);
}

/// CSV with header `t,sup_norm,energy,mbp_ok`, numbers in %.17g.
void write_csv(std::ostream& os, const TimeSeries& series);
std::string to_csv(const TimeSeries& series);

/// status, first violation time, energy range, record count.
nlohmann::json summary_json(const TimeSeries& series, std::size_t total_steps);

/// Largest relative increase E_{k+1} - E_k over |E_k| between consecutive records.
double max_relative_energy_increase(const TimeSeries& series);

/// %.17g formatting used by every text artifact.
std::string format_double(double v);

}  // namespace ifrk
