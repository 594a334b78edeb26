#include "ifrk/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ifrk/errors.hpp"

namespace ifrk {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Stepper::Stepper(LinearOperator op, ReactionTerm term, ShuOsherTableau tableau, double tau,
                 StepperOptions options)
    : op_(std::move(op)),
      term_(std::move(term)),
      tableau_(std::move(tableau)),
      options_(options),
      tau_(tau),
      max_tau_(ifrk::max_timestep(tableau_, term_)) {
  const auto report = validate(tableau_);
  if (!report.convex_rows || !report.zero_pairing || !report.endpoints)
    throw ConfigError("tableau " + tableau_.name + " is malformed");
  if (options_.form == StageForm::butcher && !tableau_.butcher)
    throw ConfigError("tableau " + tableau_.name + " has no Butcher coefficients");
  if (options_.enforce_mbp_bound && !report.mbp_admissible)
    throw StepRefused("scheme " + tableau_.name + " is not MBP admissible");
  if (op_.is_spectral()) transform_ = make_spectral_transform(op_.grid());

  const int s = tableau_.stages();
  const std::size_t m = op_.size();
  stage_u_.assign(static_cast<std::size_t>(s) + 1, std::vector<double>(m));
  stage_f_.assign(static_cast<std::size_t>(s), std::vector<double>(m));
  acc_.resize(m);
  needs_f_.assign(static_cast<std::size_t>(s), false);
  for (int i = 1; i <= s; ++i)
    for (int j = 0; j < i; ++j) {
      const Rational& w = options_.form == StageForm::butcher ? (*tableau_.butcher)(i, j) : tableau_.beta(i, j);
      if (!w.is_zero()) needs_f_[static_cast<std::size_t>(j)] = true;
    }
  set_tau(tau);
}

void Stepper::set_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("time step must be positive");
  if (options_.enforce_mbp_bound && tau > max_tau_ * (1.0 + 1e-12))
    throw StepRefused("tau = " + format_double(tau) + " exceeds the MBP bound " +
                      format_double(max_tau_) + " of " + tableau_.name);
  tau_ = tau;
  rebuild();
}

void Stepper::rebuild() {
  cache_.clear();
  plan_.clear();
  const int s = tableau_.stages();
  const bool butcher = options_.form == StageForm::butcher;
  for (int i = 1; i <= s; ++i) {
    std::vector<Group> groups;
    auto add = [&](int j, const Rational& a, const Rational& b) {
      if (a.is_zero() && b.is_zero()) return;
      const Rational shift = tableau_.c[i] - tableau_.c[j];
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const Group& g) { return g.shift == shift; });
      if (it == groups.end()) {
        groups.push_back({shift, {}});
        it = std::prev(groups.end());
      }
      it->terms.push_back({j, a.to_double(), tau_ * b.to_double()});
      if (!shift.is_zero() && !cache_.contains(shift))
        cache_.emplace(shift, DiagonalAction::exponential(op_, shift.to_double() * tau_, transform_));
    };
    for (int j = 0; j < i; ++j) {
      if (butcher)
        add(j, j == 0 ? Rational(1) : Rational(0), (*tableau_.butcher)(i, j));
      else
        add(j, tableau_.alpha(i, j), tableau_.beta(i, j));
    }
    plan_.push_back(std::move(groups));
  }
}

std::vector<Rational> Stepper::cached_shifts() const {
  std::vector<Rational> out;
  for (const auto& [shift, action] : cache_) out.push_back(shift);
  return out;
}

bool Stepper::advance(Field& u) {
  require_same_grid(op_.grid(), u);
  if (options_.enforce_mbp_bound && sup_norm(u) > term_.rho() * (1.0 + 1e-12))
    throw StepRefused("input exceeds the bound rho = " + format_double(term_.rho()));

  const std::size_t m = u.size();
  const int s = tableau_.stages();
  std::copy(u.values.begin(), u.values.end(), stage_u_[0].begin());

  for (int i = 1; i <= s; ++i) {
    const auto src = static_cast<std::size_t>(i - 1);
    if (needs_f_[src]) term_.apply(stage_u_[src], stage_f_[src]);

    auto& out = stage_u_[static_cast<std::size_t>(i)];
    bool first = true;
    for (const Group& g : plan_[static_cast<std::size_t>(i - 1)]) {
      std::fill(acc_.begin(), acc_.end(), 0.0);
      for (const Term& t : g.terms) {
        const auto& uj = stage_u_[static_cast<std::size_t>(t.source)];
        if (t.alpha != 0.0)
          for (std::size_t k = 0; k < m; ++k) acc_[k] += t.alpha * uj[k];
        if (t.tau_beta != 0.0) {
          const auto& fj = stage_f_[static_cast<std::size_t>(t.source)];
          for (std::size_t k = 0; k < m; ++k) acc_[k] += t.tau_beta * fj[k];
        }
      }
      if (!g.shift.is_zero()) cache_.at(g.shift).apply(acc_, acc_);
      if (first) {
        std::copy(acc_.begin(), acc_.end(), out.begin());
        first = false;
      } else {
        for (std::size_t k = 0; k < m; ++k) out[k] += acc_[k];
      }
    }
    if (!all_finite(out)) {
      u.values = out;
      u.blown_up = true;
      return false;
    }
  }
  std::copy(stage_u_[static_cast<std::size_t>(s)].begin(), stage_u_[static_cast<std::size_t>(s)].end(),
            u.values.begin());
  return true;
}

Field Stepper::step(const Field& u) {
  Field v = u;
  advance(v);
  return v;
}

IntegrationResult integrate(Stepper& stepper, const Field& u0, double t_end,
                            const IntegrateOptions& options) {
  require_same_grid(stepper.op().grid(), u0);
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  IntegrationResult result;
  result.final = u0;
  if (t_end == 0.0) return result;

  const double tau = stepper.tau();
  const double rho = stepper.term().rho();
  const std::size_t every = std::max<std::size_t>(options.record_every, 1);
  auto full_steps = static_cast<std::size_t>(std::floor(t_end / tau * (1.0 + 1e-12)));
  double remainder = t_end - static_cast<double>(full_steps) * tau;
  if (remainder < 0.0 || remainder <= 1e-9 * tau) remainder = 0.0;

  auto record = [&](double t, const Field& u) {
    SeriesRecord r;
    r.t = t;
    r.sup_norm = sup_norm(u);
    r.energy = options.record_energy ? operator_energy(stepper.op(), u, stepper.term())
                                     : std::numeric_limits<double>::quiet_NaN();
    r.mbp_ok = mbp_check(u, rho).ok;
    result.series.push(r);
  };

  std::vector<double> snaps = options.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto maybe_snapshot = [&](double t, const Field& u) {
    while (next_snap < snaps.size() && snaps[next_snap] <= t + 1e-9 * tau) {
      if (options.on_snapshot) options.on_snapshot(t, u);
      ++next_snap;
    }
  };

  Field& u = result.final;
  record(0.0, u);
  maybe_snapshot(0.0, u);

  auto take_step = [&](Stepper& st, double t_after) {
    bool ok;
    try {
      ok = st.advance(u);
    } catch (const StepRefused&) {
      result.series.status = RunStatus::refused;
      return false;
    }
    ++result.steps;
    result.t = t_after;
    if (!ok) {
      record(t_after, u);
      result.series.status = RunStatus::blow_up;
      return false;
    }
    return true;
  };

  for (std::size_t n = 1; n <= full_steps; ++n) {
    const double t = static_cast<double>(n) * tau;
    if (!take_step(stepper, t)) return result;
    const bool last = n == full_steps && remainder == 0.0;
    if (n % every == 0 || last) record(last ? t_end : t, u);
    maybe_snapshot(t, u);
  }
  if (remainder > 0.0) {
    Stepper tail(stepper.op(), stepper.term(), stepper.tableau(), remainder, stepper.options());
    if (!take_step(tail, t_end)) return result;
    record(t_end, u);
    maybe_snapshot(t_end, u);
  }
  result.t = t_end;
  return result;
}

}  // namespace ifrk
