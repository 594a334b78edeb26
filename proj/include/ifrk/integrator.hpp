#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "ifrk/diagnostics.hpp"
#include "ifrk/grid.hpp"
#include "ifrk/nonlinearity.hpp"
#include "ifrk/operators.hpp"
#include "ifrk/schemes.hpp"

namespace ifrk {

/// Algebraically equivalent ways of evaluating the stages.
///   shu_osher: u(i) = sum_j e^{(c_i - c_j) tau L} [alpha_ij u(j) + tau beta_ij f(u(j))]
///   butcher:   u(i) = e^{c_i tau L} u^n + tau sum_j d_ij e^{(c_i - c_j) tau L} f(u(j))
/// They differ only in rounding, which matters once a negative shift
/// amplifies high modes.
enum class StageForm { shu_osher, butcher };

struct StepperOptions {
  /// Refuse steps the MBP theory does not cover: a non-admissible tableau,
  /// tau above max_timestep, or an input with ||u||_inf > rho.
  bool enforce_mbp_bound = false;
  StageForm form = StageForm::shu_osher;
};

/// Advances du/dt = Lu + f(u) by one IFRK step in Shu-Osher form.
///
/// Terms of a stage that share the shift (c_i - c_j) tau are summed before a
/// single exponential is applied; one DiagonalAction is cached per distinct
/// nonzero shift. A Stepper owns mutable scratch and must not be shared
/// between threads; distinct Steppers over the same operator may run in parallel.
class Stepper {
 public:
  Stepper(LinearOperator op, ReactionTerm term, ShuOsherTableau tableau, double tau,
          StepperOptions options = {});

  /// u^{n+1} from u^n. On a non-finite stage value the partial result is
  /// returned with blown_up set.
  Field step(const Field& u);

  /// In-place variant of step(); returns false on blow-up.
  bool advance(Field& u);

  double tau() const { return tau_; }
  /// Changes the step size and rebuilds the exponential cache.
  void set_tau(double tau);

  /// Distinct nonzero shifts (c_i - c_j), in units of tau, with a cached exponential.
  std::vector<Rational> cached_shifts() const;

  const LinearOperator& op() const { return op_; }
  const ReactionTerm& term() const { return term_; }
  const ShuOsherTableau& tableau() const { return tableau_; }
  const StepperOptions& options() const { return options_; }
  double max_timestep() const { return max_tau_; }

 private:
  struct Term {
    int source;
    double alpha;
    double tau_beta;
  };
  struct Group {
    Rational shift;
    std::vector<Term> terms;
  };

  void rebuild();

  LinearOperator op_;
  ReactionTerm term_;
  ShuOsherTableau tableau_;
  StepperOptions options_;
  double tau_;
  double max_tau_;
  std::shared_ptr<SpectralTransform> transform_;
  std::map<Rational, DiagonalAction> cache_;
  std::vector<std::vector<Group>> plan_;  // plan_[i-1] builds stage i
  std::vector<bool> needs_f_;
  std::vector<std::vector<double>> stage_u_;
  std::vector<std::vector<double>> stage_f_;
  std::vector<double> acc_;
};

struct IntegrateOptions {
  /// Record (t, sup norm, energy) every this many steps, plus t = 0 and t_end.
  std::size_t record_every = 1;
  bool record_energy = true;
  /// Called once for each requested time, at the first step reaching it.
  std::vector<double> snapshot_times;
  std::function<void(double, const Field&)> on_snapshot;
};

struct IntegrationResult {
  Field final;
  TimeSeries series;
  std::size_t steps = 0;
  double t = 0.0;
};

/// Steps from t = 0 to t_end. The last step is shortened to land on t_end.
/// Stops early with status blow_up on a non-finite value, or refused when an
/// enforcing stepper rejects its input.
IntegrationResult integrate(Stepper& stepper, const Field& u0, double t_end,
                            const IntegrateOptions& options = {});

}  // namespace ifrk
