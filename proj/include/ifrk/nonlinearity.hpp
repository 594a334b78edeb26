#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>

namespace ifrk {

/// Pointwise reaction term f of du/dt = Lu + f(u), with f = -F'.
///
/// Carries the bound rho (the positive root of f for the built-in terms)
/// and the stability radii omega+ / omega-: the largest w for which
/// xi + w f(xi), respectively xi - w f(xi), maps [-rho, rho] into itself.
/// Evaluating outside the domain of f yields a quiet NaN; callers detect
/// the violation with in_domain() or by checking the result.
class ReactionTerm {
 public:
  enum class Kind { cubic, flory_huggins, custom };

  struct CustomSpec {
    std::string name = "custom";
    std::function<double(double)> f;
    std::function<double(double)> fprime;
    std::function<double(double)> potential;
    double rho = 1.0;
  };

  /// f(u) = u - u^3.
  static ReactionTerm cubic();
  /// f(u) = (theta/2) ln((1-u)/(1+u)) + theta_c u, requires 0 < theta < theta_c.
  static ReactionTerm flory_huggins(double theta, double theta_c);
  /// Validates the sign and box conditions numerically before accepting.
  static ReactionTerm custom(CustomSpec spec);
  /// f = 0 with the given bound; both radii are infinite.
  static ReactionTerm zero(double rho = 1.0);

  Kind kind() const { return impl_->kind; }
  const std::string& name() const { return impl_->name; }
  double rho() const { return impl_->rho; }
  double omega_plus() const { return impl_->omega_plus; }
  double omega_minus() const { return impl_->omega_minus; }
  double theta() const { return impl_->theta; }
  double theta_c() const { return impl_->theta_c; }

  bool in_domain(double xi) const;
  double f(double xi) const;
  double fprime(double xi) const;
  double potential(double xi) const;

  /// out[i] = f(u[i]); returns the number of entries outside the domain.
  std::size_t apply(std::span<const double> u, std::span<double> out) const;

 private:
  struct Impl {
    Kind kind = Kind::custom;
    std::string name;
    double rho = 1.0;
    double omega_plus = 0.0;
    double omega_minus = 0.0;
    double theta = 0.0;
    double theta_c = 0.0;
    CustomSpec custom;
  };
  explicit ReactionTerm(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Positive root gamma of the Flory-Huggins force, by bisection on
/// (0, 1 - 1e-15) to 1e-14 absolute. Throws ConfigError when theta >= theta_c.
double flory_huggins_root(double theta, double theta_c);

/// rho for a built-in term: 1 for the cubic, gamma for Flory-Huggins.
double find_rho(const ReactionTerm& term);

struct StabilityRadii {
  double omega_plus;
  double omega_minus;
};

/// Closed forms for the built-ins, numeric extrema of f' otherwise.
StabilityRadii stability_radii(const ReactionTerm& term);

/// omega+ = -1/min f', omega- = 1/max f' over [-rho, rho] from 4096 samples
/// refined by golden-section search. A radius with no constraint is +inf.
StabilityRadii numeric_stability_radii(const std::function<double(double)>& fprime, double rho);

inline double eval_f(const ReactionTerm& t, double xi) { return t.f(xi); }
inline double eval_fprime(const ReactionTerm& t, double xi) { return t.fprime(xi); }
inline double eval_potential(const ReactionTerm& t, double xi) { return t.potential(xi); }

}  // namespace ifrk
