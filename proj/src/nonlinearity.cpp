#include "ifrk/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ifrk/errors.hpp"

namespace ifrk {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

double fh_force(double theta, double theta_c, double xi) {
  return 0.5 * theta * std::log((1.0 - xi) / (1.0 + xi)) + theta_c * xi;
}

// Golden-section minimisation of g on [a, b].
double golden_min(const std::function<double(double)>& g, double a, double b) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - ratio * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + ratio * (b - a);
      gd = g(d);
    }
  }
  return std::min({g(a), g(b), gc, gd});
}

double sampled_min(const std::function<double(double)>& g, double rho) {
  constexpr int kSamples = 4096;
  std::vector<double> xs(kSamples);
  int best = 0;
  double best_val = kInf;
  for (int i = 0; i < kSamples; ++i) {
    xs[i] = -rho + 2.0 * rho * i / (kSamples - 1);
    const double v = g(xs[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = xs[std::max(best - 1, 0)];
  const double hi = xs[std::min(best + 1, kSamples - 1)];
  return std::min(best_val, golden_min(g, lo, hi));
}

}  // namespace

double flory_huggins_root(double theta, double theta_c) {
  if (!(theta > 0.0) || !std::isfinite(theta) || !std::isfinite(theta_c))
    throw ConfigError("Flory-Huggins theta must be positive and finite");
  if (!(theta < theta_c))
    throw ConfigError("Flory-Huggins term needs theta < theta_c for a positive root");
  // f > 0 just right of zero, f -> -inf as xi -> 1.
  double lo = 0.0;
  double hi = 1.0 - 1e-15;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (fh_force(theta, theta_c, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ReactionTerm ReactionTerm::cubic() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::cubic;
  impl->name = "cubic";
  impl->rho = 1.0;
  impl->omega_plus = 0.5;
  impl->omega_minus = 1.0;
  return ReactionTerm(std::move(impl));
}

ReactionTerm ReactionTerm::flory_huggins(double theta, double theta_c) {
  const double gamma = flory_huggins_root(theta, theta_c);
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::flory_huggins;
  impl->name = "flory_huggins";
  impl->theta = theta;
  impl->theta_c = theta_c;
  impl->rho = gamma;
  const double q = 1.0 - gamma * gamma;
  impl->omega_plus = q / (theta - theta_c * q);
  impl->omega_minus = 1.0 / (theta_c - theta);
  return ReactionTerm(std::move(impl));
}

ReactionTerm ReactionTerm::zero(double rho) {
  if (!(rho > 0.0)) throw ConfigError("bound rho must be positive");
  CustomSpec spec;
  spec.name = "zero";
  spec.f = [](double) { return 0.0; };
  spec.fprime = [](double) { return 0.0; };
  spec.potential = [](double) { return 0.0; };
  spec.rho = rho;
  return custom(std::move(spec));
}

ReactionTerm ReactionTerm::custom(CustomSpec spec) {
  if (!spec.f || !spec.fprime || !spec.potential)
    throw ConfigError("custom reaction term needs f, f' and F");
  if (!(spec.rho > 0.0) || !std::isfinite(spec.rho)) throw ConfigError("bound rho must be positive");
  const double rho = spec.rho;
  if (!(spec.f(rho) <= 0.0 && spec.f(-rho) >= 0.0))
    throw ConfigError("custom term violates f(rho) <= 0 <= f(-rho)");

  const auto radii = numeric_stability_radii(spec.fprime, rho);
  const double tol = 1e-12 * std::max(1.0, rho);
  auto check_box = [&](double omega, double sign) {
    constexpr int kSamples = 10000;
    for (int i = 0; i < kSamples; ++i) {
      const double xi = -rho + 2.0 * rho * i / (kSamples - 1);
      if (std::abs(xi + sign * omega * spec.f(xi)) > rho + tol) return false;
    }
    return true;
  };
  for (double frac : {0.1, 0.5, 1.0}) {
    if (std::isfinite(radii.omega_plus) && !check_box(frac * radii.omega_plus, +1.0))
      throw ConfigError("custom term fails |xi + w f(xi)| <= rho for w <= omega+");
    if (std::isfinite(radii.omega_minus) && !check_box(frac * radii.omega_minus, -1.0))
      throw ConfigError("custom term fails |xi - w f(xi)| <= rho for w <= omega-");
  }

  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::custom;
  impl->name = spec.name;
  impl->rho = rho;
  impl->omega_plus = radii.omega_plus;
  impl->omega_minus = radii.omega_minus;
  impl->custom = std::move(spec);
  return ReactionTerm(std::move(impl));
}

bool ReactionTerm::in_domain(double xi) const {
  if (impl_->kind == Kind::flory_huggins) return xi > -1.0 && xi < 1.0;
  return !std::isnan(xi);
}

double ReactionTerm::f(double xi) const {
  switch (impl_->kind) {
    case Kind::cubic:
      return xi - xi * xi * xi;
    case Kind::flory_huggins:
      return in_domain(xi) ? fh_force(impl_->theta, impl_->theta_c, xi) : kNaN;
    case Kind::custom:
      break;
  }
  return impl_->custom.f(xi);
}

double ReactionTerm::fprime(double xi) const {
  switch (impl_->kind) {
    case Kind::cubic:
      return 1.0 - 3.0 * xi * xi;
    case Kind::flory_huggins:
      return in_domain(xi) ? impl_->theta_c - impl_->theta / (1.0 - xi * xi) : kNaN;
    case Kind::custom:
      break;
  }
  return impl_->custom.fprime(xi);
}

double ReactionTerm::potential(double xi) const {
  switch (impl_->kind) {
    case Kind::cubic: {
      const double q = xi * xi - 1.0;
      return 0.25 * q * q;
    }
    case Kind::flory_huggins:
      if (!(xi >= -1.0 && xi <= 1.0)) return kNaN;
      return 0.5 * impl_->theta * (xlogx(1.0 + xi) + xlogx(1.0 - xi)) -
             0.5 * impl_->theta_c * xi * xi;
    case Kind::custom:
      break;
  }
  return impl_->custom.potential(xi);
}

std::size_t ReactionTerm::apply(std::span<const double> u, std::span<double> out) const {
  std::size_t violations = 0;
  switch (impl_->kind) {
    case Kind::cubic:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - u[i] * u[i] * u[i];
      break;
    case Kind::flory_huggins: {
      const double half_theta = 0.5 * impl_->theta;
      const double theta_c = impl_->theta_c;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double xi = u[i];
        if (xi > -1.0 && xi < 1.0) {
          out[i] = half_theta * std::log((1.0 - xi) / (1.0 + xi)) + theta_c * xi;
        } else {
          out[i] = kNaN;
          ++violations;
        }
      }
      break;
    }
    case Kind::custom:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = impl_->custom.f(u[i]);
      break;
  }
  return violations;
}

double find_rho(const ReactionTerm& term) {
  switch (term.kind()) {
    case ReactionTerm::Kind::cubic:
      return 1.0;
    case ReactionTerm::Kind::flory_huggins:
      return flory_huggins_root(term.theta(), term.theta_c());
    case ReactionTerm::Kind::custom:
      break;
  }
  return term.rho();
}

StabilityRadii stability_radii(const ReactionTerm& term) {
  return {term.omega_plus(), term.omega_minus()};
}

StabilityRadii numeric_stability_radii(const std::function<double(double)>& fprime, double rho) {
  const double min_fp = sampled_min(fprime, rho);
  const double max_fp = -sampled_min([&](double x) { return -fprime(x); }, rho);
  return {min_fp < 0.0 ? -1.0 / min_fp : kInf, max_fp > 0.0 ? 1.0 / max_fp : kInf};
}

}  // namespace ifrk
