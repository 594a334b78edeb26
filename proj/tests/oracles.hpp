#pragma once

// Independent reference computations used only by the tests.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "ifrk/schemes.hpp"

namespace oracle {

/// 1-D periodic stencil (1, -2, 1)/h^2, built entry by entry.
inline Eigen::MatrixXd periodic_stencil_1d(int n, double h) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) += -2.0 / (h * h);
    a(i, (i + 1) % n) += 1.0 / (h * h);
    a(i, (i + n - 1) % n) += 1.0 / (h * h);
  }
  return a;
}

/// Kronecker-sum Laplacian eps2 * (sum over axes of I x .. x L x .. x I).
inline Eigen::MatrixXd kronecker_laplacian(int dim, int n, double h, double eps2) {
  const Eigen::MatrixXd l = periodic_stencil_1d(n, h);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  if (dim == 1) return eps2 * l;
  if (dim == 2) {
    Eigen::MatrixXd a = Eigen::kroneckerProduct(id, l);
    a += Eigen::kroneckerProduct(l, id);
    return eps2 * a;
  }
  Eigen::MatrixXd ii = Eigen::kroneckerProduct(id, id);
  Eigen::MatrixXd a = Eigen::kroneckerProduct(ii, l);
  a += Eigen::kroneckerProduct(Eigen::MatrixXd(Eigen::kroneckerProduct(id, l)), id);
  a += Eigen::kroneckerProduct(l, ii);
  return eps2 * a;
}

/// e^{A} by Pade scaling and squaring.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a) { return a.exp(); }

inline std::vector<double> matvec(const Eigen::MatrixXd& a, const std::vector<double>& x) {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd y = a * v;
  return {y.data(), y.data() + y.size()};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline std::vector<double> random_vector(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

/// One textbook classic RK4 step for the scalar ODE u' = f(u).
inline double classic_rk4(const std::function<double(double)>& f, double u, double tau) {
  const double k1 = f(u);
  const double k2 = f(u + 0.5 * tau * k1);
  const double k3 = f(u + 0.5 * tau * k2);
  const double k4 = f(u + tau * k3);
  return u + tau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// One IFRK step in Butcher form with dense matrix exponentials:
///   u(i) = e^{c_i tau L} u^n + tau sum_j d_ij e^{(c_i - c_j) tau L} f(u(j)).
inline std::vector<double> butcher_step(const ifrk::ShuOsherTableau& t, const Eigen::MatrixXd& l,
                                        const std::function<double(double)>& f,
                                        const std::vector<double>& un, double tau) {
  const int s = t.stages();
  const auto& d = *t.butcher;
  auto e = [&](const ifrk::Rational& shift) { return expm(shift.to_double() * tau * l); };
  std::vector<std::vector<double>> stages{un};
  std::vector<std::vector<double>> forces;
  for (int i = 1; i <= s; ++i) {
    std::vector<double> fj(stages.back().size());
    for (std::size_t k = 0; k < fj.size(); ++k) fj[k] = f(stages.back()[k]);
    forces.push_back(fj);
    std::vector<double> ui = matvec(e(t.c[i]), un);
    for (int j = 0; j < i; ++j) {
      if (d(i, j).is_zero()) continue;
      const auto term = matvec(e(t.c[i] - t.c[j]), forces[static_cast<std::size_t>(j)]);
      for (std::size_t k = 0; k < ui.size(); ++k) ui[k] += tau * d(i, j).to_double() * term[k];
    }
    stages.push_back(ui);
  }
  return stages.back();
}

/// Positive root of the Flory-Huggins force by plain bisection on (0, 1).
inline double fh_root(double theta, double theta_c) {
  auto f = [&](double x) { return 0.5 * theta * std::log((1 - x) / (1 + x)) + theta_c * x; };
  double lo = 1e-12, hi = 1.0 - 1e-16;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
