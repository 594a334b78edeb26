#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ifrk/nonlinearity.hpp"
#include "ifrk/rational.hpp"

namespace ifrk {

/// Strictly lower-triangular coefficient table indexed (i, j), 1 <= i <= s, 0 <= j < i.
class StageTable {
 public:
  StageTable() = default;
  explicit StageTable(int stages) : stages_(stages), data_(static_cast<std::size_t>(stages * (stages + 1) / 2)) {}
  /// Rows given as {{a10}, {a20, a21}, ...}.
  StageTable(std::initializer_list<std::initializer_list<Rational>> rows);

  int stages() const { return stages_; }
  Rational& operator()(int i, int j) { return data_[index(i, j)]; }
  const Rational& operator()(int i, int j) const { return data_[index(i, j)]; }
  bool operator==(const StageTable&) const = default;

 private:
  std::size_t index(int i, int j) const;
  int stages_ = 0;
  std::vector<Rational> data_;
};

/// s-stage integrating factor Runge-Kutta scheme in Shu-Osher form:
///   u(i) = sum_{j<i} e^{(c_i - c_j) tau L} [alpha_ij u(j) + tau beta_ij f(u(j))].
struct ShuOsherTableau {
  std::string name;
  int order = 1;
  StageTable alpha;
  StageTable beta;
  std::vector<Rational> c;          // c_0 .. c_s
  std::optional<StageTable> butcher;  // d_ij of the underlying RK method

  int stages() const { return alpha.stages(); }
  bool has_negative_beta() const;
  /// Some active pair (alpha or beta nonzero) has c_i < c_j.
  bool has_negative_exponent_shift() const;
};

enum class BuiltinScheme { IF1, IFRK2, IFRK3, IFRK4, IFRK3_SHUOSHER };

ShuOsherTableau builtin(BuiltinScheme scheme);
/// Accepts IF1, IFRK2, IFRK3, IFRK4, IFRK3_SHUOSHER (case-insensitive; IFRK3n
/// is an alias of the last). Throws ConfigError otherwise.
ShuOsherTableau builtin(std::string_view name);
std::vector<std::string> builtin_names();

/// beta_ij = d_ij - sum_{k=j+1}^{i-1} alpha_ik d_kj. Throws ConfigError when a
/// row of alpha is not convex or when alpha_ij = 0 but beta_ij != 0.
ShuOsherTableau from_butcher(const StageTable& d, const std::vector<Rational>& c,
                             const StageTable& alpha, std::string name = "custom", int order = 0);

struct MbpConstant {
  std::optional<Rational> c_plus;   // min alpha/beta over beta > 0
  std::optional<Rational> c_minus;  // min alpha/|beta| over beta != 0, set iff a beta < 0
  bool has_negative_beta = false;
};

/// Pairs with beta_ij = 0 impose nothing. Throws ConfigError on a zero-pairing violation.
MbpConstant mbp_constant(const ShuOsherTableau& t);

/// Largest step for which one step maps the rho-ball into itself.
double max_timestep(const ShuOsherTableau& t, const ReactionTerm& term);

struct ValidationReport {
  bool convex_rows = true;
  bool nonnegative_alpha = true;
  bool nondecreasing_abscissas = true;
  bool zero_pairing = true;
  bool endpoints = true;            // c_0 = 0 and c_s = 1
  bool abscissas_match_butcher = true;
  bool mbp_admissible = true;
  std::vector<std::string> messages;
};

ValidationReport validate(const ShuOsherTableau& t);

}  // namespace ifrk
