#include "ifrk/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "ifrk/errors.hpp"

namespace ifrk {

StageTable::StageTable(std::initializer_list<std::initializer_list<Rational>> rows)
    : StageTable(static_cast<int>(rows.size())) {
  int i = 1;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != i) throw ConfigError("stage table row has wrong length");
    int j = 0;
    for (const auto& v : row) (*this)(i, j++) = v;
    ++i;
  }
}

std::size_t StageTable::index(int i, int j) const {
  if (i < 1 || i > stages_ || j < 0 || j >= i) throw std::out_of_range("stage table index");
  return static_cast<std::size_t>((i - 1) * i / 2 + j);
}

bool ShuOsherTableau::has_negative_beta() const {
  for (int i = 1; i <= stages(); ++i)
    for (int j = 0; j < i; ++j)
      if (beta(i, j).sign() < 0) return true;
  return false;
}

bool ShuOsherTableau::has_negative_exponent_shift() const {
  for (int i = 1; i <= stages(); ++i)
    for (int j = 0; j < i; ++j)
      if ((!alpha(i, j).is_zero() || !beta(i, j).is_zero()) && c[i] < c[j]) return true;
  return false;
}

namespace {

using R = Rational;

ShuOsherTableau make_if1() {
  ShuOsherTableau t;
  t.name = "IF1";
  t.order = 1;
  t.alpha = StageTable{{R(1)}};
  t.beta = StageTable{{R(1)}};
  t.c = {R(0), R(1)};
  t.butcher = StageTable{{R(1)}};
  return t;
}

ShuOsherTableau make_ifrk2() {
  ShuOsherTableau t;
  t.name = "IFRK2";
  t.order = 2;
  t.alpha = StageTable{{R(1)}, {R(1, 2), R(1, 2)}};
  t.beta = StageTable{{R(1)}, {R(0), R(1, 2)}};
  t.c = {R(0), R(1), R(1)};
  t.butcher = StageTable{{R(1)}, {R(1, 2), R(1, 2)}};
  return t;
}

ShuOsherTableau make_ifrk3() {
  ShuOsherTableau t;
  t.name = "IFRK3";
  t.order = 3;
  // Final stage: 59/128 e^{tau L} u + 15/128 e^{tau L}[u + 4tau/3 f(u)] + 27/64 e^{tau L/3}[...].
  t.alpha = StageTable{{R(1)}, {R(2, 3), R(1, 3)}, {R(59, 128) + R(15, 128), R(0), R(27, 64)}};
  t.beta = StageTable{{R(2, 3)}, {R(0), R(4, 9)}, {R(15, 128) * R(4, 3), R(0), R(27, 64) * R(4, 3)}};
  t.c = {R(0), R(2, 3), R(2, 3), R(1)};
  t.butcher = StageTable{{R(2, 3)}, {R(2, 9), R(4, 9)}, {R(1, 4), R(3, 16), R(9, 16)}};
  return t;
}

ShuOsherTableau make_ifrk4() {
  ShuOsherTableau t;
  t.name = "IFRK4";
  t.order = 4;
  t.alpha = StageTable{{R(1)},
                       {R(1, 2), R(1, 2)},
                       {R(1, 9), R(2, 9), R(2, 3)},
                       {R(0), R(1, 3), R(1, 3), R(1, 3)}};
  t.beta = StageTable{{R(1, 2)},
                      {R(-1, 4), R(1, 2)},
                      {R(-1, 9), R(-1, 3), R(1)},
                      {R(0), R(1, 6), R(0), R(1, 6)}};
  t.c = {R(0), R(1, 2), R(1, 2), R(1), R(1)};
  t.butcher = StageTable{{R(1, 2)},
                         {R(0), R(1, 2)},
                         {R(0), R(0), R(1)},
                         {R(1, 6), R(1, 3), R(1, 3), R(1, 6)}};
  return t;
}

// Third-order Shu-Osher method in the integrating-factor variable; its
// second stage carries e^{-tau L / 2}.
ShuOsherTableau make_ifrk3_shu_osher() {
  ShuOsherTableau t;
  t.name = "IFRK3_SHUOSHER";
  t.order = 3;
  t.alpha = StageTable{{R(1)}, {R(3, 4), R(1, 4)}, {R(1, 3), R(0), R(2, 3)}};
  t.beta = StageTable{{R(1)}, {R(0), R(1, 4)}, {R(0), R(0), R(2, 3)}};
  t.c = {R(0), R(1), R(1, 2), R(1)};
  t.butcher = StageTable{{R(1)}, {R(1, 4), R(1, 4)}, {R(1, 6), R(1, 6), R(2, 3)}};
  return t;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

ShuOsherTableau builtin(BuiltinScheme scheme) {
  switch (scheme) {
    case BuiltinScheme::IF1:
      return make_if1();
    case BuiltinScheme::IFRK2:
      return make_ifrk2();
    case BuiltinScheme::IFRK3:
      return make_ifrk3();
    case BuiltinScheme::IFRK4:
      return make_ifrk4();
    case BuiltinScheme::IFRK3_SHUOSHER:
      return make_ifrk3_shu_osher();
  }
  throw ConfigError("unknown scheme");
}

ShuOsherTableau builtin(std::string_view name) {
  const std::string key = upper(name);
  if (key == "IF1") return builtin(BuiltinScheme::IF1);
  if (key == "IFRK2") return builtin(BuiltinScheme::IFRK2);
  if (key == "IFRK3") return builtin(BuiltinScheme::IFRK3);
  if (key == "IFRK4") return builtin(BuiltinScheme::IFRK4);
  if (key == "IFRK3_SHUOSHER" || key == "IFRK3N") return builtin(BuiltinScheme::IFRK3_SHUOSHER);
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

std::vector<std::string> builtin_names() {
  return {"IF1", "IFRK2", "IFRK3", "IFRK4", "IFRK3_SHUOSHER"};
}

ShuOsherTableau from_butcher(const StageTable& d, const std::vector<Rational>& c,
                             const StageTable& alpha, std::string name, int order) {
  const int s = d.stages();
  if (alpha.stages() != s) throw ConfigError("alpha and d have different stage counts");
  if (static_cast<int>(c.size()) != s + 1) throw ConfigError("need s + 1 abscissas");
  for (int i = 1; i <= s; ++i) {
    Rational sum(0);
    for (int j = 0; j < i; ++j) {
      if (alpha(i, j).sign() < 0) throw ConfigError("alpha must be non-negative");
      sum += alpha(i, j);
    }
    if (sum != Rational(1)) throw ConfigError("alpha row " + std::to_string(i) + " sums to " + sum.str());
  }

  ShuOsherTableau t;
  t.name = std::move(name);
  t.order = order;
  t.alpha = alpha;
  t.beta = StageTable(s);
  t.c = c;
  t.butcher = d;
  for (int i = 1; i <= s; ++i) {
    for (int j = 0; j < i; ++j) {
      Rational b = d(i, j);
      for (int k = j + 1; k <= i - 1; ++k) b -= alpha(i, k) * d(k, j);
      t.beta(i, j) = b;
      if (alpha(i, j).is_zero() && !b.is_zero())
        throw ConfigError("zero-pairing violated at (" + std::to_string(i) + ", " +
                          std::to_string(j) + "): alpha = 0, beta = " + b.str());
    }
  }
  return t;
}

MbpConstant mbp_constant(const ShuOsherTableau& t) {
  MbpConstant out;
  out.has_negative_beta = t.has_negative_beta();
  std::optional<Rational> all_min;
  for (int i = 1; i <= t.stages(); ++i) {
    for (int j = 0; j < i; ++j) {
      const Rational& a = t.alpha(i, j);
      const Rational& b = t.beta(i, j);
      if (b.is_zero()) continue;
      if (a.is_zero())
        throw ConfigError("zero-pairing violated in " + t.name + ": ratio alpha/beta undefined");
      const Rational ratio = a / b.abs();
      if (b.sign() > 0 && (!out.c_plus || ratio < *out.c_plus)) out.c_plus = ratio;
      if (!all_min || ratio < *all_min) all_min = ratio;
    }
  }
  if (out.has_negative_beta) out.c_minus = all_min;
  return out;
}

double max_timestep(const ShuOsherTableau& t, const ReactionTerm& term) {
  const MbpConstant k = mbp_constant(t);
  double bound = std::numeric_limits<double>::infinity();
  if (k.c_plus) bound = std::min(bound, k.c_plus->to_double() * term.omega_plus());
  if (k.c_minus) bound = std::min(bound, k.c_minus->to_double() * term.omega_minus());
  return bound;
}

ValidationReport validate(const ShuOsherTableau& t) {
  ValidationReport r;
  const int s = t.stages();
  auto fail = [&](bool& flag, std::string msg) {
    flag = false;
    r.messages.push_back(std::move(msg));
  };
  for (int i = 1; i <= s; ++i) {
    Rational sum(0);
    for (int j = 0; j < i; ++j) {
      if (t.alpha(i, j).sign() < 0)
        fail(r.nonnegative_alpha, "alpha(" + std::to_string(i) + "," + std::to_string(j) + ") < 0");
      if (t.alpha(i, j).is_zero() && !t.beta(i, j).is_zero())
        fail(r.zero_pairing, "beta(" + std::to_string(i) + "," + std::to_string(j) +
                                 ") != 0 where alpha = 0");
      sum += t.alpha(i, j);
    }
    if (sum != Rational(1)) fail(r.convex_rows, "alpha row " + std::to_string(i) + " sums to " + sum.str());
  }
  if (static_cast<int>(t.c.size()) != s + 1) {
    fail(r.endpoints, "expected " + std::to_string(s + 1) + " abscissas");
  } else {
    if (t.c.front() != Rational(0) || t.c.back() != Rational(1))
      fail(r.endpoints, "abscissas must start at 0 and end at 1");
    for (int i = 1; i <= s; ++i)
      if (t.c[i] < t.c[i - 1])
        fail(r.nondecreasing_abscissas, "c_" + std::to_string(i) + " = " + t.c[i].str() + " < c_" +
                                            std::to_string(i - 1) + " = " + t.c[i - 1].str());
    if (t.butcher) {
      for (int i = 1; i <= s; ++i) {
        Rational sum(0);
        for (int j = 0; j < i; ++j) sum += (*t.butcher)(i, j);
        if (sum != t.c[i])
          fail(r.abscissas_match_butcher, "c_" + std::to_string(i) + " != sum_j d_ij");
      }
    }
  }
  r.mbp_admissible = r.convex_rows && r.nonnegative_alpha && r.nondecreasing_abscissas &&
                     r.zero_pairing && r.endpoints && r.abscissas_match_butcher;
  return r;
}

}  // namespace ifrk
