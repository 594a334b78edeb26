#include <doctest.h>

#include <map>
#include <random>
#include <tuple>

#include "ifrk/errors.hpp"
#include "ifrk/schemes.hpp"

using namespace ifrk;

namespace {

// A stage value as a formal sum of e^{shift tau L} applied to u^n (source -1)
// or to f(u(j)) (source j), with tau folded into the coefficient of f terms.
using Symbolic = std::map<std::pair<int, Rational>, Rational>;

void add(Symbolic& acc, int source, const Rational& shift, const Rational& coeff) {
  if (coeff.is_zero()) return;
  auto& slot = acc[{source, shift}];
  slot += coeff;
  if (slot.is_zero()) acc.erase({source, shift});
}

std::vector<Symbolic> shu_osher_stages(const ShuOsherTableau& t) {
  std::vector<Symbolic> u{{{{-1, Rational(0)}, Rational(1)}}};
  for (int i = 1; i <= t.stages(); ++i) {
    Symbolic ui;
    for (int j = 0; j < i; ++j) {
      const Rational shift = t.c[i] - t.c[j];
      for (const auto& [key, coeff] : u[static_cast<std::size_t>(j)])
        add(ui, key.first, key.second + shift, t.alpha(i, j) * coeff);
      add(ui, j, shift, t.beta(i, j));
    }
    u.push_back(ui);
  }
  return u;
}

std::vector<Symbolic> butcher_stages(const StageTable& d, const std::vector<Rational>& c) {
  std::vector<Symbolic> u{{{{-1, Rational(0)}, Rational(1)}}};
  for (int i = 1; i <= d.stages(); ++i) {
    Symbolic ui;
    add(ui, -1, c[static_cast<std::size_t>(i)], Rational(1));
    for (int j = 0; j < i; ++j) add(ui, j, c[static_cast<std::size_t>(i)] - c[static_cast<std::size_t>(j)], d(i, j));
    u.push_back(ui);
  }
  return u;
}

Rational random_rational(std::mt19937_64& gen, int lo, int hi, int den) {
  std::uniform_int_distribution<int> dist(lo, hi);
  return Rational(dist(gen), den);
}

}  // namespace

TEST_CASE("rational arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, -3) == Rational(-1, 3));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(3, 4) / Rational(3, 2) == Rational(1, 2));
  CHECK(Rational(-2, 3) < Rational(1, 7));
  CHECK(Rational(5, 7).str() == "5/7");
  CHECK(Rational(4).str() == "4");
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("built-in coefficients") {
  const auto if1 = builtin(BuiltinScheme::IF1);
  CHECK(if1.stages() == 1);
  CHECK(if1.alpha(1, 0) == Rational(1));
  CHECK(if1.beta(1, 0) == Rational(1));

  const auto rk3 = builtin(BuiltinScheme::IFRK3);
  CHECK(rk3.stages() == 3);
  CHECK(rk3.beta(3, 0) == Rational(5, 32));
  CHECK(rk3.alpha(3, 2) == Rational(27, 64));
  CHECK(rk3.beta(3, 2) == Rational(9, 16));

  const auto rk4 = builtin(BuiltinScheme::IFRK4);
  CHECK(rk4.has_negative_beta());
  CHECK(rk4.beta(2, 0) == Rational(-1, 4));
  CHECK(rk4.beta(3, 1) == Rational(-1, 3));

  for (const auto& name : builtin_names()) {
    const auto t = builtin(name);
    CHECK(t.name == name);
    for (int i = 1; i <= t.stages(); ++i) {
      Rational sum;
      for (int j = 0; j < i; ++j) sum += t.alpha(i, j);
      CHECK(sum == Rational(1));
    }
  }
}

TEST_CASE("name lookup") {
  CHECK(builtin("ifrk4").name == "IFRK4");
  CHECK(builtin("IFRK3n").name == "IFRK3_SHUOSHER");
  CHECK_THROWS_AS(builtin("RK5"), ConfigError);
  CHECK(builtin_names().size() == 5);
}

TEST_CASE("MBP constants") {
  const auto c1 = mbp_constant(builtin(BuiltinScheme::IF1));
  CHECK(c1.c_plus == Rational(1));
  CHECK_FALSE(c1.c_minus);
  CHECK(mbp_constant(builtin(BuiltinScheme::IFRK2)).c_plus == Rational(1));
  CHECK(mbp_constant(builtin(BuiltinScheme::IFRK3)).c_plus == Rational(3, 4));
  const auto c4 = mbp_constant(builtin(BuiltinScheme::IFRK4));
  CHECK(c4.has_negative_beta);
  CHECK(c4.c_minus == Rational(2, 3));
  CHECK(c4.c_plus == Rational(2, 3));
  CHECK(mbp_constant(builtin(BuiltinScheme::IFRK3_SHUOSHER)).c_plus == Rational(1));
}

TEST_CASE("from_butcher reproduces the built-ins") {
  for (auto s : {BuiltinScheme::IF1, BuiltinScheme::IFRK2, BuiltinScheme::IFRK3, BuiltinScheme::IFRK4,
                 BuiltinScheme::IFRK3_SHUOSHER}) {
    const auto t = builtin(s);
    REQUIRE(t.butcher);
    const auto r = from_butcher(*t.butcher, t.c, t.alpha, t.name, t.order);
    CHECK(r.beta == t.beta);
  }
  StageTable d(1), a(1);
  d(1, 0) = 1;
  a(1, 0) = 1;
  CHECK(from_butcher(d, {0, 1}, a).beta(1, 0) == Rational(1));
}

TEST_CASE("classic RK4 coefficients give the IFRK4 beta") {
  const StageTable d{{Rational(1, 2)}, {0, Rational(1, 2)}, {0, 0, 1},
                     {Rational(1, 6), Rational(1, 3), Rational(1, 3), Rational(1, 6)}};
  const StageTable a{{1}, {Rational(1, 2), Rational(1, 2)}, {Rational(1, 9), Rational(2, 9), Rational(2, 3)},
                     {0, Rational(1, 3), Rational(1, 3), Rational(1, 3)}};
  const std::vector<Rational> c{0, Rational(1, 2), Rational(1, 2), 1, 1};
  CHECK(from_butcher(d, c, a).beta == builtin(BuiltinScheme::IFRK4).beta);
}

TEST_CASE("Shu-Osher and Butcher recursions agree symbolically") {
  for (auto s : {BuiltinScheme::IF1, BuiltinScheme::IFRK2, BuiltinScheme::IFRK3, BuiltinScheme::IFRK4,
                 BuiltinScheme::IFRK3_SHUOSHER}) {
    const auto t = builtin(s);
    CHECK(shu_osher_stages(t) == butcher_stages(*t.butcher, t.c));
  }

  std::mt19937_64 gen(42);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int s = 1 + trial % 4;
    StageTable d(s), a(s);
    std::vector<Rational> c{0};
    for (int i = 1; i <= s; ++i) {
      Rational rest(1);
      for (int j = 0; j < i; ++j) {
        d(i, j) = random_rational(gen, -6, 6, 12);
        if (j + 1 < i) {
          a(i, j) = random_rational(gen, 1, 4, 5 * i);
          if (a(i, j) > rest) a(i, j) = rest;
          rest -= a(i, j);
        } else {
          a(i, j) = rest;
        }
      }
      c.push_back(random_rational(gen, 0, 8, 8));
    }
    ShuOsherTableau t;
    try {
      t = from_butcher(d, c, a);
    } catch (const ConfigError&) {
      continue;  // zero alpha paired with nonzero beta
    }
    CHECK(shu_osher_stages(t) == butcher_stages(d, c));
    ++tested;
  }
  CHECK(tested > 100);
}

TEST_CASE("from_butcher rejects malformed input") {
  StageTable d(2), a(2);
  d(1, 0) = 1;
  d(2, 0) = Rational(1, 2);
  d(2, 1) = Rational(1, 2);
  a(1, 0) = 1;
  a(2, 0) = Rational(1, 2);
  a(2, 1) = Rational(1, 3);
  CHECK_THROWS_AS(from_butcher(d, {0, 1, 1}, a), ConfigError);
  a(2, 0) = Rational(-1, 2);
  a(2, 1) = Rational(3, 2);
  CHECK_THROWS_AS(from_butcher(d, {0, 1, 1}, a), ConfigError);
  a(2, 0) = 0;
  a(2, 1) = 1;
  CHECK_THROWS_AS(from_butcher(d, {0, 1, 1}, a), ConfigError);
}

TEST_CASE("maximal time steps") {
  const auto cubic = ReactionTerm::cubic();
  CHECK(max_timestep(builtin(BuiltinScheme::IFRK4), cubic) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(max_timestep(builtin(BuiltinScheme::IF1), cubic) == 0.5);
  CHECK(max_timestep(builtin(BuiltinScheme::IFRK3), cubic) == 0.375);

  const auto fh = ReactionTerm::flory_huggins(0.8, 1.6);
  const double tmax = max_timestep(builtin(BuiltinScheme::IFRK4), fh);
  CHECK(tmax == doctest::Approx(2.0 / 3.0 * std::min(fh.omega_plus(), 1.25)).epsilon(1e-15));
  CHECK(tmax >= 0.08);
  CHECK(max_timestep(builtin(BuiltinScheme::IF1), ReactionTerm::zero()) == std::numeric_limits<double>::infinity());
}

TEST_CASE("validation") {
  for (auto s : {BuiltinScheme::IF1, BuiltinScheme::IFRK2, BuiltinScheme::IFRK3, BuiltinScheme::IFRK4}) {
    const auto r = validate(builtin(s));
    CHECK(r.mbp_admissible);
    CHECK(r.messages.empty());
  }
  const auto n = validate(builtin(BuiltinScheme::IFRK3_SHUOSHER));
  CHECK_FALSE(n.nondecreasing_abscissas);
  CHECK_FALSE(n.mbp_admissible);
  CHECK(builtin(BuiltinScheme::IFRK3_SHUOSHER).has_negative_exponent_shift());

  auto t = builtin(BuiltinScheme::IFRK3);
  t.alpha(2, 0) = t.alpha(2, 0) + Rational(1, 1000);
  const auto p = validate(t);
  CHECK_FALSE(p.convex_rows);
  CHECK_FALSE(p.mbp_admissible);
  CHECK_FALSE(p.messages.empty());

  auto e = builtin(BuiltinScheme::IFRK2);
  e.c.back() = Rational(1, 2);
  CHECK_FALSE(validate(e).endpoints);
}
