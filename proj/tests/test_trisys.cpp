#include <doctest.h>

#include <cmath>
#include <random>

#include "polydyn/trisys.hpp"
#include "support.hpp"

using namespace polydyn;
using testsupport::Rng;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::InvalidArgument;
}

TriangularSystem make(std::uint64_t p, std::size_t m, std::vector<const char*> g,
                      std::vector<const char*> h, std::uint64_t a, std::uint64_t b) {
  Field f(p);
  Ring r(f, m + 1);
  std::vector<Polynomial> gp, hp;
  for (auto s : g) gp.push_back(Polynomial::parse(r, s));
  for (auto s : h) hp.push_back(Polynomial::parse(r, s));
  return TriangularSystem::build(f, m, gp, hp, a, b);
}

// m = 2 with every s_{i,j} = 1 above the diagonal.
TriangularSystem all_ones(std::uint64_t p = 5) {
  return make(p, 2, {"X1*X2", "X2"}, {"0", "0"}, 1, 1);
}

// d_k from the recurrence d_{k,i} = d_{k-1,i} + sum_{j>i} s_{i,j} d_{k-1,j}.
std::vector<BigInt> recurrence(const TriangularSystem& sys, std::uint64_t k) {
  const auto& s = sys.exponents();
  std::size_t n = sys.dim();
  std::vector<BigInt> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = 0;
    for (std::size_t j = i; j < n; ++j) d[i] += s(i, j);
  }
  for (std::uint64_t step = 1; step <= k; ++step) {
    std::vector<BigInt> e(n);
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = d[i];
      for (std::size_t j = i + 1; j < n; ++j) e[i] += BigInt(s(i, j)) * d[j];
    }
    d = e;
  }
  return d;
}

}  // namespace

TEST_CASE("building systems") {
  auto sys = make(5, 1, {"X1"}, {"1"}, 1, 1);
  CHECK(sys.exponents()(0, 0) == 1);
  CHECK(sys.exponents()(0, 1) == 1);
  CHECK(sys.exponents()(1, 0) == 0);
  CHECK(sys.exponents()(1, 1) == 1);
  CHECK(sys.f()[0].to_string() == "X0*X1+1");
  CHECK(sys.f()[1].to_string() == "X1+1");
  CHECK(sys.kind() == SystemKind::Fast);
  CHECK(sys.fast_shifts() == std::vector<std::uint64_t>{1});

  auto s2 = make(7, 2, {"X1^2*X2 + X2", "X2^3"}, {"X1", "2"}, 3, 4);
  CHECK(s2.exponents()(0, 1) == 2);
  CHECK(s2.exponents()(0, 2) == 1);
  CHECK(s2.exponents()(1, 2) == 3);
  CHECK(s2.f()[2].to_string() == "3*X2+4");
  CHECK(s2.kind() == SystemKind::General);

  CHECK(code_of([] { make(5, 2, {"X1 + X2", "X2"}, {"0", "0"}, 1, 0); }) == Errc::NonUniqueLeading);
  CHECK(code_of([] { make(5, 1, {"0"}, {"0"}, 1, 0); }) == Errc::NonUniqueLeading);
  CHECK(code_of([] { make(5, 1, {"2*X1"}, {"0"}, 1, 0); }) == Errc::NonMonicLeading);
  CHECK(code_of([] { make(5, 1, {"X1"}, {"X1^2"}, 1, 0); }) == Errc::DegreeCondition);
  CHECK(code_of([] { make(5, 1, {"X0*X1"}, {"0"}, 1, 0); }) == Errc::VariableScope);
  CHECK(code_of([] { make(5, 1, {"X1"}, {"X0"}, 1, 0); }) == Errc::VariableScope);
  CHECK(code_of([] { make(5, 1, {"X1"}, {"0"}, 0, 0); }) == Errc::ZeroA);
  CHECK(code_of([] { make(3, 3, {"X1", "X2", "X3"}, {"0", "0", "0"}, 1, 0); }) ==
        Errc::CharTooSmall);
  // h_i = 0 is allowed; the constant g_i = 1 is a unique monic leading term.
  CHECK_NOTHROW(make(5, 2, {"1", "X2"}, {"0", "0"}, 1, 0));
}

TEST_CASE("validation order is fixed across all indices") {
  // g1 breaks scope, g0 breaks uniqueness: scope is reported first.
  CHECK(code_of([] { make(5, 2, {"X1 + X2", "X1"}, {"0", "0"}, 1, 0); }) == Errc::VariableScope);
  // g1 breaks uniqueness, g0 breaks monicity.
  CHECK(code_of([] { make(7, 3, {"2*X1", "X2 + X3", "X3"}, {"0", "0", "0"}, 1, 0); }) ==
        Errc::NonUniqueLeading);
  // h0 breaks degree, a = 0, p <= m.
  CHECK(code_of([] { make(3, 3, {"X1", "X2", "X3"}, {"X1^2", "0", "0"}, 0, 0); }) ==
        Errc::DegreeCondition);
  CHECK(code_of([] { make(3, 3, {"X1", "X2", "X3"}, {"0", "0", "0"}, 0, 0); }) == Errc::ZeroA);
}

TEST_CASE("fast constructor") {
  Field f(7);
  auto sys = TriangularSystem::fast(f, 2, {1, 1}, 1, 1);
  CHECK(sys.kind() == SystemKind::Fast);
  CHECK(sys.f()[0].to_string() == "X0*X1+1");
  CHECK(sys.f()[1].to_string() == "X1*X2+1");
  CHECK(sys.f()[2].to_string() == "X2+1");
  CHECK(code_of([&] { TriangularSystem::fast(f, 2, {1}, 1, 1); }) == Errc::InvalidArgument);
}

TEST_CASE("degree vectors") {
  auto m1 = make(5, 1, {"X1"}, {"1"}, 1, 1);
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto d = degree_vector(m1, k);
    CHECK(d.d[0] == BigInt(k + 2));
    CHECK(d.d[1] == 1);
  }
  auto m1s3 = make(5, 1, {"X1^3"}, {"0"}, 1, 1);
  for (std::uint64_t k = 0; k < 20; ++k) CHECK(degree_vector(m1s3, k).d[0] == BigInt(3 * k + 3 + 1));

  auto s = all_ones();
  auto d1 = degree_vector(s, 1);
  CHECK(d1.d == std::vector<BigInt>{6, 3, 1});
  CHECK(d1.max() == 6);
  for (std::uint64_t k = 0; k < 40; ++k) {
    CHECK(degree_vector(s, k).d[0] == BigInt((k + 2) * (k + 3) / 2));
  }
  CHECK(degree_vector(s, 10).d[0] == 78);

  Rng rng(41);
  for (int t = 0; t < 30; ++t) {
    auto sys = testsupport::random_system(rng, Field(101), 1 + t % 3);
    auto d0 = degree_vector(sys, 0);
    for (std::size_t i = 0; i < sys.dim(); ++i) CHECK(d0.d[i] == BigInt(sys.f()[i].total_degree()));
    for (std::uint64_t k : {1ULL, 2ULL, 7ULL, 33ULL}) {
      auto dk = degree_vector(sys, k);
      CHECK(dk.d == recurrence(sys, k));
      CHECK(dk.d.back() == 1);
    }
  }
  // Huge k stays exact.
  auto big = degree_vector(s, 1'000'000'000'000ULL);
  BigInt K = 1'000'000'000'000ULL;
  CHECK(big.d[0] == (K + 2) * (K + 3) / 2);
}

TEST_CASE("leading term of the degree growth") {
  auto s = all_ones();
  auto lt = predicted_leading(s, 0);
  CHECK(lt.coefficient == Rational(1, 2));
  CHECK(lt.exponent == 2);
  CHECK(lt.at(4) == Rational(8));
  auto m1 = make(5, 1, {"X1^3"}, {"0"}, 1, 1);
  CHECK(predicted_leading(m1, 0).coefficient == 3);
  CHECK(predicted_leading(m1, 0).exponent == 1);
  CHECK(code_of([&] { predicted_leading(s, 2); }) == Errc::IndexOutOfRange);

  // d_{k,0} - k^2/2 = (5k + 6)/2.
  for (std::uint64_t k = 0; k < 10; ++k) {
    Rational diff = Rational(degree_vector(s, k).d[0]) - lt.at(k);
    CHECK(diff == Rational(BigInt(5 * k + 6), BigInt(2)));
  }

  // Fit over e + 2 points: the k^{e+1} coefficient vanishes and the k^e one
  // is the predicted constant.
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    testsupport::SystemShape shape;
    shape.superdiagonal_positive = true;
    auto sys = testsupport::random_system(rng, Field(5), 1 + t % 3, shape);
    for (std::size_t i = 0; i < sys.m(); ++i) {
      auto pl = predicted_leading(sys, i);
      auto c = interpolate_degrees(sys, i, 10, pl.exponent + 2);
      CHECK(c.back() == 0);
      CHECK(c[pl.exponent] == pl.coefficient);
    }
  }
}

TEST_CASE("interpolation reproduces the sampled degrees") {
  auto sys = make(101, 3, {"X1^2*X3", "X2*X3 + 1", "X3^2"}, {"X3", "0", "4"}, 2, 3);
  auto c = interpolate_degrees(sys, 0, 5, 4);
  for (std::uint64_t k = 5; k < 9; ++k) {
    Rational v = 0, kp = 1;
    for (const auto& ci : c) {
      v += ci * kp;
      kp *= Rational(BigInt(k));
    }
    CHECK(v == Rational(degree_vector(sys, k).d[0]));
  }
}

TEST_CASE("symbolic iterates") {
  auto m1 = make(5, 1, {"X1"}, {"1"}, 1, 1);
  auto it0 = iterate_symbolic(m1, 0);
  CHECK(it0 == m1.f());
  auto it1 = iterate_symbolic(m1, 1);
  Ring r = m1.ring();
  auto expected = (Polynomial::parse(r, "X0*X1+1") * Polynomial::parse(r, "X1+1")) +
                  Polynomial::constant(r, 1);
  CHECK(it1[0] == expected);
  CHECK(it1[0].total_degree() == 3);
  for (std::size_t k = 0; k < 6; ++k) CHECK(iterate_symbolic(m1, k)[1].total_degree() == 1);

  auto s = all_ones();
  CHECK(iterate_symbolic(s, 1)[0].total_degree() == 6);

  SymbolicOrbit orbit(s, 1'000'000);
  orbit.iterate(3);
  CHECK(orbit.computed() == 4);
  CHECK(code_of([&] { iterate_symbolic(s, 6, 5); }) == Errc::TermBudgetExceeded);
}

TEST_CASE("matrix degrees equal symbolic degrees on dominated systems") {
  Rng rng(47);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    std::uint64_t p = t % 2 ? 101 : 5;
    auto sys = testsupport::random_system(rng, Field(p), 1 + t % 3);
    const std::uint64_t K = sys.m() == 3 ? 2 : 4;
    if (first_undominated_iterate(sys, K)) continue;
    ++checked;
    SymbolicOrbit orbit(sys);
    for (std::uint64_t k = 0; k <= K; ++k) {
      auto dv = degree_vector(sys, k);
      const auto& it = orbit.iterate(k);
      for (std::size_t i = 0; i < sys.dim(); ++i) CHECK(BigInt(it[i].total_degree()) == dv.d[i]);
    }
  }
  CHECK(checked >= 5);
}

TEST_CASE("upper bound holds everywhere and tails can outgrow the leading monomial") {
  // Valid system whose tail X1 of g0 eventually beats the leading X2^2.
  auto sys = make(5, 2, {"X2^2 + X1", "X2"}, {"0", "0"}, 1, 0);
  auto it = iterate_symbolic(sys, 3);
  CHECK(it[0].total_degree() == 12);
  CHECK(degree_vector(sys, 3).d[0] == 9);
  CHECK(degree_upper_bound(sys, 3).d[0] == 12);
  CHECK(first_undominated_iterate(sys, 3) == std::optional<std::uint64_t>(1));

  Rng rng(53);
  for (int t = 0; t < 20; ++t) {
    auto s = testsupport::random_system(rng, Field(101), 1 + t % 3);
    SymbolicOrbit orbit(s);
    for (std::uint64_t k = 0; k <= 2; ++k) {
      auto ub = degree_upper_bound(s, k);
      const auto& f = orbit.iterate(k);
      for (std::size_t i = 0; i < s.dim(); ++i) CHECK(BigInt(f[i].total_degree()) <= ub.d[i]);
    }
  }
}

TEST_CASE("dynamical degree estimates") {
  auto s = all_ones();
  auto est = dyndeg_estimate(s, 40);
  REQUIRE(est.size() == 40);
  CHECK(est[9] == doctest::Approx(std::pow(78.0, 0.1)).epsilon(1e-12));
  CHECK(est[9] == doctest::Approx(1.546).epsilon(1e-3));
  for (std::size_t k = 3; k < est.size(); ++k) CHECK(est[k] <= est[k - 1]);
  CHECK(est.back() > 1.0);
  CHECK(dyndeg_estimate(s, 5000).back() < 1.01);

  Ring r(Field(101), 1);
  std::vector<Polynomial> sq{Polynomial::parse(r, "X0^2")};
  for (double v : dyndeg_estimate(sq, 8)) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
  std::vector<Polynomial> sq1{Polynomial::parse(r, "X0^2 + 1")};
  CHECK(code_of([&] { dyndeg_estimate(sq1, 30, 3); }) == Errc::TermBudgetExceeded);
  Ring r2(Field(101), 2);
  std::vector<Polynomial> henon{Polynomial::parse(r2, "X1 + 1 - 3*X0^2"), Polynomial::parse(r2, "X0")};
  auto h = dyndeg_estimate(henon, 6);
  CHECK(h.back() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("nonconstant combinations") {
  auto m1 = make(5, 1, {"X1"}, {"1"}, 1, 1);
  SymbolicOrbit o1(m1);
  auto same = combo_nonconstant_check(o1, {1}, {3}, {3});
  CHECK(same.constant);
  CHECK(same.permutation);
  CHECK(same.consistent());
  auto r = combo_nonconstant_check(o1, {1}, {2}, {1});
  CHECK_FALSE(r.constant);
  CHECK(r.degree == 4);
  REQUIRE(r.predicted_degree);
  CHECK(*r.predicted_degree == 4);
  CHECK(r.consistent());

  auto s = all_ones();
  SymbolicOrbit o2(s);
  auto r2 = combo_nonconstant_check(o2, {0, 1}, {3}, {2});
  CHECK(r2.degree == 5);
  CHECK(*r2.predicted_degree == 5);
  auto perm = combo_nonconstant_check(o2, {2, 3}, {1, 3}, {3, 1});
  CHECK(perm.constant);
  CHECK(perm.permutation);
  // Shared indices cancel: {1,4} vs {4,2} leaves 2 on top.
  auto partial = combo_nonconstant_check(o2, {1, 0}, {1, 4}, {4, 2});
  CHECK(*partial.predicted_degree == degree_vector(s, 2).d[0]);
  CHECK(partial.consistent());

  CHECK(code_of([&] { combo_nonconstant_check(o2, {0, 5}, {1}, {2}); }) ==
        Errc::ZeroCoefficientVector);
  CHECK(code_of([&] { combo_nonconstant_check(o2, {1, 0}, {0}, {2}); }) == Errc::IndexOutOfRange);
  CHECK(code_of([&] { combo_nonconstant_check(o2, {1, 0}, {2}, {3}, 3); }) ==
        Errc::IndexOutOfRange);
}
