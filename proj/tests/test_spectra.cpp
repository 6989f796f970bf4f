#include <doctest.h>

#include <cmath>
#include <numbers>
#include <map>
#include <sstream>

#include "polydyn/spectra.hpp"
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

PointBuffer buffer(std::size_t dim, std::vector<std::uint64_t> data) {
  return PointBuffer{dim, std::move(data)};
}

// Plain long double reference: cos/sin of 2 pi (a . u mod p) / p, summed naively.
std::complex<long double> naive_sum(const PointBuffer& s, const std::vector<std::int64_t>& a,
                                    std::uint64_t p, std::uint64_t n) {
  std::complex<long double> acc = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    __int128 r = 0;
    for (std::size_t j = 0; j < a.size(); ++j) r += static_cast<__int128>(a[j]) * s.row(i)[j];
    r %= static_cast<__int128>(p);
    if (r < 0) r += p;
    long double th = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(r) /
                     static_cast<long double>(p);
    acc += std::complex<long double>(std::cos(th), std::sin(th));
  }
  return acc;
}

}  // namespace

TEST_CASE("additive character") {
  Field f(101);
  CHECK(e_char(f, 0) == Complex(1.0, 0.0));
  CHECK(e_char(f, 101) == Complex(1.0, 0.0));
  Complex total = 0;
  for (std::uint64_t z = 0; z < 101; ++z) total += e_char(f, z);
  CHECK(std::abs(total) < 1e-12);
  CHECK(std::abs(e_char(f, 1) * e_char(f, 100) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(e_char(f.element(7)) - e_char(f, 7)) == 0.0);

  Field big((std::uint64_t{1} << 61) - 1);
  CHECK(std::abs(std::abs(e_char(big, 123456789012345ULL)) - 1.0) < 1e-15);
  CharacterTable table(f), direct(big);
  for (std::uint64_t z = 0; z < 101; ++z) CHECK(table(z) == e_char(f, z));
  CHECK(direct(5) == e_char(big, 5));
}

TEST_CASE("exponential sum examples") {
  Field f(5);
  auto zeros = buffer(2, std::vector<std::uint64_t>(2 * 7, 0));
  std::vector<std::int64_t> a{1, 3};
  CHECK(exp_sum(f, zeros, a).value == Complex(7.0, 0.0));
  auto one = buffer(1, {3});
  std::vector<std::int64_t> a1{2};
  CHECK(std::abs(exp_sum(f, one, a1).abs() - 1.0) < 1e-15);
  auto full = buffer(1, {0, 1, 2, 3, 4});
  CHECK(exp_sum(f, full, a1).abs() < 1e-12);

  std::vector<std::int64_t> zero_mod_p{5, -10};
  CHECK(code_of([&] { exp_sum(f, zeros, zero_mod_p); }) == Errc::ZeroCoefficientVector);
  CHECK(code_of([&] { exp_sum(f, zeros, a1); }) == Errc::WidthMismatch);
  CHECK(code_of([&] { exp_sum(f, zeros, a, 8); }) == Errc::InvalidArgument);
  CHECK(exp_sum(f, zeros, a, 3).n_terms == 3);
}

TEST_CASE("direct and histogram sums agree with a long double reference") {
  Rng rng(79);
  for (std::uint64_t p : {5ULL, 101ULL, 1000003ULL, 2305843009213693951ULL}) {
    Field f(p);
    for (std::size_t m : {1, 2, 3}) {
      PointBuffer s{m, {}};
      const std::uint64_t n = 500;
      for (std::uint64_t i = 0; i < n * m; ++i) s.data.push_back(testsupport::uniform(rng, 0, p - 1));
      for (int t = 0; t < 10; ++t) {
        std::vector<std::int64_t> a(m);
        for (auto& x : a) x = static_cast<std::int64_t>(testsupport::uniform(rng, 0, 20)) - 10;
        if (std::all_of(a.begin(), a.end(), [&](auto x) { return x % static_cast<std::int64_t>(p) == 0; })) a[0] = 1;
        auto d = exp_sum(f, s, a, n);
        auto h = exp_sum_histogram(f, s, a, n);
        auto ref = naive_sum(s, a, p, n);
        CHECK(std::abs(d.value - h.value) < 1e-9);
        CHECK(std::abs(d.value.real() - static_cast<double>(ref.real())) < 1e-9);
        CHECK(std::abs(d.value.imag() - static_cast<double>(ref.imag())) < 1e-9);
        CHECK(d.abs() <= n + 1e-9);
      }
    }
  }
}

TEST_CASE("Parseval identity over all coefficient vectors") {
  // sum_{a in F_p^m} |S_a|^2 = p^m sum_z count(z)^2, where count(z) is the
  // multiplicity of the vector z among the points.
  Rng rng(83);
  for (auto [p, m] : std::vector<std::pair<std::uint64_t, std::size_t>>{{7, 1}, {5, 2}, {3, 3}}) {
    Field f(p);
    const std::uint64_t n = 40;
    PointBuffer s{m, {}};
    for (std::uint64_t i = 0; i < n * m; ++i) s.data.push_back(testsupport::uniform(rng, 0, p - 1));
    std::map<std::vector<std::uint64_t>, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < n; ++i) ++counts[{s.row(i).begin(), s.row(i).end()}];
    double rhs = 0;
    for (auto& [z, c] : counts) rhs += static_cast<double>(c * c);
    double pm = std::pow(static_cast<double>(p), static_cast<double>(m));
    rhs *= pm;
    double lhs = static_cast<double>(n * n);  // a = 0
    auto box = coefficient_box(f, m, (p - 1) / 2);
    CHECK(box.size() == static_cast<std::size_t>(pm) - 1);
    for (const auto& a : box) lhs += std::norm(exp_sum(f, s, a).value);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("coefficient box") {
  Field f(101);
  auto box = coefficient_box(f, 2, 1);
  CHECK(box.size() == 8);
  CHECK(box.front() == std::vector<std::int64_t>{-1, -1});
  CHECK(box.back() == std::vector<std::int64_t>{1, 1});
  // Entries vanishing mod p are dropped: -3, 0 and 3 at p = 3.
  Field f3(3);
  auto b3 = coefficient_box(f3, 1, 3);
  CHECK(b3 == std::vector<std::vector<std::int64_t>>{{-2}, {-1}, {1}, {2}});
}

TEST_CASE("maximum over the coefficient box") {
  Rng rng(89);
  auto sys = testsupport::random_system(rng, Field(1009), 2);
  StateVector w0{{1, 2, 3}};
  auto coeffs = coefficient_box(sys.field(), 2, 3);
  auto rep = exp_sum_max(sys, w0, 700, coeffs);
  REQUIRE(rep.sums.size() == coeffs.size());
  auto stream = collect(sys, w0, 700);
  double best = 0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    double v = std::abs(naive_sum(stream, coeffs[i], 1009, 700));
    CHECK(rep.sums[i].abs() == doctest::Approx(v).epsilon(1e-12));
    if (v > best) best = v, arg = i;
  }
  CHECK(rep.argmax == arg);
  CHECK(rep.max_abs <= 700.0);
}

TEST_CASE("Weil sums by enumeration") {
  Field f5(5);
  Ring r1(f5, 1);
  auto gauss = weil_bruteforce(f5, Polynomial::parse(r1, "X0^2"));
  CHECK(gauss.abs == doctest::Approx(std::sqrt(5.0)).epsilon(1e-13));
  CHECK(gauss.points == 5);
  CHECK(gauss.degree == 2);
  CHECK(gauss.bound == doctest::Approx(2 * std::sqrt(5.0)));
  CHECK(gauss.bound_ok);
  CHECK(weil_bruteforce(f5, Polynomial::parse(r1, "X0")).abs < 1e-12);

  // X0 X1 sums to p: only x0 = 0 survives the inner sum.
  Field f7(7);
  Ring r2(f7, 2);
  auto bil = weil_bruteforce(f7, Polynomial::parse(r2, "X0*X1"));
  CHECK(bil.abs == doctest::Approx(7.0).epsilon(1e-13));
  CHECK(bil.bound == doctest::Approx(2 * std::pow(7.0, 1.5)));

  // Quadratic Gauss sums have absolute value sqrt(p) for every p and a != 0.
  for (std::uint64_t p : {5ULL, 11ULL, 101ULL, 1009ULL}) {
    Field f(p);
    Ring r(f, 1);
    auto g = weil_bruteforce(f, Polynomial::parse(r, "3*X0^2 + X0 + 1"));
    CHECK(g.abs == doctest::Approx(std::sqrt(static_cast<double>(p))).epsilon(1e-11));
  }

  Rng rng(97);
  for (int t = 0; t < 20; ++t) {
    Field f(t % 2 ? 11 : 13);
    Ring r(f, 1 + t % 3);
    auto F = testsupport::random_nonconstant(rng, r, 4, 4);
    auto res = weil_bruteforce(f, F);
    // Independent sum over points in lexicographic order.
    std::complex<long double> ref = 0;
    std::vector<std::uint64_t> x(r.nvars(), 0);
    for (std::uint64_t it = 0; it < res.points; ++it) {
      long double th = 2.0L * std::numbers::pi_v<long double> * F.eval(x) / f.modulus();
      ref += std::complex<long double>(std::cos(th), std::sin(th));
      for (std::size_t j = x.size(); j-- > 0;) {
        if (++x[j] < f.modulus()) break;
        x[j] = 0;
      }
    }
    CHECK(std::abs(res.sum.real() - static_cast<double>(ref.real())) < 1e-9);
    CHECK(std::abs(res.sum.imag() - static_cast<double>(ref.imag())) < 1e-9);
  }

  CHECK(code_of([&] { weil_bruteforce(f5, Polynomial::parse(r1, "3")); }) == Errc::ConstantPolynomial);
  CHECK(code_of([&] { weil_bruteforce(f7, Polynomial::parse(r1, "X0")); }) == Errc::FieldMismatch);
  Ring r3(f7, 3);
  CHECK(code_of([&] { weil_bruteforce(f7, Polynomial::parse(r3, "X0"), 300); }) ==
        Errc::EnumerationCapExceeded);
}

TEST_CASE("envelope exponents") {
  BoundEnvelope e11(1, 1);
  CHECK(e11.alpha() == Rational(7, 8));
  CHECK(e11.beta() == Rational(1, 2));
  BoundEnvelope e22(2, 2);
  CHECK(e22.alpha() == Rational(22, 32));
  CHECK(e22.beta() == Rational(1, 4));
  CHECK(BoundEnvelope::threshold_exponent(1) == Rational(3, 2));
  CHECK(BoundEnvelope::large_n_exponent(1) == Rational(15, 16));
  // alpha / beta tends to m + 1/2 from above.
  for (std::uint64_t m = 1; m <= 4; ++m) {
    Rational prev = BoundEnvelope(m, 1).alpha() / BoundEnvelope(m, 1).beta();
    for (std::uint64_t nu = 2; nu <= 60; ++nu) {
      BoundEnvelope e(m, nu);
      Rational ratio = e.alpha() / e.beta();
      CHECK(ratio > BoundEnvelope::threshold_exponent(m));
      CHECK(ratio < prev);
      prev = ratio;
    }
  }
  // alpha(m, nu) = (2m^2 + 2m nu + 2m + nu) / (4 nu (m + nu)) at m = 3, nu = 2.
  CHECK(BoundEnvelope(3, 2).alpha() == Rational(18 + 12 + 6 + 2, 40));
  CHECK(code_of([] { BoundEnvelope(0, 1); }) == Errc::InvalidArgument);
  CHECK(code_of([] { BoundEnvelope(1, 0); }) == Errc::InvalidArgument);

  CHECK(expsum_envelope(e11, 101, 10000) ==
        doctest::Approx(std::pow(101.0, 0.875) * 100.0).epsilon(1e-12));
  CHECK(code_of([&] { expsum_envelope(e11, 101, 0); }) == Errc::InvalidArgument);
}

TEST_CASE("exponential-sum CSV") {
  Field f(5);
  auto s = buffer(2, {0, 0, 1, 2});
  std::vector<std::int64_t> a{1, -1};
  std::vector<CharacterSum> sums{exp_sum(f, s, a)};
  std::ostringstream os;
  write_expsum_csv(os, 2, 5, sums, {1, 2});
  std::string text = os.str();
  CHECK(text.rfind("a0,a1,N,re,im,abs,envelope_nu1,envelope_nu2\n", 0) == 0);
  CHECK(text.find("\n1,-1,2,") != std::string::npos);
}
