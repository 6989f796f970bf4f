#include "polydyn/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace polydyn {

namespace {

// Neumaier summation on both components.
class CompensatedSum {
 public:
  void add(Complex z) {
    add1(re_, cre_, z.real());
    add1(im_, cim_, z.imag());
  }
  Complex value() const { return {re_ + cre_, im_ + cim_}; }

 private:
  static void add1(double& sum, double& comp, double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  double re_ = 0, cre_ = 0, im_ = 0, cim_ = 0;
};

std::vector<std::uint64_t> linear_form(const Field& field, const PointBuffer& stream,
                                       const std::vector<std::uint64_t>& a, std::uint64_t n_terms) {
  std::vector<std::uint64_t> r(n_terms);
  for (std::uint64_t n = 0; n < n_terms; ++n) {
    auto u = stream.row(n);
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j]) acc = field.add(acc, field.mul(a[j], u[j]));
    }
    r[n] = acc;
  }
  return r;
}

void check_stream(const PointBuffer& stream, std::span<const std::int64_t> a,
                  std::uint64_t n_terms) {
  if (a.size() != stream.dim) {
    throw Error(Errc::WidthMismatch, "coefficient vector of length " + std::to_string(a.size()) +
                                         " for points of dimension " + std::to_string(stream.dim));
  }
  if (n_terms > stream.size()) {
    throw Error(Errc::InvalidArgument, "N = " + std::to_string(n_terms) + " exceeds the " +
                                           std::to_string(stream.size()) + " buffered points");
  }
}

}  // namespace

BoundEnvelope::BoundEnvelope(std::uint64_t m_, std::uint64_t nu_) : m(m_), nu(nu_) {
  if (m == 0 || nu == 0) throw Error(Errc::InvalidArgument, "m and nu must be positive");
}

Rational BoundEnvelope::alpha() const {
  BigInt M = m, V = nu;
  return Rational(2 * M * M + 2 * M * V + 2 * M + V, 4 * V * (M + V));
}

Rational BoundEnvelope::beta() const { return Rational(BigInt(1), BigInt(2 * nu)); }

Rational BoundEnvelope::threshold_exponent(std::uint64_t m) {
  return Rational(BigInt(2 * m + 1), BigInt(2));
}

Rational BoundEnvelope::large_n_exponent(std::uint64_t m) {
  BigInt M1 = m + 1;
  return Rational(1) - Rational(BigInt(1), 4 * M1 * M1);
}

Complex e_char(const Field& field, std::uint64_t z) {
  const std::uint64_t p = field.modulus();
  z = field.reduce(z);
  if (z == 0) return {1.0, 0.0};
  // Map to (-p/2, p/2] so the angle stays small.
  long double num = (2 * z > p) ? -static_cast<long double>(p - z) : static_cast<long double>(z);
  double theta = static_cast<double>(2.0L * std::numbers::pi_v<long double> * num /
                                     static_cast<long double>(p));
  return {std::cos(theta), std::sin(theta)};
}

Complex e_char(const Element& z) { return e_char(z.field(), z.value()); }

CharacterTable::CharacterTable(const Field& field) : field_(field) {
  const std::uint64_t p = field.modulus();
  if (p > kTableLimit) return;
  table_.resize(p);
  table_[0] = {1.0, 0.0};
  for (std::uint64_t z = 1; 2 * z <= p; ++z) {
    table_[z] = e_char(field, z);
    table_[p - z] = std::conj(table_[z]);
  }
}

std::vector<std::uint64_t> reduce_coefficients(const Field& field,
                                               std::span<const std::int64_t> a) {
  std::vector<std::uint64_t> r;
  r.reserve(a.size());
  bool nonzero = false;
  for (std::int64_t x : a) {
    r.push_back(field.reduce_signed(x));
    nonzero = nonzero || r.back() != 0;
  }
  if (!nonzero) throw Error(Errc::ZeroCoefficientVector, "coefficient vector vanishes mod p");
  return r;
}

CharacterSum exp_sum(const CharacterTable& chi, const PointBuffer& stream,
                     std::span<const std::int64_t> a, std::uint64_t n_terms) {
  check_stream(stream, a, n_terms);
  const Field& field = chi.field();
  auto ra = reduce_coefficients(field, a);
  CompensatedSum acc;
  for (std::uint64_t n = 0; n < n_terms; ++n) {
    auto u = stream.row(n);
    std::uint64_t r = 0;
    for (std::size_t j = 0; j < ra.size(); ++j) {
      if (ra[j]) r = field.add(r, field.mul(ra[j], u[j]));
    }
    acc.add(chi(r));
  }
  return {acc.value(), n_terms, {a.begin(), a.end()}};
}

CharacterSum exp_sum(const Field& field, const PointBuffer& stream, std::span<const std::int64_t> a,
                     std::uint64_t n_terms) {
  return exp_sum(CharacterTable(field), stream, a, n_terms);
}

CharacterSum exp_sum(const Field& field, const PointBuffer& stream,
                     std::span<const std::int64_t> a) {
  return exp_sum(field, stream, a, stream.size());
}

CharacterSum exp_sum_histogram(const Field& field, const PointBuffer& stream,
                               std::span<const std::int64_t> a, std::uint64_t n_terms) {
  check_stream(stream, a, n_terms);
  auto ra = reduce_coefficients(field, a);
  std::vector<std::uint64_t> r = linear_form(field, stream, ra, n_terms);
  CompensatedSum acc;
  const std::uint64_t p = field.modulus();
  if (p <= (std::uint64_t{1} << 24)) {
    std::vector<std::uint64_t> counts(p, 0);
    for (std::uint64_t x : r) ++counts[x];
    for (std::uint64_t z = 0; z < p; ++z) {
      if (counts[z]) acc.add(static_cast<double>(counts[z]) * e_char(field, z));
    }
  } else {
    std::sort(r.begin(), r.end());
    for (std::size_t i = 0; i < r.size();) {
      std::size_t j = i;
      while (j < r.size() && r[j] == r[i]) ++j;
      acc.add(static_cast<double>(j - i) * e_char(field, r[i]));
      i = j;
    }
  }
  return {acc.value(), n_terms, {a.begin(), a.end()}};
}

std::vector<std::vector<std::int64_t>> coefficient_box(const Field& field, std::size_t m,
                                                       std::uint64_t L) {
  std::vector<std::vector<std::int64_t>> out;
  const std::int64_t l = static_cast<std::int64_t>(L);
  std::vector<std::int64_t> a(m, -l);
  while (true) {
    bool nonzero = std::any_of(a.begin(), a.end(),
                               [&](std::int64_t x) { return field.reduce_signed(x) != 0; });
    if (nonzero) out.push_back(a);
    std::size_t j = m;
    while (j > 0 && a[j - 1] == l) a[--j] = -l;
    if (j == 0) break;
    ++a[j - 1];
  }
  return out;
}

ExpSumMaxReport exp_sum_max(const Field& field, const PointBuffer& stream, std::uint64_t n_terms,
                            const std::vector<std::vector<std::int64_t>>& coeffs) {
  ExpSumMaxReport rep;
  CharacterTable chi(field);
  for (const auto& a : coeffs) {
    rep.sums.push_back(exp_sum(chi, stream, a, n_terms));
    double v = rep.sums.back().abs();
    if (rep.sums.size() == 1 || v > rep.max_abs) {
      rep.max_abs = v;
      rep.argmax = rep.sums.size() - 1;
    }
  }
  return rep;
}

ExpSumMaxReport exp_sum_max(const TriangularSystem& sys, const StateVector& w0,
                            std::uint64_t n_terms,
                            const std::vector<std::vector<std::int64_t>>& coeffs) {
  PointBuffer stream = collect(sys, w0, n_terms, true);
  return exp_sum_max(sys.field(), stream, n_terms, coeffs);
}

WeilResult weil_bruteforce(const Field& field, const Polynomial& f, std::uint64_t enum_cap) {
  if (!(f.ring().field() == field)) throw Error(Errc::FieldMismatch, "polynomial over another field");
  if (f.is_constant()) throw Error(Errc::ConstantPolynomial, "Weil sum needs a nonconstant F");
  const std::uint64_t p = field.modulus();
  const std::size_t vars = f.ring().nvars();
  std::uint64_t points = 1;
  for (std::size_t j = 0; j < vars; ++j) {
    if (points > enum_cap / p) {
      throw Error(Errc::EnumerationCapExceeded,
                  "p^" + std::to_string(vars) + " exceeds the enumeration cap " +
                      std::to_string(enum_cap));
    }
    points *= p;
  }

  // Integer histogram of F's values, then one weighted pass over residues.
  std::vector<std::uint64_t> counts(p, 0);
  std::vector<std::uint64_t> x(vars, 0);
  for (std::uint64_t it = 0; it < points; ++it) {
    ++counts[f.eval(x)];
    for (std::size_t j = vars; j-- > 0;) {
      if (++x[j] < p) break;
      x[j] = 0;
    }
  }
  CompensatedSum acc;
  for (std::uint64_t z = 0; z < p; ++z) {
    if (counts[z]) acc.add(static_cast<double>(counts[z]) * e_char(field, z));
  }

  WeilResult res;
  res.sum = acc.value();
  res.abs = std::abs(res.sum);
  res.degree = f.total_degree();
  res.points = points;
  res.bound = static_cast<double>(res.degree) *
              std::pow(static_cast<double>(p), static_cast<double>(vars) - 0.5);
  res.bound_ok = res.abs < res.bound;
  return res;
}

double expsum_envelope(const BoundEnvelope& env, std::uint64_t p, std::uint64_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "N must be at least 1");
  double alpha = static_cast<double>(env.alpha());
  double beta = static_cast<double>(env.beta());
  return std::exp(alpha * std::log(static_cast<double>(p)) +
                  (1.0 - beta) * std::log(static_cast<double>(n)));
}

void write_expsum_csv(std::ostream& os, std::size_t m, std::uint64_t p,
                      const std::vector<CharacterSum>& sums,
                      const std::vector<std::uint64_t>& nus) {
  for (std::size_t j = 0; j < m; ++j) os << 'a' << j << ',';
  os << "N,re,im,abs";
  for (std::uint64_t nu : nus) os << ",envelope_nu" << nu;
  os << '\n';
  const auto old_prec = os.precision(17);
  for (const CharacterSum& s : sums) {
    for (std::int64_t x : s.a) os << x << ',';
    os << s.n_terms << ',' << s.value.real() << ',' << s.value.imag() << ',' << s.abs();
    for (std::uint64_t nu : nus) os << ',' << expsum_envelope(BoundEnvelope(m, nu), p, s.n_terms);
    os << '\n';
  }
  os.precision(old_prec);
  if (!os) throw Error(Errc::Io, "failed writing exponential-sum CSV");
}

}  // namespace polydyn
