#include "polydyn/trisys.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polydyn {

namespace {

using BigMatrix = std::vector<std::vector<BigInt>>;

BigMatrix identity(std::size_t n) {
  BigMatrix r(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = 1;
  return r;
}

// Both factors upper triangular, so only j >= l >= i contributes.
BigMatrix multiply_upper(const BigMatrix& x, const BigMatrix& y) {
  const std::size_t n = x.size();
  BigMatrix r(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = i; l < n; ++l) {
      if (x[i][l] == 0) continue;
      for (std::size_t j = l; j < n; ++j) r[i][j] += x[i][l] * y[l][j];
    }
  return r;
}

BigInt dot(std::span<const std::uint32_t> e, const std::vector<BigInt>& d) {
  BigInt s = 0;
  for (std::size_t j = 0; j < e.size(); ++j)
    if (e[j]) s += BigInt(e[j]) * d[j];
  return s;
}

std::vector<BigInt> apply_matrix(const ExponentMatrix& s, const std::vector<BigInt>& d) {
  const std::size_t n = s.dim();
  std::vector<BigInt> out(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (s(i, j)) out[i] += BigInt(s(i, j)) * d[j];
  return out;
}

BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned q = 2; q <= n; ++q) r *= q;
  return r;
}

}  // namespace

TriangularSystem TriangularSystem::build(const Field& field, std::size_t m,
                                         std::vector<Polynomial> g, std::vector<Polynomial> h,
                                         std::uint64_t a, std::uint64_t b) {
  if (m < 1) throw Error(Errc::InvalidArgument, "m must be at least 1");
  if (g.size() != m || h.size() != m) {
    throw Error(Errc::InvalidArgument, "expected " + std::to_string(m) + " g and h polynomials");
  }
  Ring ring(field, m + 1);
  for (const auto* list : {&g, &h}) {
    for (const Polynomial& q : *list) {
      if (!(q.ring().field() == field)) throw Error(Errc::FieldMismatch, "polynomial over another field");
      if (q.ring().nvars() != m + 1) {
        throw Error(Errc::WidthMismatch, "polynomial in " + std::to_string(q.ring().nvars()) +
                                             " variables, expected " + std::to_string(m + 1));
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (!g[i].involves_only_from(i + 1)) {
      throw Error(Errc::VariableScope, "g" + std::to_string(i) + " uses a variable X_j with j <= " +
                                           std::to_string(i));
    }
    if (!h[i].involves_only_from(i + 1)) {
      throw Error(Errc::VariableScope, "h" + std::to_string(i) + " uses a variable X_j with j <= " +
                                           std::to_string(i));
    }
  }
  std::vector<std::pair<Monomial, Element>> leading;
  for (std::size_t i = 0; i < m; ++i) {
    if (g[i].is_zero()) {
      throw Error(Errc::NonUniqueLeading, "g" + std::to_string(i) + " is zero");
    }
    auto lt = g[i].leading_terms();
    if (lt.size() != 1) {
      throw Error(Errc::NonUniqueLeading, "g" + std::to_string(i) + " has " +
                                              std::to_string(lt.size()) +
                                              " terms of maximal total degree");
    }
    leading.push_back(std::move(lt.front()));
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (leading[i].second.value() != 1) {
      throw Error(Errc::NonMonicLeading, "leading coefficient of g" + std::to_string(i) + " is " +
                                             std::to_string(leading[i].second.value()));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (h[i].total_degree() > g[i].total_degree()) {
      throw Error(Errc::DegreeCondition, "deg h" + std::to_string(i) + " = " +
                                             std::to_string(h[i].total_degree()) + " exceeds deg g" +
                                             std::to_string(i) + " = " +
                                             std::to_string(g[i].total_degree()));
    }
  }
  a = field.reduce(a);
  b = field.reduce(b);
  if (a == 0) throw Error(Errc::ZeroA, "a must be nonzero");
  if (field.modulus() <= m) {
    throw Error(Errc::CharTooSmall, "p = " + std::to_string(field.modulus()) +
                                        " must exceed m = " + std::to_string(m));
  }

  TriangularSystem sys(ring, m);
  sys.a_ = a;
  sys.b_ = b;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j <= m; ++j) sys.s_.set(i, j, leading[i].first[j]);
    sys.f_.push_back(Polynomial::variable(ring, i) * g[i] + h[i]);
  }
  sys.f_.push_back(Polynomial::variable(ring, m).scaled(a) + Polynomial::constant(ring, b));

  bool fast = true;
  std::vector<std::uint64_t> shifts;
  for (std::size_t i = 0; i < m && fast; ++i) {
    fast = g[i] == Polynomial::variable(ring, i + 1) && h[i].is_constant();
    if (fast) shifts.push_back(h[i].is_zero() ? 0 : h[i].coefficient(0));
  }
  if (fast) {
    sys.kind_ = SystemKind::Fast;
    sys.shifts_ = std::move(shifts);
  }
  sys.g_ = std::move(g);
  sys.h_ = std::move(h);
  return sys;
}

TriangularSystem TriangularSystem::fast(const Field& field, std::size_t m,
                                        const std::vector<std::uint64_t>& shifts, std::uint64_t a,
                                        std::uint64_t b) {
  if (shifts.size() != m) {
    throw Error(Errc::InvalidArgument, "expected " + std::to_string(m) + " shift constants");
  }
  Ring ring(field, m + 1);
  std::vector<Polynomial> g, h;
  for (std::size_t i = 0; i < m; ++i) {
    g.push_back(Polynomial::variable(ring, i + 1));
    h.push_back(Polynomial::constant(ring, shifts[i]));
  }
  return build(field, m, std::move(g), std::move(h), a, b);
}

std::string TriangularSystem::to_config() const {
  std::ostringstream os;
  os << "p=" << field().modulus() << "\n";
  os << "m=" << m_ << "\n";
  os << "a=" << a_ << "\n";
  os << "b=" << b_ << "\n";
  for (std::size_t i = 0; i < m_; ++i) {
    os << "g" << i << "=" << g_[i].to_string() << "\n";
    os << "h" << i << "=" << h_[i].to_string() << "\n";
  }
  return os.str();
}

BigInt DegreeVector::max() const {
  BigInt best = 0;
  for (const BigInt& x : d) best = std::max(best, x);
  return best;
}

DegreeVector degree_vector(const TriangularSystem& sys, std::uint64_t k) {
  const ExponentMatrix& s = sys.exponents();
  const std::size_t n = s.dim();
  BigMatrix base(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) base[i][j] = s(i, j);

  BigMatrix acc = identity(n);
  std::uint64_t e = k + 1;
  while (e) {
    if (e & 1) acc = multiply_upper(acc, base);
    e >>= 1;
    if (e) base = multiply_upper(base, base);
  }
  DegreeVector out{k, std::vector<BigInt>(n, 0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.d[i] += acc[i][j];
  return out;
}

Rational LeadingTerm::at(std::uint64_t k) const {
  Rational r = coefficient;
  for (unsigned q = 0; q < exponent; ++q) r *= k;
  return r;
}

LeadingTerm predicted_leading(const TriangularSystem& sys, std::size_t i) {
  const std::size_t m = sys.m();
  if (i >= m) {
    throw Error(Errc::IndexOutOfRange, "leading term index " + std::to_string(i) +
                                           " not below m = " + std::to_string(m));
  }
  BigInt prod = 1;
  for (std::size_t j = i; j < m; ++j) prod *= sys.exponents()(j, j + 1);
  const unsigned e = static_cast<unsigned>(m - i);
  return {Rational(prod, factorial(e)), e};
}

std::vector<Rational> interpolate_degrees(const TriangularSystem& sys, std::size_t i,
                                          std::uint64_t k_first, std::size_t n) {
  if (i > sys.m()) throw Error(Errc::IndexOutOfRange, "component index out of range");
  if (n == 0) return {};
  // Newton forward differences at k_first.
  std::vector<Rational> diff(n);
  for (std::size_t t = 0; t < n; ++t) diff[t] = Rational(degree_vector(sys, k_first + t).d[i]);
  std::vector<Rational> newton;
  for (std::size_t r = 0; r < n; ++r) {
    newton.push_back(diff[0]);
    for (std::size_t t = 0; t + 1 < diff.size(); ++t) diff[t] = diff[t + 1] - diff[t];
    diff.pop_back();
  }
  // sum_r newton[r] * C(k - k_first, r), expanded in powers of k.
  std::vector<Rational> coeffs(n, Rational(0));
  std::vector<Rational> basis{Rational(1)};  // C(k - k_first, r) in powers of k
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t q = 0; q < basis.size(); ++q) coeffs[q] += newton[r] * basis[q];
    // basis *= (k - k_first - r) / (r + 1)
    std::vector<Rational> next(basis.size() + 1, Rational(0));
    Rational shift = -Rational(BigInt(k_first) + r);
    for (std::size_t q = 0; q < basis.size(); ++q) {
      next[q + 1] += basis[q];
      next[q] += basis[q] * shift;
    }
    for (auto& c : next) c /= Rational(r + 1);
    basis = std::move(next);
  }
  return coeffs;
}

DegreeVector degree_upper_bound(const TriangularSystem& sys, std::uint64_t k) {
  const std::size_t m = sys.m();
  std::vector<BigInt> d(m + 1, 1);
  for (std::uint64_t step = 0; step <= k; ++step) {
    std::vector<BigInt> next(m + 1, 0);
    for (std::size_t i = 0; i < m; ++i) {
      BigInt best_g = 0;
      for (std::size_t t = 0; t < sys.g()[i].size(); ++t)
        best_g = std::max(best_g, dot(sys.g()[i].exponents(t), d));
      BigInt best = d[i] + best_g;
      for (std::size_t t = 0; t < sys.h()[i].size(); ++t)
        best = std::max(best, dot(sys.h()[i].exponents(t), d));
      next[i] = best;
    }
    next[m] = 1;
    d = std::move(next);
  }
  return {k, std::move(d)};
}

std::optional<std::uint64_t> first_undominated_iterate(const TriangularSystem& sys,
                                                       std::uint64_t k) {
  const std::size_t m = sys.m();
  const ExponentMatrix& s = sys.exponents();
  std::vector<BigInt> d(m + 1, 1);
  for (std::uint64_t step = 0; step <= k; ++step) {
    for (std::size_t i = 0; i < m; ++i) {
      BigInt lead = 0;
      for (std::size_t j = i + 1; j <= m; ++j) lead += BigInt(s(i, j)) * d[j];
      const Polynomial& g = sys.g()[i];
      for (std::size_t t = 0; t < g.size(); ++t) {
        bool is_leading = true;
        for (std::size_t j = 0; j <= m; ++j)
          if (g.exponents(t)[j] != (j > i ? s(i, j) : 0u)) is_leading = false;
        if (!is_leading && dot(g.exponents(t), d) >= lead) return step;
      }
      const Polynomial& h = sys.h()[i];
      for (std::size_t t = 0; t < h.size(); ++t)
        if (dot(h.exponents(t), d) >= d[i] + lead) return step;
    }
    d = apply_matrix(s, d);
  }
  return std::nullopt;
}

SymbolicOrbit::SymbolicOrbit(const TriangularSystem& sys, std::size_t term_cap)
    : sys_(sys), term_cap_(term_cap) {}

const std::vector<Polynomial>& SymbolicOrbit::iterate(std::size_t k) {
  while (iterates_.size() <= k) {
    if (iterates_.empty()) {
      for (const Polynomial& fi : sys_.f()) {
        if (fi.size() > term_cap_) {
          throw Error(Errc::TermBudgetExceeded, "f exceeds term budget");
        }
      }
      iterates_.push_back(sys_.f());
      continue;
    }
    const std::vector<Polynomial>& prev = iterates_.back();
    std::vector<Polynomial> next;
    next.reserve(prev.size());
    for (const Polynomial& fi : sys_.f()) next.push_back(compose(fi, prev, term_cap_));
    iterates_.push_back(std::move(next));
  }
  return iterates_[k];
}

std::vector<Polynomial> iterate_symbolic(const TriangularSystem& sys, std::size_t k,
                                         std::size_t term_cap) {
  SymbolicOrbit orbit(sys, term_cap);
  return orbit.iterate(k);
}

std::vector<double> dyndeg_estimate(const TriangularSystem& sys, std::uint64_t k_max) {
  if (k_max < 1) throw Error(Errc::InvalidArgument, "k_max must be at least 1");
  std::vector<double> out;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    double logd = std::log(degree_vector(sys, k).max().convert_to<double>());
    out.push_back(std::exp(logd / static_cast<double>(k)));
  }
  return out;
}

std::vector<double> dyndeg_estimate(const std::vector<Polynomial>& map, std::uint64_t k_max,
                                    std::size_t term_cap) {
  if (k_max < 1) throw Error(Errc::InvalidArgument, "k_max must be at least 1");
  if (map.empty() || map.front().ring().nvars() != map.size()) {
    throw Error(Errc::WidthMismatch, "polynomial map must have one component per variable");
  }
  std::vector<double> out;
  std::vector<Polynomial> iter = map;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    if (k > 1) {
      std::vector<Polynomial> next;
      for (const Polynomial& fi : map) next.push_back(compose(fi, iter, term_cap));
      iter = std::move(next);
    }
    std::int64_t deg = 0;
    for (const Polynomial& q : iter) deg = std::max(deg, q.total_degree());
    out.push_back(std::pow(static_cast<double>(deg), 1.0 / static_cast<double>(k)));
  }
  return out;
}

bool ComboReport::consistent() const {
  if (permutation) return constant;
  return !constant && predicted_degree && BigInt(degree) == *predicted_degree;
}

ComboReport combo_nonconstant_check(SymbolicOrbit& orbit, const std::vector<std::uint64_t>& a,
                                    const std::vector<std::uint64_t>& k_list,
                                    const std::vector<std::uint64_t>& l_list,
                                    std::uint64_t k_min) {
  const TriangularSystem& sys = orbit.system();
  const Field& field = sys.field();
  if (a.size() != sys.m()) {
    throw Error(Errc::InvalidArgument, "coefficient vector must have m = " +
                                           std::to_string(sys.m()) + " entries");
  }
  if (k_list.empty() || k_list.size() != l_list.size()) {
    throw Error(Errc::InvalidArgument, "index lists must be nonempty and of equal length");
  }
  for (const auto* list : {&k_list, &l_list})
    for (std::uint64_t idx : *list)
      if (idx < k_min) {
        throw Error(Errc::IndexOutOfRange, "iterate index " + std::to_string(idx) +
                                               " below floor " + std::to_string(k_min));
      }
  std::optional<std::size_t> i0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (field.reduce(a[i]) != 0) {
      i0 = i;
      break;
    }
  if (!i0) throw Error(Errc::ZeroCoefficientVector, "coefficient vector is zero mod p");

  ComboReport report;
  std::vector<std::uint64_t> ks = k_list, ls = l_list;
  std::sort(ks.begin(), ks.end());
  std::sort(ls.begin(), ls.end());
  report.permutation = ks == ls;

  if (!report.permutation) {
    std::vector<std::uint64_t> only_k, only_l;
    std::set_difference(ks.begin(), ks.end(), ls.begin(), ls.end(), std::back_inserter(only_k));
    std::set_difference(ls.begin(), ls.end(), ks.begin(), ks.end(), std::back_inserter(only_l));
    std::uint64_t top = 0;
    for (std::uint64_t x : only_k) top = std::max(top, x);
    for (std::uint64_t x : only_l) top = std::max(top, x);
    report.predicted_degree = degree_vector(sys, top).d[*i0];
  }

  Polynomial combo(sys.ring());
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t ai = field.reduce(a[i]);
    if (ai == 0) continue;
    Polynomial inner(sys.ring());
    for (std::size_t j = 0; j < k_list.size(); ++j) {
      inner = inner + orbit.iterate(k_list[j])[i];
      inner = inner - orbit.iterate(l_list[j])[i];
    }
    combo = combo + inner.scaled(ai);
  }
  report.degree = combo.total_degree();
  report.constant = combo.is_constant();
  return report;
}

}  // namespace polydyn
