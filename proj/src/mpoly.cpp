#include "polydyn/mpoly.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>

namespace polydyn {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kEmptyKey = ~std::uint64_t{0};

int compare_rows(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] != b[j]) return a[j] < b[j] ? -1 : 1;
  }
  return 0;
}

}  // namespace

std::uint64_t Monomial::total_degree() const noexcept {
  return std::accumulate(exps_.begin(), exps_.end(), std::uint64_t{0});
}

// Collects c * X^e contributions. When the per-variable exponent bounds allow
// it, exponent vectors are packed into one 64-bit mixed-radix key whose
// numeric order matches lexicographic order, and summed in an open-addressing
// table; otherwise an ordered map keyed by the full vector is used.
class TermAccumulator {
 public:
  TermAccumulator(const Ring& ring, std::span<const std::uint64_t> bounds, std::size_t cap)
      : ring_(ring), cap_(cap) {
    const std::size_t n = ring.nvars();
    radix_.resize(n);
    stride_.resize(n);
    u128 prod = 1;
    packed_ = true;
    for (std::size_t j = n; j-- > 0;) {
      if (bounds[j] > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(Errc::ExponentOverflow,
                    "exponent of X" + std::to_string(j) + " exceeds 32 bits");
      }
      radix_[j] = bounds[j] + 1;
      stride_[j] = static_cast<std::uint64_t>(prod);
      prod *= radix_[j];
      if (prod > static_cast<u128>(kEmptyKey)) packed_ = false;
    }
    if (packed_) {
      keys_.assign(64, kEmptyKey);
      vals_.assign(64, 0);
    }
  }

  bool packed() const noexcept { return packed_; }

  std::uint64_t pack(std::span<const std::uint32_t> e) const noexcept {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < e.size(); ++j) key += e[j] * stride_[j];
    return key;
  }

  void add_packed(std::uint64_t key, std::uint64_t c) {
    std::size_t mask = keys_.size() - 1;
    std::size_t slot = hash(key) & mask;
    while (true) {
      if (keys_[slot] == key) {
        vals_[slot] = ring_.field().add(vals_[slot], c);
        return;
      }
      if (keys_[slot] == kEmptyKey) break;
      slot = (slot + 1) & mask;
    }
    keys_[slot] = key;
    vals_[slot] = c;
    ++used_;
    check_cap();
    if (2 * used_ > keys_.size()) grow();
  }

  void add(std::span<const std::uint32_t> e, std::uint64_t c) {
    if (packed_) {
      add_packed(pack(e), c);
      return;
    }
    auto [it, inserted] = slow_.try_emplace(std::vector<std::uint32_t>(e.begin(), e.end()), c);
    if (inserted) {
      ++used_;
      check_cap();
    } else {
      it->second = ring_.field().add(it->second, c);
    }
  }

  void add_scaled(const Polynomial& f, std::uint64_t c) {
    const Field& field = ring_.field();
    for (std::size_t t = 0; t < f.size(); ++t) add(f.exponents(t), field.mul(c, f.coefficient(t)));
  }

  Polynomial finish() {
    Polynomial out(ring_);
    const std::size_t n = ring_.nvars();
    if (packed_) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> entries;
      entries.reserve(used_);
      for (std::size_t s = 0; s < keys_.size(); ++s) {
        if (keys_[s] != kEmptyKey && vals_[s] != 0) entries.emplace_back(keys_[s], vals_[s]);
      }
      std::sort(entries.begin(), entries.end(), std::greater<>());
      out.exps_.resize(entries.size() * n);
      out.coeffs_.reserve(entries.size());
      for (std::size_t t = 0; t < entries.size(); ++t) {
        std::uint64_t key = entries[t].first;
        for (std::size_t j = 0; j < n; ++j) {
          out.exps_[t * n + j] = static_cast<std::uint32_t>(key / stride_[j]);
          key %= stride_[j];
        }
        out.coeffs_.push_back(entries[t].second);
      }
    } else {
      for (auto it = slow_.rbegin(); it != slow_.rend(); ++it) {
        if (it->second == 0) continue;
        out.exps_.insert(out.exps_.end(), it->first.begin(), it->first.end());
        out.coeffs_.push_back(it->second);
      }
    }
    return out;
  }

 private:
  static std::size_t hash(std::uint64_t key) noexcept {
    return static_cast<std::size_t>((key * 0x9E3779B97F4A7C15ull) >> 17);
  }

  void check_cap() const {
    if (used_ > cap_) {
      throw Error(Errc::TermBudgetExceeded,
                  "polynomial exceeds term budget of " + std::to_string(cap_));
    }
  }

  void grow() {
    std::vector<std::uint64_t> old_keys = std::move(keys_);
    std::vector<std::uint64_t> old_vals = std::move(vals_);
    keys_.assign(old_keys.size() * 2, kEmptyKey);
    vals_.assign(old_keys.size() * 2, 0);
    std::size_t mask = keys_.size() - 1;
    for (std::size_t s = 0; s < old_keys.size(); ++s) {
      if (old_keys[s] == kEmptyKey) continue;
      std::size_t slot = hash(old_keys[s]) & mask;
      while (keys_[slot] != kEmptyKey) slot = (slot + 1) & mask;
      keys_[slot] = old_keys[s];
      vals_[slot] = old_vals[s];
    }
  }

  Ring ring_;
  std::size_t cap_;
  bool packed_ = false;
  std::vector<std::uint64_t> radix_;
  std::vector<std::uint64_t> stride_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> vals_;
  std::size_t used_ = 0;
  std::map<std::vector<std::uint32_t>, std::uint64_t> slow_;
};

Polynomial Polynomial::from_terms(const Ring& ring, std::span<const Term> terms) {
  std::vector<std::uint64_t> bounds(ring.nvars(), 0);
  for (const Term& t : terms) {
    if (t.monomial.size() != ring.nvars()) {
      throw Error(Errc::WidthMismatch, "monomial of width " + std::to_string(t.monomial.size()) +
                                           " in ring of width " + std::to_string(ring.nvars()));
    }
    for (std::size_t j = 0; j < ring.nvars(); ++j)
      bounds[j] = std::max<std::uint64_t>(bounds[j], t.monomial[j]);
  }
  TermAccumulator acc(ring, bounds, kUnlimitedTerms);
  for (const Term& t : terms) acc.add(t.monomial.exponents(), ring.field().reduce(t.coefficient));
  return acc.finish();
}

Polynomial Polynomial::constant(const Ring& ring, std::uint64_t c) {
  return monomial(ring, Monomial(std::vector<std::uint32_t>(ring.nvars(), 0)), c);
}

Polynomial Polynomial::variable(const Ring& ring, std::size_t j) {
  if (j >= ring.nvars()) {
    throw Error(Errc::WidthMismatch, "variable X" + std::to_string(j) + " outside ring of width " +
                                         std::to_string(ring.nvars()));
  }
  std::vector<std::uint32_t> e(ring.nvars(), 0);
  e[j] = 1;
  return monomial(ring, Monomial(std::move(e)), 1);
}

Polynomial Polynomial::monomial(const Ring& ring, const Monomial& m, std::uint64_t c) {
  Term t{m, c};
  return from_terms(ring, std::span<const Term>(&t, 1));
}

bool Polynomial::is_constant() const noexcept { return total_degree() <= 0; }

std::uint64_t Polynomial::coefficient_of(const Monomial& m) const {
  if (m.size() != ring_.nvars()) throw Error(Errc::WidthMismatch, "monomial width mismatch");
  // Terms are sorted descending; binary search on the row index.
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    int c = compare_rows(exponents(mid), m.exponents());
    if (c == 0) return coeffs_[mid];
    if (c > 0) lo = mid + 1;
    else hi = mid;
  }
  return 0;
}

std::vector<Term> Polynomial::terms() const {
  std::vector<Term> out;
  out.reserve(size());
  for (std::size_t t = 0; t < size(); ++t) out.push_back({Monomial(exponents(t)), coeffs_[t]});
  return out;
}

std::int64_t Polynomial::total_degree() const noexcept {
  std::int64_t best = kNegInfDegree;
  const std::size_t n = ring_.nvars();
  for (std::size_t t = 0; t < size(); ++t) {
    std::int64_t d = 0;
    for (std::size_t j = 0; j < n; ++j) d += exps_[t * n + j];
    best = std::max(best, d);
  }
  return best;
}

std::uint32_t Polynomial::degree_in(std::size_t var) const noexcept {
  std::uint32_t best = 0;
  const std::size_t n = ring_.nvars();
  for (std::size_t t = 0; t < size(); ++t) best = std::max(best, exps_[t * n + var]);
  return best;
}

std::vector<std::pair<Monomial, Element>> Polynomial::leading_terms() const {
  if (is_zero()) throw Error(Errc::ZeroPolynomial, "leading terms of the zero polynomial");
  const std::int64_t deg = total_degree();
  std::vector<std::pair<Monomial, Element>> out;
  for (std::size_t t = 0; t < size(); ++t) {
    Monomial m(exponents(t));
    if (static_cast<std::int64_t>(m.total_degree()) == deg) {
      out.emplace_back(std::move(m), ring_.field().element(coeffs_[t]));
    }
  }
  return out;
}

bool Polynomial::involves_only_from(std::size_t first) const noexcept {
  for (std::size_t j = 0; j < first && j < ring_.nvars(); ++j) {
    if (degree_in(j) != 0) return false;
  }
  return true;
}

std::uint64_t Polynomial::eval(std::span<const std::uint64_t> point) const {
  const std::size_t n = ring_.nvars();
  if (point.size() != n) {
    throw Error(Errc::WidthMismatch, "evaluation point of width " + std::to_string(point.size()) +
                                         " in ring of width " + std::to_string(n));
  }
  const Field& field = ring_.field();
  std::uint64_t sum = 0;
  for (std::size_t t = 0; t < size(); ++t) {
    std::uint64_t prod = coeffs_[t];
    for (std::size_t j = 0; j < n && prod != 0; ++j) {
      std::uint32_t e = exps_[t * n + j];
      if (e == 0) continue;
      std::uint64_t x = field.reduce(point[j]);
      prod = field.mul(prod, e == 1 ? x : field.pow(x, e));
    }
    sum = field.add(sum, prod);
  }
  return sum;
}

Element Polynomial::eval(const std::vector<Element>& point) const {
  std::vector<std::uint64_t> raw;
  raw.reserve(point.size());
  for (const Element& x : point) {
    if (x.field() != ring_.field()) throw Error(Errc::FieldMismatch, "evaluation point field");
    raw.push_back(x.value());
  }
  return ring_.field().element(eval(raw));
}

std::string Polynomial::to_string() const {
  if (is_zero()) return "0";
  std::string out;
  const std::size_t n = ring_.nvars();
  for (std::size_t t = 0; t < size(); ++t) {
    if (t) out += '+';
    std::string vars;
    for (std::size_t j = 0; j < n; ++j) {
      std::uint32_t e = exps_[t * n + j];
      if (e == 0) continue;
      if (!vars.empty()) vars += '*';
      vars += 'X' + std::to_string(j);
      if (e > 1) vars += '^' + std::to_string(e);
    }
    if (vars.empty()) {
      out += std::to_string(coeffs_[t]);
    } else if (coeffs_[t] == 1) {
      out += vars;
    } else {
      out += std::to_string(coeffs_[t]) + '*' + vars;
    }
  }
  return out;
}

void Polynomial::check_ring(const Polynomial& other) const {
  if (!(ring_ == other.ring_)) throw Error(Errc::RingMismatch, "polynomials from different rings");
}

Polynomial Polynomial::operator-() const { return scaled(ring_.field().neg(1)); }

Polynomial Polynomial::scaled(std::uint64_t c) const {
  const Field& field = ring_.field();
  c = field.reduce(c);
  Polynomial out(ring_);
  if (c == 0) return out;
  out.exps_ = exps_;
  out.coeffs_.reserve(size());
  for (std::uint64_t x : coeffs_) out.coeffs_.push_back(field.mul(x, c));
  return out;
}

Polynomial Polynomial::merge(const Polynomial& f, const Polynomial& g, bool subtract) {
  f.check_ring(g);
  const Field& field = f.ring_.field();
  Polynomial out(f.ring_);
  out.exps_.reserve(f.exps_.size() + g.exps_.size());
  out.coeffs_.reserve(f.size() + g.size());
  auto emit = [&](std::span<const std::uint32_t> e, std::uint64_t c) {
    out.exps_.insert(out.exps_.end(), e.begin(), e.end());
    out.coeffs_.push_back(c);
  };
  std::size_t i = 0, k = 0;
  while (i < f.size() || k < g.size()) {
    int c;
    if (i == f.size()) c = -1;
    else if (k == g.size()) c = 1;
    else c = compare_rows(f.exponents(i), g.exponents(k));
    if (c > 0) {
      emit(f.exponents(i), f.coeffs_[i]);
      ++i;
    } else if (c < 0) {
      emit(g.exponents(k), subtract ? field.neg(g.coeffs_[k]) : g.coeffs_[k]);
      ++k;
    } else {
      std::uint64_t gc = subtract ? field.neg(g.coeffs_[k]) : g.coeffs_[k];
      std::uint64_t s = field.add(f.coeffs_[i], gc);
      if (s != 0) emit(f.exponents(i), s);
      ++i;
      ++k;
    }
  }
  return out;
}

Polynomial operator+(const Polynomial& f, const Polynomial& g) {
  return Polynomial::merge(f, g, false);
}

Polynomial operator-(const Polynomial& f, const Polynomial& g) {
  return Polynomial::merge(f, g, true);
}

Polynomial operator*(const Polynomial& f, const Polynomial& g) { return mul(f, g); }

bool operator==(const Polynomial& f, const Polynomial& g) {
  f.check_ring(g);
  return f.exps_ == g.exps_ && f.coeffs_ == g.coeffs_;
}

Polynomial mul(const Polynomial& f, const Polynomial& g, std::size_t term_cap) {
  f.check_ring(g);
  const Ring& ring = f.ring();
  if (f.is_zero() || g.is_zero()) return Polynomial(ring);
  const std::size_t n = ring.nvars();
  std::vector<std::uint64_t> bounds(n);
  for (std::size_t j = 0; j < n; ++j)
    bounds[j] = std::uint64_t{f.degree_in(j)} + g.degree_in(j);
  TermAccumulator acc(ring, bounds, term_cap);
  const Field& field = ring.field();
  if (acc.packed()) {
    std::vector<std::uint64_t> gkeys(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) gkeys[k] = acc.pack(g.exponents(k));
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::uint64_t fkey = acc.pack(f.exponents(i));
      const std::uint64_t fc = f.coefficient(i);
      for (std::size_t k = 0; k < g.size(); ++k)
        acc.add_packed(fkey + gkeys[k], field.mul(fc, g.coefficient(k)));
    }
  } else {
    std::vector<std::uint32_t> e(n);
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t k = 0; k < g.size(); ++k) {
        for (std::size_t j = 0; j < n; ++j) e[j] = f.exponents(i)[j] + g.exponents(k)[j];
        acc.add(e, field.mul(f.coefficient(i), g.coefficient(k)));
      }
    }
  }
  return acc.finish();
}

Polynomial pow(const Polynomial& f, std::uint32_t e, std::size_t term_cap) {
  Polynomial result = Polynomial::constant(f.ring(), 1);
  Polynomial base = f;
  while (e) {
    if (e & 1) result = mul(result, base, term_cap);
    e >>= 1;
    if (e) base = mul(base, base, term_cap);
  }
  return result;
}

Polynomial compose(const Polynomial& f, std::span<const Polynomial> subs, std::size_t term_cap) {
  const std::size_t n = f.ring().nvars();
  if (subs.size() != n) {
    throw Error(Errc::WidthMismatch, "compose needs " + std::to_string(n) + " substitutions, got " +
                                         std::to_string(subs.size()));
  }
  for (const Polynomial& s : subs) {
    if (!(s.ring() == f.ring())) throw Error(Errc::RingMismatch, "substitution from another ring");
  }
  const Ring& ring = f.ring();

  std::vector<std::uint64_t> bounds(n, 0);
  for (std::size_t t = 0; t < f.size(); ++t) {
    auto e = f.exponents(t);
    for (std::size_t l = 0; l < n; ++l) {
      u128 b = 0;
      for (std::size_t j = 0; j < n; ++j) b += static_cast<u128>(e[j]) * subs[j].degree_in(l);
      if (b > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(Errc::ExponentOverflow, "composition exponent exceeds 32 bits");
      }
      bounds[l] = std::max(bounds[l], static_cast<std::uint64_t>(b));
    }
  }

  // powers[j][e] = subs[j]^e, filled on demand. The tables are sized up
  // front so references into them stay valid.
  std::vector<std::vector<std::optional<Polynomial>>> powers(n);
  for (std::size_t j = 0; j < n; ++j) powers[j].resize(std::size_t{f.degree_in(j)} + 1);
  std::function<const Polynomial&(std::size_t, std::uint32_t)> power =
      [&](std::size_t j, std::uint32_t e) -> const Polynomial& {
    auto& slot = powers[j][e];
    if (!slot) {
      if (e == 1) {
        slot = subs[j];
      } else {
        const Polynomial& h = power(j, e / 2);
        Polynomial sq = mul(h, h, term_cap);
        slot = (e % 2) ? mul(sq, subs[j], term_cap) : std::move(sq);
      }
    }
    return *slot;
  };

  TermAccumulator acc(ring, bounds, term_cap);
  for (std::size_t t = 0; t < f.size(); ++t) {
    auto e = f.exponents(t);
    std::optional<Polynomial> prod;
    const Polynomial* single = nullptr;
    for (std::size_t j = 0; j < n; ++j) {
      if (e[j] == 0) continue;
      const Polynomial& pj = power(j, e[j]);
      if (!prod && !single) {
        single = &pj;
      } else {
        prod = mul(prod ? *prod : *single, pj, term_cap);
        single = nullptr;
      }
    }
    if (prod) {
      acc.add_scaled(*prod, f.coefficient(t));
    } else if (single) {
      acc.add_scaled(*single, f.coefficient(t));
    } else {
      std::vector<std::uint32_t> zero(n, 0);
      acc.add(zero, f.coefficient(t));
    }
  }
  return acc.finish();
}

// --- parsing ---------------------------------------------------------------

namespace {

class PolyParser {
 public:
  PolyParser(const Ring& ring, std::string_view text) : ring_(ring), text_(text) {}

  Polynomial parse() {
    std::vector<Term> terms;
    skip_ws();
    if (at_end()) fail("empty polynomial");
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = peek() == '-';
      ++pos_;
    }
    while (true) {
      Term t = parse_term();
      if (negate) t.coefficient = ring_.field().neg(t.coefficient);
      terms.push_back(std::move(t));
      skip_ws();
      if (at_end()) break;
      if (peek() != '+' && peek() != '-') fail("expected '+' or '-'");
      negate = peek() == '-';
      ++pos_;
    }
    return Polynomial::from_terms(ring_, terms);
  }

 private:
  Term parse_term() {
    const Field& field = ring_.field();
    std::vector<std::uint32_t> e(ring_.nvars(), 0);
    std::uint64_t coeff = 1;
    while (true) {
      skip_ws();
      if (at_end()) fail("expected factor");
      char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        coeff = field.mul(coeff, parse_residue());
      } else if (c == 'X' || c == 'x') {
        ++pos_;
        if (!at_end() && peek() == '_') ++pos_;
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
          fail("expected variable index");
        std::uint64_t j = parse_u64();
        if (j >= ring_.nvars()) {
          throw Error(Errc::WidthMismatch, "variable X" + std::to_string(j) +
                                               " outside ring of width " +
                                               std::to_string(ring_.nvars()));
        }
        std::uint64_t ex = 1;
        skip_ws();
        if (!at_end() && peek() == '^') {
          ++pos_;
          skip_ws();
          if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
            fail("expected exponent");
          ex = parse_u64();
        }
        std::uint64_t total = std::uint64_t{e[j]} + ex;
        if (total > std::numeric_limits<std::uint32_t>::max())
          throw Error(Errc::ExponentOverflow, "exponent exceeds 32 bits");
        e[j] = static_cast<std::uint32_t>(total);
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
      skip_ws();
      if (!at_end() && peek() == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    return {Monomial(std::move(e)), coeff};
  }

  std::uint64_t parse_residue() {
    const Field& field = ring_.field();
    std::uint64_t r = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      r = field.add(field.mul(r, 10 % field.modulus()), field.reduce(peek() - '0'));
      ++pos_;
    }
    return r;
  }

  std::uint64_t parse_u64() {
    u128 v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + static_cast<unsigned>(peek() - '0');
      if (v > std::numeric_limits<std::uint64_t>::max()) fail("integer too large");
      ++pos_;
    }
    return static_cast<std::uint64_t>(v);
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::ParseError, "polynomial '" + std::string(text_) + "' at column " +
                                      std::to_string(pos_ + 1) + ": " + what);
  }

  const Ring& ring_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial Polynomial::parse(const Ring& ring, std::string_view text) {
  return PolyParser(ring, text).parse();
}

}  // namespace polydyn
