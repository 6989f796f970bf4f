#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polydyn/ffield.hpp"

namespace polydyn {

// Total degree of the zero polynomial.
inline constexpr std::int64_t kNegInfDegree = std::numeric_limits<std::int64_t>::min();

inline constexpr std::size_t kUnlimitedTerms = std::numeric_limits<std::size_t>::max();

// Polynomial ring F_p[X_0, ..., X_{n-1}].
class Ring {
 public:
  Ring(Field field, std::size_t nvars) : field_(field), nvars_(nvars) {}

  const Field& field() const noexcept { return field_; }
  std::size_t nvars() const noexcept { return nvars_; }

  friend bool operator==(const Ring& a, const Ring& b) noexcept {
    return a.field_ == b.field_ && a.nvars_ == b.nvars_;
  }

 private:
  Field field_;
  std::size_t nvars_;
};

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<std::uint32_t> exponents) : exps_(std::move(exponents)) {}
  Monomial(std::initializer_list<std::uint32_t> exponents) : exps_(exponents) {}
  explicit Monomial(std::span<const std::uint32_t> exponents)
      : exps_(exponents.begin(), exponents.end()) {}

  std::size_t size() const noexcept { return exps_.size(); }
  std::uint32_t operator[](std::size_t j) const { return exps_[j]; }
  std::span<const std::uint32_t> exponents() const noexcept { return exps_; }
  std::uint64_t total_degree() const noexcept;

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<std::uint32_t> exps_;
};

struct Term {
  Monomial monomial;
  std::uint64_t coefficient;
};

// Sparse polynomial. Terms are kept sorted by exponent vector in
// lexicographically descending order, with no zero coefficients, so two
// polynomials are equal exactly when their term arrays are equal.
class Polynomial {
 public:
  explicit Polynomial(const Ring& ring) : ring_(ring) {}

  // Merges duplicate monomials and drops zero coefficients. Coefficients are
  // reduced mod p.
  static Polynomial from_terms(const Ring& ring, std::span<const Term> terms);
  static Polynomial constant(const Ring& ring, std::uint64_t c);
  static Polynomial variable(const Ring& ring, std::size_t j);
  static Polynomial monomial(const Ring& ring, const Monomial& m, std::uint64_t c = 1);

  // Parses `3*X0^2*X1 + X1 - 2`. Unknown syntax throws ParseError, a variable
  // index outside the ring throws WidthMismatch.
  static Polynomial parse(const Ring& ring, std::string_view text);

  const Ring& ring() const noexcept { return ring_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  // True for the zero polynomial and for nonzero constants.
  bool is_constant() const noexcept;

  std::span<const std::uint32_t> exponents(std::size_t t) const {
    return {exps_.data() + t * ring_.nvars(), ring_.nvars()};
  }
  std::uint64_t coefficient(std::size_t t) const { return coeffs_[t]; }
  std::uint64_t coefficient_of(const Monomial& m) const;
  std::vector<Term> terms() const;

  // kNegInfDegree for the zero polynomial.
  std::int64_t total_degree() const noexcept;
  std::uint32_t degree_in(std::size_t var) const noexcept;
  // All terms of maximal total degree. Throws ZeroPolynomial.
  std::vector<std::pair<Monomial, Element>> leading_terms() const;
  // True when no variable X_j with j < first appears.
  bool involves_only_from(std::size_t first) const noexcept;

  std::uint64_t eval(std::span<const std::uint64_t> point) const;
  Element eval(const std::vector<Element>& point) const;

  std::string to_string() const;

  Polynomial operator-() const;
  Polynomial scaled(std::uint64_t c) const;

  friend Polynomial operator+(const Polynomial& f, const Polynomial& g);
  friend Polynomial operator-(const Polynomial& f, const Polynomial& g);
  friend Polynomial operator*(const Polynomial& f, const Polynomial& g);
  friend bool operator==(const Polynomial& f, const Polynomial& g);

 private:
  friend class TermAccumulator;
  friend Polynomial mul(const Polynomial&, const Polynomial&, std::size_t);

  void check_ring(const Polynomial& other) const;
  static Polynomial merge(const Polynomial& f, const Polynomial& g, bool subtract);

  Ring ring_;
  std::vector<std::uint32_t> exps_;
  std::vector<std::uint64_t> coeffs_;
};

// Product; throws TermBudgetExceeded once the result would exceed term_cap.
Polynomial mul(const Polynomial& f, const Polynomial& g, std::size_t term_cap = kUnlimitedTerms);
Polynomial pow(const Polynomial& f, std::uint32_t e, std::size_t term_cap = kUnlimitedTerms);

// f(subs[0], ..., subs[n-1]), fully expanded. Powers of each substituted
// polynomial are computed once and shared across the terms of f.
Polynomial compose(const Polynomial& f, std::span<const Polynomial> subs,
                   std::size_t term_cap = kUnlimitedTerms);

}  // namespace polydyn
