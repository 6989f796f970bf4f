#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "polydyn/ffield.hpp"
#include "polydyn/mpoly.hpp"

namespace polydyn {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kDefaultTermCap = 1'000'000;

// Upper unitriangular matrix of leading-monomial exponents: row i holds the
// exponents of g_i's leading monomial in columns i+1..m.
class ExponentMatrix {
 public:
  explicit ExponentMatrix(std::size_t dim) : dim_(dim), s_(dim * dim, 0) {
    for (std::size_t i = 0; i < dim; ++i) s_[i * dim + i] = 1;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::uint32_t operator()(std::size_t i, std::size_t j) const { return s_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, std::uint32_t v) { s_[i * dim_ + j] = v; }

  friend bool operator==(const ExponentMatrix&, const ExponentMatrix&) = default;

 private:
  std::size_t dim_;
  std::vector<std::uint32_t> s_;
};

enum class SystemKind {
  General,
  // g_i = X_{i+1}, h_i constant: one multiplication per component per step.
  Fast,
};

// The family f_i = X_i g_i(X_{i+1..m}) + h_i(X_{i+1..m}) for i < m and
// f_m = a X_m + b over F_p, validated at construction.
class TriangularSystem {
 public:
  // Checks, in order and across all i before moving on: variable scope,
  // unique leading monomial of g_i, monic leading coefficient,
  // deg h_i <= deg g_i, a != 0, p > m. The first failure is thrown.
  static TriangularSystem build(const Field& field, std::size_t m, std::vector<Polynomial> g,
                                std::vector<Polynomial> h, std::uint64_t a, std::uint64_t b);

  // g_i = X_{i+1}, h_i = shifts[i].
  static TriangularSystem fast(const Field& field, std::size_t m,
                               const std::vector<std::uint64_t>& shifts, std::uint64_t a,
                               std::uint64_t b);

  const Field& field() const noexcept { return ring_.field(); }
  const Ring& ring() const noexcept { return ring_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_ + 1; }

  const std::vector<Polynomial>& f() const noexcept { return f_; }
  const std::vector<Polynomial>& g() const noexcept { return g_; }
  const std::vector<Polynomial>& h() const noexcept { return h_; }
  std::uint64_t a() const noexcept { return a_; }
  std::uint64_t b() const noexcept { return b_; }
  const ExponentMatrix& exponents() const noexcept { return s_; }

  SystemKind kind() const noexcept { return kind_; }
  // Constants h_i of a fast system; empty otherwise.
  const std::vector<std::uint64_t>& fast_shifts() const noexcept { return shifts_; }

  // Key-value text that parses back to the same system.
  std::string to_config() const;

 private:
  TriangularSystem(Ring ring, std::size_t m) : ring_(std::move(ring)), m_(m), s_(m + 1) {}

  Ring ring_;
  std::size_t m_;
  std::vector<Polynomial> g_, h_, f_;
  std::uint64_t a_ = 1, b_ = 0;
  ExponentMatrix s_;
  SystemKind kind_ = SystemKind::General;
  std::vector<std::uint64_t> shifts_;
};

// Degrees of the k-th iterates f_i^{(k)}, where f^{(0)} = f.
struct DegreeVector {
  std::uint64_t k = 0;
  std::vector<BigInt> d;

  BigInt max() const;
};

// Exact S^{k+1} (1, ..., 1)^t by binary powering of S.
DegreeVector degree_vector(const TriangularSystem& sys, std::uint64_t k);

struct LeadingTerm {
  Rational coefficient;
  unsigned exponent = 0;

  Rational at(std::uint64_t k) const;
};

// c k^e with c = s_{i,i+1} ... s_{m-1,m} / (m-i)! and e = m - i: the
// dominant term of d_{k,i} in k. Throws IndexOutOfRange for i >= m.
LeadingTerm predicted_leading(const TriangularSystem& sys, std::size_t i);

// Coefficients c_0..c_{n-1} (ascending powers of k) of the unique polynomial
// of degree < n through (k, d_{k,i}) for k = k_first .. k_first + n - 1.
std::vector<Rational> interpolate_degrees(const TriangularSystem& sys, std::size_t i,
                                          std::uint64_t k_first, std::size_t n);

// Degree bound that tracks every monomial of g_i and h_i rather than only the
// leading one: each monomial X^e contributes e . d_{k-1}. Always an upper bound
// on the true degrees.
DegreeVector degree_upper_bound(const TriangularSystem& sys, std::uint64_t k);

// The matrix degrees are exact for iterates 0..k when, at every step, g_i's
// leading monomial strictly outweighs its other monomials under the previous
// degree vector, and every monomial of h_i stays below X_i g_i. Returns the
// first iterate index where that fails, or nullopt if it holds through k.
std::optional<std::uint64_t> first_undominated_iterate(const TriangularSystem& sys,
                                                       std::uint64_t k);

// Lazily computed iterates f^{(0)}, f^{(1)}, ... with f_i^{(k)} = f_i(f^{(k-1)}).
class SymbolicOrbit {
 public:
  explicit SymbolicOrbit(const TriangularSystem& sys, std::size_t term_cap = kDefaultTermCap);

  // Throws TermBudgetExceeded if any component would exceed the term cap.
  const std::vector<Polynomial>& iterate(std::size_t k);
  std::size_t computed() const noexcept { return iterates_.size(); }
  std::size_t term_cap() const noexcept { return term_cap_; }
  const TriangularSystem& system() const noexcept { return sys_; }

 private:
  TriangularSystem sys_;
  std::size_t term_cap_;
  std::vector<std::vector<Polynomial>> iterates_;
};

std::vector<Polynomial> iterate_symbolic(const TriangularSystem& sys, std::size_t k,
                                         std::size_t term_cap = kDefaultTermCap);

// (max_i d_{k,i})^{1/k} for k = 1..k_max, from exact degree vectors.
std::vector<double> dyndeg_estimate(const TriangularSystem& sys, std::uint64_t k_max);

// (deg F^{(k)})^{1/k} for k = 1..k_max where F^{(k)} is the k-fold composition
// of an arbitrary polynomial map, computed symbolically.
std::vector<double> dyndeg_estimate(const std::vector<Polynomial>& map, std::uint64_t k_max,
                                    std::size_t term_cap = kDefaultTermCap);

struct ComboReport {
  // The combination sum_i a_i sum_j (f_i^{(k_j)} - f_i^{(l_j)}) is constant.
  bool constant = false;
  std::int64_t degree = kNegInfDegree;
  // The index lists are permutations of each other.
  bool permutation = false;
  // d_{k,i0} for the largest index k surviving cancellation and the smallest
  // i0 with a_{i0} != 0; absent when the lists are permutations.
  std::optional<BigInt> predicted_degree;

  // constant exactly for permutations, and the predicted degree otherwise.
  bool consistent() const;
};

// Indices below k_min throw IndexOutOfRange; a zero vector throws
// ZeroCoefficientVector.
ComboReport combo_nonconstant_check(SymbolicOrbit& orbit, const std::vector<std::uint64_t>& a,
                                    const std::vector<std::uint64_t>& k_list,
                                    const std::vector<std::uint64_t>& l_list,
                                    std::uint64_t k_min = 1);

}  // namespace polydyn
