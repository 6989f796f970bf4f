#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "polydyn/genseq.hpp"
#include "polydyn/trisys.hpp"

namespace polydyn {

using Complex = std::complex<double>;

inline constexpr std::uint64_t kDefaultEnumCap = 10'000'000;

struct CharacterSum {
  Complex value;
  std::uint64_t n_terms = 0;
  std::vector<std::int64_t> a;

  double abs() const { return std::abs(value); }
};

// alpha = (2m^2 + 2m nu + 2m + nu) / (4 nu (m + nu)), beta = 1 / (2 nu).
struct BoundEnvelope {
  std::uint64_t m = 1;
  std::uint64_t nu = 1;

  BoundEnvelope(std::uint64_t m_, std::uint64_t nu_);

  Rational alpha() const;
  Rational beta() const;
  // Limit of alpha / beta as nu grows: m + 1/2.
  static Rational threshold_exponent(std::uint64_t m);
  // Exponent of N in the nu = 1 bound for large N: 1 - 1/(4(m+1)^2).
  static Rational large_n_exponent(std::uint64_t m);
};

// exp(2 pi i z / p) from the reduced residue.
Complex e_char(const Field& field, std::uint64_t z);
Complex e_char(const Element& z);

// e_char with a precomputed table for p <= kTableLimit, direct evaluation
// otherwise.
class CharacterTable {
 public:
  static constexpr std::uint64_t kTableLimit = std::uint64_t{1} << 22;

  explicit CharacterTable(const Field& field);

  Complex operator()(std::uint64_t z) const {
    return table_.empty() ? e_char(field_, z) : table_[z];
  }
  const Field& field() const noexcept { return field_; }

 private:
  Field field_;
  std::vector<Complex> table_;
};

// Reduces integer coefficients mod p; throws ZeroCoefficientVector when all
// vanish mod p.
std::vector<std::uint64_t> reduce_coefficients(const Field& field, std::span<const std::int64_t> a);

// sum_{n<N} e(a . u_n) over the first N rows, accumulated with Neumaier
// compensated summation. N defaults to every row; N > rows throws
// InvalidArgument.
CharacterSum exp_sum(const Field& field, const PointBuffer& stream, std::span<const std::int64_t> a,
                     std::uint64_t n_terms);
CharacterSum exp_sum(const Field& field, const PointBuffer& stream, std::span<const std::int64_t> a);
CharacterSum exp_sum(const CharacterTable& chi, const PointBuffer& stream,
                     std::span<const std::int64_t> a, std::uint64_t n_terms);

// Same sum computed from the histogram of the linear form's residues.
CharacterSum exp_sum_histogram(const Field& field, const PointBuffer& stream,
                               std::span<const std::int64_t> a, std::uint64_t n_terms);

// All a in [-L, L]^m with a != 0 mod p, in lexicographic order.
std::vector<std::vector<std::int64_t>> coefficient_box(const Field& field, std::size_t m,
                                                       std::uint64_t L);

struct ExpSumMaxReport {
  std::vector<CharacterSum> sums;
  std::size_t argmax = 0;
  double max_abs = 0.0;
};

ExpSumMaxReport exp_sum_max(const Field& field, const PointBuffer& stream, std::uint64_t n_terms,
                            const std::vector<std::vector<std::int64_t>>& coeffs);
// Generates N points from w0 (callers pass a purely periodic start) and scans
// the coefficient vectors on the buffered stream.
ExpSumMaxReport exp_sum_max(const TriangularSystem& sys, const StateVector& w0,
                            std::uint64_t n_terms,
                            const std::vector<std::vector<std::int64_t>>& coeffs);

struct WeilResult {
  Complex sum;
  double abs = 0.0;
  double bound = 0.0;  // D p^{vars - 1/2}
  bool bound_ok = false;
  std::int64_t degree = 0;
  std::uint64_t points = 0;
};

// Full sum of e(F(x)) over F_p^vars. Throws ConstantPolynomial and
// EnumerationCapExceeded (p^vars > enum_cap).
WeilResult weil_bruteforce(const Field& field, const Polynomial& f,
                           std::uint64_t enum_cap = kDefaultEnumCap);

// p^alpha N^{1 - beta}; the implied constant is omitted.
double expsum_envelope(const BoundEnvelope& env, std::uint64_t p, std::uint64_t n);

// Rows `a0,...,a{m-1},N,re,im,abs,envelope_nu<k>...` for each sum.
void write_expsum_csv(std::ostream& os, std::size_t m, std::uint64_t p,
                      const std::vector<CharacterSum>& sums, const std::vector<std::uint64_t>& nus);

}  // namespace polydyn
