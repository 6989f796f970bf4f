#pragma once

#include <cstdint>
#include <iosfwd>

#include "polydyn/error.hpp"

namespace polydyn {

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime_u64(std::uint64_t n) noexcept;

class Element;

// Prime field F_p with 2 < p < 2^62. Raw residues are plain uint64_t in
// [0, p); the hot paths in mpoly/genseq work on those directly.
class Field {
 public:
  static constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 62;

  explicit Field(std::uint64_t p);

  std::uint64_t modulus() const noexcept { return p_; }

  std::uint64_t reduce(std::uint64_t x) const noexcept { return x % p_; }
  // Reduces a signed integer to its canonical representative.
  std::uint64_t reduce_signed(std::int64_t x) const noexcept;

  std::uint64_t add(std::uint64_t x, std::uint64_t y) const noexcept {
    std::uint64_t s = x + y;  // x, y < 2^62, no wrap
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t x, std::uint64_t y) const noexcept {
    return x >= y ? x - y : x + p_ - y;
  }
  std::uint64_t neg(std::uint64_t x) const noexcept { return x == 0 ? 0 : p_ - x; }
  std::uint64_t mul(std::uint64_t x, std::uint64_t y) const noexcept {
    if (barrett_) {
      // p < 2^32: Barrett reduction of the 64-bit product, one correction step.
      std::uint64_t t = x * y;
      std::uint64_t q = static_cast<std::uint64_t>((static_cast<unsigned __int128>(t) * barrett_) >> 64);
      std::uint64_t r = t - q * p_;
      return r >= p_ ? r - p_ : r;
    }
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * y % p_);
  }
  std::uint64_t pow(std::uint64_t x, std::uint64_t e) const noexcept;
  // Throws DivisionByZero for x == 0.
  std::uint64_t inv(std::uint64_t x) const;

  Element element(std::uint64_t value) const noexcept;
  Element zero() const noexcept;
  Element one() const noexcept;

  friend bool operator==(const Field& a, const Field& b) noexcept { return a.p_ == b.p_; }

 private:
  std::uint64_t p_;
  std::uint64_t barrett_ = 0;  // floor((2^64 - 1) / p) when p < 2^32
};

// A residue tagged with its modulus. Two elements belong to the same field
// exactly when their moduli agree.
class Element {
 public:
  Element(const Field& field, std::uint64_t value) noexcept
      : value_(field.reduce(value)), p_(field.modulus()) {}

  std::uint64_t value() const noexcept { return value_; }
  Field field() const { return Field(p_); }
  bool is_zero() const noexcept { return value_ == 0; }

  friend Element operator+(const Element& x, const Element& y);
  friend Element operator-(const Element& x, const Element& y);
  friend Element operator*(const Element& x, const Element& y);
  friend Element operator/(const Element& x, const Element& y);
  Element operator-() const;

  Element inv() const;
  Element pow(std::uint64_t e) const;

  // Raw equality; throws FieldMismatch across fields.
  friend bool operator==(const Element& x, const Element& y);

 private:
  Element(std::uint64_t value, std::uint64_t p, int) noexcept : value_(value), p_(p) {}
  std::uint64_t check_same(const Element& other) const;

  std::uint64_t value_;
  std::uint64_t p_;
};

std::ostream& operator<<(std::ostream& os, const Element& x);

}  // namespace polydyn
