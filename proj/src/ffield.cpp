#include "polydyn/ffield.hpp"

#include <array>
#include <ostream>
#include <string>

namespace polydyn {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % n);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t n) {
  std::uint64_t r = 1 % n;
  a %= n;
  while (e) {
    if (e & 1) r = mulmod(r, a, n);
    a = mulmod(a, a, n);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) noexcept {
  if (n < 2) return false;
  static constexpr std::array<std::uint64_t, 12> kWitnesses = {2, 3, 5, 7, 11, 13,
                                                               17, 19, 23, 29, 31, 37};
  for (std::uint64_t q : kWitnesses) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kWitnesses) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Field::Field(std::uint64_t p) : p_(p) {
  if (p >= kMaxModulus) {
    throw Error(Errc::TooLarge, "modulus " + std::to_string(p) + " is not below 2^62");
  }
  if (p < 3 || !is_prime_u64(p)) {
    throw Error(Errc::NotPrime, "modulus " + std::to_string(p) + " is not an odd prime");
  }
  if (p <= 0xffffffffULL) barrett_ = ~std::uint64_t{0} / p;
}

std::uint64_t Field::reduce_signed(std::int64_t x) const noexcept {
  std::int64_t r = x % static_cast<std::int64_t>(p_);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(p_) : r);
}

std::uint64_t Field::pow(std::uint64_t x, std::uint64_t e) const noexcept {
  return powmod(x, e, p_);
}

std::uint64_t Field::inv(std::uint64_t x) const {
  if (x % p_ == 0) throw Error(Errc::DivisionByZero, "inverse of zero");
  return powmod(x, p_ - 2, p_);
}

Element Field::element(std::uint64_t value) const noexcept { return Element(*this, value); }
Element Field::zero() const noexcept { return Element(*this, 0); }
Element Field::one() const noexcept { return Element(*this, 1); }

std::uint64_t Element::check_same(const Element& other) const {
  if (p_ != other.p_) {
    throw Error(Errc::FieldMismatch, "elements of F_" + std::to_string(p_) + " and F_" +
                                         std::to_string(other.p_) + " mixed");
  }
  return p_;
}

Element operator+(const Element& x, const Element& y) {
  std::uint64_t p = x.check_same(y);
  std::uint64_t s = x.value_ + y.value_;
  return Element(s >= p ? s - p : s, p, 0);
}

Element operator-(const Element& x, const Element& y) {
  std::uint64_t p = x.check_same(y);
  return Element(x.value_ >= y.value_ ? x.value_ - y.value_ : x.value_ + p - y.value_, p, 0);
}

Element operator*(const Element& x, const Element& y) {
  std::uint64_t p = x.check_same(y);
  return Element(mulmod(x.value_, y.value_, p), p, 0);
}

Element operator/(const Element& x, const Element& y) { return x * y.inv(); }

Element Element::operator-() const { return Element(value_ == 0 ? 0 : p_ - value_, p_, 0); }

Element Element::inv() const {
  if (value_ == 0) throw Error(Errc::DivisionByZero, "inverse of zero");
  return Element(powmod(value_, p_ - 2, p_), p_, 0);
}

Element Element::pow(std::uint64_t e) const { return Element(powmod(value_, e, p_), p_, 0); }

bool operator==(const Element& x, const Element& y) {
  x.check_same(y);
  return x.value_ == y.value_;
}

std::ostream& operator<<(std::ostream& os, const Element& x) { return os << x.value(); }

}  // namespace polydyn
