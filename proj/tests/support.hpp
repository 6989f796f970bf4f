#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "polydyn/genseq.hpp"
#include "polydyn/mpoly.hpp"
#include "polydyn/trisys.hpp"

namespace testsupport {

using polydyn::Field;
using polydyn::Monomial;
using polydyn::Polynomial;
using polydyn::Ring;
using polydyn::Term;
using polydyn::TriangularSystem;

using Rng = std::mt19937_64;

inline std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

// Random exponent vector on variables [first, nvars) with total degree <= max_deg.
inline Monomial random_monomial(Rng& rng, std::size_t nvars, std::size_t first,
                                std::uint32_t max_deg) {
  std::vector<std::uint32_t> e(nvars, 0);
  if (first >= nvars) return Monomial(e);
  std::uint32_t budget = static_cast<std::uint32_t>(uniform(rng, 0, max_deg));
  while (budget > 0) {
    e[uniform(rng, first, nvars - 1)] += 1;
    --budget;
  }
  return Monomial(e);
}

struct SystemShape {
  std::uint32_t s_max = 3;
  bool superdiagonal_positive = false;  // s_{i,i+1} >= 1
  std::size_t max_tail_terms = 2;
  std::size_t max_h_terms = 2;
};

// Valid triangular system with leading exponents in [0, s_max]; g_i gets a
// monic leading monomial plus strictly lower-degree tail terms, h_i terms of
// degree <= deg g_i.
inline TriangularSystem random_system(Rng& rng, const Field& field, std::size_t m,
                                      const SystemShape& shape = {}) {
  const std::size_t n = m + 1;
  Ring ring(field, n);
  const std::uint64_t p = field.modulus();
  std::vector<Polynomial> g, h;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::uint32_t> lead(n, 0);
    std::uint32_t deg = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      std::uint32_t lo = (shape.superdiagonal_positive && j == i + 1) ? 1 : 0;
      lead[j] = static_cast<std::uint32_t>(uniform(rng, lo, shape.s_max));
      deg += lead[j];
    }
    Polynomial gi = Polynomial::monomial(ring, Monomial(lead), 1);
    if (deg > 0) {
      std::size_t tails = uniform(rng, 0, shape.max_tail_terms);
      for (std::size_t t = 0; t < tails; ++t) {
        gi = gi + Polynomial::monomial(ring, random_monomial(rng, n, i + 1, deg - 1),
                                       uniform(rng, 1, p - 1));
      }
    }
    Polynomial hi(ring);
    std::size_t hs = uniform(rng, 0, shape.max_h_terms);
    for (std::size_t t = 0; t < hs; ++t) {
      hi = hi + Polynomial::monomial(ring, random_monomial(rng, n, i + 1, deg),
                                     uniform(rng, 0, p - 1));
    }
    g.push_back(gi);
    h.push_back(hi);
  }
  return TriangularSystem::build(field, m, g, h, uniform(rng, 1, p - 1), uniform(rng, 0, p - 1));
}

// Random nonconstant polynomial of total degree <= max_deg in nvars variables.
inline Polynomial random_nonconstant(Rng& rng, const Ring& ring, std::uint32_t max_deg,
                                     std::size_t max_terms = 4) {
  const std::uint64_t p = ring.field().modulus();
  while (true) {
    Polynomial f(ring);
    std::size_t terms = uniform(rng, 1, max_terms);
    for (std::size_t t = 0; t < terms; ++t) {
      f = f + Polynomial::monomial(ring, random_monomial(rng, ring.nvars(), 0, max_deg),
                                   uniform(rng, 1, p - 1));
    }
    if (!f.is_constant()) return f;
  }
}

// Mixed-radix index of a state in [0, p^{m+1}).
inline std::uint64_t encode(std::span<const std::uint64_t> w, std::uint64_t p) {
  std::uint64_t x = 0;
  for (std::uint64_t c : w) x = x * p + c;
  return x;
}

inline std::vector<std::uint64_t> decode(std::uint64_t x, std::size_t dim, std::uint64_t p) {
  std::vector<std::uint64_t> w(dim);
  for (std::size_t j = dim; j-- > 0;) {
    w[j] = x % p;
    x /= p;
  }
  return w;
}

// Successor table of the full state space, using poly evaluation of f.
inline std::vector<std::uint32_t> successor_table(const TriangularSystem& sys) {
  const std::uint64_t p = sys.field().modulus();
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < sys.dim(); ++j) total *= p;
  std::vector<std::uint32_t> next(total);
  for (std::uint64_t x = 0; x < total; ++x) {
    auto w = decode(x, sys.dim(), p);
    std::vector<std::uint64_t> out;
    for (const auto& f : sys.f()) out.push_back(f.eval(w));
    next[x] = static_cast<std::uint32_t>(encode(out, p));
  }
  return next;
}

// (lambda, T) for every start state from the functional graph: walk each
// start until a visited state, recording first-visit times.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> orbit_table(
    const std::vector<std::uint32_t>& next) {
  const std::size_t n = next.size();
  constexpr std::uint64_t kUnset = ~std::uint64_t{0};
  std::vector<std::uint64_t> lam(n, kUnset), per(n, kUnset);
  std::vector<std::uint64_t> seen_at(n, kUnset);
  std::vector<std::uint32_t> path;
  for (std::size_t s = 0; s < n; ++s) {
    if (lam[s] != kUnset) continue;
    path.clear();
    std::uint32_t x = static_cast<std::uint32_t>(s);
    while (lam[x] == kUnset && seen_at[x] == kUnset) {
      seen_at[x] = path.size();
      path.push_back(x);
      x = next[x];
    }
    std::size_t tail_end = path.size();
    if (lam[x] == kUnset) {
      // Closed a new cycle starting at path[seen_at[x]].
      std::size_t c0 = seen_at[x];
      std::uint64_t T = path.size() - c0;
      for (std::size_t i = c0; i < path.size(); ++i) {
        lam[path[i]] = 0;
        per[path[i]] = T;
      }
      tail_end = c0;
    }
    for (std::size_t i = tail_end; i-- > 0;) {
      std::uint32_t y = path[i], z = next[y];
      lam[y] = lam[z] + 1;
      per[y] = per[z];
    }
    for (std::uint32_t y : path) seen_at[y] = kUnset;
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out(n);
  for (std::size_t s = 0; s < n; ++s) out[s] = {lam[s], per[s]};
  return out;
}

// D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N) over the sorted sample.
inline double star_1d_oracle(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double k = static_cast<double>(i + 1);
    best = std::max({best, k / n - x[i], x[i] - (k - 1) / n});
  }
  return best;
}

// D_N = 1/N + max_i (i/N - x_(i)) - min_i (i/N - x_(i)).
inline double extreme_1d_oracle(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double hi = -1e300, lo = 1e300;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = static_cast<double>(i + 1) / n - x[i];
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  return 1.0 / n + hi - lo;
}

}  // namespace testsupport
