#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "polydyn/trisys.hpp"

namespace polydyn {

inline constexpr std::uint64_t kDefaultStepCap = 100'000'000;

// w_n = (u_{n,0}, ..., u_{n,m}).
struct StateVector {
  std::vector<std::uint64_t> w;

  friend bool operator==(const StateVector&, const StateVector&) = default;
};

// Throws WidthMismatch for the wrong length and InvalidArgument for
// components outside [0, p).
void check_state(const TriangularSystem& sys, const StateVector& state);

// Precompiled evaluator for w -> F(w). Uses the one-multiplication-per-
// component update for fast systems and generic term evaluation otherwise.
class Stepper {
 public:
  // Components whose value table over (w_i, ..., w_m) has at most this many
  // entries are evaluated by lookup.
  static constexpr std::uint64_t kTableEntries = std::uint64_t{1} << 16;

  explicit Stepper(const TriangularSystem& sys);

  // In-place update; w.size() must be m + 1 and already validated.
  void advance(std::span<std::uint64_t> w) const {
    if (!fast_) {
      advance_general(w);
      return;
    }
    // Ascending i reads w_{i+1} before it is overwritten.
    for (std::size_t i = 0; i < m_; ++i) w[i] = field_.add(field_.mul(w[i], w[i + 1]), shifts_[i]);
    w[m_] = field_.add(field_.mul(a_, w[m_]), b_);
  }

  const Field& field() const noexcept { return field_; }
  std::size_t dim() const noexcept { return m_ + 1; }

 private:
  struct Factor {
    std::uint32_t var;
    std::uint32_t exponent;
  };
  struct CompiledTerm {
    std::uint64_t coeff;
    std::uint32_t first;  // into factors_
    std::uint32_t count;
  };

  std::uint64_t eval_terms(std::size_t i, std::span<const std::uint64_t> w) const;
  void advance_general(std::span<std::uint64_t> w) const;

  Field field_;
  std::size_t m_;
  bool fast_;
  std::uint64_t a_, b_;
  std::vector<std::uint64_t> shifts_;
  std::vector<CompiledTerm> terms_;
  std::vector<std::uint32_t> term_begin_;  // terms of f_i are [term_begin_[i], term_begin_[i+1])
  std::vector<Factor> factors_;
  // tables_[i] holds f_i indexed by w_i p^{m-i} + ... + w_m, or is empty.
  std::vector<std::vector<std::uint32_t>> tables_;
};

StateVector step(const TriangularSystem& sys, const StateVector& state);

// w'_i = w_i w_{i+1} + c_i, w'_m = a w_m + b. Throws WrongSystemKind unless
// the system is a fast one.
StateVector fast_step(const TriangularSystem& sys, const StateVector& state);

// Streams u_0, ..., u_{N-1} to sink(n, row). Rows hold the first m
// coordinates when skip_last is set, the full state otherwise.
template <class Sink>
void generate(const TriangularSystem& sys, const StateVector& w0, std::uint64_t n_points,
              bool skip_last, Sink&& sink) {
  check_state(sys, w0);
  Stepper stepper(sys);
  std::vector<std::uint64_t> w = w0.w;
  const std::size_t width = skip_last ? sys.m() : sys.dim();
  for (std::uint64_t n = 0; n < n_points; ++n) {
    if (n) stepper.advance(w);
    sink(n, std::span<const std::uint64_t>(w.data(), width));
  }
}

// Row-major block of emitted vectors.
struct PointBuffer {
  std::size_t dim = 0;
  std::vector<std::uint64_t> data;

  std::size_t size() const noexcept { return dim ? data.size() / dim : 0; }
  std::span<const std::uint64_t> row(std::size_t n) const { return {data.data() + n * dim, dim}; }
};

PointBuffer collect(const TriangularSystem& sys, const StateVector& w0, std::uint64_t n_points,
                    bool skip_last = true);

struct CycleInfo {
  std::uint64_t preperiod = 0;  // lambda
  std::uint64_t period = 1;     // T

  friend bool operator==(const CycleInfo&, const CycleInfo&) = default;
};

// Brent's cycle detection followed by the two-cursor pass that recovers the
// minimal pre-period. step_cap bounds the map evaluations of the search phase.
template <class State, class StepFn>
CycleInfo brent_cycle(const State& x0, StepFn&& next, std::uint64_t step_cap) {
  auto budget_error = [&] {
    return Error(Errc::StepBudgetExceeded,
                 "cycle not found within " + std::to_string(step_cap) + " steps");
  };
  std::uint64_t power = 1, lam = 1, steps = 1;
  State tortoise = x0;
  State hare = next(x0);
  while (!(tortoise == hare)) {
    if (power == lam) {
      tortoise = hare;
      power *= 2;
      lam = 0;
    }
    hare = next(hare);
    ++lam;
    if (++steps > step_cap) throw budget_error();
  }
  tortoise = x0;
  hare = x0;
  for (std::uint64_t i = 0; i < lam; ++i) hare = next(hare);
  std::uint64_t mu = 0;
  while (!(tortoise == hare)) {
    tortoise = next(tortoise);
    hare = next(hare);
    ++mu;
  }
  return {mu, lam};
}

CycleInfo find_cycle(const TriangularSystem& sys, const StateVector& w0,
                     std::uint64_t step_cap = kDefaultStepCap);
// Same with a prepared stepper, for many seeds of one system.
CycleInfo find_cycle(const Stepper& stepper, const StateVector& w0,
                     std::uint64_t step_cap = kDefaultStepCap);

// w_lambda: the first state from which the orbit is purely periodic.
StateVector advance_to_cycle(const TriangularSystem& sys, const StateVector& w0,
                             std::uint64_t step_cap = kDefaultStepCap);

// CSV rows `n,u0,...` with a header line.
void write_points_csv(std::ostream& os, const TriangularSystem& sys, const StateVector& w0,
                      std::uint64_t n_points, bool skip_last = true);

// 16-byte little-endian header followed by row-major 64-bit residues:
//   [0,2) magic "PD", [2] m, [3] flags (bit 0: rows carry the full state),
//   [4,8) N as u32, [8,16) p as u64.
struct BinaryHeader {
  std::uint64_t p = 0;
  std::uint32_t m = 0;
  std::uint32_t n_points = 0;
  bool full_state = false;

  std::size_t width() const noexcept { return full_state ? m + 1 : m; }
};

void write_points_binary(std::ostream& os, const TriangularSystem& sys, const StateVector& w0,
                         std::uint64_t n_points, bool skip_last = true);
BinaryHeader read_binary_header(std::istream& is);
PointBuffer read_points_binary(std::istream& is, BinaryHeader* header = nullptr);

}  // namespace polydyn
