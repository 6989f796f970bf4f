#include "polydyn/genseq.hpp"

#include <array>
#include <istream>
#include <limits>
#include <ostream>

namespace polydyn {

void check_state(const TriangularSystem& sys, const StateVector& state) {
  if (state.w.size() != sys.dim()) {
    throw Error(Errc::WidthMismatch, "state of length " + std::to_string(state.w.size()) +
                                         ", expected " + std::to_string(sys.dim()));
  }
  for (std::uint64_t x : state.w) {
    if (x >= sys.field().modulus()) {
      throw Error(Errc::InvalidArgument, "state component " + std::to_string(x) +
                                             " outside [0, p)");
    }
  }
}

Stepper::Stepper(const TriangularSystem& sys)
    : field_(sys.field()),
      m_(sys.m()),
      fast_(sys.kind() == SystemKind::Fast),
      a_(sys.a()),
      b_(sys.b()),
      shifts_(sys.fast_shifts()) {
  if (fast_) return;
  for (const Polynomial& fi : sys.f()) {
    term_begin_.push_back(static_cast<std::uint32_t>(terms_.size()));
    for (std::size_t t = 0; t < fi.size(); ++t) {
      CompiledTerm ct{fi.coefficient(t), static_cast<std::uint32_t>(factors_.size()), 0};
      auto e = fi.exponents(t);
      for (std::size_t j = 0; j < e.size(); ++j) {
        if (e[j]) {
          factors_.push_back({static_cast<std::uint32_t>(j), e[j]});
          ++ct.count;
        }
      }
      terms_.push_back(ct);
    }
  }
  term_begin_.push_back(static_cast<std::uint32_t>(terms_.size()));

  const std::uint64_t p = field_.modulus();
  tables_.resize(m_ + 1);
  std::uint64_t entries = 1;
  std::vector<std::uint64_t> w(m_ + 1, 0);
  for (std::size_t i = m_ + 1; i-- > 0;) {
    if (entries > kTableEntries / p) break;
    entries *= p;
    auto& table = tables_[i];
    table.resize(entries);
    // Enumerate (w_i, ..., w_m) in mixed-radix order.
    std::fill(w.begin(), w.end(), 0);
    for (std::uint64_t idx = 0; idx < entries; ++idx) {
      table[idx] = static_cast<std::uint32_t>(eval_terms(i, w));
      for (std::size_t j = m_ + 1; j-- > i;) {
        if (++w[j] < p) break;
        w[j] = 0;
      }
    }
  }
}

std::uint64_t Stepper::eval_terms(std::size_t i, std::span<const std::uint64_t> w) const {
  std::uint64_t sum = 0;
  for (std::uint32_t t = term_begin_[i]; t < term_begin_[i + 1]; ++t) {
    const CompiledTerm& term = terms_[t];
    std::uint64_t prod = term.coeff;
    for (std::uint32_t k = term.first; k < term.first + term.count; ++k) {
      const std::uint64_t x = w[factors_[k].var];
      const std::uint32_t e = factors_[k].exponent;
      if (e <= 4) {
        for (std::uint32_t r = 0; r < e; ++r) prod = field_.mul(prod, x);
      } else {
        prod = field_.mul(prod, field_.pow(x, e));
      }
    }
    sum = field_.add(sum, prod);
  }
  return sum;
}

// f_i involves only X_i..X_m, so ascending in-place updates read old values.
void Stepper::advance_general(std::span<std::uint64_t> w) const {
  const std::uint64_t p = field_.modulus();
  for (std::size_t i = 0; i <= m_; ++i) {
    const auto& table = tables_[i];
    if (table.empty()) {
      w[i] = eval_terms(i, w);
      continue;
    }
    std::uint64_t idx = 0;
    for (std::size_t j = i; j <= m_; ++j) idx = idx * p + w[j];
    w[i] = table[idx];
  }
}

StateVector step(const TriangularSystem& sys, const StateVector& state) {
  check_state(sys, state);
  StateVector out;
  out.w.reserve(sys.dim());
  for (const Polynomial& fi : sys.f()) out.w.push_back(fi.eval(state.w));
  return out;
}

StateVector fast_step(const TriangularSystem& sys, const StateVector& state) {
  if (sys.kind() != SystemKind::Fast) {
    throw Error(Errc::WrongSystemKind, "fast_step needs g_i = X_{i+1} and constant h_i");
  }
  check_state(sys, state);
  StateVector out = state;
  Stepper stepper(sys);
  stepper.advance(out.w);
  return out;
}

PointBuffer collect(const TriangularSystem& sys, const StateVector& w0, std::uint64_t n_points,
                    bool skip_last) {
  PointBuffer buf;
  buf.dim = skip_last ? sys.m() : sys.dim();
  buf.data.reserve(static_cast<std::size_t>(n_points) * buf.dim);
  generate(sys, w0, n_points, skip_last, [&](std::uint64_t, std::span<const std::uint64_t> u) {
    buf.data.insert(buf.data.end(), u.begin(), u.end());
  });
  return buf;
}

CycleInfo find_cycle(const TriangularSystem& sys, const StateVector& w0, std::uint64_t step_cap) {
  check_state(sys, w0);
  return find_cycle(Stepper(sys), w0, step_cap);
}

CycleInfo find_cycle(const Stepper& stepper, const StateVector& w0, std::uint64_t step_cap) {
  if (w0.w.size() != stepper.dim()) {
    throw Error(Errc::WidthMismatch, "state has " + std::to_string(w0.w.size()) +
                                         " components, expected " + std::to_string(stepper.dim()));
  }
  for (std::uint64_t x : w0.w) {
    if (x >= stepper.field().modulus()) throw Error(Errc::InvalidArgument, "state component outside [0, p)");
  }
  // brent_cycle with the states updated in place.
  std::vector<std::uint64_t> tortoise = w0.w, hare = w0.w;
  stepper.advance(hare);
  std::uint64_t power = 1, lam = 1, steps = 1;
  while (tortoise != hare) {
    if (power == lam) {
      tortoise = hare;
      power *= 2;
      lam = 0;
    }
    stepper.advance(hare);
    ++lam;
    if (++steps > step_cap) {
      throw Error(Errc::StepBudgetExceeded,
                  "cycle not found within " + std::to_string(step_cap) + " steps");
    }
  }
  tortoise = w0.w;
  hare = w0.w;
  for (std::uint64_t i = 0; i < lam; ++i) stepper.advance(hare);
  std::uint64_t mu = 0;
  while (tortoise != hare) {
    stepper.advance(tortoise);
    stepper.advance(hare);
    ++mu;
  }
  return {mu, lam};
}

StateVector advance_to_cycle(const TriangularSystem& sys, const StateVector& w0,
                             std::uint64_t step_cap) {
  CycleInfo info = find_cycle(sys, w0, step_cap);
  Stepper stepper(sys);
  StateVector w = w0;
  for (std::uint64_t i = 0; i < info.preperiod; ++i) stepper.advance(w.w);
  return w;
}

void write_points_csv(std::ostream& os, const TriangularSystem& sys, const StateVector& w0,
                      std::uint64_t n_points, bool skip_last) {
  const std::size_t width = skip_last ? sys.m() : sys.dim();
  os << "n";
  for (std::size_t j = 0; j < width; ++j) os << ",u" << j;
  os << "\n";
  std::string line;
  generate(sys, w0, n_points, skip_last, [&](std::uint64_t n, std::span<const std::uint64_t> u) {
    line = std::to_string(n);
    for (std::uint64_t x : u) {
      line += ',';
      line += std::to_string(x);
    }
    line += '\n';
    os << line;
  });
  if (!os) throw Error(Errc::Io, "failed writing CSV points");
}

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw Error(Errc::Io, "truncated binary point stream");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_points_binary(std::ostream& os, const TriangularSystem& sys, const StateVector& w0,
                         std::uint64_t n_points, bool skip_last) {
  if (n_points > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::InvalidArgument, "binary format holds at most 2^32-1 rows");
  }
  if (sys.m() > 255) throw Error(Errc::InvalidArgument, "binary format holds m <= 255");
  os.put('P');
  os.put('D');
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(sys.m()));
  put_le<std::uint8_t>(os, skip_last ? 0 : 1);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(n_points));
  put_le<std::uint64_t>(os, sys.field().modulus());
  generate(sys, w0, n_points, skip_last, [&](std::uint64_t, std::span<const std::uint64_t> u) {
    for (std::uint64_t x : u) put_le<std::uint64_t>(os, x);
  });
  if (!os) throw Error(Errc::Io, "failed writing binary points");
}

BinaryHeader read_binary_header(std::istream& is) {
  char magic[2];
  is.read(magic, 2);
  if (!is || magic[0] != 'P' || magic[1] != 'D') throw Error(Errc::Io, "bad binary point magic");
  BinaryHeader h;
  h.m = get_le<std::uint8_t>(is);
  h.full_state = (get_le<std::uint8_t>(is) & 1) != 0;
  h.n_points = get_le<std::uint32_t>(is);
  h.p = get_le<std::uint64_t>(is);
  return h;
}

PointBuffer read_points_binary(std::istream& is, BinaryHeader* header) {
  BinaryHeader h = read_binary_header(is);
  PointBuffer buf;
  buf.dim = h.width();
  buf.data.reserve(static_cast<std::size_t>(h.n_points) * buf.dim);
  for (std::size_t i = 0; i < static_cast<std::size_t>(h.n_points) * buf.dim; ++i)
    buf.data.push_back(get_le<std::uint64_t>(is));
  if (header) *header = h;
  return buf;
}

}  // namespace polydyn
