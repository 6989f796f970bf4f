#include "polydyn/discrep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

namespace polydyn {

namespace {

void check_nonempty(const PointSet& points) {
  if (points.dim == 0 || points.size() == 0) {
    throw Error(Errc::InvalidArgument, "discrepancy needs a nonempty point set");
  }
}

// Saturating product for work estimates.
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

void check_work(std::uint64_t work, std::uint64_t cap, const char* what) {
  if (work > cap) {
    throw Error(Errc::CapExceeded, std::string(what) + " needs ~" + std::to_string(work) +
                                       " operations, cap is " + std::to_string(cap));
  }
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Max over closed intervals [y_i, y_j] of count/N - w (y_j - y_i); ys ascending.
double closed_sweep(const std::vector<double>& ys, double w, double n) {
  double best = 0.0, min_b = 0.0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    double b = static_cast<double>(j) / n - w * ys[j];
    if (j == 0 || b < min_b) min_b = b;
    best = std::max(best, static_cast<double>(j + 1) / n - w * ys[j] - min_b);
  }
  return best;
}

// Max over open intervals (alpha, beta), alpha in {0} u ys, beta in ys u {1},
// of w (beta - alpha) - #{alpha < y < beta}/N; ys ascending.
double open_sweep(const std::vector<double>& ys, double w, double n) {
  std::size_t k = ys.size();
  std::size_t zeros = 0;
  while (zeros < k && ys[zeros] <= 0.0) ++zeros;
  // best = max over admissible alpha of le(alpha)/N - w alpha.
  double best = static_cast<double>(zeros) / n;
  double out = 0.0;
  for (std::size_t i = zeros; i < k;) {
    std::size_t j = i;
    while (j < k && ys[j] == ys[i]) ++j;
    out = std::max(out, w * ys[i] - static_cast<double>(i) / n + best);
    best = std::max(best, static_cast<double>(j) / n - w * ys[i]);
    i = j;
  }
  return std::max(out, w - static_cast<double>(k) / n + best);
}

// sum over the lexicographically positive half of the coefficient box of
// 2 prod 1/(|a_j|+1) |S_a|; S_{-a} is the conjugate of S_a.
template <class InnerSum>
double weighted_box_sum(std::size_t m, std::int64_t L, InnerSum&& inner) {
  double total = 0.0;
  std::vector<std::int64_t> prefix(m - 1, -L);
  while (true) {
    auto first_nz = std::find_if(prefix.begin(), prefix.end(), [](std::int64_t x) { return x; });
    bool zero = first_nz == prefix.end();
    if (zero || *first_nz > 0) {
      double w = 1.0;
      for (std::int64_t x : prefix) w /= static_cast<double>(std::llabs(x) + 1);
      std::int64_t lo = zero ? 1 : -L;
      std::vector<double> mags = inner(prefix, lo, L);
      for (std::int64_t t = lo; t <= L; ++t) {
        total += 2.0 * w / static_cast<double>(std::llabs(t) + 1) * mags[t - lo];
      }
    }
    std::size_t j = prefix.size();
    while (j > 0 && prefix[j - 1] == L) prefix[--j] = -L;
    if (j == 0) break;
    ++prefix[j - 1];
  }
  return total;
}

std::uint64_t half_box_size(std::size_t m, std::uint64_t L) {
  std::uint64_t full = 1;
  for (std::size_t j = 0; j < m; ++j) full = sat_mul(full, 2 * L + 1);
  return full / 2;
}

}  // namespace

PointSet scale_points(const PointBuffer& stream, std::uint64_t p) {
  PointSet out;
  out.dim = stream.dim;
  out.coords.reserve(stream.data.size());
  const double dp = static_cast<double>(p);
  for (std::uint64_t u : stream.data) out.coords.push_back(static_cast<double>(u) / dp);
  return out;
}

PointSet read_points_csv(std::istream& is) {
  PointSet out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() < 2) {
      throw Error(Errc::ParseError, "expected n and at least one coordinate",
                  "line " + std::to_string(lineno));
    }
    std::vector<double> x;
    try {
      std::size_t used = 0;
      std::stod(fields[0], &used);
      for (std::size_t j = 1; j < fields.size(); ++j) x.push_back(std::stod(fields[j]));
    } catch (const std::exception&) {
      if (lineno == 1 && out.size() == 0) continue;  // header
      throw Error(Errc::ParseError, "non-numeric field", "line " + std::to_string(lineno));
    }
    if (out.dim == 0) out.dim = x.size();
    if (x.size() != out.dim) {
      throw Error(Errc::ParseError, "row width differs from the first row",
                  "line " + std::to_string(lineno));
    }
    for (double c : x) {
      if (!(c >= 0.0 && c < 1.0)) {
        throw Error(Errc::ParseError, "coordinate outside [0,1)", "line " + std::to_string(lineno));
      }
    }
    out.push(x);
  }
  return out;
}

double star_discrepancy_exact(const PointSet& points, std::uint64_t work_cap) {
  check_nonempty(points);
  const std::size_t d = points.dim, npts = points.size(), last = d - 1;
  const double n = static_cast<double>(npts);

  std::vector<std::vector<double>> cand(last);
  std::uint64_t work = npts;
  for (std::size_t j = 0; j < last; ++j) {
    std::vector<double> c{1.0};
    for (std::size_t i = 0; i < npts; ++i) c.push_back(points.row(i)[j]);
    cand[j] = sorted_unique(std::move(c));
    work = sat_mul(work, cand[j].size());
  }
  check_work(work, work_cap, "star discrepancy");

  // Points reordered by their last coordinate, stored contiguously.
  std::vector<std::size_t> order(npts);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points.row(a)[last] < points.row(b)[last]; });
  std::vector<double> sorted;
  sorted.reserve(points.coords.size());
  for (std::size_t i : order) {
    auto r = points.row(i);
    sorted.insert(sorted.end(), r.begin(), r.end());
  }

  double best = 0.0;
  std::vector<std::size_t> idx(last, 0);
  std::vector<double> corner(last);
  while (true) {
    double vol = 1.0;
    for (std::size_t j = 0; j < last; ++j) {
      corner[j] = cand[j][idx[j]];
      vol *= corner[j];
    }
    std::size_t n_open = 0, n_closed = 0;
    for (std::size_t i = 0; i < npts; ++i) {
      const double* x = sorted.data() + i * d;
      bool open = true, closed = true;
      for (std::size_t j = 0; j < last && closed; ++j) {
        if (x[j] > corner[j]) closed = false;
        if (x[j] >= corner[j]) open = false;
      }
      const double y = x[last];
      if (open) {
        best = std::max(best, vol * y - static_cast<double>(n_open) / n);
        ++n_open;
      }
      if (closed) {
        ++n_closed;
        best = std::max(best, static_cast<double>(n_closed) / n - vol * y);
      }
    }
    best = std::max(best, vol - static_cast<double>(n_open) / n);

    std::size_t j = last;
    while (j > 0 && idx[j - 1] + 1 == cand[j - 1].size()) idx[--j] = 0;
    if (j == 0) break;
    ++idx[j - 1];
  }
  return best;
}

double extreme_discrepancy_exact(const PointSet& points, std::uint64_t work_cap) {
  check_nonempty(points);
  if (points.dim > 2) {
    throw Error(Errc::InvalidArgument, "extreme discrepancy is implemented for dimension <= 2");
  }
  const std::size_t npts = points.size();
  const double n = static_cast<double>(npts);

  if (points.dim == 1) {
    std::vector<double> ys(points.coords);
    std::sort(ys.begin(), ys.end());
    return std::max(closed_sweep(ys, 1.0, n), open_sweep(ys, 1.0, n));
  }

  std::vector<double> xs;
  for (std::size_t i = 0; i < npts; ++i) xs.push_back(points.row(i)[0]);
  xs = sorted_unique(std::move(xs));
  check_work(sat_mul(sat_mul(xs.size() + 2, xs.size() + 2), npts), work_cap,
             "extreme discrepancy");

  std::vector<std::size_t> order(npts);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points.row(a)[1] < points.row(b)[1]; });
  std::vector<double> px(npts), py(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    px[i] = points.row(order[i])[0];
    py[i] = points.row(order[i])[1];
  }

  double best = 0.0;
  std::vector<double> ys;
  ys.reserve(npts);
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = a; b < xs.size(); ++b) {
      ys.clear();
      for (std::size_t i = 0; i < npts; ++i)
        if (px[i] >= xs[a] && px[i] <= xs[b]) ys.push_back(py[i]);
      best = std::max(best, closed_sweep(ys, xs[b] - xs[a], n));
    }
  }
  std::vector<double> lows{0.0}, highs(xs);
  lows.insert(lows.end(), xs.begin(), xs.end());
  highs.push_back(1.0);
  for (double lo : lows) {
    for (double hi : highs) {
      if (!(lo < hi)) continue;
      ys.clear();
      for (std::size_t i = 0; i < npts; ++i)
        if (px[i] > lo && px[i] < hi) ys.push_back(py[i]);
      best = std::max(best, open_sweep(ys, hi - lo, n));
    }
  }
  return best;
}

double koksma_szusz_bound(const PointSet& points, std::uint64_t L, std::uint64_t work_cap) {
  check_nonempty(points);
  if (L == 0) throw Error(Errc::InvalidArgument, "L must be at least 1");
  const std::size_t m = points.dim, npts = points.size();
  check_work(sat_mul(half_box_size(m, L), npts), work_cap, "Koksma-Szusz sum");
  const double two_pi = 2.0 * std::numbers::pi;
  double total = weighted_box_sum(
      m, static_cast<std::int64_t>(L),
      [&](const std::vector<std::int64_t>& prefix, std::int64_t lo, std::int64_t hi) {
        std::vector<double> mags;
        for (std::int64_t t = lo; t <= hi; ++t) {
          double re = 0.0, im = 0.0;
          for (std::size_t i = 0; i < npts; ++i) {
            auto x = points.row(i);
            double phase = static_cast<double>(t) * x[m - 1];
            for (std::size_t j = 0; j + 1 < m; ++j) phase += static_cast<double>(prefix[j]) * x[j];
            phase -= std::floor(phase);
            re += std::cos(two_pi * phase);
            im += std::sin(two_pi * phase);
          }
          mags.push_back(std::hypot(re, im));
        }
        return mags;
      });
  return 1.0 / static_cast<double>(L) + total / static_cast<double>(npts);
}

double koksma_szusz_bound(const Field& field, const PointBuffer& stream, std::uint64_t L,
                          std::uint64_t work_cap) {
  const std::size_t m = stream.dim, npts = stream.size();
  if (m == 0 || npts == 0) throw Error(Errc::InvalidArgument, "estimator needs a nonempty stream");
  if (L == 0) throw Error(Errc::InvalidArgument, "L must be at least 1");
  check_work(sat_mul(half_box_size(m, L), npts), work_cap, "Koksma-Szusz sum");
  CharacterTable chi(field);
  std::vector<std::uint64_t> base(npts), cur(npts), step(npts);
  for (std::size_t i = 0; i < npts; ++i) step[i] = stream.row(i)[m - 1];
  double total = weighted_box_sum(
      m, static_cast<std::int64_t>(L),
      [&](const std::vector<std::int64_t>& prefix, std::int64_t lo, std::int64_t hi) {
        std::vector<std::uint64_t> c;
        for (std::int64_t x : prefix) c.push_back(field.reduce_signed(x));
        const std::uint64_t c_lo = field.reduce_signed(lo);
        for (std::size_t i = 0; i < npts; ++i) {
          auto u = stream.row(i);
          std::uint64_t r = field.mul(c_lo, u[m - 1]);
          for (std::size_t j = 0; j + 1 < m; ++j) {
            if (c[j]) r = field.add(r, field.mul(c[j], u[j]));
          }
          cur[i] = r;
        }
        // Advancing the last coefficient by one adds u_{n,m-1}.
        std::vector<double> mags;
        for (std::int64_t t = lo; t <= hi; ++t) {
          if (t != lo) {
            for (std::size_t i = 0; i < npts; ++i) cur[i] = field.add(cur[i], step[i]);
          }
          double re = 0.0, im = 0.0;
          for (std::size_t i = 0; i < npts; ++i) {
            Complex z = chi(cur[i]);
            re += z.real();
            im += z.imag();
          }
          mags.push_back(std::hypot(re, im));
        }
        return mags;
      });
  return 1.0 / static_cast<double>(L) + total / static_cast<double>(npts);
}

double discrepancy_envelope(const BoundEnvelope& env, std::uint64_t p, std::uint64_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "N must be at least 1");
  double alpha = static_cast<double>(env.alpha());
  double beta = static_cast<double>(env.beta());
  double lp = std::log(static_cast<double>(p));
  return std::exp(alpha * lp - beta * std::log(static_cast<double>(n)) +
                  static_cast<double>(env.m) * std::log(lp));
}

DiscrepancyReport discrepancy_report(const Field& field, const PointBuffer& stream,
                                     std::uint64_t nu, std::uint64_t L, std::uint64_t work_cap) {
  auto start = std::chrono::steady_clock::now();
  DiscrepancyReport rep;
  rep.p = field.modulus();
  rep.m = stream.dim;
  rep.nu = nu;
  rep.n_points = stream.size();
  rep.L = L;
  PointSet pts = scale_points(stream, rep.p);
  // Exact values only at desk scale; the estimator covers everything else.
  if (rep.m <= 3 && rep.n_points <= 2000) {
    try {
      rep.exact = star_discrepancy_exact(pts, work_cap);
    } catch (const Error& e) {
      if (e.code() != Errc::CapExceeded) throw;
    }
  }
  if (rep.m <= 2 && rep.n_points <= 500) {
    try {
      rep.exact_extreme = extreme_discrepancy_exact(pts, work_cap);
    } catch (const Error& e) {
      if (e.code() != Errc::CapExceeded) throw;
    }
  }
  rep.ks_bound = koksma_szusz_bound(field, stream, L, work_cap);
  rep.envelope = discrepancy_envelope(BoundEnvelope(rep.m, nu), rep.p, rep.n_points);
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace polydyn
