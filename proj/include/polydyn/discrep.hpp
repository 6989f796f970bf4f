#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "polydyn/genseq.hpp"
#include "polydyn/spectra.hpp"

namespace polydyn {

// Default bound on elementary operations of the exact discrepancy and
// Koksma-Szusz routines.
inline constexpr std::uint64_t kDefaultWorkCap = 10'000'000'000ULL;

// Row-major points in [0,1)^dim.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const noexcept { return dim ? coords.size() / dim : 0; }
  std::span<const double> row(std::size_t n) const { return {coords.data() + n * dim, dim}; }
  void push(std::span<const double> x) { coords.insert(coords.end(), x.begin(), x.end()); }
};

// u / p coordinate-wise.
PointSet scale_points(const PointBuffer& stream, std::uint64_t p);

// Reads `n,x0,...` CSV (header line optional). Coordinates must lie in [0,1).
PointSet read_points_csv(std::istream& is);

// Anchored star discrepancy sup_B |#(P in B)/N - |B|| over boxes [0, b).
// Throws CapExceeded when the corner grid times N exceeds work_cap.
double star_discrepancy_exact(const PointSet& points, std::uint64_t work_cap = kDefaultWorkCap);

// Extreme discrepancy over all boxes [a, b) for dim <= 2.
double extreme_discrepancy_exact(const PointSet& points, std::uint64_t work_cap = kDefaultWorkCap);

// 1/L + (1/N) sum_{0 < max|a_j| <= L} prod_j 1/(|a_j|+1) |sum_n e(a . x_n)|,
// with the implied constant set to 1.
double koksma_szusz_bound(const PointSet& points, std::uint64_t L,
                          std::uint64_t work_cap = kDefaultWorkCap);
// Same estimator on exact residues: inner sums use e((a . u mod p) / p).
double koksma_szusz_bound(const Field& field, const PointBuffer& stream, std::uint64_t L,
                          std::uint64_t work_cap = kDefaultWorkCap);

// p^alpha N^{-beta} (log p)^m; the implied constant is omitted.
double discrepancy_envelope(const BoundEnvelope& env, std::uint64_t p, std::uint64_t n);

struct DiscrepancyReport {
  std::uint64_t p = 0;
  std::size_t m = 0;
  std::uint64_t nu = 1;
  std::uint64_t n_points = 0;
  std::optional<double> exact;          // anchored
  std::optional<double> exact_extreme;  // all boxes, dim <= 2
  double ks_bound = 0.0;
  std::uint64_t L = 0;
  double envelope = 0.0;
  double wall_time_ms = 0.0;
};

// Runs the exact routines when they fit in work_cap and always the
// estimator on the residues of the first N points.
DiscrepancyReport discrepancy_report(const Field& field, const PointBuffer& stream,
                                     std::uint64_t nu, std::uint64_t L,
                                     std::uint64_t work_cap = kDefaultWorkCap);

}  // namespace polydyn
