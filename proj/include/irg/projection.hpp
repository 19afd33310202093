// Maps between vertex indices {1..m} and positions on the negative half-line.
//
// Vertex i sits at phi_m(i) = -(H(m) - H(i)) where H is the harmonic number;
// the half-line (-H(m), 0] splits into cells (phi_m(i-1), phi_m(i)] of width
// 1/i, and pi_m sends a position to the index of the cell containing it.
// These are the coordinates in which neighborhood exploration of the graph
// becomes a branching random walk.
#pragma once

#include <cstdint>

#include "irg/common.hpp"

namespace irg {

// Largest m for which consecutive cells are still resolvable in double
// precision (cell width 1/m must stay well above one ulp of log(m/i)).
inline constexpr std::int64_t kMaxProjectionIndex = std::int64_t{1} << 45;

// H(n) = sum_{k=1}^n 1/k, with H(0) = 0.  Exact prefix table for small n,
// Euler-Maclaurin expansion beyond; absolute error < 1e-15 throughout.
double harmonic(std::int64_t n);

// H(n) - H(i) for 0 <= i <= n, computed without cancellation: when i and n
// are both beyond the prefix table the difference form
//   log1p((n-i)/i) + (1/n - 1/i)/2 - (1/n^2 - 1/i^2)/12 + (1/n^4 - 1/i^4)/120
// keeps full relative precision even for n - i << n.
double harmonic_diff(std::int64_t i, std::int64_t n);

struct ProjectionContext {
  std::int64_t m = 1;
  // Validates 1 <= m <= kMaxProjectionIndex.
  explicit ProjectionContext(std::int64_t m_in);
};

// Position of vertex i: -(H(m) - H(i)) <= 0.  Strictly increasing in i with
// phi_m(m) = 0.  Errors when i is outside 1..m.
double phi_m(const ProjectionContext& ctx, std::int64_t i);

// The unique i with phi_m(i-1) < x <= phi_m(i), found by binary search with
// the same phi evaluation (so pi_m(phi_m(i)) == i exactly).  Errors when
// x > 0 or x <= -H(m) (position below the cell of vertex 1; callers probing
// escape below the vertex range must check before calling).
std::int64_t pi_m(const ProjectionContext& ctx, double x);

}  // namespace irg
