// SPDX-License-Identifier: Apache-2.0

#ifndef FRACFLOW_MORTAR_HPP
#define FRACFLOW_MORTAR_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracflow/core.hpp"
#include "fracflow/geometry.hpp"

namespace fracflow {

/// L2 projections between two piecewise-constant spaces on 1D grids tiling
/// the same interval.  to_trace maps mortar coefficients onto the trace
/// grid, to_mortar maps trace values (normal fluxes) back.  Entries are
/// interval overlaps normalized by the target cell length, so both matrices
/// have unit row sums.
struct MortarProjection {
  SparseMatrix to_trace;   // (n_trace x n_mortar)
  SparseMatrix to_mortar;  // (n_mortar x n_trace)
  int subdomain = -1;
  int branch = -1;
};

/// 1D cell grid on [0, L], represented by its breakpoints.
struct IntervalGrid {
  std::vector<double> breaks;
  int n_cells() const { return static_cast<int>(breaks.size()) - 1; }
  double length(int c) const { return breaks[c + 1] - breaks[c]; }
};

inline IntervalGrid uniform_grid(double length, int n) {
  IntervalGrid g;
  g.breaks.resize(n + 1);
  for (int i = 0; i <= n; ++i) g.breaks[i] = length * i / n;
  return g;
}

inline IntervalGrid trace_grid(const TraceMap& tm) {
  IntervalGrid g;
  g.breaks.push_back(tm.entries.front().t0);
  for (const auto& e : tm.entries) g.breaks.push_back(e.t1);
  return g;
}

inline MortarProjection build_projection(const IntervalGrid& trace,
                                         const IntervalGrid& mortar) {
  if (std::abs(trace.breaks.front() - mortar.breaks.front()) > 1e-12 ||
      std::abs(trace.breaks.back() - mortar.breaks.back()) > 1e-12)
    throw FracflowError("trace and mortar grids tile different extents");

  std::vector<Triplet> t_trace, t_mortar;
  for (int e = 0; e < trace.n_cells(); ++e) {
    for (int m = 0; m < mortar.n_cells(); ++m) {
      const double lo = std::max(trace.breaks[e], mortar.breaks[m]);
      const double hi = std::min(trace.breaks[e + 1], mortar.breaks[m + 1]);
      const double overlap = hi - lo;
      if (overlap <= 1e-14) continue;
      t_trace.emplace_back(e, m, overlap / trace.length(e));
      t_mortar.emplace_back(m, e, overlap / mortar.length(m));
    }
  }
  MortarProjection p;
  p.to_trace.resize(trace.n_cells(), mortar.n_cells());
  p.to_trace.setFromTriplets(t_trace.begin(), t_trace.end());
  p.to_mortar.resize(mortar.n_cells(), trace.n_cells());
  p.to_mortar.setFromTriplets(t_mortar.begin(), t_mortar.end());
  return p;
}

inline MortarProjection build_projection(const MixedDimMesh& mdm, const TraceMap& tm) {
  const auto& br = mdm.branches[tm.branch];
  auto p = build_projection(trace_grid(tm), uniform_grid(br.length(), br.n_cells));
  p.subdomain = tm.subdomain;
  p.branch = tm.branch;
  return p;
}

enum class ProjectionDirection { ToTrace, ToMortar };

inline Vector apply(const MortarProjection& p, const Vector& x, ProjectionDirection dir) {
  const auto& m = (dir == ProjectionDirection::ToTrace) ? p.to_trace : p.to_mortar;
  if (x.size() != m.cols()) throw FracflowError("projection size mismatch");
  return m * x;
}

}  // namespace fracflow

#endif  // FRACFLOW_MORTAR_HPP
