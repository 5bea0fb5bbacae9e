// SPDX-License-Identifier: Apache-2.0

#ifndef FRACFLOW_RT0_HPP
#define FRACFLOW_RT0_HPP

#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "fracflow/core.hpp"
#include "fracflow/geometry.hpp"

namespace fracflow {

/// Outer boundary data for the unit square, applied to rock matrix and
/// fracture network alike.
struct BoundaryCondition {
  enum class Kind { Dirichlet, Neumann };
  Kind kind = Kind::Neumann;
  double value = 0.0;  // pressure, or outward normal flux density
};

struct BoundarySpec {
  BoundaryCondition left, right, bottom, top;

  static BoundarySpec benchmark() {
    // zero flux top/bottom, unit pressure right, inflow -1 left
    BoundarySpec b;
    b.left = {BoundaryCondition::Kind::Neumann, -1.0};
    b.right = {BoundaryCondition::Kind::Dirichlet, 1.0};
    b.bottom = {BoundaryCondition::Kind::Neumann, 0.0};
    b.top = {BoundaryCondition::Kind::Neumann, 0.0};
    return b;
  }
  static BoundarySpec zero_dirichlet() {
    BoundarySpec b;
    b.left = b.right = b.bottom = b.top = {BoundaryCondition::Kind::Dirichlet, 0.0};
    return b;
  }
  static BoundarySpec sealed() {
    BoundarySpec b;
    b.left = b.right = b.bottom = b.top = {BoundaryCondition::Kind::Neumann, 0.0};
    return b;
  }

  const BoundaryCondition& at(const Vec2& p, double lo = 0.0, double hi = 1.0) const {
    if (std::abs(p.x() - lo) < kGeomTol) return left;
    if (std::abs(p.x() - hi) < kGeomTol) return right;
    if (std::abs(p.y() - lo) < kGeomTol) return bottom;
    if (std::abs(p.y() - hi) < kGeomTol) return top;
    throw FracflowError("point not on the outer boundary");
  }
};

/// Assembled lowest-order Raviart-Thomas / P0 mixed system for one
/// sub-domain with Robin terms on its fracture traces.
struct SubdomainMatrices {
  SparseMatrix A;  // velocity block: K^{-1} mass + alpha^{-1} trace term
  SparseMatrix B;  // divergence pairing, (cells x edges), B[c,e] = sigma
  std::vector<int> edge_perm;   // assembly edge id -> dof id (lexicographic)
  std::vector<int> cell_perm;   // triangle id -> dof id
  std::vector<int> outer_neumann_edges;   // dof-ordered edge ids, strongly constrained
  std::vector<double> outer_neumann_values;  // dof value (global-normal flux)
  Vector dirichlet_rhs;  // natural outer Dirichlet contribution to velocity rows
  int n_edges = 0;
  int n_cells = 0;
};

namespace detail {

/// Local RT0 mass matrix on a triangle, scalar coefficient kinv, computed
/// with the 3-point edge-midpoint rule (exact for the quadratic integrand).
inline Eigen::Matrix3d rt0_local_mass(const SubdomainMesh& m, int t, double kinv) {
  const auto& tr = m.triangles[t];
  const auto& te = m.tri_edges[t];
  const double area = m.tri_area(t);
  // basis for local edge k (between vertices k, k+1): opposite vertex k+2
  std::array<Vec2, 3> opp = {m.vertices[tr[2]], m.vertices[tr[0]], m.vertices[tr[1]]};
  std::array<double, 3> sigma;
  for (int k = 0; k < 3; ++k) {
    const auto& e = m.edges[te[k]];
    // +1 when the global edge normal points out of this triangle
    sigma[k] = (e.normal.dot(e.midpoint - m.centroid(t)) > 0) ? 1.0 : -1.0;
  }
  std::array<Vec2, 3> quad = {0.5 * (m.vertices[tr[0]] + m.vertices[tr[1]]),
                              0.5 * (m.vertices[tr[1]] + m.vertices[tr[2]]),
                              0.5 * (m.vertices[tr[2]] + m.vertices[tr[0]])};
  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  for (const auto& q : quad) {
    std::array<Vec2, 3> phi;
    for (int k = 0; k < 3; ++k) phi[k] = sigma[k] / (2 * area) * (q - opp[k]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M(i, j) += kinv * area / 3.0 * phi[i].dot(phi[j]);
  }
  return M;
}

inline std::vector<int> lexicographic_perm(const std::vector<Vec2>& keys) {
  std::vector<int> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (keys[a].x() != keys[b].x()) return keys[a].x() < keys[b].x();
    return keys[a].y() < keys[b].y();
  });
  std::vector<int> perm(keys.size());
  for (size_t r = 0; r < idx.size(); ++r) perm[idx[r]] = static_cast<int>(r);
  return perm;
}

}  // namespace detail

/// Robin coefficients per incident branch side, keyed by branch id.
struct RobinCoefficients {
  std::map<int, double> alpha;  // branch -> alpha_gamma (> 0)
};

inline SubdomainMatrices assemble_subdomain(const MixedDimMesh& mdm, int s,
                                            const std::vector<double>& cell_K,
                                            const RobinCoefficients& robin,
                                            const BoundarySpec& bc,
                                            double dom_lo = 0.0, double dom_hi = 1.0) {
  const auto& m = mdm.subdomains[s];
  SubdomainMatrices out;
  out.n_edges = static_cast<int>(m.edges.size());
  out.n_cells = static_cast<int>(m.triangles.size());

  // deterministic dof order: lexicographic by midpoint / centroid
  {
    std::vector<Vec2> ek(out.n_edges), ck(out.n_cells);
    for (int e = 0; e < out.n_edges; ++e) ek[e] = m.edges[e].midpoint;
    for (int c = 0; c < out.n_cells; ++c) ck[c] = m.centroid(c);
    out.edge_perm = detail::lexicographic_perm(ek);
    out.cell_perm = detail::lexicographic_perm(ck);
  }

  std::vector<Triplet> ta, tb;
  for (int t = 0; t < out.n_cells; ++t) {
    const double K = cell_K.size() == 1 ? cell_K[0] : cell_K[t];
    if (K <= 0) throw FracflowError("cell permeability must be positive");
    const auto M = detail::rt0_local_mass(m, t, 1.0 / K);
    for (int i = 0; i < 3; ++i) {
      const int ei = out.edge_perm[m.tri_edges[t][i]];
      for (int j = 0; j < 3; ++j)
        ta.emplace_back(ei, out.edge_perm[m.tri_edges[t][j]], M(i, j));
      const auto& edge = m.edges[m.tri_edges[t][i]];
      const double sigma = (edge.normal.dot(edge.midpoint - m.centroid(t)) > 0) ? 1.0 : -1.0;
      tb.emplace_back(out.cell_perm[t], ei, sigma);
    }
  }

  // Robin term on fracture-trace edges: alpha^{-1} <u.n, v.n> = alpha^{-1}/|e|
  for (const auto* tm : mdm.traces_of_subdomain(s)) {
    auto it = robin.alpha.find(tm->branch);
    if (it == robin.alpha.end()) throw FracflowError("missing Robin coefficient for branch");
    if (it->second <= 0) throw FracflowError("Robin coefficient must be positive");
    for (const auto& en : tm->entries) {
      const int e = out.edge_perm[en.edge];
      ta.emplace_back(e, e, 1.0 / (it->second * m.edges[en.edge].length));
    }
  }

  // outer boundary conditions
  out.dirichlet_rhs = Vector::Zero(out.n_edges);
  std::set<int> trace_edges;
  for (const auto* tm : mdm.traces_of_subdomain(s))
    for (const auto& en : tm->entries) trace_edges.insert(en.edge);
  for (int e : m.boundary_edges) {
    if (trace_edges.count(e)) continue;
    const auto& edge = m.edges[e];
    // skip interior interfaces facing other sub-domains across non-fracture
    // boundaries: structured rectangles only touch through fractures or the
    // outer boundary, so anything here is outer
    const auto& cond = bc.at(edge.midpoint, dom_lo, dom_hi);
    const double sigma =
        (edge.normal.dot(edge.midpoint - m.centroid(edge.tri[0])) > 0) ? 1.0 : -1.0;
    if (cond.kind == BoundaryCondition::Kind::Neumann) {
      out.outer_neumann_edges.push_back(out.edge_perm[e]);
      out.outer_neumann_values.push_back(sigma * cond.value * edge.length);
    } else {
      // natural Dirichlet: -<p_D, v.n> on the velocity rows
      out.dirichlet_rhs[out.edge_perm[e]] -= cond.value * sigma;
    }
  }

  out.A.resize(out.n_edges, out.n_edges);
  out.A.setFromTriplets(ta.begin(), ta.end());
  out.B.resize(out.n_cells, out.n_edges);
  out.B.setFromTriplets(tb.begin(), tb.end());
  return out;
}

}  // namespace fracflow

#endif  // FRACFLOW_RT0_HPP
