// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fracflow/core.hpp"
#include "fracflow/geometry.hpp"
#include "fracflow/rt0.hpp"

namespace fracflow {

// Tangential flow law inside a fracture and the normal coupling
// coefficient toward the surrounding matrix.
struct FractureLaw {
  double K_gamma = 1.0;  // tangential transmissivity (aperture-integrated)
  double beta = 0.0;     // inertial drag coefficient
  double zeta = 0.0;     // pressure dependence exponent of the viscosity
  double alpha = 1.0;    // normal coupling coefficient

  void check() const {
    if (!(K_gamma > 0.0)) throw FracflowError("K_gamma must be positive");
    if (beta < 0.0) throw FracflowError("beta must be nonnegative");
    if (!(alpha > 0.0)) throw FracflowError("alpha must be positive");
  }

  // Inverse mobility at a given cell state.
  double coeff(double u_mid, double p_cell) const {
    return std::exp(zeta * p_cell) / K_gamma + beta * std::abs(u_mid);
  }

  // Tangent coefficient used by the Newton linearization; the drag
  // derivative is dropped near the non-differentiable point u = 0.
  static constexpr double kVelocityFloor = 1e-12;
  double tangent_coeff(double u_mid) const {
    if (std::abs(u_mid) < kVelocityFloor) return 1.0 / K_gamma;
    return 1.0 / K_gamma + 2.0 * beta * std::abs(u_mid);
  }
};

// Degree-of-freedom layout of the fracture-network problem. Velocities are
// continuous piecewise linears per branch (nodal dofs), pressures are the
// mortar cells, and each intersection carries one extra pressure.
struct NetworkLayout {
  std::vector<int> u_offset;  // first velocity dof of each branch
  int n_u = 0;
  int n_p = 0;
  int n_T = 0;
  int total() const { return n_u + n_p + n_T; }
};

inline NetworkLayout make_layout(const MixedDimMesh& mdm) {
  NetworkLayout lay;
  lay.u_offset.resize(mdm.branches.size());
  int off = 0;
  for (std::size_t b = 0; b < mdm.branches.size(); ++b) {
    lay.u_offset[b] = off;
    off += mdm.branches[b].n_cells + 1;
  }
  lay.n_u = off;
  lay.n_p = mdm.n_mortar;
  lay.n_T = static_cast<int>(mdm.network.intersections.size());
  return lay;
}

// State-independent blocks of the network system plus boundary data.
struct NetworkBlocks {
  SparseMatrix B;    // n_p x n_u divergence
  SparseMatrix NT;   // n_T x n_u intersection flux sums
  Vector rhs_u;      // natural boundary pressure data on the momentum rows
  Vector h;          // mortar cell lengths, one per pressure dof
  // Strongly constrained velocity dofs (outer flux data and sealed tips).
  std::vector<std::pair<int, double>> strong_u;
};

namespace detail {

// Outward direction multiplier of branch endpoint w (0 = start, 1 = end).
inline double endpoint_sign(int w) { return w == 0 ? -1.0 : 1.0; }

}  // namespace detail

inline NetworkBlocks assemble_network_blocks(const MixedDimMesh& mdm,
                                             const std::vector<FractureLaw>& laws,
                                             const BoundarySpec& bc,
                                             double dom_lo = 0.0,
                                             double dom_hi = 1.0) {
  const NetworkLayout lay = make_layout(mdm);
  NetworkBlocks blk;
  blk.rhs_u = Vector::Zero(lay.n_u);
  blk.h = Vector::Zero(lay.n_p);

  std::vector<Triplet> tb, tn;
  for (std::size_t b = 0; b < mdm.branches.size(); ++b) {
    const Branch& br = mdm.branches[b];
    if (br.fracture >= static_cast<int>(laws.size()))
      throw FracflowError("missing fracture law");
    laws[br.fracture].check();
    const int u0 = lay.u_offset[b];
    const int p0 = mdm.mortar_offset[b];
    const double hc = br.h();
    for (int c = 0; c < br.n_cells; ++c) {
      blk.h[p0 + c] = hc;
      tb.emplace_back(p0 + c, u0 + c, -1.0);
      tb.emplace_back(p0 + c, u0 + c + 1, 1.0);
    }
    for (int w = 0; w < 2; ++w) {
      const int j = u0 + (w == 0 ? 0 : br.n_cells);
      const double nj = detail::endpoint_sign(w);
      switch (br.end_kind[w]) {
        case EndpointKind::Intersection:
          tn.emplace_back(br.end_isect[w], j, nj);
          break;
        case EndpointKind::NoFlow:
          blk.strong_u.emplace_back(j, 0.0);
          break;
        case EndpointKind::OuterBoundary: {
          const BoundaryCondition cond = bc.at(br.endpoint(w), dom_lo, dom_hi);
          if (cond.kind == BoundaryCondition::Kind::Dirichlet)
            blk.rhs_u[j] -= cond.value * nj;
          else
            blk.strong_u.emplace_back(j, cond.value * nj);
          break;
        }
      }
    }
  }
  blk.B.resize(lay.n_p, lay.n_u);
  blk.B.setFromTriplets(tb.begin(), tb.end());
  blk.NT.resize(lay.n_T, lay.n_u);
  blk.NT.setFromTriplets(tn.begin(), tn.end());
  return blk;
}

namespace detail {

// Exact mass matrix of the linear velocity space on one cell of length h.
inline void add_cell_mass(std::vector<Triplet>& ts, int j, double c, double h) {
  ts.emplace_back(j, j, c * h / 3.0);
  ts.emplace_back(j, j + 1, c * h / 6.0);
  ts.emplace_back(j + 1, j, c * h / 6.0);
  ts.emplace_back(j + 1, j + 1, c * h / 3.0);
}

inline void add_robin_points(std::vector<Triplet>& ts, const MixedDimMesh& mdm,
                             const std::vector<FractureLaw>& laws,
                             const NetworkLayout& lay) {
  for (std::size_t b = 0; b < mdm.branches.size(); ++b) {
    const Branch& br = mdm.branches[b];
    for (int w = 0; w < 2; ++w) {
      if (br.end_kind[w] != EndpointKind::Intersection) continue;
      const int j = lay.u_offset[b] + (w == 0 ? 0 : br.n_cells);
      ts.emplace_back(j, j, 1.0 / laws[br.fracture].alpha);
    }
  }
}

}  // namespace detail

// Velocity mass matrix with the inverse mobility frozen at the given state
// (midpoint velocity, cell pressure) plus the intersection point terms.
inline SparseMatrix assemble_mass(const MixedDimMesh& mdm,
                                  const std::vector<FractureLaw>& laws,
                                  const NetworkLayout& lay, const Vector& u,
                                  const Vector& p) {
  if (u.size() != lay.n_u || p.size() != lay.n_p)
    throw FracflowError("state size mismatch in assemble_mass");
  std::vector<Triplet> ts;
  for (std::size_t b = 0; b < mdm.branches.size(); ++b) {
    const Branch& br = mdm.branches[b];
    const FractureLaw& law = laws[br.fracture];
    const int u0 = lay.u_offset[b];
    const int p0 = mdm.mortar_offset[b];
    const double h = br.h();
    for (int c = 0; c < br.n_cells; ++c) {
      const double um = 0.5 * (u[u0 + c] + u[u0 + c + 1]);
      detail::add_cell_mass(ts, u0 + c, law.coeff(um, p[p0 + c]), h);
    }
  }
  detail::add_robin_points(ts, mdm, laws, lay);
  SparseMatrix M(lay.n_u, lay.n_u);
  M.setFromTriplets(ts.begin(), ts.end());
  return M;
}

// Exact derivative of u -> M(u)u at the given velocity state. Only valid
// for the pressure-independent law (zeta = 0).
inline SparseMatrix assemble_mass_jacobian(const MixedDimMesh& mdm,
                                           const std::vector<FractureLaw>& laws,
                                           const NetworkLayout& lay,
                                           const Vector& u) {
  if (u.size() != lay.n_u)
    throw FracflowError("state size mismatch in assemble_mass_jacobian");
  std::vector<Triplet> ts;
  for (std::size_t b = 0; b < mdm.branches.size(); ++b) {
    const Branch& br = mdm.branches[b];
    const FractureLaw& law = laws[br.fracture];
    if (law.zeta != 0.0)
      throw FracflowError("Newton linearization requires zeta = 0");
    const int u0 = lay.u_offset[b];
    const double h = br.h();
    for (int c = 0; c < br.n_cells; ++c) {
      const int j = u0 + c;
      const double ul = u[j], ur = u[j + 1];
      const double um = 0.5 * (ul + ur);
      detail::add_cell_mass(ts, j, law.coeff(um, 0.0), h);
      if (std::abs(um) >= FractureLaw::kVelocityFloor && law.beta > 0.0) {
        const double s = law.beta * (um > 0.0 ? 0.5 : -0.5);
        const double m0 = h * (ul / 3.0 + ur / 6.0);
        const double m1 = h * (ul / 6.0 + ur / 3.0);
        ts.emplace_back(j, j, s * m0);
        ts.emplace_back(j, j + 1, s * m0);
        ts.emplace_back(j + 1, j, s * m1);
        ts.emplace_back(j + 1, j + 1, s * m1);
      }
    }
  }
  detail::add_robin_points(ts, mdm, laws, lay);
  SparseMatrix J(lay.n_u, lay.n_u);
  J.setFromTriplets(ts.begin(), ts.end());
  return J;
}

// Overwrite strongly constrained rows with identity rows so that factored
// or matrix-free applications keep those dofs pinned.
inline void impose_strong_rows(SparseMatrix& M, const NetworkBlocks& blk) {
  std::vector<char> strong(M.rows(), 0);
  for (const auto& [j, val] : blk.strong_u) {
    (void)val;
    strong[j] = 1;
  }
  for (int k = 0; k < M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(M, k); it; ++it)
      if (strong[it.row()])
        it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
  for (const auto& [j, val] : blk.strong_u) {
    (void)val;
    M.coeffRef(j, j) = 1.0;
  }
  M.prune(0.0);
}

}  // namespace fracflow
