// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/SparseLU>

#include "fracflow/core.hpp"
#include "fracflow/fracture1d.hpp"
#include "fracflow/geometry.hpp"
#include "fracflow/interface_op.hpp"
#include "fracflow/rt0.hpp"

namespace fracflow {

// Verification path: the full coupled system over all sub-domain and
// fracture unknowns, assembled directly (the interface coupling enters as
// explicit jump terms, not through any flux operator) and solved by sparse
// factorization inside a frozen-coefficient outer loop.
struct MonolithicSystem {
  SparseMatrix A;
  Vector rhs;
  std::vector<int> sub_u_offset, sub_p_offset;
  int ug_offset = 0, pg_offset = 0, pt_offset = 0;
  int size = 0;
};

struct MonolithicResult {
  std::vector<MixedSolution> fields;
  Vector u_gamma, p_gamma, p_T;
  int outer_iterations = 0;
  bool converged = false;
};

inline MonolithicSystem assemble_monolithic(const MixedDimMesh& mdm,
                                            const ProblemConfig& cfg,
                                            const Vector& state_u,
                                            const Vector& state_p) {
  const NetworkLayout lay = make_layout(mdm);
  MonolithicSystem sys;
  RobinCoefficients robin;
  for (std::size_t b = 0; b < mdm.branches.size(); ++b)
    robin.alpha[static_cast<int>(b)] = cfg.laws[mdm.branches[b].fracture].alpha;

  std::vector<SubdomainMatrices> mats;
  int off = 0;
  for (int s = 0; s < static_cast<int>(mdm.subdomains.size()); ++s) {
    const double K = cfg.K_sub.size() == 1 ? cfg.K_sub[0] : cfg.K_sub.at(s);
    mats.push_back(assemble_subdomain(mdm, s, {K}, robin, cfg.bc));
    sys.sub_u_offset.push_back(off);
    off += mats.back().n_edges;
    sys.sub_p_offset.push_back(off);
    off += mats.back().n_cells;
  }
  sys.ug_offset = off;
  sys.pg_offset = off + lay.n_u;
  sys.pt_offset = sys.pg_offset + lay.n_p;
  sys.size = sys.pt_offset + lay.n_T;
  sys.rhs = Vector::Zero(sys.size);

  std::vector<Triplet> ts;
  std::vector<char> strong(sys.size, 0);

  // sub-domain blocks and matrix-fracture couplings
  for (int s = 0; s < static_cast<int>(mdm.subdomains.size()); ++s) {
    const auto& m = mats[s];
    const int uo = sys.sub_u_offset[s];
    const int po = sys.sub_p_offset[s];
    for (int e : m.outer_neumann_edges) strong[uo + e] = 1;

    for (int k = 0; k < m.A.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m.A, k); it; ++it)
        if (!strong[uo + it.row()])
          ts.emplace_back(uo + it.row(), uo + it.col(), it.value());
    for (int k = 0; k < m.B.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m.B, k); it; ++it) {
        const int c = static_cast<int>(it.row());
        const int e = static_cast<int>(it.col());
        if (!strong[uo + e]) ts.emplace_back(uo + e, po + c, -it.value());
        ts.emplace_back(po + c, uo + e, it.value());
      }
    for (int e = 0; e < m.n_edges; ++e)
      if (!strong[uo + e]) sys.rhs[uo + e] += m.dirichlet_rhs[e];
    for (std::size_t k = 0; k < m.outer_neumann_edges.size(); ++k) {
      const int j = uo + m.outer_neumann_edges[k];
      ts.emplace_back(j, j, 1.0);
      sys.rhs[j] = m.outer_neumann_values[k];
    }
    const auto& mesh = mdm.subdomains[s];
    for (int t = 0; t < m.n_cells; ++t)
      sys.rhs[po + m.cell_perm[t]] = cfg.f_matrix * mesh.tri_area(t);

    // pressure coupling and flux jump across each trace, cell overlaps
    for (const auto* tm : mdm.traces_of_subdomain(s)) {
      const auto& br = mdm.branches[tm->branch];
      const double hm = br.h();
      for (const auto& en : tm->entries) {
        const int e = m.edge_perm[en.edge];
        const double elen = mesh.edges[en.edge].length;
        const int m_lo = std::max(0, static_cast<int>(en.t0 / hm));
        for (int c = m_lo; c < br.n_cells; ++c) {
          const double lo = std::max(en.t0, c * hm);
          const double hi = std::min(en.t1, (c + 1) * hm);
          if (hi - lo <= 1e-14) continue;
          const int pm = sys.pg_offset + mdm.mortar_offset[tm->branch] + c;
          const double w = en.sign * (hi - lo) / elen;
          if (!strong[sys.sub_u_offset[s] + e])
            ts.emplace_back(sys.sub_u_offset[s] + e, pm, w);
          ts.emplace_back(pm, sys.sub_u_offset[s] + e, -w);
        }
      }
    }
  }

  // fracture network blocks
  const NetworkBlocks blk = assemble_network_blocks(mdm, cfg.laws, cfg.bc);
  SparseMatrix M = assemble_mass(mdm, cfg.laws, lay,
                                 state_u.size() ? state_u : Vector(Vector::Zero(lay.n_u)),
                                 state_p.size() ? state_p : Vector(Vector::Zero(lay.n_p)));
  for (const auto& [j, v] : blk.strong_u) strong[sys.ug_offset + j] = 1;
  for (int k = 0; k < M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(M, k); it; ++it)
      if (!strong[sys.ug_offset + it.row()])
        ts.emplace_back(sys.ug_offset + it.row(), sys.ug_offset + it.col(),
                        it.value());
  for (int k = 0; k < blk.B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(blk.B, k); it; ++it) {
      const int c = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      if (!strong[sys.ug_offset + j])
        ts.emplace_back(sys.ug_offset + j, sys.pg_offset + c, -it.value());
      ts.emplace_back(sys.pg_offset + c, sys.ug_offset + j, it.value());
    }
  for (int k = 0; k < blk.NT.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(blk.NT, k); it; ++it) {
      const int t = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      if (!strong[sys.ug_offset + j])
        ts.emplace_back(sys.ug_offset + j, sys.pt_offset + t, it.value());
      ts.emplace_back(sys.pt_offset + t, sys.ug_offset + j, it.value());
    }
  for (int j = 0; j < lay.n_u; ++j)
    if (!strong[sys.ug_offset + j]) sys.rhs[sys.ug_offset + j] += blk.rhs_u[j];
  for (const auto& [j, v] : blk.strong_u) {
    ts.emplace_back(sys.ug_offset + j, sys.ug_offset + j, 1.0);
    sys.rhs[sys.ug_offset + j] = v;
  }
  const Vector fg = cfg.f_gamma.size() ? cfg.f_gamma : Vector(Vector::Zero(lay.n_p));
  for (int c = 0; c < lay.n_p; ++c) sys.rhs[sys.pg_offset + c] += blk.h[c] * fg[c];

  sys.A.resize(sys.size, sys.size);
  sys.A.setFromTriplets(ts.begin(), ts.end());
  return sys;
}

inline MonolithicResult solve_monolithic(const MixedDimMesh& mdm,
                                         const ProblemConfig& cfg,
                                         double tol = 1e-10,
                                         int max_outer = 2000) {
  const NetworkLayout lay = make_layout(mdm);
  Vector ug = Vector::Zero(lay.n_u), pg = Vector::Zero(lay.n_p);
  MonolithicResult res;
  Vector x;

  bool linear_law = true;
  for (const auto& law : cfg.laws)
    if (law.beta != 0.0 || law.zeta != 0.0) linear_law = false;

  MonolithicSystem sys;
  for (int k = 0; k < max_outer; ++k) {
    sys = assemble_monolithic(mdm, cfg, ug, pg);
    Eigen::SparseLU<SparseMatrix> lu(sys.A);
    if (lu.info() != Eigen::Success)
      throw FracflowError("singular monolithic system");
    x = lu.solve(sys.rhs);
    const Vector ug_new = x.segment(sys.ug_offset, lay.n_u);
    const Vector pg_new = x.segment(sys.pg_offset, lay.n_p);
    ++res.outer_iterations;
    Vector dn(lay.n_u + lay.n_p), on(lay.n_u + lay.n_p);
    dn << ug_new - ug, pg_new - pg;
    on << ug, pg;
    const double base = on.lpNorm<Eigen::Infinity>();
    const double diff = dn.lpNorm<Eigen::Infinity>();
    ug = ug_new;
    pg = pg_new;
    if (linear_law || (k > 0 && diff <= tol * std::max(base, 1e-14))) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) throw FracflowError("monolithic outer loop did not converge");

  res.u_gamma = ug;
  res.p_gamma = pg;
  res.p_T = x.segment(sys.pt_offset, lay.n_T);
  for (std::size_t s = 0; s < mdm.subdomains.size(); ++s) {
    MixedSolution ms;
    const int nu = sys.sub_p_offset[s] - sys.sub_u_offset[s];
    const int nc = (s + 1 < mdm.subdomains.size() ? sys.sub_u_offset[s + 1]
                                                  : sys.ug_offset) -
                   sys.sub_p_offset[s];
    ms.u = x.segment(sys.sub_u_offset[s], nu);
    ms.p = x.segment(sys.sub_p_offset[s], nc);
    res.fields.push_back(std::move(ms));
  }
  return res;
}

}  // namespace fracflow
