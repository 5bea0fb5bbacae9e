// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include <Eigen/SparseLU>

#include "fracflow/core.hpp"
#include "fracflow/geometry.hpp"
#include "fracflow/rt0.hpp"

namespace fracflow {

struct MixedSolution {
  Vector u;  // edge flux dofs
  Vector p;  // cell pressures
};

// One fracture trace of a sub-domain, resolved to dof ids and outward signs.
struct TraceIndex {
  const TraceMap* map = nullptr;
  std::vector<int> edge_dofs;
  std::vector<double> sigma;   // +1 when the global edge normal points outward
  std::vector<double> length;
};

// Factorized saddle-point system of one sub-domain with Robin terms on its
// fracture traces. The factorization is computed once; Robin solves, the
// flux response map and the source response reuse it.
class RobinSubdomainSystem {
 public:
  RobinSubdomainSystem(const MixedDimMesh& mdm, int s, SubdomainMatrices mats,
                       Vector f_cells)
      : id_(s), mats_(std::move(mats)), f_cells_(std::move(f_cells)) {
    n_u_ = mats_.n_edges;
    n_c_ = mats_.n_cells;
    if (f_cells_.size() == 0) f_cells_ = Vector::Zero(n_c_);
    if (f_cells_.size() != n_c_) throw FracflowError("source vector size mismatch");

    cell_area_ = Vector::Zero(n_c_);
    for (int t = 0; t < n_c_; ++t)
      cell_area_[mats_.cell_perm[t]] = mdm.subdomains[s].tri_area(t);

    for (const auto* tm : mdm.traces_of_subdomain(s)) {
      TraceIndex ti;
      ti.map = tm;
      for (const auto& en : tm->entries) {
        ti.edge_dofs.push_back(mats_.edge_perm[en.edge]);
        ti.sigma.push_back(en.sign);
        ti.length.push_back(mdm.subdomains[s].edges[en.edge].length);
      }
      trace_offsets_.push_back(n_trace_);
      n_trace_ += static_cast<int>(ti.edge_dofs.size());
      traces_.push_back(std::move(ti));
    }

    build_saddle();
    lu_.compute(saddle_);
    if (lu_.info() != Eigen::Success)
      throw FracflowError("singular sub-domain system");
  }

  int id() const { return id_; }
  int n_trace_dofs() const { return n_trace_; }
  int n_edges() const { return n_u_; }
  int n_cells() const { return n_c_; }
  const std::vector<TraceIndex>& traces() const { return traces_; }
  const std::vector<int>& trace_offsets() const { return trace_offsets_; }
  const SparseMatrix& matrix() const { return saddle_; }
  const SubdomainMatrices& matrices() const { return mats_; }

  // Right-hand side for Robin data lambda (one value per trace edge, in
  // trace order), cell source f, and optionally the outer boundary data.
  Vector rhs(const Vector& lambda, const Vector& f, bool outer_data) const {
    if (lambda.size() != n_trace_) throw FracflowError("Robin data size mismatch");
    if (f.size() != n_c_) throw FracflowError("source size mismatch");
    Vector r = Vector::Zero(n_u_ + n_c_);
    for (std::size_t t = 0; t < traces_.size(); ++t) {
      const TraceIndex& ti = traces_[t];
      for (std::size_t k = 0; k < ti.edge_dofs.size(); ++k)
        r[ti.edge_dofs[k]] -= lambda[trace_offsets_[t] + k] * ti.sigma[k];
    }
    if (outer_data) r.head(n_u_) += mats_.dirichlet_rhs;
    for (int c = 0; c < n_c_; ++c) r[n_u_ + c] -= f[c] * cell_area_[c];

    Vector vals = Vector::Zero(static_cast<Eigen::Index>(constrained_.size()));
    if (outer_data)
      for (std::size_t k = 0; k < constrained_.size(); ++k)
        vals[static_cast<Eigen::Index>(k)] = mats_.outer_neumann_values[k];
    r -= elim_cols_ * vals;
    for (std::size_t k = 0; k < constrained_.size(); ++k)
      r[constrained_[k]] = vals[static_cast<Eigen::Index>(k)];
    return r;
  }

  MixedSolution solve(const Vector& lambda, const Vector& f, bool outer_data) const {
    const Vector x = lu_.solve(rhs(lambda, f, outer_data));
    MixedSolution sol;
    sol.u = x.head(n_u_);
    sol.p = x.tail(n_c_);
    return sol;
  }

  // Homogeneous Robin solve: zero source, zero outer boundary data.
  MixedSolution solve(const Vector& lambda) const {
    return solve(lambda, Vector::Zero(n_c_), false);
  }

  // Outward normal flux density on the trace edges of a solution.
  Vector trace_flux(const MixedSolution& sol) const {
    Vector out = Vector::Zero(n_trace_);
    for (std::size_t t = 0; t < traces_.size(); ++t) {
      const TraceIndex& ti = traces_[t];
      for (std::size_t k = 0; k < ti.edge_dofs.size(); ++k)
        out[trace_offsets_[t] + k] =
            sol.u[ti.edge_dofs[k]] * ti.sigma[k] / ti.length[k];
    }
    return out;
  }

  // Flux response -u(lambda, 0).n on the traces.
  Vector rtn_flux(const Vector& lambda) const { return -trace_flux(solve(lambda)); }

  // Source response +u(0, f).n with the outer boundary data applied; the
  // solution is cached for the final field recovery.
  const Vector& g_response() const {
    if (!f_solution_) {
      f_solution_ = solve(Vector::Zero(n_trace_), f_cells_, true);
      g_flux_ = trace_flux(*f_solution_);
    }
    return g_flux_;
  }

  // Full sub-domain fields for a converged trace pressure: the Robin part
  // plus the cached source part.
  MixedSolution recover_solution(const Vector& lambda) const {
    g_response();
    MixedSolution sol = solve(lambda);
    sol.u += f_solution_->u;
    sol.p += f_solution_->p;
    return sol;
  }

  const Vector& source() const { return f_cells_; }
  double cell_area(int c) const { return cell_area_[c]; }

 private:
  void build_saddle() {
    std::vector<char> strong(n_u_ + n_c_, 0);
    for (int e : mats_.outer_neumann_edges) {
      strong[e] = 1;
      constrained_.push_back(e);
    }

    std::vector<Triplet> ts, te;
    const int n = n_u_ + n_c_;
    std::vector<int> col_index(n, -1);
    for (std::size_t k = 0; k < constrained_.size(); ++k)
      col_index[constrained_[k]] = static_cast<int>(k);

    auto push = [&](int r, int c, double v) {
      if (strong[r]) return;
      if (strong[c]) {
        te.emplace_back(r, col_index[c], v);
        return;
      }
      ts.emplace_back(r, c, v);
    };
    for (int k = 0; k < mats_.A.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(mats_.A, k); it; ++it)
        push(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < mats_.B.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(mats_.B, k); it; ++it) {
        const int c = static_cast<int>(it.row());
        const int e = static_cast<int>(it.col());
        push(e, n_u_ + c, -it.value());  // momentum: -B^T p
        push(n_u_ + c, e, -it.value());  // mass: -div u = -f
      }
    for (int e : constrained_) ts.emplace_back(e, e, 1.0);

    saddle_.resize(n, n);
    saddle_.setFromTriplets(ts.begin(), ts.end());
    elim_cols_.resize(n, static_cast<int>(constrained_.size()));
    elim_cols_.setFromTriplets(te.begin(), te.end());
  }

  int id_ = 0;
  int n_u_ = 0, n_c_ = 0, n_trace_ = 0;
  SubdomainMatrices mats_;
  Vector f_cells_;
  std::vector<TraceIndex> traces_;
  std::vector<int> trace_offsets_;
  std::vector<int> constrained_;
  SparseMatrix saddle_;
  SparseMatrix elim_cols_;
  Eigen::SparseLU<SparseMatrix> lu_;
  Vector cell_area_;
  mutable std::optional<MixedSolution> f_solution_;
  mutable Vector g_flux_;
};

// Assemble and factorize one sub-domain end to end.
inline RobinSubdomainSystem make_subdomain_system(
    const MixedDimMesh& mdm, int s, const std::vector<double>& cell_K,
    const RobinCoefficients& robin, const BoundarySpec& bc, Vector f_cells,
    double dom_lo = 0.0, double dom_hi = 1.0) {
  SubdomainMatrices mats = assemble_subdomain(mdm, s, cell_K, robin, bc, dom_lo, dom_hi);
  return RobinSubdomainSystem(mdm, s, std::move(mats), std::move(f_cells));
}

}  // namespace fracflow
