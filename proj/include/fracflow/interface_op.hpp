// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseLU>

#include "fracflow/core.hpp"
#include "fracflow/fracture1d.hpp"
#include "fracflow/geometry.hpp"
#include "fracflow/gmres.hpp"
#include "fracflow/mortar.hpp"
#include "fracflow/msbasis.hpp"
#include "fracflow/rt0.hpp"
#include "fracflow/subdomain.hpp"

namespace fracflow {

enum class SolveMode { Direct, Multiscale };

struct ProblemConfig {
  std::vector<double> K_sub = {1.0};  // scalar permeability, per sub-domain or uniform
  std::vector<FractureLaw> laws;      // per fracture
  BoundarySpec bc = BoundarySpec::benchmark();
  double f_matrix = 0.0;              // uniform rock-matrix source
  Vector f_gamma;                     // source per interface-pressure dof (empty = 0)
  SolveMode mode = SolveMode::Direct;
};

// The reduced fracture-network problem: the flux-jump operator evaluated
// either through sub-domain solves or through the precomputed basis, the
// block operator of the linearized system, its preconditioner, and the
// final recovery of sub-domain fields.
class InterfaceProblem {
 public:
  InterfaceProblem(const MixedDimMesh& mdm, ProblemConfig cfg)
      : mdm_(mdm), cfg_(std::move(cfg)), lay_(make_layout(mdm)) {
    if (cfg_.laws.size() != mdm.network.fractures.size())
      throw FracflowError("one fracture law per fracture required");
    blk_ = assemble_network_blocks(mdm_, cfg_.laws, cfg_.bc);
    strong_.assign(lay_.n_u, 0);
    for (const auto& [j, v] : blk_.strong_u) {
      (void)v;
      strong_[j] = 1;
    }
    if (cfg_.f_gamma.size() == 0) cfg_.f_gamma = Vector::Zero(lay_.n_p);
    if (cfg_.f_gamma.size() != lay_.n_p)
      throw FracflowError("fracture source size mismatch");

    RobinCoefficients robin;
    for (std::size_t b = 0; b < mdm_.branches.size(); ++b)
      robin.alpha[static_cast<int>(b)] = cfg_.laws[mdm_.branches[b].fracture].alpha;
    for (int s = 0; s < static_cast<int>(mdm_.subdomains.size()); ++s) {
      const double K =
          cfg_.K_sub.size() == 1 ? cfg_.K_sub[0] : cfg_.K_sub.at(s);
      const int nc = static_cast<int>(mdm_.subdomains[s].triangles.size());
      SubdomainMatrices mats = assemble_subdomain(mdm_, s, {K}, robin, cfg_.bc);
      systems_.push_back(std::make_unique<RobinSubdomainSystem>(
          mdm_, s, std::move(mats), Vector::Constant(nc, cfg_.f_matrix)));
    }
    for (const auto& tm : mdm_.traces) projections_.emplace(&tm, build_projection(mdm_, tm));
    hash_ = basis_hash(mdm_, cfg_.K_sub, cfg_.laws);
  }

  const MixedDimMesh& mesh() const { return mdm_; }
  const NetworkLayout& layout() const { return lay_; }
  const NetworkBlocks& blocks() const { return blk_; }
  const ProblemConfig& config() const { return cfg_; }
  SolveCounter& counter() { return counter_; }
  std::uint64_t hash() const { return hash_; }
  SolveMode mode() const { return cfg_.mode; }
  const std::vector<std::unique_ptr<RobinSubdomainSystem>>& systems() const {
    return systems_;
  }

  // Flux jump across all interfaces for an interface pressure, as a density
  // per mortar cell. One solve unit in direct mode, none with the basis.
  Vector apply_S_gamma(const Vector& p,
                       SolveCounter::Phase phase = SolveCounter::Phase::Interface) {
    if (p.size() != lay_.n_p) throw FracflowError("mortar vector size mismatch");
    if (cfg_.mode == SolveMode::Multiscale) {
      if (!basis_) throw FracflowError("flux basis not assembled or loaded");
      return apply_basis(*basis_, p, hash_);
    }
    counter_.add(phase);
    return direct_S_gamma(p);
  }

  // The same evaluation forced through sub-domain solves, without counting;
  // used to cross-check the basis path.
  Vector direct_S_gamma(const Vector& p) const {
    Vector out = Vector::Zero(lay_.n_p);
    for (const auto& sys : systems_) {
      Vector lambda = Vector::Zero(sys->n_trace_dofs());
      const auto& traces = sys->traces();
      for (std::size_t t = 0; t < traces.size(); ++t) {
        const auto* tm = traces[t].map;
        const auto& proj = projections_.at(tm);
        const Vector seg =
            apply(proj,
                  p.segment(mdm_.mortar_offset[tm->branch],
                            mdm_.branches[tm->branch].n_cells),
                  ProjectionDirection::ToTrace);
        lambda.segment(sys->trace_offsets()[t], seg.size()) = seg;
      }
      const Vector flux = sys->rtn_flux(lambda);
      for (std::size_t t = 0; t < traces.size(); ++t) {
        const auto* tm = traces[t].map;
        const Vector seg =
            flux.segment(sys->trace_offsets()[t], traces[t].edge_dofs.size());
        const Vector fm = apply(projections_.at(tm), seg, ProjectionDirection::ToMortar);
        out.segment(mdm_.mortar_offset[tm->branch], fm.size()) += fm;
      }
    }
    return out;
  }

  Vector apply_S_T(const Vector& u) const { return blk_.NT * u; }

  // Source response of all sub-domains, projected; one solve unit, cached.
  const Vector& g_gamma() {
    if (!g_) {
      counter_.add(SolveCounter::Phase::Source);
      g_ = Vector::Zero(lay_.n_p);
      for (const auto& sys : systems_) {
        const Vector& flux = sys->g_response();
        const auto& traces = sys->traces();
        for (std::size_t t = 0; t < traces.size(); ++t) {
          const auto* tm = traces[t].map;
          const Vector seg =
              flux.segment(sys->trace_offsets()[t], traces[t].edge_dofs.size());
          const Vector fm =
              apply(projections_.at(tm), seg, ProjectionDirection::ToMortar);
          g_->segment(mdm_.mortar_offset[tm->branch], fm.size()) += fm;
        }
      }
    }
    return *g_;
  }

  void assemble_basis_now() {
    if (!basis_)
      basis_ = assemble_basis(mdm_, systems_, projections_, hash_, counter_);
  }
  void use_basis(MultiscaleFluxBasis b) {
    if (b.hash != hash_)
      throw StaleBasisError("flux basis does not match the current problem");
    basis_ = std::move(b);
  }
  const MultiscaleFluxBasis* basis() const { return basis_ ? &*basis_ : nullptr; }

  // Freeze the linearization state: the velocity mass block at (u, p),
  // either the lagged-coefficient form or the Newton tangent.
  void set_state(const Vector& u, const Vector& p, bool newton_tangent) {
    mass_ = newton_tangent ? assemble_mass_jacobian(mdm_, cfg_.laws, lay_, u)
                           : assemble_mass(mdm_, cfg_.laws, lay_, u, p);
    impose_strong_rows(mass_, blk_);
    precond_ = nullptr;
  }

  // Block operator of the linear(ized) interface system.
  Vector apply_operator(const Vector& x,
                        SolveCounter::Phase phase = SolveCounter::Phase::Interface) {
    if (x.size() != lay_.total()) throw FracflowError("state size mismatch");
    if (mass_.rows() == 0) throw FracflowError("linearization state not set");
    const auto u = x.head(lay_.n_u);
    const auto p = x.segment(lay_.n_u, lay_.n_p);
    const auto pt = x.tail(lay_.n_T);
    Vector y(lay_.total());
    Vector yu = mass_ * u;
    const Vector bp = blk_.B.transpose() * p;
    const Vector ntp = blk_.NT.transpose() * pt;
    for (int j = 0; j < lay_.n_u; ++j)
      if (!strong_[j]) yu[j] += -bp[j] + ntp[j];
    y.head(lay_.n_u) = yu;
    y.segment(lay_.n_u, lay_.n_p) =
        blk_.B * u + blk_.h.cwiseProduct(apply_S_gamma(p, phase));
    y.tail(lay_.n_T) = blk_.NT * u;
    return y;
  }

  // Right-hand side of the interface system (includes the source response).
  Vector rhs() {
    Vector r = Vector::Zero(lay_.total());
    r.head(lay_.n_u) = blk_.rhs_u;
    for (const auto& [j, v] : blk_.strong_u) r[j] = v;
    r.segment(lay_.n_u, lay_.n_p) = blk_.h.cwiseProduct(cfg_.f_gamma + g_gamma());
    return r;
  }

  // Inverse of the network block with the flux-jump coupling dropped,
  // factorized at the current linearization state. Falls back to the
  // identity when that block is singular.
  LinearOp preconditioner() {
    if (!precond_) {
      std::vector<Triplet> ts;
      auto add = [&](int r, int c, double v) { ts.emplace_back(r, c, v); };
      for (int k = 0; k < mass_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(mass_, k); it; ++it)
          add(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      for (int k = 0; k < blk_.B.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(blk_.B, k); it; ++it) {
          const int c = static_cast<int>(it.row());
          const int j = static_cast<int>(it.col());
          if (!strong_[j]) add(j, lay_.n_u + c, -it.value());
          add(lay_.n_u + c, j, it.value());
        }
      for (int k = 0; k < blk_.NT.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(blk_.NT, k); it; ++it) {
          const int t = static_cast<int>(it.row());
          const int j = static_cast<int>(it.col());
          if (!strong_[j]) add(j, lay_.n_u + lay_.n_p + t, it.value());
          add(lay_.n_u + lay_.n_p + t, j, it.value());
        }
      SparseMatrix P(lay_.total(), lay_.total());
      P.setFromTriplets(ts.begin(), ts.end());
      auto lu = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
      lu->compute(P);
      if (lu->info() == Eigen::Success)
        precond_ = [lu](const Vector& v) { return Vector(lu->solve(v)); };
      else
        precond_ = [](const Vector& v) { return v; };
    }
    return precond_;
  }

  // One preconditioned GMRES solve of the linearized system.
  GmresResult solve_linear(const Vector& b, const GmresConfig& gcfg,
                           const Vector& x0 = Vector()) {
    return gmres([this](const Vector& v) { return apply_operator(v); }, b, x0,
                 gcfg, preconditioner());
  }

  // Extract h-weighted flux jump from an operator image: the pressure rows
  // are B u + h o S_gamma(p).
  Vector extract_S_gamma(const Vector& op_x, const Vector& x) const {
    const Vector yp = op_x.segment(lay_.n_u, lay_.n_p);
    const Vector bu = blk_.B * x.head(lay_.n_u);
    return (yp - bu).cwiseQuotient(blk_.h);
  }

  // Final sub-domain fields for a converged interface pressure. One unit.
  std::vector<MixedSolution> recover(const Vector& p_mortar) {
    counter_.add(SolveCounter::Phase::Recovery);
    std::vector<MixedSolution> out;
    for (const auto& sys : systems_) {
      Vector lambda = Vector::Zero(sys->n_trace_dofs());
      const auto& traces = sys->traces();
      for (std::size_t t = 0; t < traces.size(); ++t) {
        const auto* tm = traces[t].map;
        const Vector seg =
            apply(projections_.at(tm),
                  p_mortar.segment(mdm_.mortar_offset[tm->branch],
                                   mdm_.branches[tm->branch].n_cells),
                  ProjectionDirection::ToTrace);
        lambda.segment(sys->trace_offsets()[t], seg.size()) = seg;
      }
      out.push_back(sys->recover_solution(lambda));
    }
    return out;
  }

 private:
  const MixedDimMesh& mdm_;
  ProblemConfig cfg_;
  NetworkLayout lay_;
  NetworkBlocks blk_;
  std::vector<char> strong_;
  std::vector<std::unique_ptr<RobinSubdomainSystem>> systems_;
  std::unordered_map<const TraceMap*, MortarProjection> projections_;
  std::uint64_t hash_ = 0;
  SolveCounter counter_;
  std::optional<MultiscaleFluxBasis> basis_;
  std::optional<Vector> g_;
  SparseMatrix mass_;
  LinearOp precond_;
};

}  // namespace fracflow
