// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "fracflow/core.hpp"
#include "fracflow/fracture1d.hpp"
#include "fracflow/geometry.hpp"
#include "fracflow/mortar.hpp"
#include "fracflow/subdomain.hpp"

namespace fracflow {

// Precomputed flux responses: for each sub-domain, a dense matrix over its
// incident interface-pressure dofs whose column l is the projected flux
// response to the unit coefficient vector e_l. Applying the interface flux
// operator then costs no sub-domain solves at all.
struct MultiscaleFluxBasis {
  std::vector<Matrix> psi;                // per sub-domain
  std::vector<std::vector<int>> inc;      // per sub-domain: global mortar dofs
  std::uint64_t hash = 0;
};

// Fingerprint of everything the basis depends on: mesh layout, matrix
// permeability, and the normal coupling coefficients. Deliberately excludes
// the tangential law (beta, zeta), sources, and boundary data.
inline std::uint64_t basis_hash(const MixedDimMesh& mdm,
                                const std::vector<double>& K_sub,
                                const std::vector<FractureLaw>& laws) {
  Hasher h;
  h.add(static_cast<int>(mdm.subdomains.size()));
  for (const auto& m : mdm.subdomains) {
    h.add(static_cast<int>(m.vertices.size()));
    h.add(static_cast<int>(m.triangles.size()));
    h.add(m.lo.x());
    h.add(m.lo.y());
    h.add(m.hi.x());
    h.add(m.hi.y());
  }
  for (const auto& br : mdm.branches) {
    h.add(br.fracture);
    h.add(br.n_cells);
    h.add(br.a.x());
    h.add(br.a.y());
    h.add(br.b.x());
    h.add(br.b.y());
  }
  for (double k : K_sub) h.add(k);
  for (const auto& law : laws) h.add(law.alpha);
  return h.value();
}

inline std::vector<std::vector<int>> incident_mortar_dofs(const MixedDimMesh& mdm) {
  std::vector<std::vector<int>> inc(mdm.subdomains.size());
  for (std::size_t s = 0; s < mdm.subdomains.size(); ++s)
    for (const auto* tm : mdm.traces_of_subdomain(static_cast<int>(s))) {
      const auto& br = mdm.branches[tm->branch];
      for (int c = 0; c < br.n_cells; ++c)
        inc[s].push_back(mdm.mortar_offset[tm->branch] + c);
    }
  return inc;
}

// Assemble the basis: one solve unit per interface-pressure dof; only the
// (at most two) sub-domains touching the dof's branch take part in a unit.
inline MultiscaleFluxBasis assemble_basis(
    const MixedDimMesh& mdm,
    const std::vector<std::unique_ptr<RobinSubdomainSystem>>& systems,
    const std::unordered_map<const TraceMap*, MortarProjection>& projections,
    std::uint64_t hash, SolveCounter& counter) {
  MultiscaleFluxBasis basis;
  basis.hash = hash;
  basis.inc = incident_mortar_dofs(mdm);
  basis.psi.resize(mdm.subdomains.size());
  std::vector<std::unordered_map<int, int>> pos(mdm.subdomains.size());
  for (std::size_t s = 0; s < basis.inc.size(); ++s) {
    const int n = static_cast<int>(basis.inc[s].size());
    basis.psi[s] = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) pos[s][basis.inc[s][k]] = k;
  }

  for (std::size_t b = 0; b < mdm.branches.size(); ++b) {
    const auto sides = mdm.traces_of_branch(static_cast<int>(b));
    const auto& br = mdm.branches[b];
    for (int c = 0; c < br.n_cells; ++c) {
      const int ell = mdm.mortar_offset[b] + c;
      counter.add(SolveCounter::Phase::Basis);
      for (const auto* tm : sides) {
        const int s = tm->subdomain;
        const auto& sys = *systems[s];
        Vector lambda = Vector::Zero(sys.n_trace_dofs());
        // unit mortar coefficient, projected onto this side's trace
        const auto& traces = sys.traces();
        for (std::size_t t = 0; t < traces.size(); ++t) {
          if (traces[t].map != tm) continue;
          const auto& proj = projections.at(tm);
          Vector e = Vector::Zero(br.n_cells);
          e[c] = 1.0;
          const Vector seg = apply(proj, e, ProjectionDirection::ToTrace);
          lambda.segment(sys.trace_offsets()[t], seg.size()) = seg;
        }
        const Vector flux = sys.rtn_flux(lambda);
        for (std::size_t t = 0; t < traces.size(); ++t) {
          const auto& proj = projections.at(traces[t].map);
          const Vector seg = flux.segment(sys.trace_offsets()[t],
                                          traces[t].edge_dofs.size());
          const Vector fm = apply(proj, seg, ProjectionDirection::ToMortar);
          const int b2 = traces[t].map->branch;
          for (int k = 0; k < fm.size(); ++k)
            basis.psi[s](pos[s].at(mdm.mortar_offset[b2] + k), pos[s].at(ell)) +=
                fm[k];
        }
      }
    }
  }
  return basis;
}

// Flux-jump application as a pure linear combination (no solves).
inline Vector apply_basis(const MultiscaleFluxBasis& basis, const Vector& phi,
                          std::uint64_t expected_hash) {
  if (basis.hash != expected_hash)
    throw StaleBasisError("flux basis does not match the current problem");
  int n_mortar = 0;
  for (const auto& inc : basis.inc)
    for (int g : inc) n_mortar = std::max(n_mortar, g + 1);
  if (phi.size() < n_mortar) throw FracflowError("mortar vector too small");
  Vector out = Vector::Zero(phi.size());
  for (std::size_t s = 0; s < basis.psi.size(); ++s) {
    const auto& inc = basis.inc[s];
    Vector local(inc.size());
    for (std::size_t k = 0; k < inc.size(); ++k) local[k] = phi[inc[k]];
    const Vector y = basis.psi[s] * local;
    for (std::size_t k = 0; k < inc.size(); ++k) out[inc[k]] += y[k];
  }
  return out;
}

namespace detail {
constexpr char kBasisMagic[4] = {'M', 'S', 'F', 'B'};
constexpr std::uint32_t kBasisVersion = 1;
}  // namespace detail

inline void save_basis(const MultiscaleFluxBasis& basis, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FracflowError("cannot open basis file for writing: " + path);
  f.write(detail::kBasisMagic, 4);
  auto w32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  auto w64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  w32(detail::kBasisVersion);
  w64(basis.hash);
  w32(static_cast<std::uint32_t>(basis.psi.size()));
  for (std::size_t s = 0; s < basis.psi.size(); ++s) {
    w32(static_cast<std::uint32_t>(basis.inc[s].size()));
    for (int g : basis.inc[s]) w32(static_cast<std::uint32_t>(g));
    f.write(reinterpret_cast<const char*>(basis.psi[s].data()),
            static_cast<std::streamsize>(sizeof(double) * basis.psi[s].size()));
  }
  if (!f) throw FracflowError("short write on basis file: " + path);

  std::ofstream man(path + ".manifest");
  man << "format: msfb v" << detail::kBasisVersion << "\n"
      << "hash: " << basis.hash << "\n"
      << "subdomains: " << basis.psi.size() << "\n";
  for (std::size_t s = 0; s < basis.psi.size(); ++s)
    man << "  psi[" << s << "]: " << basis.psi[s].rows() << " x "
        << basis.psi[s].cols() << "\n";
}

inline MultiscaleFluxBasis load_basis(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FracflowError("cannot open basis file: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, detail::kBasisMagic, 4) != 0)
    throw FracflowError("not a flux-basis file: " + path);
  auto r32 = [&]() {
    std::uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto r64 = [&]() {
    std::uint64_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  if (r32() != detail::kBasisVersion)
    throw FracflowError("unsupported basis file version: " + path);
  MultiscaleFluxBasis basis;
  basis.hash = r64();
  const std::uint32_t ns = r32();
  basis.psi.resize(ns);
  basis.inc.resize(ns);
  for (std::uint32_t s = 0; s < ns; ++s) {
    const std::uint32_t n = r32();
    basis.inc[s].resize(n);
    for (std::uint32_t k = 0; k < n; ++k) basis.inc[s][k] = static_cast<int>(r32());
    basis.psi[s].resize(n, n);
    f.read(reinterpret_cast<char*>(basis.psi[s].data()),
           static_cast<std::streamsize>(sizeof(double) * basis.psi[s].size()));
  }
  if (!f) throw FracflowError("truncated basis file: " + path);
  return basis;
}

}  // namespace fracflow
