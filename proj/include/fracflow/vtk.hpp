// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "fracflow/core.hpp"
#include "fracflow/fracture1d.hpp"
#include "fracflow/geometry.hpp"
#include "fracflow/rt0.hpp"
#include "fracflow/subdomain.hpp"

namespace fracflow {

/// Velocity vector at a triangle centroid from the edge-flux coefficients.
inline Vec2 cell_velocity(const SubdomainMesh& m, int t,
                          const std::vector<int>& edge_perm, const Vector& u) {
  const auto& tr = m.triangles[t];
  const double area = m.tri_area(t);
  const Vec2 c = m.centroid(t);
  const std::array<Vec2, 3> opp = {m.vertices[tr[2]], m.vertices[tr[0]],
                                   m.vertices[tr[1]]};
  Vec2 v = Vec2::Zero();
  for (int k = 0; k < 3; ++k) {
    const auto& e = m.edges[m.tri_edges[t][k]];
    const double sigma = (e.normal.dot(e.midpoint - c) > 0) ? 1.0 : -1.0;
    v += u[edge_perm[m.tri_edges[t][k]]] * sigma / (2.0 * area) * (c - opp[k]);
  }
  return v;
}

/// All sub-domains in one legacy-ASCII unstructured grid: triangle cells,
/// cell pressure, and the centroid velocity as a 3-vector (z = 0).
inline void write_matrix_vtk(const std::string& path, const MixedDimMesh& mdm,
                             const std::vector<const SubdomainMatrices*>& mats,
                             const std::vector<MixedSolution>& fields) {
  std::ofstream f(path);
  if (!f) throw FracflowError("cannot open output file: " + path);
  f.precision(15);

  int n_pts = 0, n_tris = 0;
  for (const auto& m : mdm.subdomains) {
    n_pts += static_cast<int>(m.vertices.size());
    n_tris += static_cast<int>(m.triangles.size());
  }
  f << "# vtk DataFile Version 3.0\nrock matrix fields\nASCII\n"
    << "DATASET UNSTRUCTURED_GRID\nPOINTS " << n_pts << " double\n";
  for (const auto& m : mdm.subdomains)
    for (const auto& v : m.vertices) f << v.x() << " " << v.y() << " 0\n";
  f << "CELLS " << n_tris << " " << 4 * n_tris << "\n";
  int base = 0;
  for (const auto& m : mdm.subdomains) {
    for (const auto& tr : m.triangles)
      f << "3 " << base + tr[0] << " " << base + tr[1] << " " << base + tr[2] << "\n";
    base += static_cast<int>(m.vertices.size());
  }
  f << "CELL_TYPES " << n_tris << "\n";
  for (int t = 0; t < n_tris; ++t) f << "5\n";

  f << "CELL_DATA " << n_tris << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t s = 0; s < mdm.subdomains.size(); ++s)
    for (int t = 0; t < static_cast<int>(mdm.subdomains[s].triangles.size()); ++t)
      f << fields[s].p[mats[s]->cell_perm[t]] << "\n";
  f << "VECTORS velocity double\n";
  for (std::size_t s = 0; s < mdm.subdomains.size(); ++s)
    for (int t = 0; t < static_cast<int>(mdm.subdomains[s].triangles.size()); ++t) {
      const Vec2 v = cell_velocity(mdm.subdomains[s], t, mats[s]->edge_perm,
                                   fields[s].u);
      f << v.x() << " " << v.y() << " 0\n";
    }
  if (!f) throw FracflowError("write failure: " + path);
}

/// Fracture network as line cells with per-cell pressure and tangential
/// velocity (midpoint value of the nodal field).
inline void write_fracture_vtk(const std::string& path, const MixedDimMesh& mdm,
                               const Vector& u_gamma, const Vector& p_gamma) {
  std::ofstream f(path);
  if (!f) throw FracflowError("cannot open output file: " + path);
  f.precision(15);
  const NetworkLayout lay = make_layout(mdm);

  int n_pts = 0, n_cells = 0;
  for (const auto& br : mdm.branches) {
    n_pts += br.n_cells + 1;
    n_cells += br.n_cells;
  }
  f << "# vtk DataFile Version 3.0\nfracture fields\nASCII\n"
    << "DATASET UNSTRUCTURED_GRID\nPOINTS " << n_pts << " double\n";
  for (const auto& br : mdm.branches)
    for (int j = 0; j <= br.n_cells; ++j) {
      const Vec2 p = br.a + (br.b - br.a) * (static_cast<double>(j) / br.n_cells);
      f << p.x() << " " << p.y() << " 0\n";
    }
  f << "CELLS " << n_cells << " " << 3 * n_cells << "\n";
  int base = 0;
  for (const auto& br : mdm.branches) {
    for (int c = 0; c < br.n_cells; ++c)
      f << "2 " << base + c << " " << base + c + 1 << "\n";
    base += br.n_cells + 1;
  }
  f << "CELL_TYPES " << n_cells << "\n";
  for (int c = 0; c < n_cells; ++c) f << "3\n";

  f << "CELL_DATA " << n_cells << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t b = 0; b < mdm.branches.size(); ++b)
    for (int c = 0; c < mdm.branches[b].n_cells; ++c)
      f << p_gamma[mdm.mortar_offset[b] + c] << "\n";
  f << "SCALARS tangential_velocity double 1\nLOOKUP_TABLE default\n";
  for (std::size_t b = 0; b < mdm.branches.size(); ++b) {
    const int off = lay.u_offset[b];
    for (int c = 0; c < mdm.branches[b].n_cells; ++c)
      f << 0.5 * (u_gamma[off + c] + u_gamma[off + c + 1]) << "\n";
  }
  if (!f) throw FracflowError("write failure: " + path);
}

}  // namespace fracflow
