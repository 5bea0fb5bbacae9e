// SPDX-License-Identifier: Apache-2.0

#ifndef FRACFLOW_GEOMETRY_HPP
#define FRACFLOW_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "fracflow/core.hpp"

namespace fracflow {

constexpr double kGeomTol = 1e-12;

// ---------------------------------------------------------------------------
// Fracture network description
// ---------------------------------------------------------------------------

struct FractureSegment {
  Vec2 a, b;
  double length() const { return (b - a).norm(); }
  Vec2 tangent() const { return (b - a).normalized(); }
  // signed arc-length coordinate of a point on the segment
  double param_of(const Vec2& p) const { return (p - a).dot(tangent()); }
  bool contains(const Vec2& p, double tol = kGeomTol) const {
    const double t = param_of(p);
    if (t < -tol || t > length() + tol) return false;
    return (a + t * tangent() - p).norm() < tol;
  }
};

struct IntersectionPoint {
  Vec2 point;
  std::vector<int> fractures;  // incident fracture ids
};

struct FractureNetwork {
  std::vector<FractureSegment> fractures;
  std::vector<IntersectionPoint> intersections;
  double aperture = 1e-4;
  int declared_subdomains = 0;
};

enum class EndpointKind {
  Intersection,   // shared (d-2) pressure dof
  OuterBoundary,  // inherits the outer boundary condition
  NoFlow          // interior dead end
};

/// Piece of a fracture between consecutive intersection points.  Carries
/// the 1D mortar/fracture grid (uniform cells) and endpoint topology.
struct Branch {
  int fracture = -1;
  Vec2 a, b;  // oriented along the parent fracture tangent
  int n_cells = 0;
  EndpointKind end_kind[2] = {EndpointKind::NoFlow, EndpointKind::NoFlow};
  int end_isect[2] = {-1, -1};  // intersection id where applicable

  double length() const { return (b - a).norm(); }
  Vec2 tangent() const { return (b - a).normalized(); }
  double h() const { return length() / n_cells; }
  Vec2 endpoint(int which) const { return which == 0 ? a : b; }
  // outward tangential "normal" at an endpoint (1D outer normal, signed
  // w.r.t. the branch tangent direction)
  double endpoint_normal(int which) const { return which == 0 ? -1.0 : 1.0; }
};

// ---------------------------------------------------------------------------
// Sub-domain triangulations
// ---------------------------------------------------------------------------

struct MeshEdge {
  int v0, v1;        // v0 < v1
  int tri[2];        // incident triangles, -1 if boundary
  Vec2 normal;       // fixed global unit normal; dof = flux in this direction
  double length;
  Vec2 midpoint;
};

struct SubdomainMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;      // vertex ids, ccw
  std::vector<std::array<int, 3>> tri_edges;      // edge ids per triangle
  std::vector<MeshEdge> edges;
  std::vector<int> boundary_edges;                // edge ids with tri[1] < 0
  Vec2 lo, hi;                                    // bounding rectangle

  double tri_area(int t) const {
    const auto& tr = triangles[t];
    const Vec2 &p0 = vertices[tr[0]], &p1 = vertices[tr[1]], &p2 = vertices[tr[2]];
    return 0.5 * ((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
  }
  Vec2 centroid(int t) const {
    const auto& tr = triangles[t];
    return (vertices[tr[0]] + vertices[tr[1]] + vertices[tr[2]]) / 3.0;
  }
};

/// Ordered list of sub-domain boundary edges tiling one side of a branch.
struct TraceMap {
  int subdomain = -1;
  int branch = -1;
  int side = 0;  // 0/1, side w.r.t. the branch tangent (left/right)
  struct Entry {
    int edge;       // edge id within the sub-domain mesh
    double t0, t1;  // arc-length interval along the branch, t0 < t1
    double sign;    // +1 if the global edge normal is outward for this sub-domain
  };
  std::vector<Entry> entries;  // ordered by t0
};

struct MixedDimMesh {
  FractureNetwork network;
  std::vector<Branch> branches;
  std::vector<SubdomainMesh> subdomains;
  std::vector<TraceMap> traces;

  // global mortar (= fracture pressure) dof layout, branch-major
  std::vector<int> mortar_offset;
  int n_mortar = 0;

  int n_intersections() const { return static_cast<int>(network.intersections.size()); }

  const TraceMap* find_trace(int subdomain, int branch) const {
    for (const auto& t : traces)
      if (t.subdomain == subdomain && t.branch == branch) return &t;
    return nullptr;
  }
  std::vector<const TraceMap*> traces_of_subdomain(int s) const {
    std::vector<const TraceMap*> out;
    for (const auto& t : traces)
      if (t.subdomain == s) out.push_back(&t);
    return out;
  }
  std::vector<const TraceMap*> traces_of_branch(int b) const {
    std::vector<const TraceMap*> out;
    for (const auto& t : traces)
      if (t.branch == b) out.push_back(&t);
    return out;
  }
};

enum class MortarMode { Coarser, Conforming, Finer };

struct MortarConfig {
  MortarMode mode = MortarMode::Conforming;
  int ratio = 1;
  std::vector<int> fractures;  // fractures the mode applies to; empty = all

  bool applies_to(int fracture) const {
    return fractures.empty() ||
           std::find(fractures.begin(), fractures.end(), fracture) != fractures.end();
  }
};

// ---------------------------------------------------------------------------
// Structured rectangle mesher
// ---------------------------------------------------------------------------

namespace detail {

/// Triangulate a tensor grid given by axis breakpoints; each quad is split
/// along the (i,j)-(i+1,j+1) diagonal.
inline SubdomainMesh mesh_rectangle(const std::vector<double>& xs,
                                    const std::vector<double>& ys) {
  SubdomainMesh m;
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;
  m.lo = Vec2(xs.front(), ys.front());
  m.hi = Vec2(xs.back(), ys.back());
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.vertices.emplace_back(xs[i], ys[j]);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      // lower-right and upper-left triangle of the quad, both ccw
      m.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      m.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }

  // unique edges
  std::map<std::pair<int, int>, int> edge_id;
  m.tri_edges.resize(m.triangles.size());
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const auto& tr = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tr[k], b = tr[(k + 1) % 3];
      auto key = std::minmax(a, b);
      auto it = edge_id.find(key);
      int e;
      if (it == edge_id.end()) {
        e = static_cast<int>(m.edges.size());
        edge_id.emplace(key, e);
        MeshEdge me;
        me.v0 = key.first;
        me.v1 = key.second;
        me.tri[0] = t;
        me.tri[1] = -1;
        const Vec2 tv = m.vertices[me.v1] - m.vertices[me.v0];
        me.length = tv.norm();
        me.normal = Vec2(tv.y(), -tv.x()) / me.length;
        me.midpoint = 0.5 * (m.vertices[me.v0] + m.vertices[me.v1]);
        m.edges.push_back(me);
      } else {
        e = it->second;
        m.edges[e].tri[1] = t;
      }
      m.tri_edges[t][k] = e;
    }
  }
  for (int e = 0; e < static_cast<int>(m.edges.size()); ++e)
    if (m.edges[e].tri[1] < 0) m.boundary_edges.push_back(e);
  return m;
}

inline std::vector<double> uniform_breakpoints(double a, double b, int n) {
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) xs[i] = a + (b - a) * i / n;
  xs.back() = b;
  return xs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace detail {

/// Compute pairwise intersections (crossings and T-junctions) of segments.
inline std::vector<IntersectionPoint> find_intersections(
    const std::vector<FractureSegment>& fr) {
  std::vector<IntersectionPoint> pts;
  auto record = [&](const Vec2& p, int i, int j) {
    for (auto& ip : pts) {
      if ((ip.point - p).norm() < 1e-10) {
        for (int f : {i, j})
          if (std::find(ip.fractures.begin(), ip.fractures.end(), f) == ip.fractures.end())
            ip.fractures.push_back(f);
        return;
      }
    }
    pts.push_back({p, {i, j}});
  };
  const int n = static_cast<int>(fr.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec2 d1 = fr[i].b - fr[i].a, d2 = fr[j].b - fr[j].a;
      const double den = d1.x() * d2.y() - d1.y() * d2.x();
      if (std::abs(den) < 1e-14) continue;  // parallel
      const Vec2 r = fr[j].a - fr[i].a;
      const double t = (r.x() * d2.y() - r.y() * d2.x()) / den;
      const double s = (r.x() * d1.y() - r.y() * d1.x()) / den;
      if (t < -kGeomTol || t > 1 + kGeomTol || s < -kGeomTol || s > 1 + kGeomTol) continue;
      record(fr[i].a + t * d1, i, j);
    }
  return pts;
}

/// Split fractures into branches at intersection points.
inline std::vector<Branch> make_branches(const FractureNetwork& net,
                                         bool endpoints_on_boundary_are_outer,
                                         const Vec2& dom_lo, const Vec2& dom_hi) {
  std::vector<Branch> branches;
  auto on_outer = [&](const Vec2& p) {
    return std::abs(p.x() - dom_lo.x()) < kGeomTol || std::abs(p.x() - dom_hi.x()) < kGeomTol ||
           std::abs(p.y() - dom_lo.y()) < kGeomTol || std::abs(p.y() - dom_hi.y()) < kGeomTol;
  };
  for (int f = 0; f < static_cast<int>(net.fractures.size()); ++f) {
    const auto& seg = net.fractures[f];
    std::vector<std::pair<double, int>> cuts;  // (param, intersection id)
    for (int q = 0; q < static_cast<int>(net.intersections.size()); ++q) {
      const auto& ip = net.intersections[q];
      if (std::find(ip.fractures.begin(), ip.fractures.end(), f) == ip.fractures.end())
        continue;
      cuts.emplace_back(seg.param_of(ip.point), q);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<double, int>> stops;
    stops.emplace_back(0.0, -1);
    for (auto& c : cuts)
      if (c.first > kGeomTol && c.first < seg.length() - kGeomTol) stops.push_back(c);
      else if (std::abs(c.first) < kGeomTol) stops.front().second = c.second;
    std::pair<double, int> last{seg.length(), -1};
    for (auto& c : cuts)
      if (std::abs(c.first - seg.length()) < kGeomTol) last.second = c.second;
    stops.push_back(last);

    for (size_t k = 0; k + 1 < stops.size(); ++k) {
      Branch br;
      br.fracture = f;
      br.a = seg.a + stops[k].first * seg.tangent();
      br.b = seg.a + stops[k + 1].first * seg.tangent();
      for (int w : {0, 1}) {
        const int isect = (w == 0) ? stops[k].second : stops[k + 1].second;
        if (isect >= 0) {
          br.end_kind[w] = EndpointKind::Intersection;
          br.end_isect[w] = isect;
        } else if (endpoints_on_boundary_are_outer && on_outer(br.endpoint(w))) {
          br.end_kind[w] = EndpointKind::OuterBoundary;
        } else {
          br.end_kind[w] = EndpointKind::NoFlow;
        }
      }
      branches.push_back(br);
    }
  }
  return branches;
}

/// Build trace maps for a rectangular sub-domain against all branches.
inline void build_traces(MixedDimMesh& mdm, int s) {
  const auto& m = mdm.subdomains[s];
  for (int b = 0; b < static_cast<int>(mdm.branches.size()); ++b) {
    const auto& br = mdm.branches[b];
    const Vec2 t = br.tangent();
    // which side of the rectangle, if any, carries this branch?
    // the branch lies on the boundary iff every point of it is on an edge line.
    TraceMap tm;
    tm.subdomain = s;
    tm.branch = b;
    for (int e : m.boundary_edges) {
      const auto& me = m.edges[e];
      const Vec2 p0 = m.vertices[me.v0], p1 = m.vertices[me.v1];
      // edge must be collinear with and contained in the branch
      if (std::abs((p0 - br.a).x() * t.y() - (p0 - br.a).y() * t.x()) >= kGeomTol) continue;
      if (std::abs((p1 - br.a).x() * t.y() - (p1 - br.a).y() * t.x()) >= kGeomTol) continue;
      double u0 = (p0 - br.a).dot(t), u1 = (p1 - br.a).dot(t);
      if (u0 > u1) std::swap(u0, u1);
      if (u0 < -kGeomTol || u1 > br.length() + kGeomTol) continue;
      // outward normal of the sub-domain on this edge
      const int tri = me.tri[0];
      const Vec2 out_dir = me.midpoint - m.centroid(tri);
      const double sgn = (me.normal.dot(out_dir) > 0) ? 1.0 : -1.0;
      tm.entries.push_back({e, u0, u1, sgn});
    }
    if (tm.entries.empty()) continue;
    std::sort(tm.entries.begin(), tm.entries.end(),
              [](const TraceMap::Entry& a, const TraceMap::Entry& c) { return a.t0 < c.t0; });
    // side: sign of (subdomain interior) relative to branch normal
    const Vec2 n(t.y(), -t.x());
    const Vec2 centroid = m.centroid(m.edges[tm.entries[0].edge].tri[0]);
    tm.side = (centroid - br.a).dot(n) > 0 ? 0 : 1;
    mdm.traces.push_back(std::move(tm));
  }
}

inline void finalize_mortar_layout(MixedDimMesh& mdm) {
  mdm.mortar_offset.assign(mdm.branches.size(), 0);
  int off = 0;
  for (size_t b = 0; b < mdm.branches.size(); ++b) {
    mdm.mortar_offset[b] = off;
    off += mdm.branches[b].n_cells;
  }
  mdm.n_mortar = off;
}

}  // namespace detail

/// Benchmark geometry: unit square cut by the six-fracture regular network
/// into 10 sub-domains.  Mortar cell totals per level are 26/84/138.
inline MixedDimMesh build_benchmark_geometry(int level, const MortarConfig& mortar = {}) {
  if (level < 1 || level > 3) throw FracflowError("benchmark level must be 1, 2 or 3");
  if (mortar.ratio < 1) throw FracflowError("mortar ratio must be positive");

  MixedDimMesh mdm;
  auto& net = mdm.network;
  net.aperture = 1e-4;
  net.declared_subdomains = 10;
  net.fractures = {
      {{0.5, 0.0}, {0.5, 1.0}},        // 0: vertical, full
      {{0.0, 0.5}, {1.0, 0.5}},        // 1: horizontal, full
      {{0.75, 0.5}, {0.75, 1.0}},      // 2
      {{0.5, 0.75}, {1.0, 0.75}},      // 3
      {{0.625, 0.5}, {0.625, 0.75}},   // 4
      {{0.5, 0.625}, {0.75, 0.625}},   // 5
  };
  net.intersections = detail::find_intersections(net.fractures);
  mdm.branches = detail::make_branches(net, true, Vec2(0, 0), Vec2(1, 1));

  // per-level mortar cell counts, by (fracture, branch index along fracture);
  // totals 26/84/138, and the level-2 low-permeable fractures carry 48 cells
  // so that ratio-2 coarsening yields exactly 60.
  static const std::vector<std::vector<int>> counts[3] = {
      {{4, 1, 1, 1}, {4, 1, 1, 1}, {1, 1, 2}, {1, 1, 2}, {1, 1}, {1, 1}},
      {{8, 2, 2, 6}, {8, 2, 2, 6}, {4, 4, 8}, {4, 4, 8}, {4, 4}, {4, 4}},
      {{12, 3, 3, 9}, {12, 3, 3, 9}, {7, 7, 14}, {7, 7, 14}, {7, 7}, {7, 7}},
  };
  std::vector<int> branch_index_in_fracture(mdm.branches.size());
  {
    std::vector<int> seen(net.fractures.size(), 0);
    for (size_t b = 0; b < mdm.branches.size(); ++b)
      branch_index_in_fracture[b] = seen[mdm.branches[b].fracture]++;
  }
  for (size_t b = 0; b < mdm.branches.size(); ++b) {
    auto& br = mdm.branches[b];
    int n = counts[level - 1][br.fracture][branch_index_in_fracture[b]];
    if (mortar.applies_to(br.fracture)) {
      if (mortar.mode == MortarMode::Coarser) {
        if (n % mortar.ratio != 0)
          throw FracflowError("mortar ratio incompatible with trace grid");
        n /= mortar.ratio;
      } else if (mortar.mode == MortarMode::Finer) {
        n *= mortar.ratio;
      }
    }
    br.n_cells = n;
  }

  // the ten rectangular sub-domains
  static const double R[10][4] = {
      {0, 0, 0.5, 0.5},          {0, 0.5, 0.5, 1},        {0.5, 0, 1, 0.5},
      {0.5, 0.5, 0.625, 0.625},  {0.625, 0.5, 0.75, 0.625},
      {0.5, 0.625, 0.625, 0.75}, {0.625, 0.625, 0.75, 0.75},
      {0.75, 0.5, 1, 0.75},      {0.5, 0.75, 0.75, 1},    {0.75, 0.75, 1, 1},
  };
  const double target_h[3] = {1.0 / 4, 1.0 / 28, 1.0 / 42};
  const double h = target_h[level - 1];

  // Partition one axis of a rectangle: cut at branch endpoints, then refine
  // each interval to the finer of the interior target size and the mortar
  // grid of a branch running along either side of the rectangle.
  auto axis_breaks = [&](const double* r, int axis) {
    const double lo = r[axis], hi = r[axis + 2];
    const double side0 = r[1 - axis], side1 = r[1 - axis + 2];
    std::set<double> cuts{lo, hi};
    for (const auto& br : mdm.branches) {
      const Vec2 t = br.tangent();
      if (std::abs(t[axis]) < 0.5) continue;  // branch orthogonal to this axis
      for (int w : {0, 1}) {
        const double c = br.endpoint(w)[axis];
        if (c > lo + kGeomTol && c < hi - kGeomTol) cuts.insert(c);
      }
    }
    auto required_cells = [&](double p, double c) {
      int req = std::max(1, static_cast<int>(std::ceil((c - p) / h - 1e-9)));
      for (const auto& br : mdm.branches) {
        const Vec2 t = br.tangent();
        if (std::abs(t[axis]) < 0.5) continue;
        const double perp = br.a[1 - axis];
        if (std::abs(perp - side0) > kGeomTol && std::abs(perp - side1) > kGeomTol) continue;
        const double b0 = std::min(br.a[axis], br.b[axis]);
        const double b1 = std::max(br.a[axis], br.b[axis]);
        if (std::abs(b0 - p) < kGeomTol && std::abs(b1 - c) < kGeomTol)
          req = std::max(req, br.n_cells);
      }
      return req;
    };
    std::vector<double> xs;
    double prev = lo;
    bool first = true;
    for (double c : cuts) {
      if (first) {
        xs.push_back(c);
        first = false;
        prev = c;
        continue;
      }
      const int n = required_cells(prev, c);
      for (int i = 1; i <= n; ++i) xs.push_back(prev + (c - prev) * i / n);
      prev = c;
    }
    return xs;
  };

  for (const auto& r : R) {
    mdm.subdomains.push_back(detail::mesh_rectangle(axis_breaks(r, 0), axis_breaks(r, 1)));
    detail::build_traces(mdm, static_cast<int>(mdm.subdomains.size()) - 1);
  }
  detail::finalize_mortar_layout(mdm);
  return mdm;
}

/// Unit-test geometry: unit square with a single horizontal fracture at
/// y = 1/2, two sub-domains, n trace cells along the fracture per side.
inline MixedDimMesh build_single_fracture_geometry(int n, const MortarConfig& mortar = {}) {
  if (n < 1) throw FracflowError("n_cells_per_side must be >= 1");
  if (mortar.ratio < 1) throw FracflowError("mortar ratio must be positive");

  MixedDimMesh mdm;
  auto& net = mdm.network;
  net.aperture = 1e-4;
  net.declared_subdomains = 2;
  net.fractures = {{{0.0, 0.5}, {1.0, 0.5}}};
  mdm.branches = detail::make_branches(net, true, Vec2(0, 0), Vec2(1, 1));

  int m = n;
  if (mortar.mode == MortarMode::Coarser) {
    if (n % mortar.ratio != 0) throw FracflowError("mortar ratio incompatible with trace grid");
    m = n / mortar.ratio;
  } else if (mortar.mode == MortarMode::Finer) {
    m = n * mortar.ratio;
  }
  mdm.branches[0].n_cells = m;

  const int ny = std::max(2, (n + 1) / 2);
  const auto xs = detail::uniform_breakpoints(0, 1, n);
  mdm.subdomains.push_back(detail::mesh_rectangle(xs, detail::uniform_breakpoints(0, 0.5, ny)));
  detail::build_traces(mdm, 0);
  mdm.subdomains.push_back(detail::mesh_rectangle(xs, detail::uniform_breakpoints(0.5, 1, ny)));
  detail::build_traces(mdm, 1);
  detail::finalize_mortar_layout(mdm);
  return mdm;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

/// Count connected regions of the unit square not crossing any fracture,
/// by flood fill on a fine pixel grid.
inline int flood_fill_regions(const FractureNetwork& net, int res = 160) {
  auto crosses = [&](const Vec2& p, const Vec2& q) {
    for (const auto& f : net.fractures) {
      const Vec2 d1 = q - p, d2 = f.b - f.a;
      const double den = d1.x() * d2.y() - d1.y() * d2.x();
      if (std::abs(den) < 1e-14) continue;
      const Vec2 r = f.a - p;
      const double t = (r.x() * d2.y() - r.y() * d2.x()) / den;
      const double s = (r.x() * d1.y() - r.y() * d1.x()) / den;
      if (t >= 0 && t <= 1 && s >= 0 && s <= 1) return true;
    }
    return false;
  };
  std::vector<int> label(res * res, -1);
  auto center = [&](int i, int j) {
    return Vec2((i + 0.5) / res, (j + 0.5) / res);
  };
  int regions = 0;
  for (int start = 0; start < res * res; ++start) {
    if (label[start] >= 0) continue;
    ++regions;
    std::vector<int> stack{start};
    label[start] = regions;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      const int i = c % res, j = c / res;
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int ni = i + di[k], nj = j + dj[k];
        if (ni < 0 || nj < 0 || ni >= res || nj >= res) continue;
        const int nc = nj * res + ni;
        if (label[nc] >= 0) continue;
        if (crosses(center(i, j), center(ni, nj))) continue;
        label[nc] = regions;
        stack.push_back(nc);
      }
    }
  }
  return regions;
}

}  // namespace detail

inline std::vector<std::string> validate(const MixedDimMesh& mdm) {
  std::vector<std::string> violations;
  // intersections lie on their fractures
  for (const auto& ip : mdm.network.intersections)
    for (int f : ip.fractures)
      if (!mdm.network.fractures[f].contains(ip.point))
        violations.push_back("intersection point off fracture " + std::to_string(f));

  // positive triangle areas, no duplicate vertices
  for (size_t s = 0; s < mdm.subdomains.size(); ++s) {
    const auto& m = mdm.subdomains[s];
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
      if (m.tri_area(t) <= 0)
        violations.push_back("non-positive triangle area in sub-domain " + std::to_string(s));
    std::vector<std::pair<double, double>> vs;
    for (const auto& v : m.vertices) vs.emplace_back(v.x(), v.y());
    std::sort(vs.begin(), vs.end());
    for (size_t i = 1; i < vs.size(); ++i)
      if (std::abs(vs[i].first - vs[i - 1].first) < kGeomTol &&
          std::abs(vs[i].second - vs[i - 1].second) < kGeomTol) {
        violations.push_back("duplicate vertex in sub-domain " + std::to_string(s));
        break;
      }
  }

  // trace tiling: edges on a branch side tile [0, L] exactly
  for (const auto& tm : mdm.traces) {
    const auto& br = mdm.branches[tm.branch];
    double covered = 0, expect0 = 0;
    bool gap = false;
    for (const auto& e : tm.entries) {
      if (std::abs(e.t0 - expect0) > 1e-10) gap = true;
      covered += e.t1 - e.t0;
      expect0 = e.t1;
    }
    if (gap || std::abs(covered - br.length()) > 1e-12 * std::max(1.0, br.length()) ||
        std::abs(expect0 - br.length()) > 1e-10)
      violations.push_back("trace on branch " + std::to_string(tm.branch) +
                           " of sub-domain " + std::to_string(tm.subdomain) +
                           " does not tile the branch");
  }

  // every branch has exactly two sides (one sub-domain per side)
  for (size_t b = 0; b < mdm.branches.size(); ++b) {
    auto ts = mdm.traces_of_branch(static_cast<int>(b));
    if (ts.size() != 2)
      violations.push_back("branch " + std::to_string(b) + " has " +
                           std::to_string(ts.size()) + " trace sides, expected 2");
  }

  // flood-fill sub-domain count
  if (mdm.network.declared_subdomains > 0) {
    const int found = detail::flood_fill_regions(mdm.network);
    if (found != mdm.network.declared_subdomains)
      violations.push_back("flood fill found " + std::to_string(found) +
                           " regions, declared " +
                           std::to_string(mdm.network.declared_subdomains));
  }
  return violations;
}

}  // namespace fracflow

#endif  // FRACFLOW_GEOMETRY_HPP
