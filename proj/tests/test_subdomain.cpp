// SPDX-License-Identifier: Apache-2.0
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "fracflow/geometry.hpp"
#include "fracflow/rt0.hpp"
#include "fracflow/subdomain.hpp"

using namespace fracflow;

namespace {

// Independent quadrature oracle for the local velocity mass matrix:
// recursive subdivision with the midpoint rule, exact in the limit and
// already tight at a few levels for the quadratic integrand.
Eigen::Matrix3d local_mass_oracle(const SubdomainMesh& m, int t, double kinv,
                                  int levels = 4) {
  const auto& tr = m.triangles[t];
  std::array<Vec2, 3> opp = {m.vertices[tr[2]], m.vertices[tr[0]],
                             m.vertices[tr[1]]};
  std::array<double, 3> sigma;
  const double area = m.tri_area(t);
  for (int k = 0; k < 3; ++k) {
    const auto& e = m.edges[m.tri_edges[t][k]];
    sigma[k] = (e.normal.dot(e.midpoint - m.centroid(t)) > 0) ? 1.0 : -1.0;
  }
  // unit-total-flux basis: integral of phi.n over its edge is one
  auto phi = [&](int k, const Vec2& x) {
    return Vec2(sigma[k] / (2 * area) * (x - opp[k]));
  };
  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  std::function<void(Vec2, Vec2, Vec2, int)> rec = [&](Vec2 a, Vec2 b, Vec2 c,
                                                       int lvl) {
    if (lvl == 0) {
      const double w =
          0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x()) /
          3.0;
      // interior 3-point rule, exact for quadratics
      for (const Vec2& q : {Vec2((4 * a + b + c) / 6.0), Vec2((a + 4 * b + c) / 6.0),
                            Vec2((a + b + 4 * c) / 6.0)})
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            M(i, j) += kinv * w * phi(i, q).dot(phi(j, q));
      return;
    }
    const Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    rec(a, ab, ca, lvl - 1);
    rec(ab, b, bc, lvl - 1);
    rec(ca, bc, c, lvl - 1);
    rec(ab, bc, ca, lvl - 1);
  };
  rec(m.vertices[tr[0]], m.vertices[tr[1]], m.vertices[tr[2]], levels);
  return M;
}

RobinSubdomainSystem make_system(const MixedDimMesh& mdm, int s, double K,
                                 double alpha, const BoundarySpec& bc,
                                 double f = 0.0) {
  RobinCoefficients robin;
  for (const auto* tm : mdm.traces_of_subdomain(s)) robin.alpha[tm->branch] = alpha;
  const int nc = static_cast<int>(mdm.subdomains[s].triangles.size());
  return make_subdomain_system(mdm, s, {K}, robin, bc,
                               Vector::Constant(nc, f));
}

}  // namespace

TEST_CASE("local velocity mass matrix matches subdivision quadrature") {
  const auto mdm = build_single_fracture_geometry(2, {});
  const auto& m = mdm.subdomains[0];
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const auto M = detail::rt0_local_mass(m, t, 1.0);
    const auto R = local_mass_oracle(m, t, 1.0);
    CHECK((M - R).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("doubling the permeability halves the weighted mass block") {
  const auto mdm = build_single_fracture_geometry(2, {});
  RobinCoefficients robin;
  robin.alpha[0] = 1e12;  // make the trace term negligible
  const auto bc = BoundarySpec::zero_dirichlet();
  const auto m1 = assemble_subdomain(mdm, 0, {1.0}, robin, bc);
  const auto m2 = assemble_subdomain(mdm, 0, {2.0}, robin, bc);
  CHECK((Matrix(m1.A) - 2.0 * Matrix(m2.A)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("large coupling coefficient removes the trace term") {
  const auto mdm = build_single_fracture_geometry(2, {});
  RobinCoefficients weak, strong;
  weak.alpha[0] = 1e14;
  strong.alpha[0] = 1.0;
  const auto bc = BoundarySpec::zero_dirichlet();
  const auto mw = assemble_subdomain(mdm, 0, {1.0}, weak, bc);
  const auto ms = assemble_subdomain(mdm, 0, {1.0}, strong, bc);
  const Matrix diff = Matrix(ms.A) - Matrix(mw.A);
  // the difference is exactly the trace term: diagonal, positive, 1/|e|
  CHECK(diff.cwiseAbs().maxCoeff() > 1.0);
  for (const auto& en : mdm.traces_of_subdomain(0)[0]->entries) {
    const int e = mw.edge_perm[en.edge];
    CHECK(diff(e, e) ==
          Catch::Approx(1.0 / mdm.subdomains[0].edges[en.edge].length)
              .epsilon(1e-10));
  }
}

TEST_CASE("zero data gives the zero solution") {
  const auto mdm = build_single_fracture_geometry(2, {});
  const auto sys = make_system(mdm, 0, 1.0, 1.0, BoundarySpec::zero_dirichlet());
  const auto sol = sys.solve(Vector::Zero(sys.n_trace_dofs()));
  CHECK(sol.u.norm() == 0.0);
  CHECK(sol.p.norm() == 0.0);
}

TEST_CASE("linearity and superposition of Robin solves") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto mdm = build_single_fracture_geometry(3, {});
  const auto sys = make_system(mdm, 1, 2.5, 0.7, BoundarySpec::zero_dirichlet());
  for (int rep = 0; rep < 100; ++rep) {
    Vector lam(sys.n_trace_dofs()), f(sys.n_cells());
    for (int i = 0; i < lam.size(); ++i) lam[i] = dist(rng);
    for (int i = 0; i < f.size(); ++i) f[i] = dist(rng);

    const auto s1 = sys.solve(lam);
    const auto s2 = sys.solve(Vector(2.0 * lam));
    CHECK((s2.u - 2.0 * s1.u).norm() <= 1e-12 * (1.0 + s2.u.norm()));
    CHECK((s2.p - 2.0 * s1.p).norm() <= 1e-12 * (1.0 + s2.p.norm()));

    const auto sf = sys.solve(Vector::Zero(sys.n_trace_dofs()), f, false);
    const auto sb = sys.solve(lam, f, false);
    CHECK((sb.u - s1.u - sf.u).norm() <= 1e-10 * (1.0 + sb.u.norm()));
    CHECK((sb.p - s1.p - sf.p).norm() <= 1e-10 * (1.0 + sb.p.norm()));

    // flux map linearity
    CHECK((sys.rtn_flux(Vector(2.0 * lam)) - 2.0 * sys.rtn_flux(lam)).norm() <=
          1e-12 * (1.0 + sys.rtn_flux(lam).norm()));
  }
}

TEST_CASE("solve residual and repeatability") {
  const auto mdm = build_benchmark_geometry(1, {});
  const auto sys = make_system(mdm, 0, 1.0, 3.0, BoundarySpec::benchmark(), 1.0);
  Vector lam = Vector::LinSpaced(sys.n_trace_dofs(), -1.0, 2.0);
  Vector f = Vector::Constant(sys.n_cells(), 1.0);
  const Vector rhs = sys.rhs(lam, f, true);
  const auto sol = sys.solve(lam, f, true);
  Vector x(sol.u.size() + sol.p.size());
  x << sol.u, sol.p;
  CHECK((sys.matrix() * x - rhs).cwiseAbs().maxCoeff() <
        1e-10 * rhs.cwiseAbs().maxCoeff());
  // bit-identical repeat
  const auto again = sys.solve(lam, f, true);
  CHECK((again.u - sol.u).norm() == 0.0);
  CHECK((again.p - sol.p).norm() == 0.0);
}

TEST_CASE("constant source on a sealed box flows out through the trace") {
  const auto mdm = build_single_fracture_geometry(3, {});
  const auto sys = make_system(mdm, 0, 1.0, 1.0, BoundarySpec::sealed(), 2.0);
  const Vector g = sys.g_response();
  // integrate the outward flux density over the trace
  double total = 0.0, area = 0.0;
  const auto& ti = sys.traces()[0];
  for (std::size_t k = 0; k < ti.length.size(); ++k)
    total += g[k] * ti.length[k];
  for (int c = 0; c < sys.n_cells(); ++c) area += sys.cell_area(c);
  CHECK(total == Catch::Approx(2.0 * area).epsilon(1e-10));
}

TEST_CASE("zero source means zero source response") {
  const auto mdm = build_single_fracture_geometry(2, {});
  const auto sys = make_system(mdm, 0, 1.0, 1.0, BoundarySpec::sealed(), 0.0);
  CHECK(sys.g_response().norm() == 0.0);
}

TEST_CASE("recovery superposes the cached source part") {
  const auto mdm = build_single_fracture_geometry(2, {});
  const auto sys = make_system(mdm, 1, 1.0, 1.0, BoundarySpec::benchmark(), 0.5);
  Vector lam = Vector::LinSpaced(sys.n_trace_dofs(), 0.0, 1.0);
  const auto rec = sys.recover_solution(lam);
  const auto direct = sys.solve(lam, sys.source(), true);
  CHECK((rec.u - direct.u).norm() <= 1e-12 * (1.0 + direct.u.norm()));
  CHECK((rec.p - direct.p).norm() <= 1e-12 * (1.0 + direct.p.norm()));
}

TEST_CASE("divergence of the solved flux equals the projected source") {
  const auto mdm = build_benchmark_geometry(1, {});
  const auto sys = make_system(mdm, 2, 4.0, 2.0, BoundarySpec::benchmark(), 3.0);
  Vector lam = Vector::LinSpaced(sys.n_trace_dofs(), -0.5, 0.5);
  const auto sol = sys.solve(lam, sys.source(), true);
  const Vector div = sys.matrices().B * sol.u;
  for (int c = 0; c < sys.n_cells(); ++c)
    CHECK(div[c] == Catch::Approx(3.0 * sys.cell_area(c)).margin(1e-10));
}
