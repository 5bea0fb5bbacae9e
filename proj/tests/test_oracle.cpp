// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "fracflow/monolithic.hpp"
#include "fracflow/nonlinear.hpp"

using namespace fracflow;

namespace {

ProblemConfig single_fracture_unit() {
  ProblemConfig cfg;
  cfg.laws.resize(1);
  cfg.laws[0].K_gamma = 1.0;
  cfg.laws[0].alpha = 1.0;
  cfg.bc = BoundarySpec::benchmark();
  return cfg;
}

ProblemConfig benchmark_case_i(double beta) {
  ProblemConfig cfg;
  cfg.laws.resize(6);
  for (auto& law : cfg.laws) {
    law.K_gamma = 1.0;
    law.alpha = 1e8;
    law.beta = beta;
  }
  return cfg;
}

}  // namespace

TEST_CASE("uniform flow is reproduced exactly") {
  // left influx 1, right pressure 1, sealed top and bottom, unit
  // permeabilities: p = 2 - x, velocity (1, 0), tangential velocity 1
  const auto mdm = build_single_fracture_geometry(2, {});
  const auto cfg = single_fracture_unit();
  const auto res = solve_monolithic(mdm, cfg);

  CHECK((res.u_gamma.array() - 1.0).abs().maxCoeff() < 1e-10);
  const auto lay = make_layout(mdm);
  for (int c = 0; c < lay.n_p; ++c) {
    const double xm = (c + 0.5) * 0.5;  // two cells on [0, 1]
    CHECK(res.p_gamma[c] == Catch::Approx(2.0 - xm).epsilon(1e-10));
  }
  for (std::size_t s = 0; s < mdm.subdomains.size(); ++s) {
    const auto& m = mdm.subdomains[s];
    RobinCoefficients robin;
    robin.alpha[0] = 1.0;
    const auto mats = assemble_subdomain(mdm, s, {1.0}, robin, cfg.bc);
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
      const double xc = m.centroid(t).x();
      CHECK(res.fields[s].p[mats.cell_perm[t]] ==
            Catch::Approx(2.0 - xc).epsilon(1e-9));
    }
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
      const double expected = m.edges[e].normal.x() * m.edges[e].length;
      CHECK(res.fields[s].u[mats.edge_perm[e]] ==
            Catch::Approx(expected).margin(1e-10));
    }
  }
}

TEST_CASE("domain decomposition reproduces the uniform flow too") {
  const auto mdm = build_single_fracture_geometry(2, {});
  InterfaceProblem prob(mdm, single_fracture_unit());
  OuterConfig cfg;
  cfg.gmres.tol = 1e-12;
  const auto rep = outer_solve(prob, cfg);
  REQUIRE(rep.converged);
  CHECK((rep.u.array() - 1.0).abs().maxCoeff() < 1e-9);
  for (int c = 0; c < rep.p.size(); ++c)
    CHECK(rep.p[c] == Catch::Approx(2.0 - (c + 0.5) * 0.5).epsilon(1e-9));
}

TEST_CASE("zero data gives zero fields") {
  const auto mdm = build_single_fracture_geometry(2, {});
  ProblemConfig cfg = single_fracture_unit();
  cfg.bc = BoundarySpec::zero_dirichlet();
  const auto res = solve_monolithic(mdm, cfg);
  CHECK(res.u_gamma.norm() == 0.0);
  CHECK(res.p_gamma.norm() == 0.0);
  for (const auto& f : res.fields) {
    CHECK(f.u.norm() == 0.0);
    CHECK(f.p.norm() == 0.0);
  }
}

TEST_CASE("point-symmetric data gives point-symmetric fields") {
  // zero boundary pressure with a uniform source is invariant under the
  // half-turn about the domain center, and so is the structured
  // triangulation: sub-domain 0 maps onto sub-domain 1 with all
  // lexicographic dof orders reversed, pressures carry over unchanged and
  // velocities flip sign
  const auto mdm = build_single_fracture_geometry(3, {});
  ProblemConfig cfg = single_fracture_unit();
  cfg.bc = BoundarySpec::zero_dirichlet();
  cfg.f_matrix = 1.0;
  const auto res = solve_monolithic(mdm, cfg);

  const Vector p0 = res.fields[0].p, p1 = res.fields[1].p;
  const Vector u0 = res.fields[0].u, u1 = res.fields[1].u;
  const double pscale = p0.lpNorm<Eigen::Infinity>();
  const double uscale = std::max(1.0, u0.lpNorm<Eigen::Infinity>());
  REQUIRE(pscale > 0.0);
  CHECK((p0 - p1.reverse()).lpNorm<Eigen::Infinity>() <= 1e-12 * pscale);
  CHECK((u0 + u1.reverse()).lpNorm<Eigen::Infinity>() <= 1e-12 * uscale);
  // same half-turn along the fracture itself
  CHECK((res.p_gamma - res.p_gamma.reverse()).lpNorm<Eigen::Infinity>() <=
        1e-12 * pscale);
  CHECK((res.u_gamma + res.u_gamma.reverse()).lpNorm<Eigen::Infinity>() <=
        1e-12 * uscale);
}

TEST_CASE("global conservation with pure flux data") {
  const auto mdm = build_single_fracture_geometry(3, {});
  ProblemConfig cfg = single_fracture_unit();
  cfg.f_matrix = 0.5;
  const auto res = solve_monolithic(mdm, cfg);
  // total boundary outflux equals the injected volume: integrate u.n over
  // the outer boundary of both sub-domains plus the fracture endpoints
  double outflux = 0.0;
  RobinCoefficients robin;
  robin.alpha[0] = 1.0;
  for (std::size_t s = 0; s < mdm.subdomains.size(); ++s) {
    const auto& m = mdm.subdomains[s];
    const auto mats = assemble_subdomain(mdm, s, {1.0}, robin, cfg.bc);
    std::set<int> trace;
    for (const auto* tm : mdm.traces_of_subdomain(static_cast<int>(s)))
      for (const auto& en : tm->entries) trace.insert(en.edge);
    for (int e : m.boundary_edges) {
      if (trace.count(e)) continue;
      const auto& edge = m.edges[e];
      const double sigma =
          (edge.normal.dot(edge.midpoint - m.centroid(edge.tri[0])) > 0) ? 1.0
                                                                         : -1.0;
      outflux += res.fields[s].u[mats.edge_perm[e]] * sigma;
    }
  }
  // fracture endpoint fluxes (outward): -u(0) and +u(L)
  outflux += res.u_gamma[res.u_gamma.size() - 1] - res.u_gamma[0];
  CHECK(outflux == Catch::Approx(0.5 * 1.0).epsilon(1e-10));
}

TEST_CASE("cross-path agreement on the reference network") {
  for (double beta : {0.0, 100.0}) {
    const auto mdm = build_benchmark_geometry(1, {});
    const auto cfg = benchmark_case_i(beta);
    const auto mono = solve_monolithic(mdm, cfg);

    InterfaceProblem prob(mdm, cfg);
    OuterConfig ocfg;
    ocfg.gmres.tol = 1e-10;
    ocfg.tol_outer = 1e-10;
    const auto rep = outer_solve(prob, ocfg);
    REQUIRE(rep.converged);

    const double pscale = mono.p_gamma.lpNorm<Eigen::Infinity>();
    CHECK((rep.p - mono.p_gamma).lpNorm<Eigen::Infinity>() <= 1e-6 * pscale);
    CHECK((rep.u - mono.u_gamma).lpNorm<Eigen::Infinity>() <=
          1e-6 * std::max(1.0, mono.u_gamma.lpNorm<Eigen::Infinity>()));
    CHECK((rep.pt - mono.p_T).lpNorm<Eigen::Infinity>() <= 1e-6 * pscale);
    for (std::size_t s = 0; s < mdm.subdomains.size(); ++s) {
      CHECK((rep.fields[s].p - mono.fields[s].p).lpNorm<Eigen::Infinity>() <=
            1e-6 * pscale);
      CHECK((rep.fields[s].u - mono.fields[s].u).lpNorm<Eigen::Infinity>() <=
            1e-6 * std::max(1.0, mono.fields[s].u.lpNorm<Eigen::Infinity>()));
    }
  }
}
