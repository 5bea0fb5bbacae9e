// SPDX-License-Identifier: Apache-2.0
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "fracflow/geometry.hpp"
#include "fracflow/mortar.hpp"

using namespace fracflow;

TEST_CASE("conforming grids give identity projections") {
  const auto g = uniform_grid(1.0, 4);
  const auto p = build_projection(g, g);
  Matrix tt = Matrix(p.to_trace);
  Matrix tm = Matrix(p.to_mortar);
  CHECK((tt - Matrix::Identity(4, 4)).norm() == Catch::Approx(0.0).margin(1e-14));
  CHECK((tm - Matrix::Identity(4, 4)).norm() == Catch::Approx(0.0).margin(1e-14));
  // round trip on conforming grids is the identity
  CHECK((Matrix(p.to_mortar * p.to_trace) - Matrix::Identity(4, 4)).norm() <
        1e-14);
}

TEST_CASE("one mortar cell against two equal trace cells") {
  const auto p = build_projection(uniform_grid(1.0, 2), uniform_grid(1.0, 1));
  CHECK(p.to_trace.coeff(0, 0) == Catch::Approx(1.0));
  CHECK(p.to_trace.coeff(1, 0) == Catch::Approx(1.0));
  CHECK(p.to_mortar.coeff(0, 0) == Catch::Approx(0.5));
  CHECK(p.to_mortar.coeff(0, 1) == Catch::Approx(0.5));
}

TEST_CASE("length-weighted average onto one mortar cell") {
  IntervalGrid trace;
  trace.breaks = {0.0, 1.0 / 3.0, 1.0};
  const auto p = build_projection(trace, uniform_grid(1.0, 1));
  CHECK(p.to_mortar.coeff(0, 0) == Catch::Approx(1.0 / 3.0));
  CHECK(p.to_mortar.coeff(0, 1) == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("grids of different extents are rejected") {
  CHECK_THROWS_AS(build_projection(uniform_grid(1.0, 2), uniform_grid(0.5, 1)),
                  FracflowError);
}

TEST_CASE("constants preserved both ways on all benchmark pairs") {
  for (int level : {1, 2}) {
    const auto mdm = build_benchmark_geometry(level, {});
    for (const auto& tm : mdm.traces) {
      const auto p = build_projection(mdm, tm);
      const Vector cm = Vector::Constant(p.to_trace.cols(), 3.25);
      const Vector ct = Vector::Constant(p.to_trace.rows(), -1.5);
      CHECK((apply(p, cm, ProjectionDirection::ToTrace).array() - 3.25)
                .abs()
                .maxCoeff() < 1e-12);
      CHECK((apply(p, ct, ProjectionDirection::ToMortar).array() + 1.5)
                .abs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("weighted adjoint consistency on random data") {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto mdm = build_benchmark_geometry(1, {});
  for (const auto& tm : mdm.traces) {
    const auto tg = trace_grid(tm);
    const auto& br = mdm.branches[tm.branch];
    const auto mg = uniform_grid(br.length(), br.n_cells);
    const auto p = build_projection(tg, mg);
    Vector phi(mg.n_cells()), w(tg.n_cells());
    for (int i = 0; i < phi.size(); ++i) phi[i] = dist(rng);
    for (int i = 0; i < w.size(); ++i) w[i] = dist(rng);
    double lhs = 0, rhs = 0;
    const Vector pt = apply(p, phi, ProjectionDirection::ToTrace);
    const Vector pm = apply(p, w, ProjectionDirection::ToMortar);
    for (int e = 0; e < tg.n_cells(); ++e) lhs += tg.length(e) * pt[e] * w[e];
    for (int m = 0; m < mg.n_cells(); ++m) rhs += mg.length(m) * phi[m] * pm[m];
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12).margin(1e-14));
  }
}

TEST_CASE("zero maps to zero and size mismatches throw") {
  const auto p = build_projection(uniform_grid(1.0, 3), uniform_grid(1.0, 2));
  CHECK(apply(p, Vector::Zero(2), ProjectionDirection::ToTrace).norm() == 0.0);
  CHECK_THROWS_AS(apply(p, Vector::Zero(3), ProjectionDirection::ToTrace),
                  FracflowError);
}
