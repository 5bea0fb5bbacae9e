// SPDX-License-Identifier: Apache-2.0
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "fracflow/fracture1d.hpp"
#include "fracflow/geometry.hpp"

using namespace fracflow;

TEST_CASE("inverse mobility and tangent coefficient formulas") {
  FractureLaw law;
  law.K_gamma = 1.0;
  law.beta = 2.0;
  CHECK(law.coeff(5.0, 0.0) == Catch::Approx(11.0));
  CHECK(law.coeff(-5.0, 0.0) == Catch::Approx(11.0));
  CHECK(law.tangent_coeff(5.0) == Catch::Approx(21.0));
  CHECK(law.tangent_coeff(0.0) == Catch::Approx(1.0));
  // pressure dependence off: any pressure gives the drag-only value
  for (double p : {-3.0, 0.0, 7.5}) CHECK(law.coeff(5.0, p) == Catch::Approx(11.0));
  law.zeta = 0.5;
  CHECK(law.coeff(0.0, 2.0) == Catch::Approx(std::exp(1.0)));
}

TEST_CASE("linear mass matrix is the exact tridiagonal form") {
  const auto mdm = build_single_fracture_geometry(4, {});
  const auto lay = make_layout(mdm);
  REQUIRE(lay.n_u == 5);
  REQUIRE(lay.n_p == 4);
  std::vector<FractureLaw> laws(1);
  const auto M = assemble_mass(mdm, laws, lay, Vector::Zero(5), Vector::Zero(4));
  const double h = 0.25;
  for (int i = 0; i < 5; ++i) {
    const double diag = (i == 0 || i == 4) ? h / 3.0 : 2.0 * h / 3.0;
    CHECK(M.coeff(i, i) == Catch::Approx(diag));
    if (i < 4) {
      CHECK(M.coeff(i, i + 1) == Catch::Approx(h / 6.0));
      CHECK(M.coeff(i + 1, i) == Catch::Approx(h / 6.0));
    }
  }
}

TEST_CASE("drag term scales the mass with the midpoint speed") {
  const auto mdm = build_single_fracture_geometry(2, {});
  const auto lay = make_layout(mdm);
  std::vector<FractureLaw> laws(1);
  laws[0].beta = 2.0;
  Vector u = Vector::Constant(lay.n_u, 5.0);
  const auto M = assemble_mass(mdm, laws, lay, u, Vector::Zero(lay.n_p));
  const auto M0 = assemble_mass(mdm, std::vector<FractureLaw>(1), lay,
                                Vector::Zero(lay.n_u), Vector::Zero(lay.n_p));
  CHECK((Matrix(M) - 11.0 * Matrix(M0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("network blocks on the reference geometry") {
  const auto mdm = build_benchmark_geometry(1, {});
  const auto lay = make_layout(mdm);
  std::vector<FractureLaw> laws(6);
  const auto blk =
      assemble_network_blocks(mdm, laws, BoundarySpec::benchmark());

  CHECK(blk.NT.rows() == 9);
  CHECK(blk.B.rows() == 26);
  CHECK(blk.h.sum() == Catch::Approx(1.0 + 1.0 + 0.5 + 0.5 + 0.25 + 0.25));

  // every intersection balances at least three incident branch ends
  for (int t = 0; t < blk.NT.rows(); ++t) {
    int nnz = 0;
    for (int k = 0; k < blk.NT.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(blk.NT, k); it; ++it)
        if (it.row() == t) ++nnz;
    CHECK(nnz >= 3);
  }

  // outer flux data pins four branch ends; the inflow end carries value 1
  REQUIRE(blk.strong_u.size() == 4);
  int inflow = 0;
  for (const auto& [j, v] : blk.strong_u) {
    (void)j;
    if (v == 1.0) ++inflow;
  }
  CHECK(inflow == 1);

  // two pressure-data ends contribute natural terms of value -1
  int natural = 0;
  for (int j = 0; j < blk.rhs_u.size(); ++j)
    if (blk.rhs_u[j] != 0.0) {
      CHECK(blk.rhs_u[j] == Catch::Approx(-1.0));
      ++natural;
    }
  CHECK(natural == 2);

  // each branch contributes a signed difference row per cell
  for (int c = 0; c < blk.B.rows(); ++c) {
    double sum = 0.0;
    for (int k = 0; k < blk.B.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(blk.B, k); it; ++it)
        if (it.row() == c) sum += it.value();
    CHECK(sum == Catch::Approx(0.0).margin(1e-14));
  }
}

TEST_CASE("tangent assembly matches finite differences of the drag form") {
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> dist(0.2, 1.5);
  const auto mdm = build_single_fracture_geometry(5, {});
  const auto lay = make_layout(mdm);
  std::vector<FractureLaw> laws(1);
  laws[0].K_gamma = 0.5;
  laws[0].beta = 3.0;

  for (int rep = 0; rep < 20; ++rep) {
    Vector u(lay.n_u), d(lay.n_u);
    for (int i = 0; i < lay.n_u; ++i) {
      u[i] = dist(rng);  // keep midpoints away from zero speed
      d[i] = dist(rng) - 0.85;
    }
    const auto J = assemble_mass_jacobian(mdm, laws, lay, u);
    const Vector p0 = Vector::Zero(lay.n_p);
    double prev = 1e300;
    for (double eps : {1e-4, 1e-5, 1e-6}) {
      const Vector up = u + eps * d;
      const Vector fu = assemble_mass(mdm, laws, lay, u, p0) * u;
      const Vector fp = assemble_mass(mdm, laws, lay, up, p0) * up;
      const double err = ((fp - fu) / eps - J * d).norm() / d.norm();
      CHECK(err < prev + 1e-12);
      CHECK(err < 10.0 * eps);
      prev = err;
    }
  }
}

TEST_CASE("tangent assembly rejects the pressure-dependent law") {
  const auto mdm = build_single_fracture_geometry(2, {});
  const auto lay = make_layout(mdm);
  std::vector<FractureLaw> laws(1);
  laws[0].zeta = 1.0;
  CHECK_THROWS_AS(
      assemble_mass_jacobian(mdm, laws, lay, Vector::Zero(lay.n_u)),
      FracflowError);
}

TEST_CASE("strong rows become identity rows") {
  const auto mdm = build_single_fracture_geometry(3, {});
  const auto lay = make_layout(mdm);
  std::vector<FractureLaw> laws(1);
  auto M = assemble_mass(mdm, laws, lay, Vector::Zero(lay.n_u),
                         Vector::Zero(lay.n_p));
  NetworkBlocks blk;
  blk.strong_u = {{0, -1.0}, {lay.n_u - 1, 0.0}};
  impose_strong_rows(M, blk);
  const Matrix D(M);
  for (int j : {0, lay.n_u - 1}) {
    for (int c = 0; c < lay.n_u; ++c)
      CHECK(D(j, c) == (c == j ? 1.0 : 0.0));
  }
  CHECK(D(1, 2) != 0.0);  // untouched interior rows keep their couplings
}

TEST_CASE("invalid law parameters are rejected") {
  const auto mdm = build_single_fracture_geometry(2, {});
  std::vector<FractureLaw> laws(1);
  laws[0].K_gamma = -1.0;
  CHECK_THROWS_AS(
      assemble_network_blocks(mdm, laws, BoundarySpec::zero_dirichlet()),
      FracflowError);
}
