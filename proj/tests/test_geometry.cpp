// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "fracflow/geometry.hpp"

using namespace fracflow;

TEST_CASE("benchmark mortar totals per level") {
  CHECK(build_benchmark_geometry(1).n_mortar == 26);
  CHECK(build_benchmark_geometry(2).n_mortar == 84);
  CHECK(build_benchmark_geometry(3).n_mortar == 138);
}

TEST_CASE("benchmark coarsening of the low-permeable fractures") {
  MortarConfig mc;
  mc.mode = MortarMode::Coarser;
  mc.ratio = 2;
  mc.fractures = {2, 3, 4, 5};
  CHECK(build_benchmark_geometry(2, mc).n_mortar == 60);
}

TEST_CASE("benchmark structure") {
  const auto mdm = build_benchmark_geometry(1);
  CHECK(mdm.subdomains.size() == 10);
  CHECK(mdm.network.intersections.size() == 9);
  CHECK(mdm.branches.size() == 18);
  CHECK(validate(mdm).empty());

  int tris = 0;
  for (const auto& m : mdm.subdomains) tris += static_cast<int>(m.triangles.size());
  CHECK(tris > 110 * 0.85);
  CHECK(tris < 110 * 1.15);
}

TEST_CASE("benchmark triangle counts near the reference meshes") {
  const int ref[3] = {110, 1544, 3906};
  for (int level : {2, 3}) {
    const auto mdm = build_benchmark_geometry(level);
    int tris = 0;
    for (const auto& m : mdm.subdomains) tris += static_cast<int>(m.triangles.size());
    INFO("level " << level << " triangles " << tris);
    CHECK(tris > ref[level - 1] * 0.85);
    CHECK(tris < ref[level - 1] * 1.15);
  }
}

TEST_CASE("invalid benchmark level") {
  CHECK_THROWS_AS(build_benchmark_geometry(0), FracflowError);
  CHECK_THROWS_AS(build_benchmark_geometry(4), FracflowError);
}

TEST_CASE("single fracture geometry, smallest case") {
  const auto mdm = build_single_fracture_geometry(1);
  CHECK(mdm.subdomains.size() == 2);
  CHECK(mdm.branches.size() == 1);
  CHECK(mdm.n_mortar == 1);
  for (const auto& m : mdm.subdomains) CHECK(m.triangles.size() == 4);
  CHECK(validate(mdm).empty());
}

TEST_CASE("single fracture trace maps") {
  const auto mdm = build_single_fracture_geometry(2);
  CHECK(mdm.n_mortar == 2);
  for (const auto& tm : mdm.traces) CHECK(tm.entries.size() == 2);
  CHECK(mdm.traces.size() == 2);
  CHECK(mdm.traces[0].side != mdm.traces[1].side);
}

TEST_CASE("single fracture with coarser mortar") {
  MortarConfig mc;
  mc.mode = MortarMode::Coarser;
  mc.ratio = 2;
  const auto mdm = build_single_fracture_geometry(2, mc);
  CHECK(mdm.n_mortar == 1);
  for (const auto& tm : mdm.traces) CHECK(tm.entries.size() == 2);

  CHECK_THROWS_AS(build_single_fracture_geometry(3, mc), FracflowError);
}

TEST_CASE("trace tiling invariant") {
  for (int level : {1, 2}) {
    const auto mdm = build_benchmark_geometry(level);
    for (const auto& tm : mdm.traces) {
      double total = 0;
      for (const auto& e : tm.entries) total += e.t1 - e.t0;
      CHECK(std::abs(total - mdm.branches[tm.branch].length()) < 1e-12);
    }
  }
}

TEST_CASE("validate flags a flipped triangle") {
  auto mdm = build_single_fracture_geometry(1);
  std::swap(mdm.subdomains[0].triangles[0][0], mdm.subdomains[0].triangles[0][1]);
  const auto v = validate(mdm);
  REQUIRE(!v.empty());
  bool found = false;
  for (const auto& s : v) found |= s.find("non-positive") != std::string::npos;
  CHECK(found);
}

TEST_CASE("validate flags a trace gap") {
  auto mdm = build_single_fracture_geometry(2);
  auto& tm = mdm.traces[0];
  tm.entries.pop_back();
  const auto v = validate(mdm);
  bool found = false;
  for (const auto& s : v) found |= s.find("tile") != std::string::npos;
  CHECK(found);
}
