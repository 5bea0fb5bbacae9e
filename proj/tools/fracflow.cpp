// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fracflow/bench.hpp"
#include "fracflow/config.hpp"
#include "fracflow/monolithic.hpp"

namespace {

using namespace fracflow;

struct CliOverrides {
  std::string config_path, physical_case, method, mode, out_dir;
  int level = -1;
  double beta = std::nan(""), zeta = std::nan("");
  double tol_gmres = std::nan(""), tol_outer = std::nan("");
  long max_units = -1;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "flat key=value config file");
  cmd->add_option("--case", o.physical_case, "i|ii|iii|iv|heterogeneous|custom");
  cmd->add_option("--level", o.level, "benchmark refinement level");
  cmd->add_option("--beta", o.beta, "Forchheimer drag coefficient");
  cmd->add_option("--zeta", o.zeta, "pressure-viscosity exponent");
  cmd->add_option("--method", o.method, "fixed_point|newton");
  cmd->add_option("--mode", o.mode, "ms|dd");
  cmd->add_option("--tol-gmres", o.tol_gmres, "inner solver tolerance");
  cmd->add_option("--tol-outer", o.tol_outer, "outer iteration tolerance");
  cmd->add_option("--max-units", o.max_units, "sub-domain solve budget");
  cmd->add_option("--out", o.out_dir, "output directory");
}

RunConfig resolve(const CliOverrides& o) {
  RunConfig c;
  if (!o.config_path.empty()) c = load_config(o.config_path);
  if (!o.physical_case.empty()) c.physical_case = o.physical_case;
  if (o.level > 0) c.level = o.level;
  if (!std::isnan(o.beta)) c.beta = o.beta;
  if (!std::isnan(o.zeta)) c.zeta = o.zeta;
  if (!o.method.empty()) c.method = o.method;
  if (!o.mode.empty()) c.mode = o.mode;
  if (!std::isnan(o.tol_gmres)) c.tol_gmres = o.tol_gmres;
  if (!std::isnan(o.tol_outer)) c.tol_outer = o.tol_outer;
  if (o.max_units >= 0) c.max_units = o.max_units;
  if (!o.out_dir.empty()) {
    c.out_dir = o.out_dir;
    c.basis_dir = o.out_dir;
  }
  std::filesystem::create_directories(c.out_dir);
  validate(c);
  return c;
}

void print_record(const RunRecord& r) {
  std::cout << "case " << r.config.physical_case << " level " << r.config.level
            << " beta " << r.config.beta << " zeta " << r.config.zeta << " "
            << r.config.method << "/" << r.config.mode << "\n";
  if (r.budget_exceeded) {
    std::cout << "  units: inf (budget " << r.config.max_units << " exceeded)\n";
    return;
  }
  std::cout << "  units: " << r.units_total << "  (basis " << r.units_basis
            << ", source " << r.units_source << ", interface "
            << r.units_interface << ", recovery " << r.units_recovery << ")\n"
            << "  outer iterations: " << r.outer_iterations
            << ", converged: " << (r.converged ? "yes" : "no") << ", wall "
            << r.wall_seconds << " s\n";
}

int cmd_mesh(const RunConfig& c) {
  const BenchSetup setup = make_setup(c);
  const auto violations = validate(setup.mdm);
  for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
  int tris = 0;
  for (const auto& m : setup.mdm.subdomains) tris += static_cast<int>(m.triangles.size());
  std::cout << "sub-domains: " << setup.mdm.subdomains.size()
            << ", triangles: " << tris << ", branches: " << setup.mdm.branches.size()
            << ", mortar cells: " << setup.mdm.n_mortar
            << ", intersections: " << setup.mdm.n_intersections() << "\n";
  // geometry-only export: zero fields
  RunRecord rec;
  rec.converged = true;
  const NetworkLayout lay = make_layout(setup.mdm);
  rec.report.u = Vector::Zero(lay.n_u);
  rec.report.p = Vector::Zero(lay.n_p);
  RobinCoefficients robin;
  for (std::size_t b = 0; b < setup.mdm.branches.size(); ++b)
    robin.alpha[static_cast<int>(b)] =
        setup.problem.laws[setup.mdm.branches[b].fracture].alpha;
  for (int s = 0; s < static_cast<int>(setup.mdm.subdomains.size()); ++s) {
    const auto mats = assemble_subdomain(setup.mdm, s, setup.problem.K_sub,
                                         robin, setup.problem.bc);
    MixedSolution ms;
    ms.u = Vector::Zero(mats.n_edges);
    ms.p = Vector::Zero(mats.n_cells);
    rec.report.fields.push_back(std::move(ms));
  }
  export_fields(c, rec, c.out_dir + "/mesh");
  std::cout << "wrote " << c.out_dir << "/mesh_matrix.vtk and _fracture.vtk\n";
  return violations.empty() ? 0 : 1;
}

int cmd_basis(RunConfig c) {
  c.mode = "ms";
  const BenchSetup setup = make_setup(c);
  InterfaceProblem prob(setup.mdm, setup.problem);
  prob.counter().set_budget(c.max_units);
  const std::string cache = basis_cache_path(c, prob.hash());
  if (std::filesystem::exists(cache)) {
    std::cout << "basis already cached: " << cache << "\n";
    return 0;
  }
  prob.assemble_basis_now();
  save_basis(*prob.basis(), cache);
  std::cout << "assembled basis with " << prob.counter().units()
            << " solve units, wrote " << cache << "\n";
  return 0;
}

int cmd_solve(const RunConfig& c) {
  const RunRecord rec = run(c);
  print_record(rec);
  if (rec.converged) export_fields(c, rec, c.out_dir + "/solution");
  return rec.converged ? 0 : 2;
}

int cmd_bench(const RunConfig& base) {
  std::vector<RunConfig> configs =
      benchmark_matrix({1, 2}, {0.0, 1.0, 1e2, 1e4, 1e6}, base);
  // generalized-law and heterogeneous columns
  for (double zeta : {0.5, 5.0})
    for (const char* mode : {"ms", "dd"}) {
      RunConfig c = base;
      c.physical_case = "i";
      c.level = 1;
      c.beta = 20.0;
      c.zeta = zeta;
      c.method = "fixed_point";
      c.mode = mode;
      configs.push_back(c);
    }
  for (const char* mode : {"ms", "dd"}) {
    RunConfig c = base;
    c.physical_case = "heterogeneous";
    c.level = 2;
    c.mode = mode;
    configs.push_back(c);
  }
  const std::string csv = base.out_dir + "/bench.csv";
  const auto records = sweep(configs, csv);
  int failures = 0;
  for (const auto& r : records) {
    print_record(r);
    if (r.budget_exceeded) ++failures;
    if (r.converged && r.config.physical_case == "i" && r.config.beta == 0.0 &&
        r.config.zeta == 0.0 && r.config.mode == "ms" &&
        r.config.method == "fixed_point")
      export_fields(r.config, r,
                    base.out_dir + "/case_i_level" + std::to_string(r.config.level));
  }
  std::cout << "wrote " << csv << "\n";
  return failures == 0 ? 0 : 2;
}

int cmd_oracle(const RunConfig& c) {
  BenchSetup setup = make_setup(c);
  const auto mono = solve_monolithic(setup.mdm, setup.problem);

  RunConfig dd = c;
  dd.mode = "dd";
  const RunRecord rec = run(dd);
  if (!rec.converged) {
    std::cerr << "iterative path did not converge\n";
    return 2;
  }
  const double pscale = std::max(1.0, mono.p_gamma.lpNorm<Eigen::Infinity>());
  const double uscale = std::max(1.0, mono.u_gamma.lpNorm<Eigen::Infinity>());
  const double dp = (rec.report.p - mono.p_gamma).lpNorm<Eigen::Infinity>() / pscale;
  const double du = (rec.report.u - mono.u_gamma).lpNorm<Eigen::Infinity>() / uscale;
  double df = 0.0;
  for (std::size_t s = 0; s < mono.fields.size(); ++s) {
    const double ps = std::max(1.0, mono.fields[s].p.lpNorm<Eigen::Infinity>());
    df = std::max(df, (rec.report.fields[s].p - mono.fields[s].p)
                          .lpNorm<Eigen::Infinity>() / ps);
  }
  std::cout << "relative differences vs direct monolithic solve:\n"
            << "  fracture pressure " << dp << "\n  fracture velocity " << du
            << "\n  matrix pressure " << df << "\n";
  const bool ok = dp < 1e-5 && du < 1e-5 && df < 1e-5;
  std::cout << (ok ? "agreement within 1e-5\n" : "MISMATCH beyond 1e-5\n");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed-dimensional Darcy-Forchheimer solver"};
  app.require_subcommand(1);
  CliOverrides o;
  auto* mesh = app.add_subcommand("mesh", "build and export a geometry");
  auto* basis = app.add_subcommand("basis", "precompute and cache the flux basis");
  auto* solve = app.add_subcommand("solve", "run one configuration");
  auto* bench = app.add_subcommand("bench", "run the benchmark case matrix");
  auto* oracle = app.add_subcommand("oracle", "cross-check against a direct solve");
  for (auto* cmd : {mesh, basis, solve, bench, oracle}) add_common_flags(cmd, o);

  CLI11_PARSE(app, argc, argv);
  try {
    const RunConfig c = resolve(o);
    if (mesh->parsed()) return cmd_mesh(c);
    if (basis->parsed()) return cmd_basis(c);
    if (solve->parsed()) return cmd_solve(c);
    if (bench->parsed()) return cmd_bench(c);
    if (oracle->parsed()) return cmd_oracle(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
