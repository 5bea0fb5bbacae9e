// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "fracflow/config.hpp"
#include "fracflow/geometry.hpp"
#include "fracflow/interface_op.hpp"
#include "fracflow/nonlinear.hpp"
#include "fracflow/vtk.hpp"

namespace fracflow {

struct RunRecord {
  RunConfig config;
  long units_total = 0;
  long units_basis = 0;
  long units_source = 0;
  long units_interface = 0;
  long units_recovery = 0;
  int outer_iterations = 0;
  std::vector<int> inner_iterations;
  bool converged = false;
  bool budget_exceeded = false;  // printed as the infinity marker
  double wall_seconds = 0.0;
  double p_norm = 0.0, u_norm = 0.0;
  OuterReport report;  // full fields, for export
};

/// Geometry + per-fracture laws for a named case.
struct BenchSetup {
  MixedDimMesh mdm;
  ProblemConfig problem;
};

inline BenchSetup make_setup(const RunConfig& c) {
  validate(c);
  BenchSetup s;
  MortarConfig mortar;
  if (c.mortar_mode == "coarser") {
    mortar.mode = MortarMode::Coarser;
    mortar.ratio = c.mortar_ratio;
  }
  std::size_t n_fractures = 1;
  if (c.geometry_kind == "benchmark") {
    if (c.physical_case == "heterogeneous") {
      // the four short fractures run at low permeability; halving their
      // mortar resolution keeps the basis small without hurting accuracy
      mortar.mode = MortarMode::Coarser;
      mortar.ratio = 2;
      mortar.fractures = {2, 3, 4, 5};
    }
    s.mdm = build_benchmark_geometry(c.level, mortar);
    n_fractures = 6;
  } else {
    s.mdm = build_single_fracture_geometry(c.level, mortar);
  }

  s.problem.laws.resize(n_fractures);
  for (std::size_t fr = 0; fr < n_fractures; ++fr) {
    auto& law = s.problem.laws[fr];
    if (c.physical_case == "custom") {
      law.K_gamma = c.K_gamma;
      law.alpha = c.alpha;
      law.beta = c.beta;
      law.zeta = c.zeta;
    } else if (c.physical_case == "heterogeneous") {
      // fractures 0 and 1 span the whole domain; they conduct, the rest block
      const bool big = fr < 2;
      const auto [kg, al] = case_parameters(big ? "i" : "ii", c.epsilon);
      // tabulated tangential values are permeabilities; the reduced 1D
      // coefficient is the aperture-integrated transmissivity
      law.K_gamma = c.epsilon * kg;
      law.alpha = al;
      law.beta = big ? c.beta : 0.0;
      law.zeta = big ? c.zeta : 0.0;
    } else {
      const auto [kg, al] = case_parameters(c.physical_case, c.epsilon);
      law.K_gamma = c.epsilon * kg;
      law.alpha = al;
      law.beta = c.beta;
      law.zeta = c.zeta;
    }
  }
  s.problem.bc = BoundarySpec::benchmark();
  s.problem.mode = c.mode == "ms" ? SolveMode::Multiscale : SolveMode::Direct;
  return s;
}

inline std::string basis_cache_path(const RunConfig& c, std::uint64_t hash) {
  std::ostringstream os;
  os << c.basis_dir << "/basis_" << std::hex << hash << ".msfb";
  return os.str();
}

inline RunRecord run(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = c;

  BenchSetup setup = make_setup(c);
  InterfaceProblem prob(setup.mdm, setup.problem);
  prob.counter().set_budget(c.max_units);

  if (setup.problem.mode == SolveMode::Multiscale) {
    const std::string cache = basis_cache_path(c, prob.hash());
    if (std::filesystem::exists(cache)) prob.use_basis(load_basis(cache));
  }

  OuterConfig ocfg;
  ocfg.method = c.method == "newton" ? Method::Newton : Method::FixedPoint;
  ocfg.tol_outer = c.tol_outer;
  ocfg.gmres.tol = c.tol_gmres;

  rec.report = outer_solve(prob, ocfg);
  rec.units_total = rec.report.units_total;
  rec.units_basis = rec.report.units_basis;
  rec.units_source = rec.report.units_source;
  rec.units_interface = rec.report.units_interface;
  rec.units_recovery = rec.report.units_recovery;
  rec.outer_iterations = rec.report.outer_iterations;
  rec.inner_iterations = rec.report.inner_iterations;
  rec.converged = rec.report.converged;
  rec.budget_exceeded = rec.report.budget_exceeded;
  if (rec.converged) {
    rec.p_norm = rec.report.p.lpNorm<Eigen::Infinity>();
    rec.u_norm = rec.report.u.lpNorm<Eigen::Infinity>();
  }

  if (setup.problem.mode == SolveMode::Multiscale && prob.basis()) {
    const std::string cache = basis_cache_path(c, prob.hash());
    if (!std::filesystem::exists(cache)) save_basis(*prob.basis(), cache);
  }

  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

inline const char* csv_header() {
  return "case,level,beta,zeta,method,mode,units_total,units_basis,"
         "units_interface,outer_iters,converged";
}

inline std::string csv_row(const RunRecord& r) {
  std::ostringstream os;
  os << r.config.physical_case << "," << r.config.level << "," << r.config.beta
     << "," << r.config.zeta << "," << r.config.method << "," << r.config.mode
     << ",";
  if (r.budget_exceeded)
    os << "inf";
  else
    os << r.units_total;
  os << "," << r.units_basis << "," << r.units_interface << ","
     << r.outer_iterations << "," << (r.converged ? 1 : 0);
  return os.str();
}

/// Run every configuration in order and write one CSV row per run; a run
/// that exceeds its budget becomes a row with the infinity marker.
inline std::vector<RunRecord> sweep(const std::vector<RunConfig>& configs,
                                    const std::string& csv_path) {
  std::vector<RunRecord> records;
  std::ofstream csv(csv_path);
  if (!csv) throw FracflowError("cannot open output file: " + csv_path);
  csv << csv_header() << "\n";
  for (const auto& c : configs) {
    records.push_back(run(c));
    csv << csv_row(records.back()) << "\n";
  }
  if (!csv) throw FracflowError("write failure: " + csv_path);
  return records;
}

/// VTK export of a converged run: one file for the rock matrix, one for the
/// fracture network.
inline void export_fields(const RunConfig& c, const RunRecord& rec,
                          const std::string& stem) {
  if (!rec.converged) throw FracflowError("cannot export fields: run did not converge");
  const BenchSetup setup = make_setup(c);
  RobinCoefficients robin;
  for (std::size_t b = 0; b < setup.mdm.branches.size(); ++b)
    robin.alpha[static_cast<int>(b)] =
        setup.problem.laws[setup.mdm.branches[b].fracture].alpha;
  std::vector<SubdomainMatrices> mats;
  std::vector<const SubdomainMatrices*> mp;
  for (int s = 0; s < static_cast<int>(setup.mdm.subdomains.size()); ++s) {
    const double K = setup.problem.K_sub.size() == 1
                         ? setup.problem.K_sub[0]
                         : setup.problem.K_sub.at(s);
    mats.push_back(assemble_subdomain(setup.mdm, s, {K}, robin, setup.problem.bc));
  }
  for (const auto& m : mats) mp.push_back(&m);
  write_matrix_vtk(stem + "_matrix.vtk", setup.mdm, mp, rec.report.fields);
  write_fracture_vtk(stem + "_fracture.vtk", setup.mdm, rec.report.u, rec.report.p);
}

/// The Table 1 case matrix over the requested levels and drag coefficients,
/// both modes and both outer methods.
inline std::vector<RunConfig> benchmark_matrix(const std::vector<int>& levels,
                                               const std::vector<double>& betas,
                                               const RunConfig& base = {}) {
  std::vector<RunConfig> out;
  for (int level : levels)
    for (const char* cs : {"i", "ii", "iii", "iv"})
      for (double beta : betas)
        for (const char* mode : {"ms", "dd"})
          for (const char* method : {"fixed_point", "newton"}) {
            RunConfig c = base;
            c.geometry_kind = "benchmark";
            c.level = level;
            c.physical_case = cs;
            c.beta = beta;
            c.mode = mode;
            c.method = method;
            out.push_back(c);
          }
  return out;
}

}  // namespace fracflow
