// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracflow/core.hpp"
#include "fracflow/gmres.hpp"
#include "fracflow/interface_op.hpp"

namespace fracflow {

enum class Method { FixedPoint, Newton };

struct OuterConfig {
  Method method = Method::FixedPoint;
  double tol_outer = 1e-6;
  int max_outer = 500;
  GmresConfig gmres;
  bool warm_start = false;  // start inner solves from the previous iterate
  bool recover_fields = true;
};

struct OuterReport {
  int outer_iterations = 0;
  std::vector<int> inner_iterations;
  bool converged = false;
  bool budget_exceeded = false;  // the infinity marker
  Vector u, p, pt;
  std::vector<MixedSolution> fields;
  long units_total = 0;
  long units_basis = 0;
  long units_source = 0;
  long units_interface = 0;
  long units_recovery = 0;
};

namespace detail {

inline double update_norm(const Vector& xn, const Vector& xo, int n_up) {
  const double diff = (xn.head(n_up) - xo.head(n_up)).lpNorm<Eigen::Infinity>();
  const double base = xo.head(n_up).lpNorm<Eigen::Infinity>();
  return base < 1e-14 ? diff : diff / base;
}

inline void snapshot_units(OuterReport& rep, SolveCounter& c) {
  rep.units_total = c.units();
  rep.units_basis = c.units(SolveCounter::Phase::Basis);
  rep.units_source = c.units(SolveCounter::Phase::Source);
  rep.units_interface = c.units(SolveCounter::Phase::Interface);
  rep.units_recovery = c.units(SolveCounter::Phase::Recovery);
}

}  // namespace detail

// Initial iterate: the interface problem with the drag and pressure
// couplings switched off, i.e. a plain linear flow solve.
inline GmresResult initial_guess(InterfaceProblem& prob, const GmresConfig& gcfg) {
  const auto& lay = prob.layout();
  prob.set_state(Vector::Zero(lay.n_u), Vector::Zero(lay.n_p), false);
  return prob.solve_linear(prob.rhs(), gcfg);
}

// Residual of the nonlinear interface system at state x, given the tracked
// flux-jump image of the current interface pressure (so that evaluation
// costs no sub-domain solves).
inline Vector residual(InterfaceProblem& prob, const Vector& x,
                       const Vector& s_gamma_p, const Vector& b) {
  const auto& lay = prob.layout();
  const auto& blk = prob.blocks();
  const Vector u = x.head(lay.n_u);
  const Vector p = x.segment(lay.n_u, lay.n_p);
  const Vector pt = x.tail(lay.n_T);
  std::vector<char> strong(lay.n_u, 0);
  for (const auto& [j, v] : blk.strong_u) {
    (void)v;
    strong[j] = 1;
  }
  Vector yu = assemble_mass(prob.mesh(), prob.config().laws, lay, u, p) * u;
  const Vector bp = blk.B.transpose() * p;
  const Vector ntp = blk.NT.transpose() * pt;
  for (int j = 0; j < lay.n_u; ++j) {
    if (strong[j])
      yu[j] = u[j];
    else
      yu[j] += -bp[j] + ntp[j];
  }
  Vector y(lay.total());
  y.head(lay.n_u) = yu;
  y.segment(lay.n_u, lay.n_p) = blk.B * u + blk.h.cwiseProduct(s_gamma_p);
  y.tail(lay.n_T) = blk.NT * u;
  return y - b;
}

// Full outer-inner driver for both linearizations, with solve counting,
// budget handling, and optional field recovery.
inline OuterReport outer_solve(InterfaceProblem& prob, const OuterConfig& cfg) {
  OuterReport rep;
  const auto& lay = prob.layout();
  auto finish = [&](const Vector& x, bool converged) {
    rep.u = x.head(lay.n_u);
    rep.p = x.segment(lay.n_u, lay.n_p);
    rep.pt = x.tail(lay.n_T);
    rep.converged = converged;
    if (converged && cfg.recover_fields) rep.fields = prob.recover(rep.p);
    detail::snapshot_units(rep, prob.counter());
  };

  bool linear_law = true;
  for (const auto& law : prob.config().laws)
    if (law.beta != 0.0 || law.zeta != 0.0) linear_law = false;

  Vector x;
  try {
    prob.g_gamma();
    if (prob.mode() == SolveMode::Multiscale) prob.assemble_basis_now();
    const Vector b = prob.rhs();

    auto r0 = initial_guess(prob, cfg.gmres);
    rep.inner_iterations.push_back(r0.iterations);
    rep.outer_iterations = 1;
    x = r0.x;
    if (!r0.converged) {
      finish(x, false);
      return rep;
    }
    if (linear_law) {
      finish(x, true);
      return rep;
    }

    if (cfg.method == Method::FixedPoint) {
      for (int k = 1; k < cfg.max_outer; ++k) {
        prob.set_state(x.head(lay.n_u), x.segment(lay.n_u, lay.n_p), false);
        const auto r = prob.solve_linear(b, cfg.gmres,
                                         cfg.warm_start ? x : Vector());
        rep.inner_iterations.push_back(r.iterations);
        ++rep.outer_iterations;
        const double d = detail::update_norm(r.x, x, lay.n_u + lay.n_p);
        x = r.x;
        if (!r.converged) break;
        if (d < cfg.tol_outer) {
          finish(x, true);
          return rep;
        }
      }
      finish(x, false);
      return rep;
    }

    // Newton: the residual needs one fresh flux-jump application per
    // iteration (free in multiscale mode, one solve unit otherwise)
    const double bscale = std::max(b.lpNorm<Eigen::Infinity>(), 1e-30);
    double prev_res = 1e300;
    int growth = 0;
    double prev_d = 1e300;
    for (int k = 1; k < cfg.max_outer; ++k) {
      const Vector s_p = prob.apply_S_gamma(x.segment(lay.n_u, lay.n_p));
      const Vector F = residual(prob, x, s_p, b);
      const double rnorm = F.lpNorm<Eigen::Infinity>() / bscale;
      if (rnorm <= cfg.tol_outer && prev_d < cfg.tol_outer) {
        finish(x, true);
        return rep;
      }
      if (rnorm > prev_res) {
        if (++growth >= 3)
          throw FracflowError(
              "Newton iteration diverging; run fixed-point steps first and "
              "restart Newton from that state");
      } else {
        growth = 0;
      }
      prev_res = rnorm;

      prob.set_state(x.head(lay.n_u), x.segment(lay.n_u, lay.n_p), true);
      const auto r = prob.solve_linear(Vector(-F), cfg.gmres);
      rep.inner_iterations.push_back(r.iterations);
      ++rep.outer_iterations;
      prev_d = detail::update_norm(Vector(x + r.x), x, lay.n_u + lay.n_p);
      x += r.x;
      if (!r.converged) break;
    }
    finish(x, false);
    return rep;
  } catch (const BudgetExceeded&) {
    rep.budget_exceeded = true;
    if (x.size() == 0) x = Vector::Zero(lay.total());
    rep.u = x.head(lay.n_u);
    rep.p = x.segment(lay.n_u, lay.n_p);
    rep.pt = x.tail(lay.n_T);
    detail::snapshot_units(rep, prob.counter());
    return rep;
  }
}

}  // namespace fracflow
