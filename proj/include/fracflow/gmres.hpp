// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "fracflow/core.hpp"

namespace fracflow {

using LinearOp = std::function<Vector(const Vector&)>;

struct GmresConfig {
  double tol = 1e-6;  // relative residual
  int max_iter = 2000;
};

struct GmresResult {
  Vector x;
  Vector op_x;  // operator applied to x, reconstructed from the Krylov data
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // relative, including the start
};

// Full (non-restarted) right-preconditioned GMRES. The operator is applied
// exactly once per iteration, plus once up front when x0 is nonzero, so
// iteration counts equal operator applications for a cold start.
inline GmresResult gmres(const LinearOp& op, const Vector& b, const Vector& x0,
                         const GmresConfig& cfg,
                         const LinearOp& precond = nullptr) {
  if (!(cfg.tol > 0)) throw FracflowError("GMRES tolerance must be positive");
  const auto apply_m = [&](const Vector& v) { return precond ? precond(v) : v; };
  const Eigen::Index n = b.size();

  GmresResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x = Vector::Zero(n);
    res.op_x = Vector::Zero(n);
    res.converged = true;
    res.residual_history.push_back(0.0);
    return res;
  }

  Vector op_x0 = Vector::Zero(n);
  if (x0.size() != 0 && x0.norm() != 0.0) op_x0 = op(x0);
  Vector r0 = b - op_x0;

  res.residual_history.push_back(r0.norm() / bnorm);
  if (res.residual_history.back() <= cfg.tol) {
    res.x = x0.size() ? x0 : Vector(Vector::Zero(n));
    res.op_x = op_x0;
    res.converged = true;
    return res;
  }

  std::vector<Vector> V;
  V.push_back(r0 / r0.norm());
  std::vector<std::vector<double>> H;  // H[j] holds column j (j+2 entries)
  std::vector<double> cs, sn;
  std::vector<double> g = {r0.norm()};

  for (int k = 0; k < cfg.max_iter; ++k) {
    Vector w = op(apply_m(V[k]));
    std::vector<double> h(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      h[i] = w.dot(V[i]);
      w -= h[i] * V[i];
    }
    h[k + 1] = w.norm();
    if (h[k + 1] > 0.0) V.push_back(w / h[k + 1]);

    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double denom = std::hypot(h[k], h[k + 1]);
    const double c = denom == 0.0 ? 1.0 : h[k] / denom;
    const double s = denom == 0.0 ? 0.0 : h[k + 1] / denom;
    cs.push_back(c);
    sn.push_back(s);
    const bool lucky = h[k + 1] == 0.0;
    h[k] = denom;
    h[k + 1] = 0.0;
    g.push_back(-s * g[k]);
    g[k] = c * g[k];
    H.push_back(std::move(h));

    res.residual_history.push_back(std::abs(g[k + 1]) / bnorm);
    if (res.residual_history.back() <= cfg.tol || lucky) break;
  }

  // back substitution in the rotated (upper triangular) system
  const int m = static_cast<int>(H.size());
  std::vector<double> y(m, 0.0);
  for (int i = m - 1; i >= 0; --i) {
    double sum = g[i];
    for (int j = i + 1; j < m; ++j) sum -= H[j][i] * y[j];
    if (H[i][i] == 0.0) throw FracflowError("GMRES breakdown: singular Hessenberg");
    y[i] = sum / H[i][i];
  }
  Vector z = Vector::Zero(n);
  for (int i = 0; i < m; ++i) z += y[i] * V[i];
  res.x = (x0.size() ? x0 : Vector(Vector::Zero(n))) + apply_m(z);

  // Reconstruct op(x) without an extra operator application: the residual
  // is r = V_{m+1} Q^T (g_m e_m) with Q the accumulated rotations, and
  // op(x) = b - r.
  {
    std::vector<double> q(m + 1, 0.0);
    q[m] = 1.0;
    for (int i = m - 1; i >= 0; --i) {
      // apply transposed rotations in reverse to e_{m+1}
      const double qi = q[i], qi1 = q[i + 1];
      q[i] = cs[i] * qi - sn[i] * qi1;
      q[i + 1] = sn[i] * qi + cs[i] * qi1;
    }
    Vector r = Vector::Zero(n);
    const int nv = static_cast<int>(V.size());
    for (int i = 0; i < std::min(m + 1, nv); ++i) r += g[m] * q[i] * V[i];
    res.op_x = b - r;
  }

  res.iterations = m;
  res.converged = res.residual_history.back() <= cfg.tol;
  return res;
}

}  // namespace fracflow
