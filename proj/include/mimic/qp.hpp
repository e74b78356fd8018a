#pragma once

#include <limits>
#include <vector>

#include "mimic/types.hpp"

namespace mimic {

// Strictly convex diagonal-weighted QP:
//   min 1/2 ||u - u_ref||_W^2  s.t.  A u >= lower,  u_min <= u <= u_max
struct QpProblem {
  Vec8 weights = Vec8::Ones();  // diagonal of W, all > 0
  Vec8 u_ref = Vec8::Zero();
  Eigen::MatrixXd rows;      // N_c x 8
  Eigen::VectorXd lower;     // N_c
  Vec8 u_min = Vec8::Constant(-std::numeric_limits<double>::infinity());
  Vec8 u_max = Vec8::Constant(std::numeric_limits<double>::infinity());
};

enum class QpStatus { Optimal, MaxIterations, InfeasibleRelaxed };

inline const char* qp_status_name(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::MaxIterations: return "max-iterations";
    case QpStatus::InfeasibleRelaxed: return "infeasible-relaxed";
  }
  return "?";
}

struct QpSolution {
  Vec8 u_star = Vec8::Zero();
  QpStatus status = QpStatus::Optimal;
  int iterations = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
};

struct QpConfig {
  int max_iter = 100;   // per Table-1-style usage
  double tol = 1e-3;
  bool polish = true;
  double slack_penalty = 1e6;  // rho for the infeasibility relaxation
};

namespace detail {

// Operator-splitting iteration on
//   min 1/2 x'Px + q'x  s.t.  lo <= Cx <= hi
// with diagonal P. Returns (x, z, y, iters, primal_res, dual_res).
struct AdmmWorkspace {
  Eigen::VectorXd x, z, y;
  bool valid = false;
};

struct AdmmResult {
  Eigen::VectorXd x, z, y;
  int iterations = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  bool converged = false;
};

inline AdmmResult admm_solve(const Eigen::VectorXd& pdiag,
                             const Eigen::VectorXd& q,
                             const Eigen::MatrixXd& C,
                             const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, int max_iter,
                             double tol, const AdmmWorkspace* warm) {
  const int n = static_cast<int>(pdiag.size());
  const int m = static_cast<int>(C.rows());
  const double sigma = 1e-6;
  double rho = 0.1;

  AdmmResult r;
  r.x = Eigen::VectorXd::Zero(n);
  r.z = Eigen::VectorXd::Zero(m);
  r.y = Eigen::VectorXd::Zero(m);
  if (warm && warm->valid && warm->x.size() == n && warm->z.size() == m) {
    r.x = warm->x;
    r.z = warm->z;
    r.y = warm->y;
  }

  Eigen::MatrixXd K;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  auto factor = [&]() {
    K = rho * (C.transpose() * C);
    K.diagonal() += pdiag;
    K.diagonal().array() += sigma;
    ldlt.compute(K);
  };
  factor();

  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd rhs =
        sigma * r.x - q + C.transpose() * (rho * r.z - r.y);
    r.x = ldlt.solve(rhs);
    const Eigen::VectorXd cx = C * r.x;
    const Eigen::VectorXd zt = cx + r.y / rho;
    r.z = zt.cwiseMax(lo).cwiseMin(hi);
    r.y += rho * (cx - r.z);

    r.primal_res = m > 0 ? (cx - r.z).cwiseAbs().maxCoeff() : 0.0;
    const Eigen::VectorXd px = pdiag.asDiagonal() * r.x;
    const Eigen::VectorXd cty = C.transpose() * r.y;
    r.dual_res = (px + q + cty).cwiseAbs().maxCoeff();
    r.iterations = it;
    // relative stopping criteria keep the tolerance meaningful when the
    // problem data (e.g. slack penalties) live on a large scale
    const double primal_scale =
        m > 0 ? std::max({1.0, cx.cwiseAbs().maxCoeff(),
                          r.z.cwiseAbs().maxCoeff()})
              : 1.0;
    const double dual_scale =
        std::max({1.0, px.cwiseAbs().maxCoeff(), q.cwiseAbs().maxCoeff(),
                  cty.cwiseAbs().maxCoeff()});
    if (r.primal_res <= tol * primal_scale && r.dual_res <= tol * dual_scale) {
      r.converged = true;
      break;
    }
    if (it % 25 == 0) {
      const double ratio =
          std::sqrt((r.primal_res + 1e-12) / (r.dual_res + 1e-12));
      const double next = std::clamp(rho * ratio, 1e-3, 1e3);
      if (next > rho * 2.0 || next < rho * 0.5) {
        rho = next;
        factor();
      }
    }
  }
  return r;
}

// Equality-constrained refinement on the active set detected from (z, y).
// Returns true and writes x on success.
inline bool polish_solution(const Eigen::VectorXd& pdiag,
                            const Eigen::VectorXd& q,
                            const Eigen::MatrixXd& C,
                            const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, const AdmmResult& r,
                            double tol, Eigen::VectorXd& x_out) {
  const int n = static_cast<int>(pdiag.size());
  const int m = static_cast<int>(C.rows());
  std::vector<int> act;
  std::vector<double> rhs_b;
  for (int i = 0; i < m; ++i) {
    if (r.y(i) < -tol || r.z(i) - lo(i) <= tol) {
      if (std::isfinite(lo(i))) {
        act.push_back(i);
        rhs_b.push_back(lo(i));
        continue;
      }
    }
    if (r.y(i) > tol || hi(i) - r.z(i) <= tol) {
      if (std::isfinite(hi(i))) {
        act.push_back(i);
        rhs_b.push_back(hi(i));
      }
    }
  }
  const int k = static_cast<int>(act.size());
  Eigen::MatrixXd kkt(n + k, n + k);
  kkt.setZero();
  kkt.topLeftCorner(n, n).diagonal() = pdiag;
  for (int i = 0; i < k; ++i) {
    kkt.block(0, n + i, n, 1) = C.row(act[i]).transpose();
    kkt.block(n + i, 0, 1, n) = C.row(act[i]);
  }
  Eigen::VectorXd rhs(n + k);
  rhs.head(n) = -q;
  for (int i = 0; i < k; ++i) rhs(n + i) = rhs_b[i];
  Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
  if (!sol.allFinite()) return false;
  Eigen::VectorXd x = sol.head(n);
  // accept only if primal feasible
  const Eigen::VectorXd cx = C * x;
  for (int i = 0; i < m; ++i) {
    if (cx(i) < lo(i) - 1e-9 || cx(i) > hi(i) + 1e-9) return false;
  }
  x_out = x;
  return true;
}

}  // namespace detail

// Dense QP solver with a mutable warm-start workspace; one instance per
// control loop (or per thread).
class QpSolver {
 public:
  QpSolution solve(const QpProblem& p, const QpConfig& cfg = {}) {
    const int m = static_cast<int>(p.rows.rows());
    QpSolution sol;

    if (m == 0) {
      // diagonal W makes the box projection exact
      sol.u_star = p.u_ref.cwiseMax(p.u_min).cwiseMin(p.u_max);
      sol.status = QpStatus::Optimal;
      warm_.valid = false;
      return sol;
    }

    const Eigen::VectorXd pdiag = p.weights;
    const Eigen::VectorXd q = -(p.weights.cwiseProduct(p.u_ref));
    Eigen::MatrixXd C(m + kNumJoints, kNumJoints);
    C.topRows(m) = p.rows;
    C.bottomRows(kNumJoints).setIdentity();
    Eigen::VectorXd lo(m + kNumJoints), hi(m + kNumJoints);
    lo.head(m) = p.lower;
    hi.head(m).setConstant(std::numeric_limits<double>::infinity());
    lo.tail(kNumJoints) = p.u_min;
    hi.tail(kNumJoints) = p.u_max;

    detail::AdmmResult r = detail::admm_solve(pdiag, q, C, lo, hi,
                                              cfg.max_iter, cfg.tol, &warm_);
    if (r.converged) {
      Eigen::VectorXd polished;
      if (cfg.polish &&
          detail::polish_solution(pdiag, q, C, lo, hi, r, cfg.tol, polished)) {
        r.x = polished;
      }
      warm_.x = r.x;
      warm_.z = r.z;
      warm_.y = r.y;
      warm_.valid = true;
      sol.u_star = clip_box(r.x, p);
      sol.status = QpStatus::Optimal;
      sol.iterations = r.iterations;
      sol.primal_res = r.primal_res;
      sol.dual_res = r.dual_res;
      return sol;
    }

    // Did not converge: solve the slack-relaxed problem
    //   min 1/2||u-u_ref||_W^2 + rho_s ||s||^2
    //   s.t. A u + s >= l, s >= 0, box on u (never relaxed).
    const int ne = kNumJoints + m;
    Eigen::VectorXd pdiag_e(ne), q_e(ne);
    pdiag_e.head(kNumJoints) = pdiag;
    pdiag_e.tail(m).setConstant(2.0 * cfg.slack_penalty);
    q_e.head(kNumJoints) = q;
    q_e.tail(m).setZero();
    Eigen::MatrixXd Ce(m + kNumJoints + m, ne);
    Ce.setZero();
    Ce.topLeftCorner(m, kNumJoints) = p.rows;
    Ce.topRightCorner(m, m).setIdentity();
    Ce.block(m, 0, kNumJoints, kNumJoints).setIdentity();
    Ce.bottomRightCorner(m, m).setIdentity();
    Eigen::VectorXd lo_e(m + kNumJoints + m), hi_e(m + kNumJoints + m);
    lo_e.head(m) = p.lower;
    hi_e.head(m).setConstant(std::numeric_limits<double>::infinity());
    lo_e.segment(m, kNumJoints) = p.u_min;
    hi_e.segment(m, kNumJoints) = p.u_max;
    lo_e.tail(m).setZero();
    hi_e.tail(m).setConstant(std::numeric_limits<double>::infinity());

    detail::AdmmResult re = detail::admm_solve(
        pdiag_e, q_e, Ce, lo_e, hi_e, 4 * cfg.max_iter, cfg.tol, nullptr);
    Eigen::VectorXd polished;
    if (re.converged && cfg.polish &&
        detail::polish_solution(pdiag_e, q_e, Ce, lo_e, hi_e, re, cfg.tol,
                                polished)) {
      re.x = polished;
    }
    const double max_slack =
        m > 0 ? re.x.tail(m).cwiseAbs().maxCoeff() : 0.0;
    sol.u_star = clip_box(re.x.head(kNumJoints), p);
    sol.status = max_slack > 10.0 * cfg.tol
                     ? QpStatus::InfeasibleRelaxed
                     : (re.converged ? QpStatus::Optimal
                                     : QpStatus::MaxIterations);
    sol.iterations = r.iterations + re.iterations;
    sol.primal_res = re.primal_res;
    sol.dual_res = re.dual_res;
    warm_.valid = false;
    return sol;
  }

  void reset() { warm_.valid = false; }

 private:
  static Vec8 clip_box(const Eigen::VectorXd& x, const QpProblem& p) {
    Vec8 u = x.head(kNumJoints);
    return u.cwiseMax(p.u_min).cwiseMin(p.u_max);
  }

  detail::AdmmWorkspace warm_;
};

}  // namespace mimic
