#pragma once

#include <chrono>
#include <limits>
#include <string>
#include <vector>

#include "mimic/geometry.hpp"
#include "mimic/qp.hpp"
#include "mimic/robot.hpp"
#include "mimic/types.hpp"

namespace mimic {

enum class PairKind { Self, Human };

struct CollisionPair {
  BodyPart body_a;  // robot side
  BodyPart body_b;  // robot (self) or human (human) side
  PairKind kind = PairKind::Self;

  std::string name() const {
    return std::string(kind == PairKind::Self ? "self:" : "human:") +
           body_name(body_a) + "/" + body_name(body_b);
  }
};

// Default self pairs exclude kinematically adjacent capsules, which would
// permanently violate any positive margin at the shared joint.
inline std::vector<CollisionPair> default_self_pairs() {
  using B = BodyPart;
  return {
      {B::LForearm, B::RForearm, PairKind::Self},
      {B::LForearm, B::RUpperArm, PairKind::Self},
      {B::RForearm, B::LUpperArm, PairKind::Self},
      {B::LForearm, B::Torso, PairKind::Self},
      {B::RForearm, B::Torso, PairKind::Self},
      {B::LForearm, B::RThigh, PairKind::Self},
      {B::RForearm, B::LThigh, PairKind::Self},
      {B::LForearm, B::LThigh, PairKind::Self},
      {B::RForearm, B::RThigh, PairKind::Self},
  };
}

// Robot arm capsules against every human capsule (4 x 7 = 28 pairs).
inline std::vector<CollisionPair> default_human_pairs() {
  using B = BodyPart;
  std::vector<CollisionPair> pairs;
  for (B robot : {B::LUpperArm, B::RUpperArm, B::LForearm, B::RForearm})
    for (int h = 0; h < kNumBodies; ++h)
      pairs.push_back({robot, static_cast<B>(h), PairKind::Human});
  return pairs;
}

struct BarrierConfig {
  double phi = 0.02;       // barrier margin, meters
  double gamma = 5.0;      // class-K gain, 1/s
  double k_gain = 5.0;     // reference-velocity proportional gain, 1/s
  double dt = 0.01;        // control period, seconds
  double activation_distance = 0.15;  // meters; surface distance gating
  int substeps = 8;  // internal re-linearization steps per control period
  Vec8 u_min = Vec8::Constant(-3.0);
  Vec8 u_max = Vec8::Constant(3.0);
  Vec8 q_min = Vec8::Constant(-3.0);
  Vec8 q_max = Vec8::Constant(3.0);
  Vec8 qp_weights = Vec8::Ones();
  QpConfig qp;
  std::vector<CollisionPair> self_pairs = default_self_pairs();
  std::vector<CollisionPair> human_pairs = default_human_pairs();

  void validate() const {
    if (phi <= 0 || gamma <= 0 || k_gain <= 0 || dt <= 0)
      throw ConfigError("barrier: phi, gamma, K, dt must be > 0");
    if (substeps < 1) throw ConfigError("barrier: substeps must be >= 1");
  }
};

// h = d - (r_A + r_B + phi); h > 0 means safe separation, h < 0 collision.
inline std::pair<double, ClosestPair> barrier_value(const Capsule& A,
                                                    const Capsule& B,
                                                    double phi) {
  auto [d, pair] = capsule_distance(A, B);
  return {d - (A.r + B.r + phi), pair};
}

struct ConstraintRow {
  CollisionPair pair;
  Vec8 a_row = Vec8::Zero();  // A_i
  double h = 0.0;             // barrier value, meters
  double d = 0.0;             // center-line distance, meters
  double tighten = 0.0;       // extra rhs term for an approaching obstacle
};

// Chain-rule row A_i = (dd/d endpoints) * (endpoint Jacobians). For human
// pairs the obstacle is held fixed over the step, so only robot-side
// kinematics contribute; when the upcoming obstacle position is known, the
// approach rate is compensated by tightening the row's right-hand side
// (never relaxing it). Returns nullopt when the distance is degenerate.
inline std::optional<ConstraintRow> assemble_row(
    const CollisionPair& pair, const CapsuleSet& robot_caps,
    const CapsuleSet& human_caps, const RobotJacobians& jac,
    const BarrierConfig& cfg, const CapsuleSet* human_next = nullptr) {
  const Capsule& A = robot_caps[pair.body_a];
  const Capsule& B = pair.kind == PairKind::Self ? robot_caps[pair.body_b]
                                                 : human_caps[pair.body_b];
  auto [h, cp] = barrier_value(A, B, cfg.phi);
  const auto grad = distance_gradient(cp);
  if (!grad) return std::nullopt;

  ConstraintRow row;
  row.pair = pair;
  row.h = h;
  row.d = cp.d;
  const auto& ja = jac[static_cast<int>(pair.body_a)];
  row.a_row = ja.a.transpose() * grad->a_a + ja.b.transpose() * grad->b_a;
  if (pair.kind == PairKind::Self) {
    const auto& jb = jac[static_cast<int>(pair.body_b)];
    row.a_row += jb.a.transpose() * grad->a_b + jb.b.transpose() * grad->b_b;
  } else if (human_next) {
    const double h_next =
        barrier_value(A, (*human_next)[pair.body_b], cfg.phi).first;
    row.tighten = std::max(0.0, -(h_next - h) / cfg.dt);
  }
  return row;
}

struct PairReport {
  CollisionPair pair;
  double h = 0.0;
  double d = 0.0;
  bool active = false;
  double post_h = std::numeric_limits<double>::quiet_NaN();  // active only
};

struct SafetyReport {
  std::vector<PairReport> pairs;
  double min_h = std::numeric_limits<double>::infinity();
  int active_count = 0;
  QpStatus qp_status = QpStatus::Optimal;
  int qp_iterations = 0;
  Vec8 u_star = Vec8::Zero();
  double solve_seconds = 0.0;
  std::vector<std::string> warnings;
};

struct FilterLoopState {
  Vec8 q_cbf = Vec8::Zero();
  bool initialized = false;
  long step = 0;
};

// One safety-filter control step: FK at q_cbf, active-set selection,
// reference velocity u_ref = K (q_nom - q_cbf), QP solve, integration of the
// internal safe target, and joint-limit clipping. Returns the position
// command (the updated q_cbf) and a per-pair report.
//
// When constraints are active, the control period is internally split into
// `substeps` re-linearized increments (u_ref held fixed): the discrete
// barrier decay then composes as (1 - gamma dt/n)^n >= 1 - gamma dt and the
// linearization error of the distance shrinks with the increment length.
// Constraint-free steps integrate the clipped reference in a single step, so
// transparent tracking is bit-exact regardless of the substep count.
inline Vec8 filter_step(FilterLoopState& state, const Vec8& q_nom,
                        const CapsuleSet& human_caps, const BarrierConfig& cfg,
                        const RobotGeometry& geo, QpSolver& solver,
                        SafetyReport* report = nullptr,
                        const CapsuleSet* human_next = nullptr) {
  if (!state.initialized) {
    state.q_cbf = q_nom.cwiseMax(cfg.q_min).cwiseMin(cfg.q_max);
    state.initialized = true;
  }

  SafetyReport local;
  SafetyReport& rep = report ? *report : local;
  rep = SafetyReport{};

  const Vec8 u_ref = cfg.k_gain * (q_nom - state.q_cbf);

  bool first = true;
  int remaining = cfg.substeps;
  while (remaining > 0) {
    const CapsuleSet robot_caps = robot_fk(state.q_cbf, geo);
    const RobotJacobians jac = robot_endpoint_jacobians(state.q_cbf, geo);

    std::vector<ConstraintRow> active;
    auto visit = [&](const CollisionPair& pair) {
      const Capsule& A = robot_caps[pair.body_a];
      const Capsule& B = pair.kind == PairKind::Self ? robot_caps[pair.body_b]
                                                     : human_caps[pair.body_b];
      auto [h, cp] = barrier_value(A, B, cfg.phi);
      PairReport pr;
      pr.pair = pair;
      pr.h = h;
      pr.d = cp.d;
      const double surface = cp.d - (A.r + B.r);
      if (surface < cfg.activation_distance) {
        if (auto row = assemble_row(pair, robot_caps, human_caps, jac, cfg,
                                    human_next)) {
          pr.active = true;
          active.push_back(*row);
        } else if (first) {
          rep.warnings.push_back("degenerate distance, row skipped: " +
                                 pair.name());
        }
      }
      if (first) {
        rep.min_h = std::min(rep.min_h, h);
        rep.pairs.push_back(pr);
      }
    };
    for (const auto& p : cfg.self_pairs) visit(p);
    for (const auto& p : cfg.human_pairs) visit(p);
    if (first) rep.active_count = static_cast<int>(active.size());

    const bool full_step = first && active.empty();
    const double dt_step = full_step ? cfg.dt : cfg.dt / cfg.substeps;

    QpProblem qp;
    qp.weights = cfg.qp_weights;
    qp.u_ref = u_ref;
    // joint position limits enter as velocity bounds so the integrated target
    // never needs clipping, which would silently break the barrier rows
    qp.u_min = cfg.u_min.cwiseMax((cfg.q_min - state.q_cbf) / dt_step);
    qp.u_max = cfg.u_max.cwiseMin((cfg.q_max - state.q_cbf) / dt_step);
    qp.rows.resize(active.size(), kNumJoints);
    qp.lower.resize(active.size());
    for (size_t i = 0; i < active.size(); ++i) {
      qp.rows.row(i) = active[i].a_row.transpose();
      qp.lower(i) = -cfg.gamma * active[i].h + active[i].tighten;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const QpSolution sol = solver.solve(qp, cfg.qp);
    rep.solve_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (first || sol.status > rep.qp_status) rep.qp_status = sol.status;
    rep.qp_iterations += sol.iterations;
    if (first) rep.u_star = sol.u_star;

    state.q_cbf = (state.q_cbf + dt_step * sol.u_star)
                      .cwiseMax(cfg.q_min)
                      .cwiseMin(cfg.q_max);
    remaining -= full_step ? cfg.substeps : 1;
    first = false;
  }
  state.step += 1;

  // post-step barrier values for the active rows, against the same (latched)
  // human capsules
  const CapsuleSet post_caps = robot_fk(state.q_cbf, geo);
  size_t ai = 0;
  for (auto& pr : rep.pairs) {
    if (!pr.active) continue;
    const Capsule& A = post_caps[pr.pair.body_a];
    const Capsule& B = pr.pair.kind == PairKind::Self
                           ? post_caps[pr.pair.body_b]
                           : human_caps[pr.pair.body_b];
    pr.post_h = barrier_value(A, B, cfg.phi).first;
    ++ai;
  }
  (void)ai;

  return state.q_cbf;
}

}  // namespace mimic
