#pragma once

#include <chrono>
#include <iomanip>

#include "mimic/pipeline.hpp"

namespace mimic {

enum class GeomKind { SpheresK0, SpheresK1, Boxes, Capsules };

inline const char* geom_kind_name(GeomKind k) {
  switch (k) {
    case GeomKind::SpheresK0: return "spheres-k0";
    case GeomKind::SpheresK1: return "spheres-k1";
    case GeomKind::Boxes: return "boxes";
    case GeomKind::Capsules: return "capsules";
  }
  return "?";
}

struct BenchResult {
  GeomKind kind = GeomKind::Capsules;
  int constraints = 0;
  double mean_rate_hz = 0.0;
  double mean_solve_seconds = 0.0;
  double mean_distance_seconds = 0.0;
  long steps = 0;
};

namespace detail {

inline Obb obb_from_capsule(const Capsule& c) {
  Obb box;
  box.center = 0.5 * (c.a + c.b);
  const Vec3 axis = c.b - c.a;
  const double len = axis.norm();
  Vec3 z = len > 1e-12 ? Vec3(axis / len) : Vec3::UnitZ();
  Vec3 x = std::abs(z.z()) < 0.9 ? z.cross(Vec3::UnitZ()).normalized()
                                 : z.cross(Vec3::UnitX()).normalized();
  box.rot.col(0) = x;
  box.rot.col(1) = z.cross(x);
  box.rot.col(2) = z;
  box.half = Vec3(c.r, c.r, 0.5 * len + c.r);
  return box;
}

// Jacobian of a point on a capsule axis at parameter lambda.
inline Mat38 axis_point_jacobian(const BodyJacobians& j, double lambda) {
  return (1.0 - lambda) * j.a + lambda * j.b;
}

inline double axis_parameter(const Capsule& c, const Vec3& p) {
  const Vec3 axis = c.b - c.a;
  const double len2 = axis.squaredNorm();
  if (len2 < 1e-18) return 0.0;
  return std::clamp((p - c.a).dot(axis) / len2, 0.0, 1.0);
}

// Builds the worst-case constraint rows for one control step under the
// chosen geometry model. Row semantics match Eq-style CBF rows: A u >= -g h.
inline void build_rows(GeomKind kind, const CapsuleSet& robot,
                       const CapsuleSet& human, const RobotJacobians& jac,
                       const BarrierConfig& cfg,
                       std::vector<ConstraintRow>& rows) {
  rows.clear();
  auto all_pairs = [&](auto&& fn) {
    for (const auto& p : cfg.self_pairs) fn(p);
    for (const auto& p : cfg.human_pairs) fn(p);
  };

  switch (kind) {
    case GeomKind::Capsules: {
      all_pairs([&](const CollisionPair& p) {
        if (auto row = assemble_row(p, robot, human, jac, cfg))
          rows.push_back(*row);
      });
      break;
    }
    case GeomKind::SpheresK0:
    case GeomKind::SpheresK1: {
      const int k = kind == GeomKind::SpheresK0 ? 0 : 1;
      all_pairs([&](const CollisionPair& p) {
        const Capsule& ca = robot[p.body_a];
        const Capsule& cb = p.kind == PairKind::Self ? robot[p.body_b]
                                                     : human[p.body_b];
        const SphereChain sa = capsule_to_spheres(ca, k);
        const SphereChain sb = capsule_to_spheres(cb, k);
        const auto& ja = jac[static_cast<int>(p.body_a)];
        const int na = static_cast<int>(sa.centers.size());
        const int nb = static_cast<int>(sb.centers.size());
        for (int i = 0; i < na; ++i) {
          const double la = na > 1 ? double(i) / (na - 1) : 0.0;
          const Mat38 jca = axis_point_jacobian(ja, la);
          for (int jx = 0; jx < nb; ++jx) {
            const Vec3 diff = sa.centers[i] - sb.centers[jx];
            const double d = diff.norm();
            if (d < 1e-9) continue;
            const Vec3 n = diff / d;
            ConstraintRow row;
            row.pair = p;
            row.d = d;
            row.h = d - (sa.r + sb.r + cfg.phi);
            row.a_row = jca.transpose() * n;
            if (p.kind == PairKind::Self) {
              const double lb = nb > 1 ? double(jx) / (nb - 1) : 0.0;
              const Mat38 jcb =
                  axis_point_jacobian(jac[static_cast<int>(p.body_b)], lb);
              row.a_row -= jcb.transpose() * n;
            }
            rows.push_back(row);
          }
        }
      });
      break;
    }
    case GeomKind::Boxes: {
      all_pairs([&](const CollisionPair& p) {
        const Capsule& ca = robot[p.body_a];
        const Capsule& cb = p.kind == PairKind::Self ? robot[p.body_b]
                                                     : human[p.body_b];
        const ObbProximity prox =
            obb_distance(obb_from_capsule(ca), obb_from_capsule(cb));
        ConstraintRow row;
        row.pair = p;
        row.d = prox.d;
        row.h = prox.d - cfg.phi;
        const double la = axis_parameter(ca, prox.p_a);
        const Mat38 jca =
            axis_point_jacobian(jac[static_cast<int>(p.body_a)], la);
        row.a_row = jca.transpose() * prox.direction;
        if (p.kind == PairKind::Self) {
          const double lb = axis_parameter(cb, prox.p_b);
          const Mat38 jcb =
              axis_point_jacobian(jac[static_cast<int>(p.body_b)], lb);
          row.a_row -= jcb.transpose() * prox.direction;
        }
        rows.push_back(row);
      });
      break;
    }
  }
}

}  // namespace detail

// Runs the control loop under each geometry model with every configured
// pair imposed (activation distance treated as infinite) and reports
// constraint counts and timings.
inline std::vector<BenchResult> run_bench(const RunConfig& base,
                                          const std::vector<GeomKind>& kinds,
                                          long steps) {
  RunConfig cfg = base;
  cfg.validate();
  auto frames = load_frames(cfg);
  const PerceptionOutput percep = run_perception(cfg, frames);
  const long n = std::min<long>(steps, static_cast<long>(percep.t.size()));

  std::vector<BenchResult> results;
  for (GeomKind kind : kinds) {
    BenchResult r;
    r.kind = kind;
    FilterLoopState state;
    state.q_cbf = percep.q_nom.empty() ? Vec8::Zero() : percep.q_nom.front();
    state.initialized = true;
    QpSolver solver;
    std::vector<ConstraintRow> rows;
    double dist_total = 0.0, solve_total = 0.0;
    const auto loop_start = std::chrono::steady_clock::now();

    for (long i = 0; i < n; ++i) {
      const CapsuleSet robot = robot_fk(state.q_cbf, cfg.geometry);
      const RobotJacobians jac =
          robot_endpoint_jacobians(state.q_cbf, cfg.geometry);

      const auto t0 = std::chrono::steady_clock::now();
      detail::build_rows(kind, robot, percep.human[i], jac, cfg.barrier, rows);
      const auto t1 = std::chrono::steady_clock::now();

      QpProblem qp;
      qp.weights = cfg.barrier.qp_weights;
      qp.u_ref = cfg.barrier.k_gain * (percep.q_nom[i] - state.q_cbf);
      qp.u_min = cfg.barrier.u_min;
      qp.u_max = cfg.barrier.u_max;
      qp.rows.resize(rows.size(), kNumJoints);
      qp.lower.resize(rows.size());
      for (size_t j = 0; j < rows.size(); ++j) {
        qp.rows.row(j) = rows[j].a_row.transpose();
        qp.lower(j) = -cfg.barrier.gamma * rows[j].h;
      }
      const QpSolution sol = solver.solve(qp, cfg.barrier.qp);
      const auto t2 = std::chrono::steady_clock::now();

      state.q_cbf = (state.q_cbf + cfg.barrier.dt * sol.u_star)
                        .cwiseMax(cfg.barrier.q_min)
                        .cwiseMin(cfg.barrier.q_max);
      dist_total += std::chrono::duration<double>(t1 - t0).count();
      solve_total += std::chrono::duration<double>(t2 - t1).count();
      r.constraints = static_cast<int>(rows.size());
    }
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - loop_start)
                            .count();
    r.steps = n;
    r.mean_rate_hz = wall > 0 ? n / wall : 0.0;
    r.mean_solve_seconds = n > 0 ? solve_total / n : 0.0;
    r.mean_distance_seconds = n > 0 ? dist_total / n : 0.0;
    results.push_back(r);
  }
  return results;
}

inline void write_bench_csv(const std::vector<BenchResult>& results,
                            std::ostream& os) {
  os << "geometry,constraints,rate_hz,solve_time_s,distance_time_s,"
        "initial_compile_time_s\n";
  for (const auto& r : results) {
    os << geom_kind_name(r.kind) << ',' << r.constraints << ','
       << detail::fmt(r.mean_rate_hz) << ',' << detail::fmt(r.mean_solve_seconds)
       << ',' << detail::fmt(r.mean_distance_seconds) << ",n/a\n";
  }
}

inline void print_bench_table(const std::vector<BenchResult>& results,
                              std::ostream& os) {
  os << "CBF benchmark statistics (worst-case pairing)\n";
  os << std::left << std::setw(26) << "Metric";
  for (const auto& r : results) os << std::setw(14) << geom_kind_name(r.kind);
  os << '\n';
  auto row = [&](const char* name, auto getter) {
    os << std::left << std::setw(26) << name;
    for (const auto& r : results) {
      std::ostringstream v;
      getter(v, r);
      os << std::setw(14) << v.str();
    }
    os << '\n';
  };
  row("Rate (Hz)", [](std::ostream& o, const BenchResult& r) {
    o << std::fixed << std::setprecision(1) << r.mean_rate_hz;
  });
  row("# Constraints", [](std::ostream& o, const BenchResult& r) {
    o << r.constraints;
  });
  row("Initial Compile Time (s)",
      [](std::ostream& o, const BenchResult&) { o << "n/a"; });
  row("Solve Time (s)", [](std::ostream& o, const BenchResult& r) {
    o << std::scientific << std::setprecision(3) << r.mean_solve_seconds;
  });
}

}  // namespace mimic
