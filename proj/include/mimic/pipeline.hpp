#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mimic/cbf.hpp"
#include "mimic/config.hpp"
#include "mimic/pose.hpp"
#include "mimic/retarget.hpp"

namespace mimic {

// ---------------------------------------------------------------------------
// Perception front half: filter -> calibrate -> pose -> retarget, plus the
// human capsules in the robot frame, per frame.
// ---------------------------------------------------------------------------

struct PerceptionOutput {
  std::vector<double> t;
  std::vector<PoseAngles> theta;
  std::vector<Vec8> q_nom;
  std::vector<CapsuleSet> human;
  PoseAngles theta_home;
};

inline std::vector<SkeletonFrame> load_frames(const RunConfig& cfg) {
  if (!cfg.input_path.empty()) {
    std::ifstream in(cfg.input_path);
    if (!in) throw ConfigError("cannot open input: " + cfg.input_path);
    return parse_stream(in);
  }
  return generate_scenario(cfg.scenario, cfg.duration, 1.0 / cfg.barrier.dt);
}

inline PerceptionOutput run_perception(const RunConfig& cfg,
                                       const std::vector<SkeletonFrame>& raw) {
  PerceptionOutput out;
  FilterState fstate;
  std::vector<SkeletonFrame> filtered;
  filtered.reserve(raw.size());
  for (const auto& f : raw) filtered.push_back(filter_frame(fstate, f, cfg.filter));

  RetargetConfig rt = cfg.retarget;
  if (!cfg.no_calibrate) {
    std::vector<PoseAngles> prefix;
    for (const auto& f : filtered) {
      if (f.t >= cfg.calibration_seconds) break;
      try {
        prefix.push_back(estimate_pose(f, build_torso_frame(f)));
      } catch (const DegenerateGeometry&) {
      }
    }
    if (!prefix.empty()) rt.theta_home = calibrate_home(prefix);
  }
  out.theta_home = rt.theta_home;

  const RigidTransform T = cfg.human_to_robot();
  PoseAngles last_theta = rt.theta_home;
  bool have_human = false;
  CapsuleSet last_human;
  for (const auto& f : filtered) {
    PoseAngles theta = last_theta;
    try {
      theta = estimate_pose(f, build_torso_frame(f));
    } catch (const DegenerateGeometry&) {
      // hold the previous pose
    }
    last_theta = theta;
    CapsuleSet human = last_human;
    try {
      human = human_capsules(f, cfg.human_radius, T);
      have_human = true;
    } catch (const DegenerateGeometry&) {
      if (!have_human) throw;
    }
    last_human = human;
    out.t.push_back(f.t);
    out.theta.push_back(theta);
    out.q_nom.push_back(retarget(theta, rt));
    out.human.push_back(human);
  }
  return out;
}

// Barrier report without control: used for safety-off runs.
inline SafetyReport evaluate_report(const Vec8& q, const CapsuleSet& human,
                                    const BarrierConfig& cfg,
                                    const RobotGeometry& geo) {
  const CapsuleSet robot_caps = robot_fk(q, geo);
  SafetyReport rep;
  auto visit = [&](const CollisionPair& pair) {
    const Capsule& A = robot_caps[pair.body_a];
    const Capsule& B = pair.kind == PairKind::Self ? robot_caps[pair.body_b]
                                                   : human[pair.body_b];
    auto [h, cp] = barrier_value(A, B, cfg.phi);
    PairReport pr;
    pr.pair = pair;
    pr.h = h;
    pr.d = cp.d;
    rep.min_h = std::min(rep.min_h, h);
    rep.pairs.push_back(pr);
  };
  for (const auto& p : cfg.self_pairs) visit(p);
  for (const auto& p : cfg.human_pairs) visit(p);
  return rep;
}

// ---------------------------------------------------------------------------
// Closed-loop run
// ---------------------------------------------------------------------------

struct StepRecord {
  double t = 0.0;
  Vec8 q_nom = Vec8::Zero();
  Vec8 q_cbf = Vec8::Zero();  // valid only when safety is on
  Vec8 cmd = Vec8::Zero();
  SafetyReport report;
};

struct RunSummary {
  double min_h = std::numeric_limits<double>::infinity();
  long violation_steps = 0;  // steps with min_h < 0
  long steps = 0;
  double mean_rate_hz = 0.0;
  double mean_solve_seconds = 0.0;
  bool safety = true;
};

struct RunResult {
  std::vector<StepRecord> records;
  RunSummary summary;
  std::vector<std::string> pair_names;
  PoseAngles theta_home;
  std::vector<PoseAngles> theta;
};

inline RunResult run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  const auto frames = load_frames(cfg);
  const PerceptionOutput percep = run_perception(cfg, frames);

  RunResult result;
  result.theta_home = percep.theta_home;
  result.theta = percep.theta;
  for (const auto& p : cfg.barrier.self_pairs)
    result.pair_names.push_back(p.name());
  for (const auto& p : cfg.barrier.human_pairs)
    result.pair_names.push_back(p.name());

  FilterLoopState state;
  QpSolver solver;
  double solve_total = 0.0;
  const auto t_start = std::chrono::steady_clock::now();

  for (size_t i = 0; i < percep.t.size(); ++i) {
    StepRecord rec;
    rec.t = percep.t[i];
    rec.q_nom = percep.q_nom[i];
    if (cfg.safety) {
      const CapsuleSet* next =
          i + 1 < percep.human.size() ? &percep.human[i + 1] : nullptr;
      rec.cmd = filter_step(state, rec.q_nom, percep.human[i], cfg.barrier,
                            cfg.geometry, solver, &rec.report, next);
      rec.q_cbf = state.q_cbf;
    } else {
      rec.cmd = rec.q_nom;
      rec.report = evaluate_report(rec.q_nom, percep.human[i], cfg.barrier,
                                   cfg.geometry);
    }
    result.summary.min_h = std::min(result.summary.min_h, rec.report.min_h);
    if (rec.report.min_h < 0.0) result.summary.violation_steps += 1;
    solve_total += rec.report.solve_seconds;
    result.records.push_back(std::move(rec));
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  result.summary.steps = static_cast<long>(result.records.size());
  result.summary.safety = cfg.safety;
  result.summary.mean_rate_hz =
      wall > 0 ? result.summary.steps / wall : 0.0;
  result.summary.mean_solve_seconds =
      result.summary.steps > 0 ? solve_total / result.summary.steps : 0.0;
  return result;
}

// ---------------------------------------------------------------------------
// Artifact emission (CSV logs + JSON summary)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void append_vec8(std::ostream& os, const Vec8& v) {
  for (int i = 0; i < kNumJoints; ++i) os << ',' << fmt(v(i));
}

}  // namespace detail

// Writes trajectory.csv, safety.csv, angles.csv, timing.csv and
// summary.json. trajectory/safety/angles are deterministic for a fixed
// config; timing.csv holds the wall-clock measurements.
inline void write_run_artifacts(const RunResult& result, const RunConfig& cfg,
                                const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  using detail::fmt;

  {
    std::ofstream os(out_dir + "/trajectory.csv");
    os << "t";
    for (int i = 0; i < kNumJoints; ++i) os << ",q_nom_" << joint_name(i);
    if (cfg.safety)
      for (int i = 0; i < kNumJoints; ++i) os << ",q_cbf_" << joint_name(i);
    for (int i = 0; i < kNumJoints; ++i) os << ",cmd_" << joint_name(i);
    os << '\n';
    for (const auto& r : result.records) {
      os << fmt(r.t);
      detail::append_vec8(os, r.q_nom);
      if (cfg.safety) detail::append_vec8(os, r.q_cbf);
      detail::append_vec8(os, r.cmd);
      os << '\n';
    }
  }
  {
    std::ofstream os(out_dir + "/safety.csv");
    os << "t";
    for (const auto& name : result.pair_names) os << ",h_" << name;
    os << ",min_h,n_active,qp_status";
    for (int i = 0; i < kNumJoints; ++i) os << ",u_" << joint_name(i);
    os << '\n';
    for (const auto& r : result.records) {
      os << fmt(r.t);
      for (const auto& pr : r.report.pairs) os << ',' << fmt(pr.h);
      os << ',' << fmt(r.report.min_h) << ',' << r.report.active_count << ','
         << qp_status_name(r.report.qp_status);
      detail::append_vec8(os, r.report.u_star);
      os << '\n';
    }
  }
  {
    std::ofstream os(out_dir + "/angles.csv");
    os << "t";
    for (int i = 0; i < kNumJoints; ++i) os << ',' << joint_name(i);
    os << '\n';
    for (size_t i = 0; i < result.records.size(); ++i) {
      os << fmt(result.records[i].t);
      detail::append_vec8(os, result.theta[i].v);
      os << '\n';
    }
  }
  {
    std::ofstream os(out_dir + "/timing.csv");
    os << "t,solve_seconds\n";
    for (const auto& r : result.records)
      os << fmt(r.t) << ',' << fmt(r.report.solve_seconds) << '\n';
  }
  {
    nlohmann::json j;
    j["min_h"] = result.summary.min_h;
    j["violation_steps"] = result.summary.violation_steps;
    j["steps"] = result.summary.steps;
    j["mean_rate_hz"] = result.summary.mean_rate_hz;
    j["mean_solve_seconds"] = result.summary.mean_solve_seconds;
    j["safety"] = result.summary.safety;
    j["scenario"] = cfg.scenario;
    std::ofstream os(out_dir + "/summary.json");
    os << j.dump(2) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Plot-shaped CSV emission from run artifacts
// ---------------------------------------------------------------------------

namespace detail {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing run artifact: " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

}  // namespace detail

// Writes joints.csv (nominal vs safe joint trajectories) and margins.csv
// (per-pair h plus the rowwise global minimum) shaped for plotting.
inline void emit_plot_data(const std::string& run_dir,
                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  const auto traj = detail::read_csv(run_dir + "/trajectory.csv");
  const auto safety = detail::read_csv(run_dir + "/safety.csv");
  fs::create_directories(out_dir);

  {
    std::ofstream os(out_dir + "/joints.csv");
    for (size_t c = 0; c < traj.header.size(); ++c) {
      const auto& h = traj.header[c];
      if (h == "t" || h.rfind("q_nom_", 0) == 0 || h.rfind("q_cbf_", 0) == 0) {
        if (c) os << ',';
        os << h;
      }
    }
    os << '\n';
    for (const auto& row : traj.rows) {
      bool firstcell = true;
      for (size_t c = 0; c < traj.header.size(); ++c) {
        const auto& h = traj.header[c];
        if (h == "t" || h.rfind("q_nom_", 0) == 0 ||
            h.rfind("q_cbf_", 0) == 0) {
          if (!firstcell) os << ',';
          os << row[c];
          firstcell = false;
        }
      }
      os << '\n';
    }
  }
  {
    std::ofstream os(out_dir + "/margins.csv");
    std::vector<size_t> hcols;
    for (size_t c = 0; c < safety.header.size(); ++c)
      if (safety.header[c].rfind("h_", 0) == 0) hcols.push_back(c);
    os << "t";
    for (size_t c : hcols) os << ',' << safety.header[c];
    os << ",global_min\n";
    for (const auto& row : safety.rows) {
      os << row[0];
      double global_min = std::numeric_limits<double>::infinity();
      for (size_t c : hcols) {
        os << ',' << row[c];
        global_min = std::min(global_min, std::stod(row[c]));
      }
      os << ',' << detail::fmt(global_min) << '\n';
    }
  }
}

}  // namespace mimic
