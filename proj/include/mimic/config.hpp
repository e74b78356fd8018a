#pragma once

#include <array>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mimic/cbf.hpp"
#include "mimic/retarget.hpp"
#include "mimic/robot.hpp"
#include "mimic/scenario.hpp"
#include "mimic/skeleton.hpp"

namespace mimic {

// Everything a run needs, aggregated. Loadable from a JSON config file; any
// omitted field keeps its default.
struct RunConfig {
  std::string scenario = "cross-arm-reach";  // ignored when input_path set
  std::string input_path;
  double duration = 10.0;  // seconds, scenario generation only
  PointFilterConfig filter;
  RetargetConfig retarget;
  RobotGeometry geometry;
  BarrierConfig barrier;
  std::array<double, kNumBodies> human_radius = {0.12, 0.05, 0.05, 0.05,
                                                 0.05, 0.07, 0.07};
  double transform_yaw = 0.0;  // human -> robot frame
  Vec3 transform_translation = Vec3::Zero();
  bool safety = true;
  std::string out_dir = "out";
  unsigned seed = 0;
  double calibration_seconds = 1.0;
  bool no_calibrate = false;  // use retarget.theta_home as-is

  RigidTransform human_to_robot() const {
    return RigidTransform::yaw_translation(transform_yaw,
                                           transform_translation);
  }

  void validate() const {
    retarget.validate();
    geometry.validate();
    barrier.validate();
    if (input_path.empty() && scenario.empty())
      throw ConfigError("either scenario or input path must be set");
    if (duration <= 0) throw ConfigError("duration must be > 0");
  }
};

// Humanoid-plausible default joint limits (radians); non-normative,
// config-overridable.
inline void apply_default_joint_limits(RunConfig& cfg) {
  Vec8 lo, hi;
  lo << -0.5, -0.5, -2.2, -2.2, 0.0, -2.2, -2.2, 0.0;
  hi << 0.5, 0.8, 2.2, 2.2, 2.5, 2.2, 2.2, 2.5;
  cfg.retarget.q_min = lo;
  cfg.retarget.q_max = hi;
  cfg.barrier.q_min = lo;
  cfg.barrier.q_max = hi;
}

// Built-in per-scenario setups: human placement and barrier gains tuned for
// each experiment.
inline RunConfig scenario_defaults(const std::string& name) {
  RunConfig cfg;
  cfg.scenario = name;
  apply_default_joint_limits(cfg);
  if (name == "cross-arm-reach") {
    cfg.duration = 10.0;
    // demonstrator well in front of the robot, facing it
    cfg.transform_yaw = M_PI;
    cfg.transform_translation = Vec3(2.0, 0.0, -1.0);
    cfg.barrier.gamma = 5.0;
  } else if (name == "side-by-side-arm-raise") {
    cfg.duration = 28.0;
    // demonstrator to the robot's left, both facing +x
    cfg.transform_yaw = -M_PI / 2.0;
    cfg.transform_translation = Vec3(0.0, 0.95, -1.0);
    cfg.barrier.gamma = 60.0;
  } else if (name == "neutral-hold") {
    cfg.duration = 5.0;
    cfg.transform_yaw = M_PI;
    cfg.transform_translation = Vec3(2.0, 0.0, -1.0);
  } else {
    std::string valid;
    for (const auto& s : scenario_names()) valid += " " + s;
    throw ConfigError("unknown scenario \"" + name + "\"; valid:" + valid);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization
// ---------------------------------------------------------------------------

namespace detail {

inline Vec8 vec8_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != kNumJoints)
    throw ConfigError(std::string(what) + " must be an 8-element array");
  Vec8 v;
  for (int i = 0; i < kNumJoints; ++i) v(i) = j[i].get<double>();
  return v;
}

inline nlohmann::json vec8_to_json(const Vec8& v) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < kNumJoints; ++i) j.push_back(v(i));
  return j;
}

inline std::vector<CollisionPair> pairs_from_json(const nlohmann::json& j,
                                                  PairKind kind) {
  std::vector<CollisionPair> pairs;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2)
      throw ConfigError("pair list entries must be [bodyA, bodyB]");
    auto body = [](const std::string& name) {
      for (int i = 0; i < kNumBodies; ++i)
        if (name == body_name(static_cast<BodyPart>(i)))
          return static_cast<BodyPart>(i);
      throw ConfigError("unknown body name: " + name);
    };
    pairs.push_back({body(item[0].get<std::string>()),
                     body(item[1].get<std::string>()), kind});
  }
  return pairs;
}

}  // namespace detail

inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  using detail::vec8_from_json;
  auto get = [&](const char* key) -> const nlohmann::json* {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
  };
  if (auto* v = get("scenario")) cfg.scenario = v->get<std::string>();
  if (auto* v = get("input")) cfg.input_path = v->get<std::string>();
  if (auto* v = get("duration")) cfg.duration = v->get<double>();
  if (auto* v = get("safety")) cfg.safety = v->get<bool>();
  if (auto* v = get("out_dir")) cfg.out_dir = v->get<std::string>();
  if (auto* v = get("seed")) cfg.seed = v->get<unsigned>();
  if (auto* v = get("calibration_seconds"))
    cfg.calibration_seconds = v->get<double>();
  if (auto* v = get("no_calibrate")) cfg.no_calibrate = v->get<bool>();

  if (auto* f = get("filter")) {
    if (f->contains("ema_alpha"))
      cfg.filter.ema_alpha = (*f)["ema_alpha"].get<double>();
    if (f->contains("jump_threshold"))
      cfg.filter.jump_threshold = (*f)["jump_threshold"].get<double>();
  }
  if (auto* r = get("retarget")) {
    if (r->contains("scale"))
      cfg.retarget.scale = vec8_from_json((*r)["scale"], "retarget.scale");
    if (r->contains("offset"))
      cfg.retarget.offset = vec8_from_json((*r)["offset"], "retarget.offset");
    if (r->contains("q_home"))
      cfg.retarget.q_home = vec8_from_json((*r)["q_home"], "retarget.q_home");
    if (r->contains("q_min")) {
      cfg.retarget.q_min = vec8_from_json((*r)["q_min"], "retarget.q_min");
      cfg.barrier.q_min = cfg.retarget.q_min;
    }
    if (r->contains("q_max")) {
      cfg.retarget.q_max = vec8_from_json((*r)["q_max"], "retarget.q_max");
      cfg.barrier.q_max = cfg.retarget.q_max;
    }
    if (r->contains("theta_home"))
      cfg.retarget.theta_home.v =
          vec8_from_json((*r)["theta_home"], "retarget.theta_home");
  }
  if (auto* g = get("geometry")) {
    auto field = [&](const char* key, double& target) {
      if (g->contains(key)) target = (*g)[key].get<double>();
    };
    field("torso_height", cfg.geometry.torso_height);
    field("upper_arm", cfg.geometry.upper_arm);
    field("forearm", cfg.geometry.forearm);
    field("thigh", cfg.geometry.thigh);
    field("shoulder_offset", cfg.geometry.shoulder_offset);
    field("hip_offset", cfg.geometry.hip_offset);
    if (g->contains("radius")) {
      const auto& arr = (*g)["radius"];
      if (!arr.is_array() || arr.size() != kNumBodies)
        throw ConfigError("geometry.radius must be a 7-element array");
      for (int i = 0; i < kNumBodies; ++i)
        cfg.geometry.radius[i] = arr[i].get<double>();
    }
  }
  if (auto* b = get("barrier")) {
    auto field = [&](const char* key, double& target) {
      if (b->contains(key)) target = (*b)[key].get<double>();
    };
    field("phi", cfg.barrier.phi);
    field("gamma", cfg.barrier.gamma);
    field("k_gain", cfg.barrier.k_gain);
    field("dt", cfg.barrier.dt);
    field("activation_distance", cfg.barrier.activation_distance);
    if (b->contains("substeps"))
      cfg.barrier.substeps = (*b)["substeps"].get<int>();
    if (b->contains("u_min"))
      cfg.barrier.u_min = vec8_from_json((*b)["u_min"], "barrier.u_min");
    if (b->contains("u_max"))
      cfg.barrier.u_max = vec8_from_json((*b)["u_max"], "barrier.u_max");
    if (b->contains("qp_weights"))
      cfg.barrier.qp_weights =
          vec8_from_json((*b)["qp_weights"], "barrier.qp_weights");
    if (b->contains("qp_max_iter"))
      cfg.barrier.qp.max_iter = (*b)["qp_max_iter"].get<int>();
    if (b->contains("qp_tol")) cfg.barrier.qp.tol = (*b)["qp_tol"].get<double>();
    if (b->contains("self_pairs"))
      cfg.barrier.self_pairs =
          detail::pairs_from_json((*b)["self_pairs"], PairKind::Self);
    if (b->contains("human_pairs"))
      cfg.barrier.human_pairs =
          detail::pairs_from_json((*b)["human_pairs"], PairKind::Human);
  }
  if (auto* h = get("human_radius")) {
    if (!h->is_array() || h->size() != kNumBodies)
      throw ConfigError("human_radius must be a 7-element array");
    for (int i = 0; i < kNumBodies; ++i)
      cfg.human_radius[i] = (*h)[i].get<double>();
  }
  if (auto* t = get("transform")) {
    if (t->contains("yaw")) cfg.transform_yaw = (*t)["yaw"].get<double>();
    if (t->contains("translation")) {
      const auto& arr = (*t)["translation"];
      if (!arr.is_array() || arr.size() != 3)
        throw ConfigError("transform.translation must be a 3-element array");
      cfg.transform_translation =
          Vec3(arr[0].get<double>(), arr[1].get<double>(),
               arr[2].get<double>());
    }
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  // start from the scenario's tuned defaults when one is named
  RunConfig cfg;
  if (j.contains("scenario"))
    cfg = scenario_defaults(j["scenario"].get<std::string>());
  else
    apply_default_joint_limits(cfg);
  apply_json(cfg, j);
  cfg.validate();
  return cfg;
}

}  // namespace mimic
