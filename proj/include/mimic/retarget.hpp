#pragma once

#include <vector>

#include "mimic/pose.hpp"
#include "mimic/types.hpp"

namespace mimic {

struct RetargetConfig {
  Vec8 scale = Vec8::Ones();    // S, dimensionless (zero freezes a joint)
  Vec8 offset = Vec8::Zero();   // b, radians
  Vec8 q_home = Vec8::Zero();
  Vec8 q_min = Vec8::Constant(-3.0);
  Vec8 q_max = Vec8::Constant(3.0);
  PoseAngles theta_home;

  void validate() const {
    if (!scale.allFinite() || !offset.allFinite())
      throw ConfigError("retarget: scale/offset must be finite");
    for (int i = 0; i < kNumJoints; ++i) {
      if (q_min(i) > q_home(i) || q_home(i) > q_max(i))
        throw ConfigError(std::string("retarget: q_home outside limits for ") +
                          joint_name(i));
    }
  }
};

// Componentwise mean of pose frames, intended for a neutral-hold segment.
inline PoseAngles calibrate_home(const std::vector<PoseAngles>& frames) {
  if (frames.empty()) throw ConfigError("calibration: no frames");
  PoseAngles mean;
  for (const auto& f : frames) mean.v += f.v;
  mean.v /= static_cast<double>(frames.size());
  return mean;
}

// Affine retargeting with joint-limit projection:
//   q_nom = clip(q_home + S o (theta - theta_home) + b, q_min, q_max)
inline Vec8 retarget(const PoseAngles& theta, const RetargetConfig& cfg) {
  const Vec8 raw = cfg.q_home +
                   cfg.scale.cwiseProduct(theta.v - cfg.theta_home.v) +
                   cfg.offset;
  return raw.cwiseMax(cfg.q_min).cwiseMin(cfg.q_max);
}

}  // namespace mimic
