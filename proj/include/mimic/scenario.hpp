#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mimic/skeleton.hpp"
#include "mimic/types.hpp"

namespace mimic {

// Synthetic keypoint generators standing in for the camera. All scenarios
// share one body model and hold a neutral calibration pose for the first
// second. Camera frame: +z up, the subject faces +y, +x runs from the
// subject's left shoulder toward the right shoulder.
namespace scenario {

struct BodyModel {
  Vec3 pelvis{0.0, 0.0, 1.0};
  double shoulder_dx = 0.18;
  double shoulder_dz = 0.45;
  double hip_dx = 0.10;
  double hip_dz = 0.02;
  double knee_drop = 0.40;
  double upper_arm = 0.28;
  double forearm = 0.25;
};

// Builds a frame from unit upper-arm / forearm directions (camera frame).
inline SkeletonFrame frame_from_arms(const BodyModel& m, double t,
                                     const Vec3& u_l, const Vec3& f_l,
                                     const Vec3& u_r, const Vec3& f_r) {
  SkeletonFrame f;
  f.t = t;
  f[Keypoint::Pelvis] = m.pelvis;
  const Vec3 ls = m.pelvis + Vec3(-m.shoulder_dx, 0, m.shoulder_dz);
  const Vec3 rs = m.pelvis + Vec3(m.shoulder_dx, 0, m.shoulder_dz);
  f[Keypoint::LShoulder] = ls;
  f[Keypoint::RShoulder] = rs;
  f[Keypoint::LElbow] = ls + m.upper_arm * u_l.normalized();
  f[Keypoint::RElbow] = rs + m.upper_arm * u_r.normalized();
  f[Keypoint::LWrist] = f[Keypoint::LElbow] + m.forearm * f_l.normalized();
  f[Keypoint::RWrist] = f[Keypoint::RElbow] + m.forearm * f_r.normalized();
  f[Keypoint::LHip] = m.pelvis + Vec3(-m.hip_dx, 0, -m.hip_dz);
  f[Keypoint::RHip] = m.pelvis + Vec3(m.hip_dx, 0, -m.hip_dz);
  f[Keypoint::LKnee] = f[Keypoint::LHip] + Vec3(0, 0, -m.knee_drop);
  f[Keypoint::RKnee] = f[Keypoint::RHip] + Vec3(0, 0, -m.knee_drop);
  return f;
}

inline double ease(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return 0.5 * (1.0 - std::cos(M_PI * s));
}

inline Vec3 blend_dir(const Vec3& from, const Vec3& to, double s) {
  return ((1.0 - s) * from + s * to).normalized();
}

inline constexpr double kCalibrationSeconds = 1.0;

inline SkeletonFrame neutral_frame(const BodyModel& m, double t) {
  const Vec3 down(0, 0, -1);
  return frame_from_arms(m, t, down, down, down, down);
}

// Both wrists sweep across the torso midline with a small height split, so
// the retargeted arms intersect near mid-forearm.
inline SkeletonFrame cross_arm_frame(const BodyModel& m, double t,
                                     double duration) {
  const Vec3 down(0, 0, -1);
  if (t <= kCalibrationSeconds || duration <= kCalibrationSeconds)
    return neutral_frame(m, t);
  const double p =
      (t - kCalibrationSeconds) / (duration - kCalibrationSeconds);

  const Vec3 raise_l = Vec3(0, std::sin(1.2), -std::cos(1.2)).normalized();
  const Vec3 raise_r = raise_l;
  // crossing targets: left arm toward +x, right toward -x, split in z
  const Vec3 cross_l = Vec3(std::sin(1.1), std::cos(1.1), 0.10).normalized();
  const Vec3 cross_r = Vec3(-std::sin(1.1), std::cos(1.1), -0.02).normalized();

  Vec3 u_l, u_r;
  if (p < 0.4) {
    const double s = ease(p / 0.4);
    u_l = blend_dir(down, raise_l, s);
    u_r = blend_dir(down, raise_r, s);
  } else if (p < 0.85) {
    const double s = ease((p - 0.4) / 0.45);
    u_l = blend_dir(raise_l, cross_l, s);
    u_r = blend_dir(raise_r, cross_r, s);
  } else {
    u_l = cross_l;
    u_r = cross_r;
  }
  return frame_from_arms(m, t, u_l, u_l, u_r, u_r);
}

// The right arm abducts laterally (toward a robot placed at the subject's
// right): a fast raise to a safe elevation, then a slow constant-rate push
// so the approach speed at the safety boundary stays small.
inline SkeletonFrame side_by_side_frame(const BodyModel& m, double t,
                                        double duration) {
  const Vec3 down(0, 0, -1);
  if (t <= kCalibrationSeconds || duration <= kCalibrationSeconds)
    return neutral_frame(m, t);

  const double alpha_fast = 0.70;   // rad, end of fast phase
  const double alpha_final = 1.66;  // rad, past horizontal
  const double fast_end = kCalibrationSeconds + 3.0;
  const double hold_start = duration - 1.0;

  double alpha;
  if (t < fast_end) {
    alpha = alpha_fast * ease((t - kCalibrationSeconds) /
                              (fast_end - kCalibrationSeconds));
  } else if (t < hold_start && hold_start > fast_end) {
    const double s = (t - fast_end) / (hold_start - fast_end);
    alpha = alpha_fast + s * (alpha_final - alpha_fast);
  } else {
    alpha = hold_start > fast_end ? alpha_final : alpha_fast;
  }
  const Vec3 u_r(std::sin(alpha), 0, -std::cos(alpha));
  return frame_from_arms(m, t, down, down, u_r, u_r);
}

}  // namespace scenario

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "cross-arm-reach", "side-by-side-arm-raise", "neutral-hold"};
  return names;
}

inline std::vector<SkeletonFrame> generate_scenario(const std::string& name,
                                                    double duration,
                                                    double rate) {
  if (duration <= 0 || rate <= 0)
    throw ConfigError("scenario: duration and rate must be > 0");
  scenario::BodyModel body;
  const long n = std::lround(duration * rate);
  std::vector<SkeletonFrame> frames;
  frames.reserve(n);
  for (long i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    if (name == "neutral-hold") {
      frames.push_back(scenario::neutral_frame(body, t));
    } else if (name == "cross-arm-reach") {
      frames.push_back(scenario::cross_arm_frame(body, t, duration));
    } else if (name == "side-by-side-arm-raise") {
      frames.push_back(scenario::side_by_side_frame(body, t, duration));
    } else {
      std::string valid;
      for (const auto& s : scenario_names()) valid += " " + s;
      throw ConfigError("unknown scenario \"" + name + "\"; valid:" + valid);
    }
  }
  return frames;
}

}  // namespace mimic
