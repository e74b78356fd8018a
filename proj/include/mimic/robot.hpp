#pragma once

#include <array>
#include <cmath>

#include "mimic/geometry.hpp"
#include "mimic/pose.hpp"
#include "mimic/skeleton.hpp"
#include "mimic/types.hpp"

namespace mimic {

// The seven-body collision set shared by robot and human.
enum class BodyPart : int {
  Torso = 0,
  LUpperArm,
  RUpperArm,
  LForearm,
  RForearm,
  LThigh,
  RThigh
};

inline constexpr int kNumBodies = 7;

inline const char* body_name(BodyPart b) {
  static const char* names[kNumBodies] = {
      "torso",     "l_upper_arm", "r_upper_arm", "l_forearm",
      "r_forearm", "l_thigh",     "r_thigh"};
  return names[static_cast<int>(b)];
}

enum class BodyTag { Robot, Human };

struct CapsuleSet {
  std::array<Capsule, kNumBodies> capsules{};
  BodyTag tag = BodyTag::Robot;

  Capsule& operator[](BodyPart b) { return capsules[static_cast<int>(b)]; }
  const Capsule& operator[](BodyPart b) const {
    return capsules[static_cast<int>(b)];
  }
};

// Parametric upper-body humanoid. Base frame: x forward, y left, z up,
// origin at the pelvis. The defaults are a plausible adult-humanoid scale
// and are config-overridable.
struct RobotGeometry {
  double torso_height = 0.45;
  double upper_arm = 0.28;
  double forearm = 0.25;
  double thigh = 0.40;
  // Offsets and radii are chosen so that the rest pose (q = 0, arms hanging)
  // keeps a positive clearance on every default collision pair.
  double shoulder_offset = 0.22;  // lateral, from torso axis
  double hip_offset = 0.06;
  std::array<double, kNumBodies> radius = {0.10, 0.05, 0.05, 0.05,
                                           0.05, 0.06, 0.06};

  void validate() const {
    if (torso_height <= 0 || upper_arm <= 0 || forearm <= 0 || thigh <= 0 ||
        shoulder_offset <= 0 || hip_offset <= 0)
      throw ConfigError("robot geometry: lengths must be > 0");
    for (double r : radius)
      if (r <= 0) throw ConfigError("robot geometry: radii must be > 0");
  }
};

namespace detail {

inline Mat3 rot_x(double a) {
  Mat3 m;
  const double c = std::cos(a), s = std::sin(a);
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

inline Mat3 rot_y(double a) {
  Mat3 m;
  const double c = std::cos(a), s = std::sin(a);
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

// Per-joint axes and origins for the current configuration, plus the frames
// needed to place capsule endpoints.
struct KinematicFrames {
  Mat3 torso;             // after waist roll then waist pitch
  Vec3 shoulder[2];       // left, right
  Vec3 elbow[2];
  Vec3 wrist[2];
  Vec3 joint_origin[kNumJoints];
  Vec3 joint_axis[kNumJoints];
};

inline KinematicFrames kinematic_frames(const Vec8& q,
                                        const RobotGeometry& geo) {
  KinematicFrames kf;
  const Mat3 r_roll = rot_x(q(0));
  kf.torso = r_roll * rot_y(q(1));

  kf.joint_origin[0] = Vec3::Zero();
  kf.joint_axis[0] = Vec3::UnitX();
  kf.joint_origin[1] = Vec3::Zero();
  kf.joint_axis[1] = r_roll * Vec3::UnitY();

  for (int side = 0; side < 2; ++side) {  // 0 = left, 1 = right
    const double lat = side == 0 ? geo.shoulder_offset : -geo.shoulder_offset;
    const int jp = side == 0 ? 2 : 5;  // shoulder pitch joint index
    kf.shoulder[side] = kf.torso * Vec3(0, lat, geo.torso_height);
    // pitch about -y so that positive swings the arm forward
    const Mat3 r_pitch = kf.torso * rot_y(-q(jp));
    // roll about +x (left) / -x (right) so that positive abducts
    const Mat3 r_arm =
        r_pitch * rot_x(side == 0 ? q(jp + 1) : -q(jp + 1));
    kf.elbow[side] = kf.shoulder[side] + r_arm * Vec3(0, 0, -geo.upper_arm);
    // elbow about -y: positive flexes the forearm forward
    const Mat3 r_fore = r_arm * rot_y(-q(jp + 2));
    kf.wrist[side] = kf.elbow[side] + r_fore * Vec3(0, 0, -geo.forearm);

    kf.joint_origin[jp] = kf.shoulder[side];
    kf.joint_axis[jp] = kf.torso * Vec3(0, -1, 0);
    kf.joint_origin[jp + 1] = kf.shoulder[side];
    kf.joint_axis[jp + 1] = r_pitch * Vec3(side == 0 ? 1 : -1, 0, 0);
    kf.joint_origin[jp + 2] = kf.elbow[side];
    kf.joint_axis[jp + 2] = r_arm * Vec3(0, -1, 0);
  }
  return kf;
}

}  // namespace detail

inline CapsuleSet robot_fk(const Vec8& q, const RobotGeometry& geo) {
  const auto kf = detail::kinematic_frames(q, geo);
  CapsuleSet set;
  set.tag = BodyTag::Robot;
  auto cap = [&](BodyPart part, const Vec3& a, const Vec3& b) {
    set[part] = Capsule{a, b, geo.radius[static_cast<int>(part)]};
  };
  cap(BodyPart::Torso, Vec3::Zero(), kf.torso * Vec3(0, 0, geo.torso_height));
  cap(BodyPart::LUpperArm, kf.shoulder[0], kf.elbow[0]);
  cap(BodyPart::RUpperArm, kf.shoulder[1], kf.elbow[1]);
  cap(BodyPart::LForearm, kf.elbow[0], kf.wrist[0]);
  cap(BodyPart::RForearm, kf.elbow[1], kf.wrist[1]);
  const Vec3 l_hip(0, geo.hip_offset, 0);
  const Vec3 r_hip(0, -geo.hip_offset, 0);
  const Vec3 down(0, 0, -geo.thigh);
  cap(BodyPart::LThigh, l_hip, l_hip + down);
  cap(BodyPart::RThigh, r_hip, r_hip + down);
  return set;
}

// 3x8 position Jacobians of both endpoints of every capsule.
struct BodyJacobians {
  Mat38 a = Mat38::Zero();
  Mat38 b = Mat38::Zero();
};

using RobotJacobians = std::array<BodyJacobians, kNumBodies>;

inline RobotJacobians robot_endpoint_jacobians(const Vec8& q,
                                               const RobotGeometry& geo) {
  const auto kf = detail::kinematic_frames(q, geo);
  auto column = [&](int joint, const Vec3& p) -> Vec3 {
    return kf.joint_axis[joint].cross(p - kf.joint_origin[joint]);
  };
  auto fill = [&](Mat38& j, const Vec3& p, std::initializer_list<int> chain) {
    for (int joint : chain) j.col(joint) = column(joint, p);
  };

  RobotJacobians jac;
  auto& torso = jac[static_cast<int>(BodyPart::Torso)];
  fill(torso.b, kf.torso * Vec3(0, 0, geo.torso_height), {0, 1});

  for (int side = 0; side < 2; ++side) {
    const int jp = side == 0 ? 2 : 5;
    auto& upper = jac[static_cast<int>(side == 0 ? BodyPart::LUpperArm
                                                 : BodyPart::RUpperArm)];
    auto& fore = jac[static_cast<int>(side == 0 ? BodyPart::LForearm
                                                : BodyPart::RForearm)];
    fill(upper.a, kf.shoulder[side], {0, 1});
    fill(upper.b, kf.elbow[side], {0, 1, jp, jp + 1});
    fore.a = upper.b;
    fill(fore.b, kf.wrist[side], {0, 1, jp, jp + 1, jp + 2});
  }
  // thighs: fixed capsules, zero Jacobians
  return jac;
}

// ---------------------------------------------------------------------------
// Human capsules from skeleton keypoints.
// ---------------------------------------------------------------------------

struct RigidTransform {
  Mat3 rot = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rot * p + translation; }

  static RigidTransform yaw_translation(double yaw, const Vec3& t) {
    RigidTransform tf;
    const double c = std::cos(yaw), s = std::sin(yaw);
    tf.rot << c, -s, 0, s, c, 0, 0, 0, 1;
    tf.translation = t;
    return tf;
  }
};

inline CapsuleSet human_capsules(const SkeletonFrame& f,
                                 const std::array<double, kNumBodies>& radii,
                                 const RigidTransform& T) {
  auto seg = [&](BodyPart part, const Vec3& a, const Vec3& b) {
    if ((b - a).norm() < kDegenerateLength)
      throw DegenerateGeometry(std::string("degenerate human capsule: ") +
                               body_name(part));
    return Capsule{T.apply(a), T.apply(b), radii[static_cast<int>(part)]};
  };
  const Vec3 shoulder_center =
      0.5 * (f[Keypoint::LShoulder] + f[Keypoint::RShoulder]);
  CapsuleSet set;
  set.tag = BodyTag::Human;
  set[BodyPart::Torso] = seg(BodyPart::Torso, f[Keypoint::Pelvis],
                             shoulder_center);
  set[BodyPart::LUpperArm] = seg(BodyPart::LUpperArm, f[Keypoint::LShoulder],
                                 f[Keypoint::LElbow]);
  set[BodyPart::RUpperArm] = seg(BodyPart::RUpperArm, f[Keypoint::RShoulder],
                                 f[Keypoint::RElbow]);
  set[BodyPart::LForearm] =
      seg(BodyPart::LForearm, f[Keypoint::LElbow], f[Keypoint::LWrist]);
  set[BodyPart::RForearm] =
      seg(BodyPart::RForearm, f[Keypoint::RElbow], f[Keypoint::RWrist]);
  set[BodyPart::LThigh] =
      seg(BodyPart::LThigh, f[Keypoint::LHip], f[Keypoint::LKnee]);
  set[BodyPart::RThigh] =
      seg(BodyPart::RThigh, f[Keypoint::RHip], f[Keypoint::RKnee]);
  return set;
}

}  // namespace mimic
