#pragma once

#include <cmath>

#include "mimic/skeleton.hpp"
#include "mimic/types.hpp"

namespace mimic {

// Body-centered orthonormal frame. Axis convention (normative for the whole
// toolkit): e_z points from the pelvis toward the shoulder center, e_x is
// the lateral axis (left shoulder toward right shoulder, orthogonalized
// against e_z), e_y = e_z x e_x is the forward axis. e_x x e_y = e_z.
struct TorsoFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 e_x = Vec3::UnitX();
  Vec3 e_y = Vec3::UnitY();
  Vec3 e_z = Vec3::UnitZ();
};

inline constexpr double kDegenerateLength = 1e-6;  // meters

inline TorsoFrame build_torso_frame(const SkeletonFrame& f) {
  const Vec3& pelvis = f[Keypoint::Pelvis];
  const Vec3& ls = f[Keypoint::LShoulder];
  const Vec3& rs = f[Keypoint::RShoulder];
  const Vec3 center = 0.5 * (ls + rs);

  const Vec3 up_raw = center - pelvis;
  if (up_raw.norm() < kDegenerateLength)
    throw DegenerateGeometry("pelvis coincides with shoulder center");
  const Vec3 e_z = up_raw.normalized();

  const Vec3 lateral_raw = rs - ls;  // left toward right
  const Vec3 lateral = lateral_raw - lateral_raw.dot(e_z) * e_z;
  if (lateral.norm() < kDegenerateLength)
    throw DegenerateGeometry("shoulder line parallel to the torso axis");
  const Vec3 e_x = lateral.normalized();

  TorsoFrame t;
  t.origin = pelvis;
  t.e_x = e_x;
  t.e_z = e_z;
  t.e_y = e_z.cross(e_x);
  return t;
}

// Reduced human pose, radians. Order matches the joint vector.
struct PoseAngles {
  Vec8 v = Vec8::Zero();

  double& torso_roll() { return v(0); }
  double& torso_pitch() { return v(1); }
  double& l_sh_pitch() { return v(2); }
  double& l_sh_roll() { return v(3); }
  double& l_el() { return v(4); }
  double& r_sh_pitch() { return v(5); }
  double& r_sh_roll() { return v(6); }
  double& r_el() { return v(7); }
  double torso_roll() const { return v(0); }
  double torso_pitch() const { return v(1); }
  double l_sh_pitch() const { return v(2); }
  double l_sh_roll() const { return v(3); }
  double l_el() const { return v(4); }
  double r_sh_pitch() const { return v(5); }
  double r_sh_roll() const { return v(6); }
  double r_el() const { return v(7); }
};

namespace detail {

inline Vec3 limb_vector(const SkeletonFrame& f, Keypoint from, Keypoint to,
                        const char* name) {
  const Vec3 v = f[to] - f[from];
  if (v.norm() < kDegenerateLength)
    throw DegenerateGeometry(std::string("degenerate limb: ") + name);
  return v;
}

inline double elbow_angle(const Vec3& upper, const Vec3& fore) {
  const double c = upper.dot(fore) / (upper.norm() * fore.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace detail

// Closed-form 8-angle pose estimate. Torso roll/pitch measure the deviation
// of e_z from the global up vector k = [0 0 1]; shoulder angles use the
// upper-arm components in the torso frame; elbow angles are the
// upper-arm/forearm included angle.
inline PoseAngles estimate_pose(const SkeletonFrame& f,
                                const TorsoFrame& torso) {
  const Vec3 k = Vec3::UnitZ();
  const Vec3 kxz = k.cross(torso.e_z);
  const double cos_tilt = k.dot(torso.e_z);

  PoseAngles a;
  a.torso_roll() = std::atan2(-torso.e_y.dot(kxz), cos_tilt);
  a.torso_pitch() = std::atan2(-torso.e_x.dot(kxz), cos_tilt);

  const Vec3 u_l = detail::limb_vector(f, Keypoint::LShoulder,
                                       Keypoint::LElbow, "l_upper_arm");
  const Vec3 u_r = detail::limb_vector(f, Keypoint::RShoulder,
                                       Keypoint::RElbow, "r_upper_arm");
  const Vec3 f_l =
      detail::limb_vector(f, Keypoint::LElbow, Keypoint::LWrist, "l_forearm");
  const Vec3 f_r =
      detail::limb_vector(f, Keypoint::RElbow, Keypoint::RWrist, "r_forearm");

  auto in_torso = [&](const Vec3& v) {
    return Vec3(v.dot(torso.e_x), v.dot(torso.e_y), v.dot(torso.e_z));
  };
  const Vec3 ul = in_torso(u_l);
  const Vec3 ur = in_torso(u_r);

  a.l_sh_pitch() = std::atan2(ul.y(), -ul.z());
  a.r_sh_pitch() = std::atan2(ur.y(), -ur.z());
  a.l_sh_roll() = std::atan2(-ul.x(), -ul.z());
  a.r_sh_roll() = std::atan2(ur.x(), -ur.z());
  a.l_el() = detail::elbow_angle(u_l, f_l);
  a.r_el() = detail::elbow_angle(u_r, f_r);
  return a;
}

}  // namespace mimic
