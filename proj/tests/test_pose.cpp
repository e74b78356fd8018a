#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mimic/pose.hpp"

using namespace mimic;

namespace {

// Random but kinematically plausible skeleton: torso moderately tilted,
// limbs at generic angles, nothing degenerate.
SkeletonFrame random_skeleton(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> tilt(-0.5, 0.5);

  SkeletonFrame f;
  f.t = 0.0;
  const Vec3 pelvis(u(rng), u(rng), 1.0 + 0.2 * u(rng));
  // torso direction: mostly up with bounded tilt
  Vec3 up(tilt(rng), tilt(rng), 1.0);
  up.normalize();
  // lateral direction: roughly horizontal, generic azimuth
  const double az = M_PI * u(rng);
  Vec3 lateral(std::cos(az), std::sin(az), 0.3 * tilt(rng));
  lateral -= lateral.dot(up) * up;
  lateral.normalize();

  const double torso_len = 0.4 + 0.1 * std::abs(u(rng));
  const double half_sh = 0.15 + 0.05 * std::abs(u(rng));
  const Vec3 center = pelvis + torso_len * up;
  f[Keypoint::Pelvis] = pelvis;
  f[Keypoint::LShoulder] = center - half_sh * lateral;
  f[Keypoint::RShoulder] = center + half_sh * lateral;

  auto random_dir = [&]() {
    Vec3 d(u(rng), u(rng), u(rng));
    while (d.norm() < 0.3) d = Vec3(u(rng), u(rng), u(rng));
    return d.normalized();
  };
  const double ua = 0.25 + 0.05 * std::abs(u(rng));
  const double fa = 0.22 + 0.05 * std::abs(u(rng));
  f[Keypoint::LElbow] = f[Keypoint::LShoulder] + ua * random_dir();
  f[Keypoint::RElbow] = f[Keypoint::RShoulder] + ua * random_dir();
  f[Keypoint::LWrist] = f[Keypoint::LElbow] + fa * random_dir();
  f[Keypoint::RWrist] = f[Keypoint::RElbow] + fa * random_dir();
  f[Keypoint::LHip] = pelvis - 0.1 * lateral;
  f[Keypoint::RHip] = pelvis + 0.1 * lateral;
  f[Keypoint::LKnee] = f[Keypoint::LHip] + 0.4 * random_dir();
  f[Keypoint::RKnee] = f[Keypoint::RHip] + 0.4 * random_dir();
  return f;
}

// Independent re-derivation of the eight angles from raw keypoints,
// structured differently from the implementation (explicit rotation into
// the torso basis, acos/asin based pitch-roll recovery avoided: everything
// is rebuilt from scratch with its own frame assembly).
Vec8 oracle_angles(const SkeletonFrame& f) {
  const Vec3 pelvis = f[Keypoint::Pelvis];
  const Vec3 ls = f[Keypoint::LShoulder];
  const Vec3 rs = f[Keypoint::RShoulder];
  const Vec3 ez = ((ls + rs) / 2.0 - pelvis).normalized();
  Vec3 ex = rs - ls;
  ex = (ex - ex.dot(ez) * ez).normalized();
  const Vec3 ey = ez.cross(ex);

  Mat3 basis;
  basis.col(0) = ex;
  basis.col(1) = ey;
  basis.col(2) = ez;
  const Mat3 to_torso = basis.transpose();

  const Vec3 k(0, 0, 1);
  const Vec3 w = k.cross(ez);
  Vec8 a;
  a(0) = std::atan2(-ey.dot(w), k.dot(ez));
  a(1) = std::atan2(-ex.dot(w), k.dot(ez));

  const Vec3 ul = to_torso * (f[Keypoint::LElbow] - ls);
  const Vec3 ur = to_torso * (f[Keypoint::RElbow] - rs);
  a(2) = std::atan2(ul(1), -ul(2));
  a(3) = std::atan2(-ul(0), -ul(2));
  a(5) = std::atan2(ur(1), -ur(2));
  a(6) = std::atan2(ur(0), -ur(2));

  auto elbow = [&](Keypoint s, Keypoint e, Keypoint w2) {
    const Vec3 uu = f[e] - f[s];
    const Vec3 ff = f[w2] - f[e];
    double c = uu.dot(ff) / (uu.norm() * ff.norm());
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
  };
  a(4) = elbow(Keypoint::LShoulder, Keypoint::LElbow, Keypoint::LWrist);
  a(7) = elbow(Keypoint::RShoulder, Keypoint::RElbow, Keypoint::RWrist);
  return a;
}

SkeletonFrame transformed(const SkeletonFrame& f, const Mat3& R,
                          const Vec3& t) {
  SkeletonFrame out = f;
  for (auto& p : out.kp) p = R * p + t;
  return out;
}

}  // namespace

TEST_CASE("upright symmetric pose gives the canonical torso frame") {
  SkeletonFrame f;
  f[Keypoint::Pelvis] = Vec3(0, 0, 0);
  f[Keypoint::LShoulder] = Vec3(-0.2, 0, 0.5);
  f[Keypoint::RShoulder] = Vec3(0.2, 0, 0.5);
  const auto t = build_torso_frame(f);
  CHECK((t.e_z - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK((t.e_x - Vec3(1, 0, 0)).norm() < 1e-12);
  // right-handed, orthonormal
  CHECK((t.e_x.cross(t.e_y) - t.e_z).norm() < 1e-9);
  CHECK(std::abs(t.e_x.dot(t.e_y)) < 1e-9);
  CHECK(std::abs(t.e_x.dot(t.e_z)) < 1e-9);
}

TEST_CASE("rotating the pose about global z rotates the lateral axis") {
  SkeletonFrame f;
  f[Keypoint::Pelvis] = Vec3(0, 0, 0);
  f[Keypoint::LShoulder] = Vec3(-0.2, 0, 0.5);
  f[Keypoint::RShoulder] = Vec3(0.2, 0, 0.5);
  Mat3 R;
  R << 0, -1, 0, 1, 0, 0, 0, 0, 1;  // 90 deg about z
  const auto t = build_torso_frame(transformed(f, R, Vec3::Zero()));
  CHECK((t.e_z - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK((t.e_x - Vec3(0, 1, 0)).norm() < 1e-12);
}

TEST_CASE("coincident pelvis and shoulder center is rejected") {
  SkeletonFrame f;
  f[Keypoint::Pelvis] = Vec3(0.1, 0.2, 0.3);
  f[Keypoint::LShoulder] = Vec3(0.1 - 0.2, 0.2, 0.3);
  f[Keypoint::RShoulder] = Vec3(0.1 + 0.2, 0.2, 0.3);
  f[Keypoint::LShoulder].x() = 0.1;  // make center coincide exactly
  f[Keypoint::RShoulder].x() = 0.1;
  CHECK_THROWS_AS(build_torso_frame(f), DegenerateGeometry);
}

TEST_CASE("upright torso yields zero torso roll and pitch") {
  SkeletonFrame f;
  f[Keypoint::Pelvis] = Vec3(0, 0, 0);
  f[Keypoint::LShoulder] = Vec3(-0.2, 0, 0.5);
  f[Keypoint::RShoulder] = Vec3(0.2, 0, 0.5);
  const Vec3 down(0, 0, -1);
  f[Keypoint::LElbow] = f[Keypoint::LShoulder] + 0.28 * down;
  f[Keypoint::RElbow] = f[Keypoint::RShoulder] + 0.28 * down;
  f[Keypoint::LWrist] = f[Keypoint::LElbow] + 0.25 * down;
  f[Keypoint::RWrist] = f[Keypoint::RElbow] + 0.25 * down;
  const auto a = estimate_pose(f, build_torso_frame(f));
  for (int i = 0; i < kNumJoints; ++i)
    CHECK(a.v(i) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("random poses match the independent oracle") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    const auto f = random_skeleton(rng);
    const auto a = estimate_pose(f, build_torso_frame(f));
    const Vec8 want = oracle_angles(f);
    for (int i = 0; i < kNumJoints; ++i)
      CHECK(a.v(i) == Catch::Approx(want(i)).margin(1e-9));
  }
}

TEST_CASE("scaling about the pelvis leaves angles unchanged") {
  std::mt19937 rng(131);
  std::uniform_real_distribution<double> su(0.2, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_skeleton(rng);
    const double s = su(rng);
    SkeletonFrame g = f;
    const Vec3 pelvis = f[Keypoint::Pelvis];
    for (auto& p : g.kp) p = pelvis + s * (p - pelvis);
    const auto a = estimate_pose(f, build_torso_frame(f));
    const auto b = estimate_pose(g, build_torso_frame(g));
    for (int i = 0; i < kNumJoints; ++i)
      CHECK(b.v(i) == Catch::Approx(a.v(i)).margin(1e-9));
  }
}

TEST_CASE("global yaw leaves every angle unchanged") {
  std::mt19937 rng(151);
  std::uniform_real_distribution<double> au(-M_PI, M_PI);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_skeleton(rng);
    const double yaw = au(rng);
    Mat3 R;
    R << std::cos(yaw), -std::sin(yaw), 0, std::sin(yaw), std::cos(yaw), 0, 0,
        0, 1;
    const auto g = transformed(f, R, Vec3(au(rng), au(rng), au(rng)));
    const auto a = estimate_pose(f, build_torso_frame(f));
    const auto b = estimate_pose(g, build_torso_frame(g));
    for (int i = 0; i < kNumJoints; ++i)
      CHECK(b.v(i) == Catch::Approx(a.v(i)).margin(1e-9));
  }
}

TEST_CASE("sagittal mirror swaps left and right angle values") {
  std::mt19937 rng(171);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_skeleton(rng);
    const auto torso = build_torso_frame(f);

    // reflect across the plane through the pelvis with normal e_x, then
    // swap the left/right keypoint roles
    auto mirror = [&](const Vec3& p) -> Vec3 {
      const Vec3 rel = p - torso.origin;
      return torso.origin + rel - 2.0 * rel.dot(torso.e_x) * torso.e_x;
    };
    SkeletonFrame g = f;
    auto swap_pair = [&](Keypoint l, Keypoint r) {
      g[l] = mirror(f[r]);
      g[r] = mirror(f[l]);
    };
    g[Keypoint::Pelvis] = mirror(f[Keypoint::Pelvis]);
    swap_pair(Keypoint::LShoulder, Keypoint::RShoulder);
    swap_pair(Keypoint::LElbow, Keypoint::RElbow);
    swap_pair(Keypoint::LWrist, Keypoint::RWrist);
    swap_pair(Keypoint::LHip, Keypoint::RHip);
    swap_pair(Keypoint::LKnee, Keypoint::RKnee);

    const auto a = estimate_pose(f, build_torso_frame(f));
    const auto b = estimate_pose(g, build_torso_frame(g));
    CHECK(b.l_sh_pitch() == Catch::Approx(a.r_sh_pitch()).margin(1e-9));
    CHECK(b.r_sh_pitch() == Catch::Approx(a.l_sh_pitch()).margin(1e-9));
    CHECK(b.l_sh_roll() == Catch::Approx(a.r_sh_roll()).margin(1e-9));
    CHECK(b.r_sh_roll() == Catch::Approx(a.l_sh_roll()).margin(1e-9));
    CHECK(b.l_el() == Catch::Approx(a.r_el()).margin(1e-9));
    CHECK(b.r_el() == Catch::Approx(a.l_el()).margin(1e-9));
  }
}

TEST_CASE("elbow angle is invariant under rigid transforms") {
  std::mt19937 rng(191);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_skeleton(rng);
    Eigen::Quaterniond q(u(rng), u(rng), u(rng), u(rng));
    q.normalize();
    const auto g =
        transformed(f, q.toRotationMatrix(), Vec3(u(rng), u(rng), u(rng)));
    const auto a = estimate_pose(f, build_torso_frame(f));
    const auto b = estimate_pose(g, build_torso_frame(g));
    CHECK(b.l_el() == Catch::Approx(a.l_el()).margin(1e-9));
    CHECK(b.r_el() == Catch::Approx(a.r_el()).margin(1e-9));
  }
}

TEST_CASE("zero-length limbs are reported by name") {
  SkeletonFrame f;
  f[Keypoint::Pelvis] = Vec3(0, 0, 0);
  f[Keypoint::LShoulder] = Vec3(-0.2, 0, 0.5);
  f[Keypoint::RShoulder] = Vec3(0.2, 0, 0.5);
  f[Keypoint::LElbow] = f[Keypoint::LShoulder];  // degenerate upper arm
  f[Keypoint::RElbow] = f[Keypoint::RShoulder] + Vec3(0, 0, -0.3);
  f[Keypoint::LWrist] = Vec3(0, 0, 0);
  f[Keypoint::RWrist] = f[Keypoint::RElbow] + Vec3(0, 0, -0.3);
  const auto torso = build_torso_frame(f);
  CHECK_THROWS_MATCHES(
      estimate_pose(f, torso), DegenerateGeometry,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("l_upper_arm")));
}
