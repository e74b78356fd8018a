#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mimic {

using Vec3 = Eigen::Vector3d;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat38 = Eigen::Matrix<double, 3, 8>;

inline constexpr int kNumJoints = 8;

// Joint order shared by PoseAngles and JointVector.
enum class Joint : int {
  WaistRoll = 0,
  WaistPitch,
  LShoulderPitch,
  LShoulderRoll,
  LElbow,
  RShoulderPitch,
  RShoulderRoll,
  RElbow
};

inline const char* joint_name(int i) {
  static const char* names[kNumJoints] = {
      "waist_roll",  "waist_pitch", "l_sh_pitch", "l_sh_roll",
      "l_el",        "r_sh_pitch",  "r_sh_roll",  "r_el"};
  return names[i];
}

// Base class for all recoverable toolkit errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
  int line = 0;
  ParseError(int line_, const std::string& msg)
      : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct SchemaError : Error {
  using Error::Error;
};

struct SequencingError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DegenerateGeometry : Error {
  using Error::Error;
};

}  // namespace mimic
