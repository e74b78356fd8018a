#pragma once

#include <array>
#include <cmath>
#include <iostream>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mimic/types.hpp"

namespace mimic {

// The 11-point skeleton schema. Coordinates are meters in the camera frame
// F_Z, +z pointing along the global upward direction.
enum class Keypoint : int {
  Pelvis = 0,
  LShoulder,
  RShoulder,
  LElbow,
  RElbow,
  LWrist,
  RWrist,
  LHip,
  RHip,
  LKnee,
  RKnee
};

inline constexpr int kNumKeypoints = 11;

inline const char* keypoint_name(Keypoint k) {
  static const char* names[kNumKeypoints] = {
      "pelvis",  "l_shoulder", "r_shoulder", "l_elbow", "r_elbow", "l_wrist",
      "r_wrist", "l_hip",      "r_hip",      "l_knee",  "r_knee"};
  return names[static_cast<int>(k)];
}

inline std::optional<Keypoint> keypoint_from_name(std::string_view name) {
  for (int i = 0; i < kNumKeypoints; ++i) {
    if (name == keypoint_name(static_cast<Keypoint>(i)))
      return static_cast<Keypoint>(i);
  }
  return std::nullopt;
}

struct SkeletonFrame {
  double t = 0.0;
  std::array<Vec3, kNumKeypoints> kp{};

  SkeletonFrame() {
    for (auto& p : kp) p.setZero();
  }

  Vec3& operator[](Keypoint k) { return kp[static_cast<int>(k)]; }
  const Vec3& operator[](Keypoint k) const { return kp[static_cast<int>(k)]; }
};

inline void validate_frame(const SkeletonFrame& f) {
  for (int i = 0; i < kNumKeypoints; ++i) {
    if (!f.kp[i].allFinite())
      throw SchemaError(std::string("non-finite keypoint: ") +
                        keypoint_name(static_cast<Keypoint>(i)));
  }
  if (!std::isfinite(f.t)) throw SchemaError("non-finite timestamp");
}

// ---------------------------------------------------------------------------
// Newline-delimited JSON stream format:
//   {"t": <seconds>, "kp": {"pelvis":[x,y,z], ...}}
// ---------------------------------------------------------------------------

inline SkeletonFrame parse_frame_record(const std::string& record, int line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(record);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line, std::string("malformed record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("t") || !j.contains("kp"))
    throw ParseError(line, "record must be an object with \"t\" and \"kp\"");

  SkeletonFrame f;
  if (!j["t"].is_number()) throw ParseError(line, "\"t\" must be a number");
  f.t = j["t"].get<double>();

  const auto& kp = j["kp"];
  if (!kp.is_object()) throw ParseError(line, "\"kp\" must be an object");
  for (int i = 0; i < kNumKeypoints; ++i) {
    const char* name = keypoint_name(static_cast<Keypoint>(i));
    if (!kp.contains(name))
      throw SchemaError(std::string("missing keypoint: ") + name);
    const auto& arr = kp[name];
    if (!arr.is_array() || arr.size() != 3)
      throw ParseError(line, std::string("keypoint \"") + name +
                                 "\" must be a 3-element array");
    f.kp[i] = Vec3(arr[0].get<double>(), arr[1].get<double>(),
                   arr[2].get<double>());
  }
  validate_frame(f);
  return f;
}

inline std::vector<SkeletonFrame> parse_stream(std::istream& in) {
  std::vector<SkeletonFrame> frames;
  std::string record;
  int line = 0;
  while (std::getline(in, record)) {
    ++line;
    if (record.empty()) continue;
    SkeletonFrame f = parse_frame_record(record, line);
    if (!frames.empty() && f.t <= frames.back().t)
      throw SequencingError("non-increasing timestamp at line " +
                            std::to_string(line));
    frames.push_back(std::move(f));
  }
  return frames;
}

inline void serialize_frame(const SkeletonFrame& f, std::ostream& out) {
  nlohmann::json kp = nlohmann::json::object();
  for (int i = 0; i < kNumKeypoints; ++i) {
    const Vec3& p = f.kp[i];
    kp[keypoint_name(static_cast<Keypoint>(i))] = {p.x(), p.y(), p.z()};
  }
  nlohmann::json j;
  j["t"] = f.t;
  j["kp"] = kp;
  out << j.dump() << '\n';
}

inline void serialize_stream(const std::vector<SkeletonFrame>& frames,
                             std::ostream& out) {
  for (const auto& f : frames) serialize_frame(f, out);
}

// ---------------------------------------------------------------------------
// EMA + jump-rejection point filter. Per-keypoint, stateful across frames.
// ---------------------------------------------------------------------------

struct PointFilterConfig {
  double ema_alpha = 0.3;       // in (0, 1]; 1 disables smoothing
  double jump_threshold = 0.5;  // meters
};

struct FilterState {
  bool initialized = false;
  std::array<Vec3, kNumKeypoints> last_accepted{};
};

inline SkeletonFrame filter_frame(FilterState& state, const SkeletonFrame& in,
                                  const PointFilterConfig& cfg) {
  SkeletonFrame out = in;
  if (!state.initialized) {
    state.initialized = true;
    state.last_accepted = in.kp;
    return out;
  }
  for (int i = 0; i < kNumKeypoints; ++i) {
    const Vec3& prev = state.last_accepted[i];
    const Vec3& cur = in.kp[i];
    if ((cur - prev).norm() > cfg.jump_threshold) {
      out.kp[i] = prev;  // jump rejected, state untouched
    } else {
      out.kp[i] = prev + cfg.ema_alpha * (cur - prev);
      state.last_accepted[i] = out.kp[i];
    }
  }
  return out;
}

}  // namespace mimic
