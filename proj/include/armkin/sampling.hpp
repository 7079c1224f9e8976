#pragma once

#include "armkin/geometry.hpp"
#include "armkin/model.hpp"

#include <cmath>
#include <cstdint>

namespace armkin {

/// splitmix64 mixing function.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * @brief splitmix64 generator. Each Monte-Carlo sample owns a stream keyed
 *        by (seed, index), so results never depend on how samples are
 *        partitioned across workers.
 */
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    return mix64(state);
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

/// Stream for one sample index under a run seed.
inline SplitMix64 sample_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64{mix64(seed + 0x9E3779B97F4A7C15ULL) ^
                    mix64(index + 0x7F4A7C15ULL)};
}

/**
 * @brief Workspace bounding volume: a hemispherical shell around the
 *        shoulder point, open side down.
 *
 * The inner radius is the shortest wrist reach d3_min + l2; the outer radius
 * is the longest full reach d3_max + l2 + l3. The hemisphere keeps
 * z <= center_z.
 */
struct ShellSpec {
  Vec3 center{0.0, 0.0, -0.08};
  double r_inner = 0.375;
  double r_outer = 0.63;

  static ShellSpec from_model(const RobotModel& m) {
    return {{0.0, 0.0, m.l1}, m.d3_min + m.l2, m.d3_max + m.l2 + m.l3};
  }

  bool contains(const Vec3& p) const {
    const double r = (p - center).norm();
    return r >= r_inner && r <= r_outer && p.z() <= center.z();
  }
};

/// Rotation from intrinsic yaw-pitch-roll: R = Rz(yaw) * Ry(pitch) * Rx(roll).
inline Mat3 euler_ypr_to_matrix(double yaw, double pitch, double roll) {
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  Mat3 r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp, cp * sr, cp * cr;
  return r;
}

/// Yaw-pitch-roll of a rotation matrix (pitch in [-pi/2, pi/2]); inverse of
/// euler_ypr_to_matrix up to the usual Euler representative.
inline Vec3 matrix_to_euler_ypr(const Mat3& r) {
  const double pitch = std::asin(clamp_unit(-r(2, 0)));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  return {yaw, pitch, roll};
}

/// A sampled target pose plus the Euler angles that built its rotation.
struct SampledPose {
  Pose pose;
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

/**
 * @brief Draws one target pose: position uniform over the shell volume
 *        (rejection from the bounding box), orientation from yaw, roll ~
 *        U[0, 2pi) and pitch ~ U[0, pi).
 *
 * Consumes a variable number of draws from rng (three per rejection round
 * plus three for the angles); with a per-sample stream this stays
 * deterministic for any worker layout.
 */
inline SampledPose sample_pose(SplitMix64& rng, const ShellSpec& shell) {
  SampledPose s;
  Vec3 p;
  do {
    p.x() = rng.uniform(-shell.r_outer, shell.r_outer);
    p.y() = rng.uniform(-shell.r_outer, shell.r_outer);
    p.z() = rng.uniform(shell.center.z() - shell.r_outer, shell.center.z());
  } while (!shell.contains(p));
  s.yaw = rng.uniform(0.0, 2.0 * kPi);
  s.pitch = rng.uniform(0.0, kPi);
  s.roll = rng.uniform(0.0, 2.0 * kPi);
  s.pose.rotation = euler_ypr_to_matrix(s.yaw, s.pitch, s.roll);
  s.pose.translation = p;
  return s;
}

}  // namespace armkin
