#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace armkin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  return r <= -kPi ? r + 2.0 * kPi : r;
}

/// Clamps into [-1, 1]; guards acos/asin arguments against rounding spill.
inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

/**
 * @brief Rigid transform: rotation block plus translation of a homogeneous
 *        4x4 matrix (the constant bottom row is implicit).
 */
struct Transform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Transform operator*(const Transform& other) const {
    return {rotation * other.rotation,
            rotation * other.translation + translation};
  }

  [[nodiscard]] Transform inverse() const {
    Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  static Transform identity() { return {}; }
};

/// End-effector pose; the rotation is expected to be in SO(3).
using Pose = Transform;

/// Max-abs entry of R^T R - I.
inline double orthonormality_defect(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
  return orthonormality_defect(r) <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace armkin
