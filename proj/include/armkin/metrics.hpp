#pragma once

#include "armkin/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace armkin {

/// Per-axis absolute position error (m) plus geodesic rotation error (rad).
struct PoseError {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double drot = 0.0;
};

/// Component-wise absolute position difference.
inline Vec3 position_error(const Vec3& p, const Vec3& p_prime) {
  return (p - p_prime).cwiseAbs();
}

/**
 * @brief Geodesic distance on SO(3): the rotation angle of r_prime * r^T,
 *        in [0, pi].
 *
 * This equals the norm of the matrix logarithm under the
 * sqrt(trace(A^T A)/2) norm, computed without forming the log: the relative
 * rotation's trace gives 2 cos(angle) + 1 and its skew part gives
 * 2 sin(angle), so atan2 of the pair recovers the angle. The atan2 form is
 * numerically exact at both endpoints, where acos((tr - 1)/2) alone would
 * lose half the digits. Throws std::invalid_argument if either input is not
 * a rotation within 1e-6.
 */
inline double rotation_geodesic(const Mat3& r, const Mat3& r_prime) {
  if (!is_rotation(r, 1e-6) || !is_rotation(r_prime, 1e-6))
    throw std::invalid_argument("rotation_geodesic: input not in SO(3)");
  const Mat3 m = r_prime * r.transpose();
  const double cos_part = (m.trace() - 1.0) / 2.0;
  const Vec3 skew(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  return std::atan2(0.5 * skew.norm(), cos_part);
}

}  // namespace armkin
