#pragma once

#include "armkin/geometry.hpp"
#include "armkin/model.hpp"

#include <cmath>
#include <stdexcept>

namespace armkin {

/**
 * @brief Homogeneous transform of one D-H row.
 *
 * Standard (distal) convention: rotate theta about z, translate d along z,
 * translate a along x, rotate alpha about x. joint_value substitutes the
 * row's variable slot (theta for revolute, d for prismatic) and is ignored
 * for fixed rows.
 */
inline Transform dh_transform(const DhRow& row, double joint_value = 0.0) {
  const double theta =
      row.kind == JointKind::revolute ? joint_value : row.theta;
  const double d = row.kind == JointKind::prismatic ? joint_value : row.d;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Transform t;
  t.rotation << ct, -st * ca, st * sa,
                st, ct * ca, -ct * sa,
                0.0, sa, ca;
  t.translation << row.a * ct, row.a * st, d;
  return t;
}

/**
 * @brief Pose of frame i (1..6) in the base frame: the product of the first
 *        i row transforms with the joint values substituted.
 *
 * frame_pose(m, q, 6) is the end-effector pose; frame_pose(m, q, 5) is the
 * wrist point O5. Throws std::out_of_range for i outside 1..6.
 */
inline Transform frame_pose(const RobotModel& model, const JointVector& q,
                            int i) {
  if (i < 1 || i > 6) throw std::out_of_range("frame index must be in 1..6");
  Transform t = Transform::identity();
  for (int r = 0; r < i; ++r) {
    t = t * dh_transform(model.rows[static_cast<size_t>(r)],
                         RobotModel::joint_value_for_row(q, r));
  }
  return t;
}

/// Canonical forward kinematics: the full six-transform chain product.
inline Pose forward_kinematics(const RobotModel& model, const JointVector& q) {
  return frame_pose(model, q, 6);
}

/**
 * @brief Forward kinematics by direct evaluation of the chain's expanded
 *        element equations; agrees with forward_kinematics to machine
 *        precision and serves as an algebraic cross-check of the product.
 *
 * Element naming: column j of the rotation is (Rjx, Rjy, Rjz). Two sign
 * variants of these equations circulate and are wrong: R2x as
 * -c4*s1 - c1*c2*s4 breaks column-2 orthonormality (the squared norm gains
 * 4*s1*c1*c2*c4*s4); Py with +c5*s1*c2*c4 inside the l3 term is inconsistent
 * with the chain product. The forms below are the product-consistent ones.
 */
inline Pose fk_closed_form(const RobotModel& model, const JointVector& q) {
  const double c1 = std::cos(q.theta1), s1 = std::sin(q.theta1);
  const double c2 = std::cos(q.theta2), s2 = std::sin(q.theta2);
  const double c4 = std::cos(q.theta4), s4 = std::sin(q.theta4);
  const double c5 = std::cos(q.theta5), s5 = std::sin(q.theta5);
  const double l1 = model.l1, l2 = model.l2, l3 = model.l3, d3 = q.d3;

  const double r1x = c1 * s2 * s5 - c5 * (s1 * s4 + c1 * c2 * c4);
  const double r1y = c5 * (c1 * s4 - c2 * c4 * s1) + s1 * s2 * s5;
  const double r1z = -c2 * s5 - c4 * c5 * s2;
  const double r2x = s1 * c4 - c1 * c2 * s4;
  const double r2y = -c1 * c4 - c2 * s1 * s4;
  const double r2z = -s2 * s4;
  const double r3x = -c1 * s2 * c5 - s5 * (s1 * s4 + c1 * c2 * c4);
  const double r3y = s5 * (c1 * s4 - c2 * c4 * s1) - s1 * s2 * c5;
  const double r3z = c2 * c5 - s2 * c4 * s5;

  const double px = l2 * c1 * s2 - l3 * (c5 * s1 * s4 + c5 * c1 * c2 * c4) +
                    l3 * c1 * s2 * s5 + d3 * c1 * s2;
  const double py = l2 * s1 * s2 + l3 * (c5 * c1 * s4 - c5 * s1 * c2 * c4) +
                    l3 * s1 * s2 * s5 + d3 * s1 * s2;
  const double pz = l1 - l2 * c2 - l3 * c2 * s5 - l3 * c4 * c5 * s2 - d3 * c2;

  Pose p;
  p.rotation << r1x, r2x, r3x,
                r1y, r2y, r3y,
                r1z, r2z, r3z;
  p.translation << px, py, pz;
  return p;
}

}  // namespace armkin
