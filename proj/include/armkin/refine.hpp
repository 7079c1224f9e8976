#pragma once

#include "armkin/fk.hpp"
#include "armkin/geometry.hpp"
#include "armkin/model.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <vector>

namespace armkin {

/// Damped-least-squares refinement parameters.
struct RefineParams {
  int max_iters = 100;
  double damping = 1e-3;            ///< initial Levenberg-Marquardt lambda
  double step_tolerance = 1e-12;    ///< stop when |dq| falls below this
  double residual_tol_pos = 1e-12;  ///< target position residual (m)
  double residual_tol_rot = 1e-12;  ///< target rotation residual (rad)
  double fd_step = 1e-6;            ///< finite-difference increment
};

/**
 * @brief Axis-angle vector (rotation log) of a rotation matrix; the norm is
 *        the geodesic angle in [0, pi].
 *
 * Three regimes: first-order skew extraction near the identity, the standard
 * angle/(2 sin) scaling in the bulk, and diagonal-based axis recovery near
 * the half-turn where the skew part vanishes.
 */
inline Vec3 rotation_log(const Mat3& m) {
  const Vec3 skew(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double angle =
      std::atan2(0.5 * skew.norm(), (m.trace() - 1.0) / 2.0);
  if (angle < 1e-7) return 0.5 * skew;
  if (angle > kPi - 1e-6) {
    // m + I ~ 2 n n^T: take the strongest column as the axis
    int k = 0;
    Mat3 a = m + Mat3::Identity();
    a.diagonal().maxCoeff(&k);
    Vec3 n = a.col(k).normalized();
    if (skew.dot(n) < 0.0) n = -n;  // align with remaining skew, if any
    return angle * n;
  }
  return (angle / (2.0 * std::sin(angle))) * skew;
}

/**
 * @brief Six-component pose error of a joint vector against a target:
 *        position difference (m) stacked with the axis-angle vector of
 *        R_target * R(q)^T (rad).
 */
inline Vec6 pose_residual(const RobotModel& model, const JointVector& q,
                          const Pose& target) {
  const Pose p = forward_kinematics(model, q);
  Vec6 r;
  r.head<3>() = target.translation - p.translation;
  r.tail<3>() = rotation_log(target.rotation * p.rotation.transpose());
  return r;
}

/**
 * @brief Central-difference pose Jacobian, 6x5.
 *
 * Column k differentiates [P(q'); log(R(q') R(q)^T)] with respect to joint k
 * about q, so position rows carry m per rad (m per m for the d3 column) and
 * orientation rows equal the instantaneous joint rotation axes in the base
 * frame.
 */
inline Eigen::Matrix<double, 6, 5> numeric_jacobian(const RobotModel& model,
                                                    const JointVector& q,
                                                    double fd_step = 1e-6) {
  const Mat3 r0 = forward_kinematics(model, q).rotation;
  Eigen::Matrix<double, 6, 5> jac;
  for (int k = 0; k < 5; ++k) {
    JointVector qp = q, qm = q;
    qp[k] += fd_step;
    qm[k] -= fd_step;
    const Pose pp = forward_kinematics(model, qp);
    const Pose pm = forward_kinematics(model, qm);
    Vec6 sp, sm;
    sp.head<3>() = pp.translation;
    sp.tail<3>() = rotation_log(pp.rotation * r0.transpose());
    sm.head<3>() = pm.translation;
    sm.tail<3>() = rotation_log(pm.rotation * r0.transpose());
    jac.col(k) = (sp - sm) / (2.0 * fd_step);
  }
  return jac;
}

struct RefineResult {
  JointVector joints;
  int iterations = 0;     ///< outer iterations spent (accepted or rejected)
  bool converged = false; ///< residual tolerances met
  double position_residual = 0.0;
  double rotation_residual = 0.0;
  /// Residual norms of the accepted iterates, starting at q0; non-increasing.
  std::vector<double> residual_history;
};

/**
 * @brief Damped least-squares refinement of a joint vector toward a target
 *        pose.
 *
 * Levenberg-Marquardt on the 6-residual: steps solve
 * (J^T J + lambda I) dq = J^T r; lambda divides by 10 on accepted steps and
 * multiplies by 10 on rejected ones, so the residual norm never increases.
 * Joints are clamped into the model ranges after every step (full-circle
 * angles wrap). Best effort: non-convergence shows in the final residuals.
 */
inline RefineResult refine(const RobotModel& model, const Pose& target,
                           const JointVector& q0,
                           const RefineParams& params = {}) {
  RefineResult out;
  JointVector q = model.clamp_to_range(q0);
  Vec6 r = pose_residual(model, q, target);
  double rn = r.norm();
  out.residual_history.push_back(rn);

  auto within_tol = [&](const Vec6& res) {
    return res.head<3>().norm() <= params.residual_tol_pos &&
           res.tail<3>().norm() <= params.residual_tol_rot;
  };

  double lambda = params.damping;
  bool done = within_tol(r);
  for (int it = 0; it < params.max_iters && !done; ++it) {
    out.iterations = it + 1;
    const Eigen::Matrix<double, 6, 5> jac =
        numeric_jacobian(model, q, params.fd_step);
    const Eigen::Matrix<double, 5, 5> jtj = jac.transpose() * jac;
    const Eigen::Matrix<double, 5, 1> jtr = jac.transpose() * r;
    const Eigen::Matrix<double, 5, 1> dq =
        (jtj + lambda * Eigen::Matrix<double, 5, 5>::Identity())
            .ldlt()
            .solve(jtr);

    JointVector q_try = q;
    for (int k = 0; k < 5; ++k) q_try[k] += dq[k];
    q_try = model.clamp_to_range(q_try);
    const Vec6 r_try = pose_residual(model, q_try, target);
    const double rn_try = r_try.norm();

    if (rn_try <= rn) {
      q = q_try;
      r = r_try;
      rn = rn_try;
      out.residual_history.push_back(rn);
      lambda = std::max(lambda / 10.0, 1e-12);
      if (within_tol(r) || dq.norm() < params.step_tolerance) done = true;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;  // stalled against the range boundary
    }
  }

  out.joints = q;
  out.position_residual = r.head<3>().norm();
  out.rotation_residual = r.tail<3>().norm();
  out.converged = within_tol(r);
  return out;
}

}  // namespace armkin
