#pragma once

#include "armkin/fk.hpp"
#include "armkin/geometry.hpp"
#include "armkin/metrics.hpp"
#include "armkin/model.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>

namespace armkin {

enum class IkError {
  theta1_undefined,     ///< wrist projection onto the base XY-plane degenerate
  theta2_out_of_range,  ///< no pitch solution inside (0, 90) degrees
  theta5_out_of_range,  ///< no wrist-pitch solution inside (0, 180) degrees
  no_d3_in_range,       ///< no usable prismatic candidate within limits
  constraint_violated,  ///< a reachability identity residual exceeds tolerance
  triangle_degenerate,  ///< coplanar-branch triangle collapsed
};

inline const char* to_string(IkError e) {
  switch (e) {
    case IkError::theta1_undefined: return "theta1_undefined";
    case IkError::theta2_out_of_range: return "theta2_out_of_range";
    case IkError::theta5_out_of_range: return "theta5_out_of_range";
    case IkError::no_d3_in_range: return "no_d3_in_range";
    case IkError::constraint_violated: return "constraint_violated";
    case IkError::triangle_degenerate: return "triangle_degenerate";
  }
  return "unknown";
}

enum class IkBranch {
  case1,  ///< wrist twisted out of the arm plane (R2z != 0)
  case2,  ///< coplanar links, theta4 = 0 (R2z ~ 0)
};

inline const char* to_string(IkBranch b) {
  return b == IkBranch::case1 ? "case1" : "case2";
}

/// Solver tolerances. Defaults suit exact round-trip work; the Monte-Carlo
/// harness loosens constraint_tol/d3_slack and raises r2z_epsilon.
struct IkOptions {
  double theta1_epsilon = 1e-9;    ///< min horizontal wrist radius (m)
  double r2z_epsilon = 1e-9;       ///< |R2z| below this takes the coplanar branch
  double constraint_tol = 1e-8;    ///< residual acceptance bound
  double d3_slack = 1e-9;          ///< widening of [d3_min, d3_max] (m)
  double d3_denom_epsilon = 1e-6;  ///< min |denominator| for a d3 candidate
  double range_tol = 1e-9;         ///< joint-range boundary tolerance
};

/// One prismatic-length candidate and the denominator that produced it.
struct D3Candidate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double denominator = 0.0;
  bool usable = false;  ///< |denominator| >= d3_denom_epsilon
};

/// Residuals of the two scalar reachability identities (see
/// check_constraints); both vanish on poses reachable by the chain.
struct ConstraintResiduals {
  double wrist = 0.0;  ///< R1z*c5*s4 - R2z*c4 + R3z*s4*s5
  double base = 0.0;   ///< R2x*c1*s2 - R2z*c2 + R2y*s1*s2
};

struct IkFailure {
  IkError reason;
  /// Joint values solved before the failing step; NaN where unsolved.
  JointVector partial{std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN()};
  double detail = 0.0;  ///< offending quantity (cot theta2, candidate angle, ...)
};

struct IkSolution {
  JointVector joints;
  IkBranch branch = IkBranch::case1;
  ConstraintResiduals residuals;
  std::array<D3Candidate, 3> d3_candidates{};
  double position_residual = 0.0;  ///< |P_target - P(joints)| (m)
  double rotation_residual = 0.0;  ///< geodesic angle (rad)
};

using IkResult = std::variant<IkSolution, IkFailure>;

inline bool succeeded(const IkResult& r) {
  return std::holds_alternative<IkSolution>(r);
}
inline const IkSolution& solution(const IkResult& r) {
  return std::get<IkSolution>(r);
}
inline const IkFailure& failure(const IkResult& r) {
  return std::get<IkFailure>(r);
}

/**
 * @brief Transform of the wrist frame O5 given the end-effector target:
 *        T5_0 = T6_0 * inverse(T6_5).
 *
 * The last chain link is a pure x-offset of length l3, so the rotation is
 * unchanged and the wrist point is P' = P - l3 * R.col(0).
 */
inline Transform wrist_transform(const Pose& target, const RobotModel& model) {
  return {target.rotation,
          target.translation - model.l3 * target.rotation.col(0)};
}

/**
 * @brief Base pan angle from the wrist point projected onto the base
 *        XY-plane: theta1 = atan2(P'_y, P'_x), in (-pi, pi].
 *
 * Returns nullopt when the projection radius is below epsilon (wrist on the
 * base axis; no pan angle is defined there).
 */
inline std::optional<double> solve_theta1(const Vec3& wrist_position,
                                          double epsilon = 1e-9) {
  if (std::hypot(wrist_position.x(), wrist_position.y()) < epsilon)
    return std::nullopt;
  return std::atan2(wrist_position.y(), wrist_position.x());
}

/// The three wrist-side angles produced by either branch.
struct WristAngles {
  double theta2 = 0.0;
  double theta4 = 0.0;
  double theta5 = 0.0;
};

using WristResult = std::variant<WristAngles, IkFailure>;

/**
 * @brief Out-of-plane branch: recovers (theta2, theta4, theta5) when
 *        R2z != 0.
 *
 * The 2x2 system
 *   [ s1  c1*R2z ] [cos(theta4)]   [R2x]
 *   [-c1  s1*R2z ] [cot(theta2)] = [R2y]
 * has determinant R2z and inverts to cos(theta4) = s1*R2x - c1*R2y and
 * cot(theta2) = (c1*R2x + s1*R2y)/R2z. theta4 follows from
 * tan(theta4) = (-R2z/s2) / cos(theta4) via atan2, and theta5 from the
 * linear system  [-c2 -c4*s2; -c4*s2 c2][s5; c5] = [R1z; R3z], whose
 * determinant -(c2^2 + c4^2 s2^2) is nonzero for theta2 inside (0, 90) deg.
 */
inline WristResult solve_case1(const Pose& target, double theta1) {
  const Mat3& r = target.rotation;
  const double r1z = r(2, 0);
  const double r2x = r(0, 1), r2y = r(1, 1), r2z = r(2, 1);
  const double r3z = r(2, 2);
  const double c1 = std::cos(theta1), s1 = std::sin(theta1);

  const double cos4 = s1 * r2x - c1 * r2y;
  const double cot2 = (c1 * r2x + s1 * r2y) / r2z;
  if (!(cot2 > 0.0)) {
    IkFailure f{IkError::theta2_out_of_range};
    f.partial.theta1 = theta1;
    f.detail = cot2;
    return f;
  }
  const double theta2 = std::atan2(1.0, cot2);  // in (0, pi/2) for cot2 > 0
  const double s2 = std::sin(theta2), c2 = std::cos(theta2);

  const double theta4 = std::atan2(-r2z / s2, cos4);
  const double c4 = std::cos(theta4);

  const double det = -(c2 * c2 + c4 * c4 * s2 * s2);
  const double s5 = (c2 * r1z + c4 * s2 * r3z) / det;
  const double c5 = (c4 * s2 * r1z - c2 * r3z) / det;
  const double theta5 = std::atan2(s5, c5);
  if (!(theta5 > 0.0 && theta5 < kPi)) {
    IkFailure f{IkError::theta5_out_of_range};
    f.partial.theta1 = theta1;
    f.partial.theta2 = theta2;
    f.partial.theta4 = theta4;
    f.detail = theta5;
    return f;
  }
  return WristAngles{theta2, theta4, theta5};
}

/**
 * @brief Coplanar branch: R2z ~ 0 forces theta4 = 0 (sin(theta2) != 0 inside
 *        the pitch range), putting all links in one plane.
 *
 * theta2 comes from the triangle (O0, O2, O5) by the cosine rule,
 * theta2 = pi - acos((t1^2 + t3^2 - t2^2)/(2 t1 t3)), with the argument
 * clamped into [-1, 1] against rounding. The sum theta2 + theta5 satisfies
 * tan(theta2+theta5) = R3x/R1x = R3y/R1y; the x or y column is picked by the
 * larger of |cos(theta1)|, |sin(theta1)|, and the +/- pi ambiguity of the
 * recovered sum is resolved by keeping the theta5 candidate inside
 * (0, 180) degrees.
 */
inline WristResult solve_case2(const Pose& target, double theta1,
                               const RobotModel& model) {
  const Mat3& r = target.rotation;
  const Vec3 wrist = target.translation - model.l3 * r.col(0);
  const Vec3 shoulder(0.0, 0.0, model.l1);

  const double t1 = std::abs(model.l1);  // |O0O2|
  const double t2 = wrist.norm();        // |O0O5|
  const double t3 = (shoulder - wrist).norm();
  if (2.0 * t1 * t3 < 1e-12) {
    IkFailure f{IkError::triangle_degenerate};
    f.partial.theta1 = theta1;
    f.partial.theta4 = 0.0;
    f.detail = 2.0 * t1 * t3;
    return f;
  }
  const double cos_arg =
      clamp_unit((t1 * t1 + t3 * t3 - t2 * t2) / (2.0 * t1 * t3));
  const double theta2 = kPi - std::acos(cos_arg);

  const double c1 = std::cos(theta1), s1 = std::sin(theta1);
  const double sum = std::abs(c1) >= std::abs(s1)
                         ? std::atan2(-r(0, 2), -r(0, 0))
                         : std::atan2(-r(1, 2), -r(1, 0));
  const double cand_a = wrap_pi(sum - theta2);
  const double cand_b = wrap_pi(cand_a + kPi);
  double theta5;
  if (cand_a > 0.0 && cand_a < kPi) {
    theta5 = cand_a;
  } else if (cand_b > 0.0 && cand_b < kPi) {
    theta5 = cand_b;
  } else {
    IkFailure f{IkError::theta5_out_of_range};
    f.partial.theta1 = theta1;
    f.partial.theta2 = theta2;
    f.partial.theta4 = 0.0;
    f.detail = cand_a;
    return f;
  }
  return WristAngles{theta2, 0.0, theta5};
}

/// Prismatic length plus the per-axis candidates it was selected from.
struct D3Selection {
  double d3 = 0.0;
  std::array<D3Candidate, 3> candidates{};
};

using D3Result = std::variant<D3Selection, IkFailure>;

/**
 * @brief Prismatic length from the three per-axis position equations.
 *
 * With the four angles fixed, P = (0,0,l1) + (l2+d3)*w + l3*R1(q) where
 * w = (c1*s2, s1*s2, -c2), so each axis yields a candidate
 * d3_i = (P - l3*R1(q) - (0,0,l1))_i / w_i - l2 with denominators
 * (c1*s2, s1*s2, -c2). Candidates agree on reachable poses; off the
 * reachable set each one nulls the reconstruction error of its own axis.
 * Returns the in-range candidate with the largest |denominator| (least error
 * amplification); fails with no_d3_in_range when no candidate with
 * |denominator| >= denom_epsilon lies within [d3_min - slack, d3_max + slack].
 */
inline D3Result solve_d3(const RobotModel& model, const Pose& target,
                         const JointVector& angles, double slack = 1e-9,
                         double denom_epsilon = 1e-6) {
  const double c1 = std::cos(angles.theta1), s1 = std::sin(angles.theta1);
  const double c2 = std::cos(angles.theta2), s2 = std::sin(angles.theta2);
  const double c4 = std::cos(angles.theta4), s4 = std::sin(angles.theta4);
  const double c5 = std::cos(angles.theta5), s5 = std::sin(angles.theta5);

  const Vec3 r1(c1 * s2 * s5 - c5 * (s1 * s4 + c1 * c2 * c4),
                c5 * (c1 * s4 - c2 * c4 * s1) + s1 * s2 * s5,
                -c2 * s5 - c4 * c5 * s2);
  const Vec3 rho =
      target.translation - model.l3 * r1 - Vec3(0.0, 0.0, model.l1);
  const Vec3 den(c1 * s2, s1 * s2, -c2);

  D3Selection sel;
  int best = -1;
  for (int i = 0; i < 3; ++i) {
    D3Candidate& c = sel.candidates[static_cast<size_t>(i)];
    c.denominator = den[i];
    c.usable = std::abs(den[i]) >= denom_epsilon;
    if (c.usable) c.value = rho[i] / den[i] - model.l2;
    const bool in_range = c.usable && c.value >= model.d3_min - slack &&
                          c.value <= model.d3_max + slack;
    if (in_range &&
        (best < 0 ||
         std::abs(den[i]) >
             std::abs(sel.candidates[static_cast<size_t>(best)].denominator)))
      best = i;
  }
  if (best < 0) {
    IkFailure f{IkError::no_d3_in_range};
    f.partial = angles;
    f.partial.d3 = std::numeric_limits<double>::quiet_NaN();
    // report the best-conditioned usable candidate, in range or not
    double dmax = 0.0;
    for (const auto& c : sel.candidates)
      if (c.usable && std::abs(c.denominator) > dmax) {
        dmax = std::abs(c.denominator);
        f.detail = c.value;
      }
    return f;
  }
  sel.d3 = sel.candidates[static_cast<size_t>(best)].value;
  return sel;
}

/**
 * @brief Residuals of the two scalar identities every pose reachable by the
 *        chain satisfies, evaluated at a candidate joint vector.
 *
 * They come from the vanishing (row 3, column 2) entries of the partial
 * products T1_0 T2_1 T3_2 and T4_3 T5_4 T6_5 rewritten through the
 * end-effector matrix:
 *   wrist: R1z*c5*s4 - R2z*c4 + R3z*s4*s5 = 0
 *   base:  R2x*c1*s2 - R2z*c2 + R2y*s1*s2 = 0
 */
inline ConstraintResiduals check_constraints(const Pose& target,
                                             const JointVector& q) {
  const Mat3& r = target.rotation;
  const double c1 = std::cos(q.theta1), s1 = std::sin(q.theta1);
  const double c2 = std::cos(q.theta2), s2 = std::sin(q.theta2);
  const double c4 = std::cos(q.theta4), s4 = std::sin(q.theta4);
  const double c5 = std::cos(q.theta5), s5 = std::sin(q.theta5);
  ConstraintResiduals res;
  res.wrist = r(2, 0) * c5 * s4 - r(2, 1) * c4 + r(2, 2) * s4 * s5;
  res.base = r(0, 1) * c1 * s2 - r(2, 1) * c2 + r(1, 1) * s1 * s2;
  return res;
}

/**
 * @brief Full analytical inverse kinematics.
 *
 * Pipeline: wrist transform -> theta1 projection -> branch on |R2z| against
 * r2z_epsilon -> case 1 or case 2 -> d3 candidates -> constraint residuals
 * -> joint-range validation -> reconstruction residual via
 * forward_kinematics. Returns the first failure encountered, otherwise a
 * solution carrying residuals and d3 diagnostics.
 *
 * Throws std::invalid_argument when the target rotation is not in SO(3)
 * within 1e-6.
 */
inline IkResult solve(const RobotModel& model, const Pose& target,
                      const IkOptions& opts = {}) {
  if (!is_rotation(target.rotation, 1e-6))
    throw std::invalid_argument("ik::solve: target rotation not in SO(3)");

  const Transform wrist = wrist_transform(target, model);
  const auto theta1 = solve_theta1(wrist.translation, opts.theta1_epsilon);
  if (!theta1) {
    IkFailure f{IkError::theta1_undefined};
    f.detail = std::hypot(wrist.translation.x(), wrist.translation.y());
    return f;
  }

  const double r2z = target.rotation(2, 1);
  const IkBranch branch =
      std::abs(r2z) < opts.r2z_epsilon ? IkBranch::case2 : IkBranch::case1;
  WristResult wr = branch == IkBranch::case1
                       ? solve_case1(target, *theta1)
                       : solve_case2(target, *theta1, model);
  if (std::holds_alternative<IkFailure>(wr)) return std::get<IkFailure>(wr);
  const WristAngles& wa = std::get<WristAngles>(wr);

  JointVector q;
  q.theta1 = *theta1;
  q.theta2 = wa.theta2;
  q.theta4 = wa.theta4;
  q.theta5 = wa.theta5;

  D3Result dr =
      solve_d3(model, target, q, opts.d3_slack, opts.d3_denom_epsilon);
  if (std::holds_alternative<IkFailure>(dr)) return std::get<IkFailure>(dr);
  const D3Selection& sel = std::get<D3Selection>(dr);
  q.d3 = sel.d3;

  const ConstraintResiduals res = check_constraints(target, q);
  if (std::abs(res.wrist) > opts.constraint_tol ||
      std::abs(res.base) > opts.constraint_tol) {
    IkFailure f{IkError::constraint_violated};
    f.partial = q;
    f.detail = std::max(std::abs(res.wrist), std::abs(res.base));
    return f;
  }

  // range validation; theta1/theta4 span the full circle (see RobotModel)
  if (!model.theta2_in_range(q.theta2, opts.range_tol)) {
    IkFailure f{IkError::theta2_out_of_range};
    f.partial = q;
    f.detail = q.theta2;
    return f;
  }
  if (!model.theta5_in_range(q.theta5, opts.range_tol)) {
    IkFailure f{IkError::theta5_out_of_range};
    f.partial = q;
    f.detail = q.theta5;
    return f;
  }
  if (!model.d3_in_range(q.d3, opts.range_tol, opts.d3_slack)) {
    IkFailure f{IkError::no_d3_in_range};
    f.partial = q;
    f.detail = q.d3;
    return f;
  }

  IkSolution sol;
  sol.joints = q;
  sol.branch = branch;
  sol.residuals = res;
  sol.d3_candidates = sel.candidates;
  const Pose rebuilt = forward_kinematics(model, q);
  sol.position_residual = (rebuilt.translation - target.translation).norm();
  sol.rotation_residual =
      rotation_geodesic(target.rotation, rebuilt.rotation);
  return sol;
}

}  // namespace armkin
