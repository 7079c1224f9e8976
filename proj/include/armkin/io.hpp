#pragma once

#include "armkin/eval.hpp"
#include "armkin/fk.hpp"
#include "armkin/ik.hpp"
#include "armkin/model.hpp"
#include "armkin/refine.hpp"
#include "armkin/sampling.hpp"

#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace armkin {

/// Malformed batch input; carries the 1-based line number and field name.
struct ParseError : std::runtime_error {
  int line;
  std::string field;
  ParseError(int line_, std::string field_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ", field '" +
                           field_ + "': " + what_),
        line(line_),
        field(std::move(field_)) {}
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_field(const std::string& s, int line, const char* name) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, name, "cannot parse '" + s + "' as a number");
  }
}

inline bool is_blank_or_comment(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses a joint row `theta1,theta2,d3,theta4,theta5` (radians / meters).
inline JointVector parse_joint_row(const std::string& line, int lineno) {
  static const char* names[5] = {"theta1", "theta2", "d3", "theta4", "theta5"};
  const auto f = detail::split_csv(line);
  if (f.size() != 5)
    throw ParseError(lineno, "row", "expected 5 fields, got " +
                                        std::to_string(f.size()));
  JointVector q;
  for (int i = 0; i < 5; ++i)
    q[i] = detail::parse_field(f[static_cast<size_t>(i)], lineno, names[i]);
  return q;
}

/// Parses a pose row `px,py,pz,yaw,pitch,roll` (meters / radians).
inline SampledPose parse_pose_row(const std::string& line, int lineno) {
  static const char* names[6] = {"px", "py", "pz", "yaw", "pitch", "roll"};
  const auto f = detail::split_csv(line);
  if (f.size() != 6)
    throw ParseError(lineno, "row", "expected 6 fields, got " +
                                        std::to_string(f.size()));
  double v[6];
  for (int i = 0; i < 6; ++i)
    v[i] = detail::parse_field(f[static_cast<size_t>(i)], lineno, names[i]);
  SampledPose s;
  s.yaw = v[3];
  s.pitch = v[4];
  s.roll = v[5];
  s.pose.translation = Vec3(v[0], v[1], v[2]);
  s.pose.rotation = euler_ypr_to_matrix(s.yaw, s.pitch, s.roll);
  return s;
}

/**
 * @brief Batch forward kinematics: joint rows in, pose rows out
 *        (`px,py,pz,yaw,pitch,roll`). Blank lines, `#` comments and a
 *        leading header line are skipped. Empty input produces empty output.
 */
inline void batch_fk(std::istream& in, std::ostream& out,
                     const RobotModel& model) {
  std::string line;
  int lineno = 0;
  bool wrote_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    if (lineno == 1 && line.find("theta1") != std::string::npos) continue;
    const JointVector q = parse_joint_row(line, lineno);
    const Pose p = forward_kinematics(model, q);
    const Vec3 ypr = matrix_to_euler_ypr(p.rotation);
    if (!wrote_header) {
      out << "px,py,pz,yaw,pitch,roll\n";
      wrote_header = true;
    }
    out << detail::fmt(p.translation.x()) << ','
        << detail::fmt(p.translation.y()) << ','
        << detail::fmt(p.translation.z()) << ',' << detail::fmt(ypr.x()) << ','
        << detail::fmt(ypr.y()) << ',' << detail::fmt(ypr.z()) << '\n';
  }
}

inline void write_solve_row(std::ostream& out, const char* status,
                            const JointVector& q,
                            const ConstraintResiduals& res, double pos_res,
                            double rot_res) {
  out << status << ',' << detail::fmt(q.theta1) << ',' << detail::fmt(q.theta2)
      << ',' << detail::fmt(q.d3) << ',' << detail::fmt(q.theta4) << ','
      << detail::fmt(q.theta5) << ',' << detail::fmt(res.wrist) << ','
      << detail::fmt(res.base) << ',' << detail::fmt(pos_res) << ','
      << detail::fmt(rot_res) << '\n';
}

inline constexpr const char* kSolveCsvHeader =
    "status,theta1,theta2,d3,theta4,theta5,r_wrist,r_base,pos_residual,"
    "rot_residual\n";

/**
 * @brief Batch inverse kinematics: pose rows in, one result row per input.
 *
 * Failed rows carry the failure reason as status and whatever joint values
 * were solved before the failing step (NaN for the rest), so boundary cases
 * flagged by the range validator still show the full candidate.
 */
inline void batch_solve(std::istream& in, std::ostream& out,
                        const RobotModel& model, const IkOptions& opts = {}) {
  std::string line;
  int lineno = 0;
  bool wrote_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    if (lineno == 1 && line.find("px") != std::string::npos) continue;
    const SampledPose sp = parse_pose_row(line, lineno);
    if (!wrote_header) {
      out << kSolveCsvHeader;
      wrote_header = true;
    }
    const IkResult r = solve(model, sp.pose, opts);
    if (succeeded(r)) {
      const IkSolution& sol = solution(r);
      write_solve_row(out, "ok", sol.joints, sol.residuals,
                      sol.position_residual, sol.rotation_residual);
    } else {
      const IkFailure& f = failure(r);
      const ConstraintResiduals res =
          check_constraints(sp.pose, f.partial);
      write_solve_row(out, to_string(f.reason), f.partial, res,
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN());
    }
  }
}

inline constexpr const char* kRefineCsvHeader =
    "status,theta1,theta2,d3,theta4,theta5,pos_residual,rot_residual,"
    "iterations\n";

/**
 * @brief Batch hybrid solve: analytical IK first, then damped least-squares
 *        refinement. Rows the analytical solver rejects are refined from a
 *        mid-range initial guess instead, which is the intended use near
 *        range boundaries where the closed form degrades.
 */
inline void batch_refine(std::istream& in, std::ostream& out,
                         const RobotModel& model, const IkOptions& ik_opts,
                         const RefineParams& params) {
  std::string line;
  int lineno = 0;
  bool wrote_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    if (lineno == 1 && line.find("px") != std::string::npos) continue;
    const SampledPose sp = parse_pose_row(line, lineno);
    if (!wrote_header) {
      out << kRefineCsvHeader;
      wrote_header = true;
    }
    const IkResult r = solve(model, sp.pose, ik_opts);
    JointVector q0;
    const char* status;
    if (succeeded(r)) {
      q0 = solution(r).joints;
      status = "refined_from_analytic";
    } else {
      // mid-range start; theta1 from the wrist projection when defined
      q0.theta1 = solve_theta1(wrist_transform(sp.pose, model).translation)
                      .value_or(0.0);
      q0.theta2 = kPi / 4.0;
      q0.d3 = 0.5 * (model.d3_min + model.d3_max);
      q0.theta4 = 0.0;
      q0.theta5 = kPi / 2.0;
      status = "refined_from_nominal";
    }
    const RefineResult rr = refine(model, sp.pose, q0, params);
    out << status << ',' << detail::fmt(rr.joints.theta1) << ','
        << detail::fmt(rr.joints.theta2) << ',' << detail::fmt(rr.joints.d3)
        << ',' << detail::fmt(rr.joints.theta4) << ','
        << detail::fmt(rr.joints.theta5) << ','
        << detail::fmt(rr.position_residual) << ','
        << detail::fmt(rr.rotation_residual) << ',' << rr.iterations << '\n';
  }
}

}  // namespace armkin
