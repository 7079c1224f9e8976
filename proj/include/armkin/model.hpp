#pragma once

#include "armkin/geometry.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace armkin {

enum class JointKind { revolute, prismatic, fixed };

/**
 * @brief One Denavit-Hartenberg table row.
 *
 * For a revolute row theta is the joint variable (the stored theta is an
 * unused placeholder); for a prismatic row d is the joint variable and the
 * stored theta is a fixed angle; fixed rows have no variable at all.
 */
struct DhRow {
  double alpha = 0.0;  ///< link twist (rad)
  double a = 0.0;      ///< link length (m)
  double d = 0.0;      ///< link offset (m); joint variable slot for prismatic rows
  double theta = 0.0;  ///< joint angle (rad); joint variable slot for revolute rows
  JointKind kind = JointKind::fixed;
};

/// Closed numeric interval. Open model ranges are handled by the validity
/// predicate, which shrinks them by a boundary tolerance.
struct JointRange {
  double min = 0.0;
  double max = 0.0;
};

/// Joint-space coordinates of the arm: four revolute angles plus the
/// prismatic extension d3. FK is defined for arbitrary values; range
/// membership is a separate predicate on RobotModel.
struct JointVector {
  double theta1 = 0.0;  ///< horizontal panning (rad)
  double theta2 = 0.0;  ///< vertical pitching (rad)
  double d3 = 0.0;      ///< length extension (m)
  double theta4 = 0.0;  ///< wrist rotation (rad)
  double theta5 = 0.0;  ///< wrist pitching (rad)

  double operator[](int i) const {
    switch (i) {
      case 0: return theta1;
      case 1: return theta2;
      case 2: return d3;
      case 3: return theta4;
      default: break;
    }
    return theta5;
  }
  double& operator[](int i) {
    switch (i) {
      case 0: return theta1;
      case 1: return theta2;
      case 2: return d3;
      case 3: return theta4;
      default: break;
    }
    return theta5;
  }
};

/**
 * @brief Geometry and joint limits of the 5-DoF RRPRR arm.
 *
 * The six D-H rows drive the product forward kinematics; l1..l3 mirror the
 * length entries of those rows (l1 = d of row 1, l2 = d of row 4, l3 = a of
 * row 6) and feed the closed-form equations. Row 3 carries a fixed 180-degree
 * joint angle around its prismatic variable; row 6 is the fixed end-effector
 * offset.
 */
struct RobotModel {
  std::array<DhRow, 6> rows{};
  double l1 = -0.08;  ///< base drop along z (m); negative: frame 1 sits below frame 0
  double l2 = 0.045;  ///< wrist offset (m)
  double l3 = 0.135;  ///< end-effector offset (m)
  double d3_min = 0.33;
  double d3_max = 0.45;
  JointRange theta1_range{-kPi, kPi};        // open; effectively the full circle
  JointRange theta2_range{0.0, kPi / 2.0};   // open
  JointRange theta4_range{-kPi, kPi};        // open; effectively the full circle
  JointRange theta5_range{0.0, kPi};         // open

  /// Default arm geometry.
  static RobotModel standard() {
    RobotModel m;
    m.rebuild_rows();
    return m;
  }

  /// Re-derives the D-H rows from l1..l3; call after editing the lengths.
  void rebuild_rows() {
    rows[0] = {kPi / 2.0, 0.0, l1, 0.0, JointKind::revolute};
    rows[1] = {kPi / 2.0, 0.0, 0.0, 0.0, JointKind::revolute};
    rows[2] = {0.0, 0.0, 0.0, kPi, JointKind::prismatic};
    rows[3] = {kPi / 2.0, 0.0, l2, 0.0, JointKind::revolute};
    rows[4] = {kPi / 2.0, 0.0, 0.0, 0.0, JointKind::revolute};
    rows[5] = {0.0, l3, 0.0, 0.0, JointKind::fixed};
  }

  /// Joint value feeding row i (0-based); fixed rows ignore it.
  static double joint_value_for_row(const JointVector& q, int row) {
    switch (row) {
      case 0: return q.theta1;
      case 1: return q.theta2;
      case 2: return q.d3;
      case 3: return q.theta4;
      case 4: return q.theta5;
      default: return 0.0;
    }
  }

  /**
   * Range membership of an IK candidate. Open angular intervals (theta2,
   * theta5) are enforced as closed intervals shrunk by tol; the closed d3
   * interval is widened by tol plus d3_slack. theta1/theta4 span the full
   * circle up to the single excluded image point of atan2, so they are
   * checked against [-pi - tol, pi + tol].
   */
  bool in_range(const JointVector& q, double tol = 1e-9,
                double d3_slack = 0.0) const {
    return theta1_in_range(q.theta1, tol) && theta2_in_range(q.theta2, tol) &&
           d3_in_range(q.d3, tol, d3_slack) && theta4_in_range(q.theta4, tol) &&
           theta5_in_range(q.theta5, tol);
  }

  bool theta1_in_range(double v, double tol = 1e-9) const {
    return v >= theta1_range.min - tol && v <= theta1_range.max + tol;
  }
  bool theta2_in_range(double v, double tol = 1e-9) const {
    return v >= theta2_range.min + tol && v <= theta2_range.max - tol;
  }
  bool d3_in_range(double v, double tol = 1e-9, double d3_slack = 0.0) const {
    return v >= d3_min - d3_slack - tol && v <= d3_max + d3_slack + tol;
  }
  bool theta4_in_range(double v, double tol = 1e-9) const {
    return v >= theta4_range.min - tol && v <= theta4_range.max + tol;
  }
  bool theta5_in_range(double v, double tol = 1e-9) const {
    return v >= theta5_range.min + tol && v <= theta5_range.max - tol;
  }

  /// Projects arbitrary joint values into range: full-circle angles wrap,
  /// bounded ones clamp to the shrunk interval.
  JointVector clamp_to_range(const JointVector& q, double margin = 1e-9) const {
    JointVector r = q;
    r.theta1 = wrap_pi(q.theta1);
    r.theta2 = std::clamp(q.theta2, theta2_range.min + margin,
                          theta2_range.max - margin);
    r.d3 = std::clamp(q.d3, d3_min, d3_max);
    r.theta4 = wrap_pi(q.theta4);
    r.theta5 = std::clamp(q.theta5, theta5_range.min + margin,
                          theta5_range.max - margin);
    return r;
  }
};

/**
 * @brief Loads a RobotModel from a key/value configuration file.
 *
 * Format: one `key = value` pair per line, `#` starts a comment. Unset keys
 * keep their defaults. Lengths are meters; range bounds are degrees.
 * Recognized keys: l1, l2, l3, d3_min, d3_max,
 * theta{1,2,4,5}_min_deg, theta{1,2,4,5}_max_deg.
 *
 * Throws std::runtime_error naming the offending line on malformed input or
 * unknown keys, and on geometric invariant violations (l2, l3 > 0,
 * 0 < d3_min < d3_max).
 */
inline RobotModel load_robot_model(std::istream& in) {
  RobotModel m = RobotModel::standard();
  std::map<std::string, double*> keys{
      {"l1", &m.l1},
      {"l2", &m.l2},
      {"l3", &m.l3},
      {"d3_min", &m.d3_min},
      {"d3_max", &m.d3_max},
  };
  std::map<std::string, double*> deg_keys{
      {"theta1_min_deg", &m.theta1_range.min},
      {"theta1_max_deg", &m.theta1_range.max},
      {"theta2_min_deg", &m.theta2_range.min},
      {"theta2_max_deg", &m.theta2_range.max},
      {"theta4_min_deg", &m.theta4_range.min},
      {"theta4_max_deg", &m.theta4_range.max},
      {"theta5_min_deg", &m.theta5_range.min},
      {"theta5_max_deg", &m.theta5_range.max},
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key, eq;
    double value = 0.0;
    if (!(ls >> key)) continue;  // blank line
    if (!(ls >> eq >> value) || eq != "=") {
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    if (auto it = keys.find(key); it != keys.end()) {
      *it->second = value;
    } else if (auto dit = deg_keys.find(key); dit != deg_keys.end()) {
      *dit->second = deg2rad(value);
    } else {
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    }
  }
  if (!(m.l2 > 0.0) || !(m.l3 > 0.0))
    throw std::runtime_error("config: l2 and l3 must be positive");
  if (!(0.0 < m.d3_min && m.d3_min < m.d3_max))
    throw std::runtime_error("config: require 0 < d3_min < d3_max");
  m.rebuild_rows();
  return m;
}

inline RobotModel load_robot_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open model config: " + path);
  return load_robot_model(f);
}

}  // namespace armkin
