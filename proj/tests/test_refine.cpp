#include "armkin/refine.hpp"

#include <Eigen/Geometry>
#include <catch2/catch_amalgamated.hpp>

#include "armkin/ik.hpp"
#include "armkin/metrics.hpp"
#include "oracle.hpp"

using namespace armkin;

namespace {
const RobotModel model = RobotModel::standard();
}

TEST_CASE("pose_residual: zero at the solution, pure shifts pass through") {
  const JointVector q{deg2rad(20), deg2rad(40), 0.4, deg2rad(60),
                      deg2rad(100)};
  const Pose target = forward_kinematics(model, q);
  CHECK(pose_residual(model, q, target).norm() < 1e-12);

  Pose shifted = target;
  shifted.translation += Vec3(0.01, 0.0, 0.0);
  const Vec6 r = pose_residual(model, q, shifted);
  CHECK(std::abs(r[0] - 0.01) < 1e-12);
  CHECK(std::abs(r[1]) < 1e-12);
  CHECK(std::abs(r[2]) < 1e-12);
  CHECK(r.tail<3>().norm() < 1e-12);
}

TEST_CASE("pose_residual: orientation norm equals the geodesic distance") {
  oracle::Rand rnd(21);
  for (int i = 0; i < 300; ++i) {
    const JointVector q = rnd.joints(model);
    Pose target;
    target.rotation = rnd.rotation();  // arbitrary, including near half-turns
    target.translation = Vec3(0.1, 0.2, -0.3);
    const Pose fk = forward_kinematics(model, q);
    const double expected =
        rotation_geodesic(fk.rotation, target.rotation);
    CHECK(std::abs(pose_residual(model, q, target).tail<3>().norm() -
                   expected) < 1e-9);
  }
}

TEST_CASE("rotation_log round-trips the geodesic angle near pi") {
  oracle::Rand rnd(22);
  for (int i = 0; i < 50; ++i) {
    Vec3 axis(rnd.normal(), rnd.normal(), rnd.normal());
    axis.normalize();
    const double angle = kPi - 1e-9;
    const Mat3 m =
        Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    CHECK(std::abs(rotation_log(m).norm() - angle) < 1e-6);
  }
}

TEST_CASE("numeric_jacobian: prismatic column at the reference pose") {
  const JointVector q{0.0, deg2rad(90), 0.4, 0.0, deg2rad(90)};
  const auto jac = numeric_jacobian(model, q);
  // d3 column: position moves along base x, orientation unaffected
  CHECK((jac.col(2).head<3>() - Vec3(1, 0, 0)).norm() < 1e-9);
  CHECK(jac.col(2).tail<3>().norm() < 1e-9);
}

TEST_CASE("numeric_jacobian: central differences are second order") {
  const JointVector q{deg2rad(25), deg2rad(55), 0.37, deg2rad(-40),
                      deg2rad(110)};
  const auto j1 = numeric_jacobian(model, q, 1e-5);
  const auto j2 = numeric_jacobian(model, q, 5e-6);
  CHECK((j1 - j2).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("numeric_jacobian: coplanar wrist-roll column geometry") {
  // theta4 = 0 puts all links in the vertical plane through theta1. The
  // theta4 axis is the extension direction w (in-plane), so the orientation
  // rows of its column align with w and the position rows align with the
  // plane normal.
  const double t1 = deg2rad(30);
  const JointVector q{t1, deg2rad(60), 0.4, 0.0, deg2rad(45)};
  const auto jac = numeric_jacobian(model, q);
  const Vec3 w(std::cos(t1) * std::sin(q.theta2),
               std::sin(t1) * std::sin(q.theta2), -std::cos(q.theta2));
  const Vec3 normal(-std::sin(t1), std::cos(t1), 0.0);

  const Vec3 ori = jac.col(3).tail<3>();
  CHECK(ori.cross(w).norm() < 1e-6);
  CHECK(std::abs(ori.dot(normal)) < 1e-6);

  const Vec3 pos = jac.col(3).head<3>();
  CHECK(pos.norm() > 0.01);  // l3 * |w x R1|
  CHECK(pos.cross(normal).norm() < 1e-6);

  // at theta5 = 90 degrees R1 aligns with w and the position column vanishes
  const JointVector q90{t1, deg2rad(60), 0.4, 0.0, deg2rad(90)};
  CHECK(numeric_jacobian(model, q90).col(3).head<3>().norm() < 1e-6);
}

TEST_CASE("numeric_jacobian matches a forward-difference estimate") {
  oracle::Rand rnd(23);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const JointVector q = rnd.joints(model, 0.05);
    const auto central = numeric_jacobian(model, q, h);
    // forward differences, independent path
    const Pose base = forward_kinematics(model, q);
    Eigen::Matrix<double, 6, 5> fwd;
    for (int k = 0; k < 5; ++k) {
      JointVector qp = q;
      qp[k] += h;
      const Pose pp = forward_kinematics(model, qp);
      fwd.col(k).head<3>() = (pp.translation - base.translation) / h;
      fwd.col(k).tail<3>() =
          rotation_log(pp.rotation * base.rotation.transpose()) / h;
    }
    const double scale = central.cwiseAbs().maxCoeff();
    CHECK((central - fwd).cwiseAbs().maxCoeff() / scale < 1e-4);
  }
}

TEST_CASE("refine: exact start returns immediately") {
  const JointVector q{deg2rad(30), deg2rad(60), 0.4, deg2rad(45),
                      deg2rad(90)};
  const Pose target = forward_kinematics(model, q);
  RefineParams params;
  params.residual_tol_pos = 1e-10;
  params.residual_tol_rot = 1e-10;
  const RefineResult r = refine(model, target, q, params);
  CHECK(r.iterations == 0);
  CHECK(r.converged);
  CHECK(r.position_residual < 1e-10);
}

TEST_CASE("refine: converges from a perturbed analytical solution") {
  oracle::Rand rnd(24);
  for (int i = 0; i < 50; ++i) {
    const JointVector q = rnd.joints(model, 0.05);
    const Pose target = forward_kinematics(model, q);
    JointVector q0 = q;
    q0.theta1 += rnd.uniform(-1e-2, 1e-2);
    q0.theta2 += rnd.uniform(-1e-2, 1e-2);
    q0.theta4 += rnd.uniform(-1e-2, 1e-2);
    q0.theta5 += rnd.uniform(-1e-2, 1e-2);
    RefineParams params;
    params.max_iters = 50;
    params.residual_tol_pos = 1e-10;
    params.residual_tol_rot = 1e-10;
    const RefineResult r = refine(model, target, q0, params);
    CHECK(r.position_residual < 1e-8);
    CHECK(r.rotation_residual < 1e-8);
    CHECK(r.iterations <= 50);
    for (size_t k = 1; k < r.residual_history.size(); ++k)
      CHECK(r.residual_history[k] <= r.residual_history[k - 1] + 1e-15);
  }
}

TEST_CASE("refine: unreachable target keeps the residual non-increasing") {
  Pose target;
  target.rotation = Mat3::Identity();
  target.translation = Vec3(1.5, 0.0, -0.5);  // far outside the workspace
  JointVector q0{0.0, deg2rad(45), 0.39, 0.0, deg2rad(90)};
  const RefineResult r = refine(model, target, q0);
  CHECK(!r.converged);
  REQUIRE(r.residual_history.size() >= 2);
  for (size_t k = 1; k < r.residual_history.size(); ++k)
    CHECK(r.residual_history[k] <= r.residual_history[k - 1] + 1e-15);
  CHECK(model.in_range(r.joints, 1e-9));
}

TEST_CASE("refine: output joints always inside the model ranges") {
  oracle::Rand rnd(25);
  for (int i = 0; i < 25; ++i) {
    Pose target;
    target.rotation = rnd.rotation();
    target.translation =
        Vec3(rnd.uniform(-0.7, 0.7), rnd.uniform(-0.7, 0.7),
             rnd.uniform(-0.8, 0.2));
    JointVector q0{rnd.uniform(-3, 3), rnd.uniform(-1, 2),
                   rnd.uniform(0.2, 0.6), rnd.uniform(-4, 4),
                   rnd.uniform(-1, 4)};
    const RefineResult r = refine(model, target, q0);
    CHECK(model.in_range(r.joints, 1e-9));
  }
}
