#include "armkin/metrics.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "armkin/sampling.hpp"
#include "oracle.hpp"

using namespace armkin;

TEST_CASE("position_error") {
  const Vec3 p(0.1, 0.2, 0.3);
  CHECK(position_error(p, p).norm() == 0.0);
  const Vec3 e = position_error(p, Vec3(0.1, 0.2, 0.28));
  CHECK(std::abs(e.x()) < 1e-15);
  CHECK(std::abs(e.y()) < 1e-15);
  CHECK(std::abs(e.z() - 0.02) < 1e-15);

  oracle::Rand rnd(7);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a(rnd.uniform(-1, 1), rnd.uniform(-1, 1), rnd.uniform(-1, 1));
    const Vec3 b(rnd.uniform(-1, 1), rnd.uniform(-1, 1), rnd.uniform(-1, 1));
    CHECK((position_error(a, b) - position_error(b, a)).norm() == 0.0);
  }
}

TEST_CASE("rotation_geodesic: identity, quarter turn, half turn") {
  const Mat3 eye = Mat3::Identity();
  CHECK(rotation_geodesic(eye, eye) < 1e-12);

  const Mat3 qz = euler_ypr_to_matrix(kPi / 2.0, 0.0, 0.0);
  CHECK(std::abs(rotation_geodesic(eye, qz) - kPi / 2.0) < 1e-12);

  oracle::Rand rnd(8);
  for (int i = 0; i < 20; ++i) {
    // half turn about a random axis
    Vec3 axis(rnd.normal(), rnd.normal(), rnd.normal());
    axis.normalize();
    const Mat3 half =
        2.0 * axis * axis.transpose() - Mat3::Identity();
    CHECK(std::abs(rotation_geodesic(eye, half) - kPi) < 1e-6);
  }
}

TEST_CASE("rotation_geodesic: symmetry and bi-invariance") {
  oracle::Rand rnd(9);
  for (int i = 0; i < 500; ++i) {
    const Mat3 a = rnd.rotation();
    const Mat3 b = rnd.rotation();
    const Mat3 q = rnd.rotation();
    CHECK(std::abs(rotation_geodesic(a, b) - rotation_geodesic(b, a)) <
          1e-12);
    CHECK(std::abs(rotation_geodesic(q * a, q * b) -
                   rotation_geodesic(a, b)) < 1e-9);
  }
}

TEST_CASE("rotation_geodesic agrees with the quaternion oracle") {
  oracle::Rand rnd(10);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Mat3 a = rnd.rotation();
    const Mat3 b = rnd.rotation();
    worst = std::max(worst, std::abs(rotation_geodesic(a, b) -
                                     oracle::quat_geodesic(a, b)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("rotation_geodesic: oracle agreement near the endpoints") {
  oracle::Rand rnd(12);
  for (double angle : {1e-7, 1e-4, kPi - 1e-4, kPi - 1e-7}) {
    for (int i = 0; i < 20; ++i) {
      const Mat3 a = rnd.rotation();
      Vec3 axis(rnd.normal(), rnd.normal(), rnd.normal());
      axis.normalize();
      const double c = std::cos(angle), s = std::sin(angle);
      // Rodrigues rotation about `axis` by `angle`
      Mat3 k;
      k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(),
          axis.x(), 0;
      const Mat3 rel = Mat3::Identity() + s * k + (1.0 - c) * k * k;
      const Mat3 b = rel * a;
      CHECK(std::abs(rotation_geodesic(a, b) - angle) < 1e-9);
      CHECK(std::abs(rotation_geodesic(a, b) - oracle::quat_geodesic(a, b)) <
            1e-7);
    }
  }
}

TEST_CASE("rotation_geodesic rejects non-rotations") {
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = 1.1;
  CHECK_THROWS_AS(rotation_geodesic(bad, Mat3::Identity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(rotation_geodesic(Mat3::Identity(), bad),
                  std::invalid_argument);
}
