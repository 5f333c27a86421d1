#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <random>

#include "nvcorr/errors.hpp"
#include "nvcorr/rotations.hpp"

using namespace nvcorr;

namespace {
double max_abs_diff(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return (a - b).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("rotation_z basics") {
  CHECK(max_abs_diff(rotation_z(0.0).m, Eigen::Matrix3d::Identity()) == 0.0);

  // quarter turn maps x to y
  const Vec3 y = rotation_z(kPi / 2) * Vec3(1, 0, 0);
  CHECK(y.x() == doctest::Approx(0.0).epsilon(0.0).scale(1.0));
  CHECK(y.y() == doctest::Approx(1.0));

  // first row is (cos, -sin, 0)
  const double th = 0.7;
  CHECK(rotation_z(th).m(0, 0) == doctest::Approx(std::cos(th)));
  CHECK(rotation_z(th).m(0, 1) == doctest::Approx(-std::sin(th)));

  CHECK_THROWS_AS(rotation_z(std::nan("")), std::domain_error);
}

TEST_CASE("rotation_z composition property") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(max_abs_diff((rotation_z(a) * rotation_z(b)).m, rotation_z(a + b).m) <= 1e-12);
  }
}

TEST_CASE("rotation_k explicit entries and identities") {
  SUBCASE("phi = 0 is a rotation about x") {
    const double th = 1.234;
    const RotationMatrix3 r = rotation_k(0.0, th);
    CHECK(r.m(2, 2) == doctest::Approx(std::cos(th)));
    CHECK(r.m(1, 2) == doctest::Approx(-std::sin(th)));
    CHECK(r.m(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("full turn is the identity") {
    CHECK(max_abs_diff(rotation_k(0.4, kTwoPi).m, Eigen::Matrix3d::Identity()) <= 1e-12);
  }
  SUBCASE("axis is invariant") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
      const double phi = u(rng), th = u(rng);
      const Vec3 k(std::cos(phi), std::sin(phi), 0.0);
      CHECK((rotation_k(phi, th) * k - k).norm() <= 1e-12);
    }
  }
  SUBCASE("non-finite input is a domain error") {
    CHECK_THROWS_AS(rotation_k(0.0, INFINITY), std::domain_error);
  }
}

TEST_CASE("rotation_k matches an independent axis-angle construction") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double phi = u(rng), th = u(rng);
    const Eigen::Matrix3d ref =
        Eigen::AngleAxisd(th, Vec3(std::cos(phi), std::sin(phi), 0.0)).toRotationMatrix();
    CHECK(max_abs_diff(rotation_k(phi, th).m, ref) <= 1e-12);
  }
}

TEST_CASE("conjugation identity R_k(phi, th) = R_z(phi) R_x(th) R_z(-phi)") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const double phi = u(rng), th = u(rng);
    const Eigen::Matrix3d lhs = rotation_k(phi, th).m;
    const Eigen::Matrix3d rhs =
        (rotation_z(phi) * rotation_k(0.0, th) * rotation_z(-phi)).m;
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("produced matrices are special orthogonal") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const RotationMatrix3 r = rotation_k(u(rng), u(rng)) * rotation_z(u(rng));
    CHECK(r.orthogonality_defect() <= 1e-12);
    CHECK(std::abs(r.det() - 1.0) <= 1e-12);
  }
}

TEST_CASE("effective axis") {
  SUBCASE("aligned drive keeps phi_rf") {
    const DriveAxis a = effective_axis(RfDrive{1.0, 0.0, 0.0, 0.8, 0.0});
    CHECK(a.phi_eff == doctest::Approx(0.8));
    CHECK(a.k.x() == doctest::Approx(std::cos(0.8)));
    CHECK(a.k.z() == 0.0);
  }
  SUBCASE("equal components at phi_rf = pi/4 give the x axis") {
    const DriveAxis a = effective_axis(RfDrive{2.0, 2.0, 0.0, kPi / 4, 0.0});
    CHECK(a.phi_eff == doctest::Approx(0.0).epsilon(0.0).scale(1.0));
    CHECK((a.k - Vec3(1, 0, 0)).norm() <= 1e-12);
  }
  SUBCASE("pure-y drive at phi_rf = pi/2 gives zero effective phase") {
    const DriveAxis a = effective_axis(RfDrive{0.0, 1.0, 0.0, kPi / 2, 0.0});
    CHECK(a.phi_eff == doctest::Approx(0.0).epsilon(0.0).scale(1.0));
  }
  SUBCASE("zero amplitude is a domain error") {
    CHECK_THROWS_AS(effective_axis(RfDrive{0.0, 0.0, 0.0, 0.0, 0.0}),
                    std::domain_error);
  }
}

TEST_CASE("free propagation") {
  const Magnetization z{{0, 0, 1}};
  const Magnetization out = propagate_free(z, 5.0, 12.3);
  CHECK((out.v - Vec3(0, 0, 1)).norm() <= 1e-15);

  const Magnetization x{{1, 0, 0}};
  const Magnetization y = propagate_free(x, kPi / 2, 1.0);
  CHECK((y.v - Vec3(0, 1, 0)).norm() <= 1e-12);
}

TEST_CASE("driven propagation") {
  const double omega = 10.0;

  SUBCASE("zero pulse area reduces to free propagation") {
    const Magnetization m0 = Magnetization::from_angles(EnsembleAngles(0.9, 1.7));
    RfDrive d = RfDrive::resonant(0.0, 0.3, 0.0, omega);
    d.omega_x = 1e-30;  // nonzero so the axis is defined, area still ~0
    const Magnetization a = propagate_driven(m0, omega, d, 2.0);
    const Magnetization b = propagate_free(m0, omega, 2.0);
    CHECK((a.v - b.v).norm() <= 1e-12);
  }
  SUBCASE("quarter turn about x sends z to -y") {
    // rabi * t = pi/2 with omega t = 0
    RfDrive d = RfDrive::resonant(kPi / 2, 0.0, 1.0, 0.0);
    d.omega_rf = 0.0;
    const Magnetization out = propagate_driven(Magnetization{{0, 0, 1}}, 0.0, d, 1.0);
    CHECK((out.v - Vec3(0, -1, 0)).norm() <= 1e-12);
  }
  SUBCASE("off-resonant drive is refused") {
    const RfDrive d{1.0, 0.0, omega * 1.5, 0.0, 1.0};
    CHECK_THROWS_AS(propagate_driven(Magnetization{{0, 0, 1}}, omega, d, 1.0),
                    unsupported_mode_error);
  }
}

TEST_CASE("misalignment equivalence") {
  std::mt19937_64 rng(57);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  const double omega = 8.0;
  for (int i = 0; i < 100; ++i) {
    RfDrive mis{u(rng), u(rng), omega, ang(rng), 1.0};
    RfDrive aligned{mis.rabi(), 0.0, omega,
                    mis.phi_rf - std::atan2(mis.omega_y, mis.omega_x), 1.0};
    const Magnetization m0 = Magnetization::from_angles(
        EnsembleAngles(u(rng), std::abs(ang(rng))));
    const double t = u(rng);
    const Magnetization a = propagate_driven(m0, omega, mis, t);
    const Magnetization b = propagate_driven(m0, omega, aligned, t);
    CHECK((a.v - b.v).norm() <= 1e-13);
  }
}
