#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nvcorr/errors.hpp"
#include "nvcorr/field_model.hpp"
#include "nvcorr/rotations.hpp"

using namespace nvcorr;

namespace {
constexpr double kOmega = kTwoPi * 1.33e6;

struct Rig {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> u01{0.0, 1.0};
  explicit Rig(std::uint64_t seed) : rng(seed) {}

  EnsembleAngles angles() { return {kPi * u01(rng), kTwoPi * 0.999999 * u01(rng)}; }
  SequenceTiming timing() {
    return {(0.2 + 2.0 * u01(rng)) * kPi / kOmega, 50e-6 * u01(rng), 3e-6 * u01(rng)};
  }
  RfDrive drive(double t_p) {
    return RfDrive::resonant(0.8 * kOmega * u01(rng), kTwoPi * u01(rng), t_p, kOmega);
  }
  double time() { return 8.0 * kPi / kOmega * u01(rng); }
};
}  // namespace

TEST_CASE("stage-1 field") {
  SUBCASE("vanishes for axial magnetization") {
    const StageField f = field_stage1(EnsembleAngles(0.0, 1.0), kOmega, 2.0);
    for (double t : {0.0, 1e-7, 5e-7}) CHECK(f(t) == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("equals b_max at t = 0 for transverse magnetization along x") {
    const StageField f = field_stage1(EnsembleAngles(kPi / 2, 0.0), kOmega, 3.5);
    CHECK(f(0.0) == doctest::Approx(3.5).epsilon(1e-14));
  }
  SUBCASE("pointwise equal to the expanded form") {
    Rig rig(42);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const EnsembleAngles a = rig.angles();
      const double t = rig.time();
      const StageField f = field_stage1(a, kOmega, 1.0);
      worst = std::max(worst, std::abs(f(t) - b1_expanded(t, a, kOmega, 1.0)));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("stage-2 field") {
  SUBCASE("zero-amplitude pulse continues stage 1") {
    Rig rig(7);
    for (int i = 0; i < 50; ++i) {
      const EnsembleAngles a = rig.angles();
      const SequenceTiming t = rig.timing();
      const RfDrive off = RfDrive::resonant(0.0, 0.3, t.t_p, kOmega);
      const StageField f1 = field_stage1(a, kOmega, 1.0);
      const StageField f2 = field_stage2(a, kOmega, off, t, 1.0);
      CHECK(f2(0.0) == doctest::Approx(f1(2.0 * t.tau)).epsilon(1e-12).scale(1.0));
    }
  }
  SUBCASE("matches the expanded trigonometric form") {
    Rig rig(8);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const EnsembleAngles a = rig.angles();
      const SequenceTiming t = rig.timing();
      const RfDrive d = rig.drive(t.t_p);
      const double tt = rig.time();
      const StageField f = field_stage2(a, kOmega, d, t, 1.0);
      worst = std::max(worst, std::abs(f(tt) - b2_expanded(tt, a, kOmega, d, t, 1.0)));
    }
    CHECK(worst <= 1e-9);
  }
  SUBCASE("quarter turn about x moves axial magnetization out of x") {
    // omega = 0 so only the pulse rotation acts; starting on z the field
    // projection on x stays zero.
    const EnsembleAngles a(0.0, 0.0);
    const SequenceTiming t(0.0, 1.0, 0.0);
    RfDrive d = RfDrive::resonant(kPi / 2, 0.0, 1.0, 0.0);
    const StageField f = field_stage2(a, 0.0, d, t, 1.0);
    CHECK(f(1.0) == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("off-resonant drive is refused") {
    const SequenceTiming t(1e-7, 1e-6, 0.0);
    const RfDrive d{1000.0, 0.0, kOmega * 1.01, 0.0, 1e-6};
    CHECK_THROWS_AS(field_stage2(EnsembleAngles(1.0, 1.0), kOmega, d, t, 1.0),
                    unsupported_mode_error);
  }
}

TEST_CASE("stage-3 field") {
  SUBCASE("zero-amplitude pulse is a time-shifted stage-1 field") {
    Rig rig(9);
    for (int i = 0; i < 50; ++i) {
      const EnsembleAngles a = rig.angles();
      const SequenceTiming t = rig.timing();
      const RfDrive off = RfDrive::resonant(0.0, 0.0, t.t_p, kOmega);
      const StageField f3 = field_stage3(a, kOmega, off, t, 1.0);
      const double tt = rig.time();
      const double shifted = std::sin(a.alpha) *
                             std::cos(kOmega * (tt + t.t_p + 2.0 * t.tau) + a.beta);
      CHECK(f3(tt) == doctest::Approx(shifted).epsilon(1e-12).scale(1.0));
    }
  }
  SUBCASE("matches the expanded three-term form") {
    Rig rig(10);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const EnsembleAngles a = rig.angles();
      const SequenceTiming t = rig.timing();
      const RfDrive d = rig.drive(t.t_p);
      const double tt = rig.time();
      const StageField f = field_stage3(a, kOmega, d, t, 1.0);
      worst = std::max(worst, std::abs(f(tt) - b3_expanded(tt, a, kOmega, d, t, 1.0)));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("stage boundaries are continuous and fields stay bounded") {
  Rig rig(11);
  for (int i = 0; i < 200; ++i) {
    const EnsembleAngles a = rig.angles();
    const SequenceTiming t = rig.timing();
    const RfDrive d = rig.drive(t.t_p);
    const double b_max = 0.5 + rig.u01(rig.rng);
    const StageField f1 = field_stage1(a, kOmega, b_max);
    const StageField f2 = field_stage2(a, kOmega, d, t, b_max);
    const StageField f3 = field_stage3(a, kOmega, d, t, b_max);
    CHECK(std::abs(f1(2.0 * t.tau) - f2(0.0)) <= 1e-12 * b_max);
    CHECK(std::abs(f2(t.t_p) - f3(0.0)) <= 1e-12 * b_max);
    for (int k = 0; k < 5; ++k) {
      const double tt = rig.time();
      CHECK(std::abs(f1(tt)) <= b_max * (1.0 + 1e-12));
      CHECK(std::abs(f2(tt)) <= b_max * (1.0 + 1e-12));
      CHECK(std::abs(f3(tt)) <= b_max * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("hemisphere geometry integral") {
  SUBCASE("transverse components vanish within the error estimate") {
    const GeometryIntegral g = hemisphere_integral(5e-9, 48);
    CHECK(std::abs(g.ix) <= g.err_x);
    CHECK(std::abs(g.iy) <= g.err_y);
  }
  SUBCASE("axial component matches its closed form and self-converges") {
    const double analytic = kTwoPi / 3.0 * (4.0 - 5.0 / std::sqrt(2.0));
    const GeometryIntegral g32 = hemisphere_integral(5e-9, 32);
    const GeometryIntegral g64 = hemisphere_integral(5e-9, 64);
    CHECK(g64.converged);
    CHECK(std::abs(g64.i_f - analytic) <= 1e-9);
    CHECK(std::abs(g64.i_f - g32.i_f) <= g32.err_f);
  }
  SUBCASE("depth independence") {
    const GeometryIntegral a = hemisphere_integral(2e-9, 32);
    const GeometryIntegral b = hemisphere_integral(50e-9, 32);
    CHECK(a.i_f == doctest::Approx(b.i_f).epsilon(1e-10));
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(hemisphere_integral(0.0, 32), std::domain_error);
    CHECK_THROWS_AS(hemisphere_integral(5e-9, 1), std::domain_error);
  }
}
