#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nvcorr/constants.hpp"
#include "nvcorr/rotations.hpp"
#include "nvcorr/types.hpp"

using namespace nvcorr;

TEST_CASE("default constants match the published values") {
  PhysicalConstants c;
  CHECK(c.gamma_e < 0.0);
  CHECK(c.gamma_n > 0.0);
  CHECK(std::abs(c.gamma_e) / kTwoPi == doctest::Approx(28.8e9).epsilon(1e-12));
  CHECK(c.gamma_n / kTwoPi == doctest::Approx(42.58e6).epsilon(1e-12));
  CHECK(c.zero_field_splitting / kTwoPi == doctest::Approx(2.87e9).epsilon(1e-12));
  CHECK(c.gamma_e_abs() == -c.gamma_e);
}

TEST_CASE("larmor frequency") {
  PhysicalConstants c;
  NvSample s;

  SUBCASE("31.2 mT gives about 1.33 MHz") {
    s.b_ext = 31.2e-3;
    const double f = larmor_frequency(s, c) / kTwoPi;
    CHECK(f == doctest::Approx(42.58e6 * 31.2e-3).epsilon(1e-14));
    CHECK(std::abs(f - 1.33e6) < 0.005e6);  // quoted rounded value
  }
  SUBCASE("1 T gives 42.58 MHz") {
    s.b_ext = 1.0;
    CHECK(larmor_frequency(s, c) / kTwoPi == doctest::Approx(42.58e6).epsilon(1e-14));
  }
  SUBCASE("zero or negative field is a domain error") {
    s.b_ext = 0.0;
    CHECK_THROWS_AS(larmor_frequency(s, c), std::domain_error);
    s.b_ext = -1e-3;
    CHECK_THROWS_AS(larmor_frequency(s, c), std::domain_error);
  }
  SUBCASE("defaults") {
    CHECK(NvSample{}.spin_density == doctest::Approx(6e28));
    CHECK(larmor_frequency(NvSample{}, c) > 0.0);
  }
}

TEST_CASE("resonant tau") {
  SUBCASE("pi over omega") {
    const double omega = kTwoPi * 1.329e6;
    CHECK(resonant_tau(omega) == doctest::Approx(1.0 / (2.0 * 1.329e6)).epsilon(1e-14));
    CHECK(resonant_tau(omega) == doctest::Approx(376.2e-9).epsilon(1e-3));
  }
  SUBCASE("omega = pi gives one second") {
    CHECK(resonant_tau(kPi) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("non-positive omega is a domain error") {
    CHECK_THROWS_AS(resonant_tau(0.0), std::domain_error);
    CHECK_THROWS_AS(resonant_tau(-1.0), std::domain_error);
  }
}

TEST_CASE("ensemble angles enforce their ranges") {
  CHECK_NOTHROW(EnsembleAngles(0.0, 0.0));
  CHECK_NOTHROW(EnsembleAngles(kPi, 6.28));
  CHECK_THROWS_AS(EnsembleAngles(-0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(EnsembleAngles(kPi + 0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(EnsembleAngles(1.0, -0.1), std::domain_error);
  CHECK_THROWS_AS(EnsembleAngles(1.0, kTwoPi), std::domain_error);
}

TEST_CASE("sequence timing") {
  SequenceTiming t(2e-7, 3e-5, 6e-5);
  CHECK(t.t1() == doctest::Approx(4e-7));
  CHECK(t.t2() == doctest::Approx(4e-7 + 3e-5));
  CHECK_THROWS_AS(SequenceTiming(-1e-9, 0.0, 0.0), std::domain_error);

  const double omega = kTwoPi * 1.33e6;
  SequenceTiming res(kPi / omega, 0.0, 0.0);
  CHECK(res.timing_resonant(omega));
  SequenceTiming off(kPi / omega * (1.0 + 1e-6), 0.0, 0.0);
  CHECK_FALSE(off.timing_resonant(omega));
}

TEST_CASE("rf drive helpers") {
  RfDrive d{3.0, 4.0, 10.0, 0.5, 1.0};
  CHECK(d.rabi() == doctest::Approx(5.0));
  CHECK(d.resonant_with(10.0));
  CHECK_FALSE(d.resonant_with(10.1));
  RfDrive r = RfDrive::resonant(2.0, 0.25, 1.5, 7.0);
  CHECK(r.omega_rf == 7.0);
  CHECK(r.omega_y == 0.0);
}

TEST_CASE("magnetization norm is preserved under long rotation chains") {
  Magnetization m = Magnetization::from_angles(EnsembleAngles(1.1, 2.2));
  CHECK(m.norm() == doctest::Approx(1.0).epsilon(1e-15));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 10000; ++i) {
    if (i % 2 == 0) {
      m = rotation_z(u(rng)) * m;
    } else {
      m = rotation_k(u(rng), u(rng)) * m;
    }
  }
  CHECK(std::abs(1.0 - m.norm()) <= 1e-12);
}
