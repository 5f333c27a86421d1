#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nvcorr/errors.hpp"
#include "nvcorr/experiment.hpp"

using namespace nvcorr;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("nvcorr_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}
}  // namespace

TEST_CASE("quantity parsing") {
  CHECK(parse_quantity("31.2 mT", Dimension::magnetic_field) == doctest::Approx(0.0312));
  CHECK(parse_quantity("5 nm", Dimension::length) == doctest::Approx(5e-9));
  CHECK(parse_quantity("188.1 ns", Dimension::time) == doctest::Approx(188.1e-9));
  CHECK(parse_quantity("1.33 MHz", Dimension::frequency) == doctest::Approx(1.33e6));
  CHECK(parse_quantity("42.58 MHz/T", Dimension::gyromagnetic) == doctest::Approx(42.58e6));
  CHECK(parse_quantity("6e28 m^-3", Dimension::number_density) == doctest::Approx(6e28));
  CHECK(parse_quantity("pi/2", Dimension::angle) == doctest::Approx(kPi / 2));
  CHECK(parse_quantity("3pi/2", Dimension::angle) == doctest::Approx(3 * kPi / 2));
  CHECK(parse_quantity("2pi", Dimension::angle) == doctest::Approx(kTwoPi));
  CHECK(parse_quantity("-pi", Dimension::angle) == doctest::Approx(-kPi));
  CHECK(parse_quantity("90 deg", Dimension::angle) == doctest::Approx(kPi / 2));
  CHECK(parse_quantity("0.5", Dimension::angle) == doctest::Approx(0.5));
  CHECK(parse_quantity("2.5", Dimension::dimensionless) == doctest::Approx(2.5));

  CHECK_THROWS_AS(parse_quantity("31.2 banana", Dimension::magnetic_field), config_error);
  CHECK_THROWS_AS(parse_quantity("31.2 ns", Dimension::magnetic_field), config_error);
  CHECK_THROWS_AS(parse_quantity("31.2", Dimension::magnetic_field), config_error);
  CHECK_THROWS_AS(parse_quantity("", Dimension::time), config_error);
  CHECK_THROWS_AS(parse_quantity("pi/x", Dimension::angle), config_error);
}

TEST_CASE("sweep parsing") {
  const SweepSpec s = parse_sweep("60 us : 63 us : 51", Dimension::time);
  CHECK(s.count == 51);
  CHECK(s.at(0) == doctest::Approx(60e-6));
  CHECK(s.at(50) == doctest::Approx(63e-6));
  CHECK(s.at(25) == doctest::Approx(61.5e-6));
  CHECK_THROWS_AS(parse_sweep("60 us : 63 us", Dimension::time), config_error);
  CHECK_THROWS_AS(parse_sweep("63 us : 60 us : 5", Dimension::time), config_error);
  CHECK_THROWS_AS(parse_sweep("60 us : 63 us : 0", Dimension::time), config_error);
}

TEST_CASE("unit round trip through formatting") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double v = u(rng) * std::pow(10.0, (i % 30) - 15);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("config parsing") {
  SUBCASE("minimal config gets full defaults with auto-resonant tau") {
    const ExperimentConfig cfg = parse_config("{}");
    CHECK(cfg.tau_auto);
    CHECK(cfg.resolved_tau() == doctest::Approx(kPi / cfg.omega()));
    CHECK(cfg.tau_corr.count == 51);
    CHECK(cfg.phi_rf.size() == 1);
    CHECK(cfg.drive_values.size() == 5);
    CHECK(cfg.engine == Engine::closed_form);
  }
  SUBCASE("explicit sweep") {
    const ExperimentConfig cfg =
        parse_config(R"({"timing": {"tau_corr": "60us:63us:51"}})");
    CHECK(cfg.tau_corr.count == 51);
    CHECK(cfg.tau_corr.at(1) - cfg.tau_corr.at(0) == doctest::Approx(3e-6 / 50));
  }
  SUBCASE("negative t_p is rejected with the field named") {
    try {
      parse_config(R"({"timing": {"t_p": "-3 us"}})");
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(e.field == "timing.t_p");
    }
  }
  SUBCASE("unknown keys are rejected with their path") {
    try {
      parse_config(R"({"timing": {"t_pulse": "3 us"}})");
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(e.field == "timing.t_pulse");
    }
    CHECK_THROWS_AS(parse_config(R"({"samples": {}})"), config_error);
  }
  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(parse_config("{"), config_error);
  }
  SUBCASE("drive lists") {
    const ExperimentConfig cfg = parse_config(
        R"({"drive": {"rabi": ["10 kHz", "20 kHz"], "phi_rf": ["0", "pi/4"]}})");
    CHECK_FALSE(cfg.drive_as_angles);
    CHECK(cfg.drive_values[1] == doctest::Approx(kTwoPi * 20e3));
    CHECK(cfg.phi_rf[1] == doctest::Approx(kPi / 4));
    CHECK_THROWS_AS(
        parse_config(R"({"drive": {"rabi": ["1 kHz"], "rotation_angles": ["pi"]}})"),
        config_error);
  }
  SUBCASE("non-resonant tau is rejected for closed-form engines") {
    CHECK_THROWS_AS(parse_config(R"({"timing": {"tau": "100 ns"}})"), config_error);
    CHECK_NOTHROW(
        parse_config(R"({"timing": {"tau": "100 ns"}, "engine": "oracle"})"));
  }
  SUBCASE("engine names") {
    CHECK(parse_config(R"({"engine": "quadrature"})").engine == Engine::quadrature);
    CHECK_THROWS_AS(parse_config(R"({"engine": "magic"})"), config_error);
  }
}

TEST_CASE("rf start phase") {
  const double omega_rf = kTwoPi * 1.33e6;
  CHECK(rf_start_phase(0.7, omega_rf, 0.0) == doctest::Approx(0.7));

  // integer periods leave the phase unchanged
  const double period = kTwoPi / omega_rf;
  CHECK(rf_start_phase(0.7, omega_rf, 7.0 * period) == doctest::Approx(0.7).epsilon(1e-9));

  // quoted example values
  CHECK(rf_start_phase(0.0, omega_rf, 100e-6) ==
        doctest::Approx(std::fmod(omega_rf * 100e-6, kTwoPi)).epsilon(1e-12));
  CHECK(rf_start_phase(0.0, omega_rf, 100.1e-6) == doctest::Approx(0.8357).epsilon(1e-3));

  SUBCASE("waveform round trip: compensated start phase restores phi_rf at t = 0") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const double w = kTwoPi * (0.5e6 + 2e6 * u01(rng));
      const double t1 = 200e-6 * u01(rng);
      const double phi = kTwoPi * u01(rng);
      const double start = rf_start_phase(phi, w, t1);
      // generator runs cos(w (t - t1) + start); extrapolated to t = 0 the
      // instantaneous phase must equal phi modulo 2 pi
      const double at_origin = std::fmod(start - w * t1, kTwoPi);
      const double diff = std::remainder(at_origin - phi, kTwoPi);
      CHECK(std::abs(diff) <= 1e-6);
    }
  }
}

TEST_CASE("sinusoid fitting") {
  const double omega = kTwoPi * 1.33e6;
  std::vector<double> t, y;
  for (int i = 0; i < 51; ++i) {
    t.push_back(60e-6 + 3e-6 * i / 50.0);
  }

  SUBCASE("exact recovery of a noiseless sinusoid") {
    y.clear();
    for (double ti : t) y.push_back(2.0 * std::cos(omega * ti) + 0.5);
    const SinusoidFit fit = fit_sinusoid(t, y, omega);
    CHECK(fit.a == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.b == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(fit.c == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fit.rms_residual <= 1e-10);
    CHECK(fit.amplitude() == doctest::Approx(2.0).epsilon(1e-10));
  }
  SUBCASE("conditioning error on a tiny fraction of a period") {
    std::vector<double> t2, y2;
    for (int i = 0; i < 20; ++i) {
      t2.push_back(1e-9 * i / 19.0 * 5.0);  // ~0.9% of one period
      y2.push_back(1.0);
    }
    CHECK_THROWS_WITH_AS(fit_sinusoid(t2, y2, omega),
                         doctest::Contains("rank-deficient"), std::runtime_error);
  }
  SUBCASE("too few points") {
    CHECK_THROWS_AS(fit_sinusoid({1, 2, 3}, {1, 2, 3}, omega), std::domain_error);
  }
}

TEST_CASE("sweep with the closed-form engine reproduces the contrast pattern") {
  const std::string text = R"({
    "drive": {"rotation_angles": ["0", "pi/2", "pi", "3pi/2", "2pi"],
              "phi_rf": ["0", "pi/4", "pi/2"]},
    "timing": {"tau_corr": "60 us : 63 us : 51"},
    "engine": "closed-form"
  })";
  const ExperimentConfig cfg = parse_config(text);
  const SweepResult result = run_sweep(cfg);
  REQUIRE(result.traces.size() == 15);
  REQUIRE(result.references.size() == 3);

  const auto ratio = [&](int phi_idx, int drive_idx) {
    return result.traces[phi_idx * 5 + drive_idx].ratios;
  };
  const double expected_0[] = {1.0, 0.0, -1.0, 0.0, 1.0};
  const double expected_q[] = {1.0, 0.5, 0.0, 0.5, 1.0};
  for (int d = 0; d < 5; ++d) {
    CHECK(ratio(0, d).in_phase == doctest::Approx(expected_0[d]).epsilon(1e-6).scale(1.0));
    CHECK(ratio(2, d).in_phase == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ratio(1, d).in_phase == doctest::Approx(expected_q[d]).epsilon(1e-6).scale(1.0));
  }
  // partial-contrast signature at phi_rf = pi/4, theta = pi
  CHECK(std::abs(ratio(1, 2).quadrature) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("trace files round trip bit-exactly and the summary is stable") {
  const std::string text = R"({
    "drive": {"rotation_angles": ["0", "pi"], "phi_rf": ["0"]},
    "timing": {"tau_corr": "60 us : 61 us : 7"},
    "engine": "closed-form"
  })";
  const ExperimentConfig cfg = parse_config(text);
  const SweepResult result = run_sweep(cfg);

  const fs::path dir = temp_dir("roundtrip");
  const std::string summary_path = write_outputs(result, dir.string());

  const Trace back = read_trace_csv((dir / "trace_p0_d1.csv").string());
  const Trace& orig = result.traces[1].trace;
  REQUIRE(back.tau_corr.size() == orig.tau_corr.size());
  for (size_t i = 0; i < back.tau_corr.size(); ++i) {
    CHECK(back.tau_corr[i] == orig.tau_corr[i]);  // bitwise
    CHECK(back.signal[i] == orig.signal[i]);
  }
  CHECK(back.meta.phi_rf == orig.meta.phi_rf);
  CHECK(back.meta.omega == orig.meta.omega);

  const auto summary = nlohmann::ordered_json::parse(slurp(summary_path));
  CHECK(summary.contains("engine"));
  CHECK(summary.contains("config"));
  CHECK(summary["traces"].size() == 2);
  CHECK(summary["traces"][0].contains("fit"));
  CHECK(summary["traces"][0].contains("ratio_in_phase"));
  CHECK(summary["references"].size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("fitted trace amplitude matches the complex-amplitude reading") {
  const double t_p = 30e-6;
  const std::string text = R"({
    "drive": {"rotation_angles": ["1.2"], "phi_rf": ["0.6"]},
    "engine": "closed-form"
  })";
  const ExperimentConfig cfg = parse_config(text);
  const SweepResult result = run_sweep(cfg);
  const TraceResult& tr = result.traces[0];
  const double k = tr.trace.meta.prefactor_k;
  const double theta = tr.trace.meta.rotation_angle;
  const double sh = std::sin(theta / 2), ch = std::cos(theta / 2);
  // amplitude of K [sin^2 e^{i 2 phi} - cos^2] riding the tau_corr sinusoid
  const double re = sh * sh * std::cos(2 * 0.6) - ch * ch;
  const double im = sh * sh * std::sin(2 * 0.6);
  CHECK(tr.fit.amplitude() ==
        doctest::Approx(k * std::hypot(re, im)).epsilon(1e-9));
  // and the fitted phase matches the model phase at tau_corr = 0 arg
  const double model_phase =
      std::atan2(im, re) + cfg.omega() * 2.0 * t_p;
  const double diff = std::remainder(tr.fit.phase() - model_phase, kTwoPi);
  CHECK(std::abs(diff) <= 1e-9);
}

TEST_CASE("run_sweep is deterministic across worker counts") {
  const std::string text = R"({
    "drive": {"rotation_angles": ["0", "pi/2", "pi"], "phi_rf": ["0", "pi/4"]},
    "timing": {"tau_corr": "60 us : 61 us : 9"},
    "engine": "quadrature",
    "ensemble": {"alpha_nodes": 8, "beta_nodes": 8}
  })";
  const ExperimentConfig cfg = parse_config(text);
  const SweepResult one = run_sweep(cfg, 1);
  const SweepResult four = run_sweep(cfg, 4);
  REQUIRE(one.traces.size() == four.traces.size());
  for (size_t i = 0; i < one.traces.size(); ++i) {
    for (size_t j = 0; j < one.traces[i].trace.signal.size(); ++j) {
      CHECK(one.traces[i].trace.signal[j] == four.traces[i].trace.signal[j]);
    }
  }
}

TEST_CASE("vpp annotation") {
  const std::string text = R"({
    "drive": {"rabi": ["10 kHz"], "phi_rf": ["0"],
              "vpp_map": {"slope_hz_per_vpp": 5000.0, "intercept_hz": 0.0}},
    "timing": {"tau_corr": "60 us : 61 us : 5"}
  })";
  const SweepResult result = run_sweep(parse_config(text));
  REQUIRE(result.traces[0].trace.meta.vpp.has_value());
  CHECK(*result.traces[0].trace.meta.vpp == doctest::Approx(2.0));
}

TEST_CASE("io failures carry path context") {
  CHECK_THROWS_AS(read_trace_csv("/nonexistent/trace.csv"), io_error);
}
