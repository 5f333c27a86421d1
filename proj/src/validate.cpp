#include "nvcorr/validate.hpp"

#include <cmath>
#include <random>

#include "nvcorr/constants.hpp"
#include "nvcorr/errors.hpp"
#include "nvcorr/experiment.hpp"
#include "nvcorr/field_model.hpp"
#include "nvcorr/oracle.hpp"
#include "nvcorr/phase.hpp"
#include "nvcorr/readout.hpp"
#include "nvcorr/rotations.hpp"

namespace nvcorr {

using nlohmann::ordered_json;

bool ValidationReport::all_pass() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

ordered_json ValidationReport::to_json() const {
  ordered_json arr = ordered_json::array();
  for (const CheckResult& c : checks) {
    arr.push_back({{"id", c.id},
                   {"status", c.pass ? "pass" : "fail"},
                   {"expectation", c.expectation},
                   {"metrics", c.metrics}});
  }
  return {{"overall", all_pass() ? "pass" : "fail"}, {"checks", arr}};
}

namespace {

constexpr double kOmega = kTwoPi * 1.33e6;

struct Draw {
  EnsembleAngles angles{0.0, 0.0};
  SequenceTiming timing{0.0, 0.0, 0.0};
  RfDrive drive;
  double b_max = 0.0;
};

Draw random_draw(std::mt19937_64& rng, bool resonant_tau_only) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Draw d;
  d.angles = EnsembleAngles(kPi * u01(rng), kTwoPi * u01(rng) * 0.999999);
  const double tau = resonant_tau_only ? kPi / kOmega
                                       : (0.2 + 2.0 * u01(rng)) * kPi / kOmega;
  d.timing = SequenceTiming(tau, 50e-6 * u01(rng), 3e-6 * u01(rng));
  d.drive = RfDrive::resonant(0.8 * kOmega * u01(rng), kTwoPi * u01(rng),
                              d.timing.t_p, kOmega);
  d.b_max = 1e-9 * (0.5 + u01(rng));
  return d;
}

ProtocolParams params_of(const Draw& d, double gamma_abs) {
  return ProtocolParams{d.angles, d.timing, d.drive, kOmega, d.b_max, gamma_abs};
}

// Relative agreement with an absolute floor tied to the natural phase scale.
double rel_err(double a, double b, double scale) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-9 * scale});
}

CheckResult check_field_expansions(std::mt19937_64& rng, int draws) {
  const PhysicalConstants pc;
  double worst = 0.0;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < draws; ++i) {
    const Draw d = random_draw(rng, false);
    const double t = 6.0 * kPi / kOmega * u01(rng);
    const StageField f1 = field_stage1(d.angles, kOmega, d.b_max);
    const StageField f2 = field_stage2(d.angles, kOmega, d.drive, d.timing, d.b_max);
    const StageField f3 = field_stage3(d.angles, kOmega, d.drive, d.timing, d.b_max);
    worst = std::max(worst, std::abs(f1(t) - b1_expanded(t, d.angles, kOmega, d.b_max)) / d.b_max);
    worst = std::max(worst, std::abs(f2(t) - b2_expanded(t, d.angles, kOmega, d.drive,
                                                         d.timing, d.b_max)) / d.b_max);
    worst = std::max(worst, std::abs(f3(t) - b3_expanded(t, d.angles, kOmega, d.drive,
                                                         d.timing, d.b_max)) / d.b_max);
    (void)pc;
  }
  CheckResult c;
  c.id = "field_expansions_vs_composition";
  c.expectation = "expanded stage-field formulas match rotation composition within 1e-9";
  c.metrics = {{"draws", draws}, {"max_rel_diff", worst}};
  c.pass = worst <= 1e-9;
  return c;
}

CheckResult check_phases_vs_quadrature(std::mt19937_64& rng, int draws) {
  const PhysicalConstants pc;
  double w1 = 0.0, w2 = 0.0, w3 = 0.0, w4 = 0.0, w_res = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Draw d = random_draw(rng, false);
    const ProtocolParams p = params_of(d, pc.gamma_e_abs());
    const double scale = 4.0 * p.b_max * p.gamma_e_abs / p.omega;
    const PhaseSet q = phases_quadrature(p);
    w1 = std::max(w1, rel_err(phi1_analytic(p), q.phi1, scale));
    w3 = std::max(w3, rel_err(phi3_analytic(p), q.phi3, scale));
    w4 = std::max(w4, rel_err(phi4_analytic(p), q.phi4, scale));
    try {
      w2 = std::max(w2, rel_err(phi2_analytic(p), q.phi2, scale));
    } catch (const singular_denominator_error&) {
    }
  }
  for (int i = 0; i < draws / 4; ++i) {
    const Draw d = random_draw(rng, true);
    const ProtocolParams p = params_of(d, pc.gamma_e_abs());
    const double scale = 4.0 * p.b_max * p.gamma_e_abs / p.omega;
    const PhaseSet q = phases_quadrature(p);
    const PhaseSet r = phases_resonant(p);
    w_res = std::max({w_res, rel_err(r.phi1, q.phi1, scale), rel_err(r.phi2, q.phi2, scale),
                      rel_err(r.phi3, q.phi3, scale), rel_err(r.phi4, q.phi4, scale)});
  }
  CheckResult c;
  c.id = "phase_closed_forms_vs_quadrature";
  c.expectation =
      "general phi1/phi3/phi4 and the uniform-factor phi2 match quadrature within "
      "1e-7 relative; resonant forms within 1e-9";
  c.metrics = {{"draws", draws},
               {"max_rel_phi1", w1},
               {"max_rel_phi2_uniform", w2},
               {"max_rel_phi3", w3},
               {"max_rel_phi4", w4},
               {"max_rel_resonant", w_res}};
  c.pass = w1 <= 1e-7 && w2 <= 1e-7 && w3 <= 1e-7 && w4 <= 1e-7 && w_res <= 1e-9;
  return c;
}

CheckResult check_phi2_printed(std::mt19937_64& rng, int draws) {
  const PhysicalConstants pc;
  const double gamma = pc.gamma_e_abs();
  // cos-alpha part: alpha = 0; sin-alpha part: alpha = pi/2.
  double worst_cos = 0.0;
  double worst_ratio_dev = 0.0;
  for (int i = 0; i < draws; ++i) {
    Draw d = random_draw(rng, false);
    const double scale = 4.0 * d.b_max * gamma / kOmega;

    d.angles = EnsembleAngles(0.0, d.angles.beta);
    ProtocolParams p0 = params_of(d, gamma);
    const StageField f0 = field_stage2(p0.angles, kOmega, p0.drive, p0.timing, p0.b_max);
    const double q0 = phase_quadrature(f0, pattern_phi2(p0.timing), gamma);
    worst_cos = std::max(worst_cos, rel_err(phi2_analytic_printed(p0), q0, scale));

    d.angles = EnsembleAngles(0.5 * kPi, d.angles.beta);
    ProtocolParams p1 = params_of(d, gamma);
    const StageField f1 = field_stage2(p1.angles, kOmega, p1.drive, p1.timing, p1.b_max);
    const double q1 = phase_quadrature(f1, pattern_phi2(p1.timing), gamma);
    const double printed = phi2_analytic_printed(p1);
    if (std::abs(printed) > 1e-9 * scale / gamma) {
      worst_ratio_dev = std::max(worst_ratio_dev, std::abs(q1 / printed / gamma - 1.0));
    }
  }
  CheckResult c;
  c.id = "phi2_printed_factor_inconsistency";
  c.expectation =
      "printed phi2 carries |gamma_e| only on its cos-alpha terms: the cos-alpha "
      "part matches quadrature within 1e-7, the sin-alpha part is smaller than the "
      "quadrature value by exactly |gamma_e|";
  c.metrics = {{"draws", draws},
               {"gamma_e_abs", gamma},
               {"max_rel_cos_alpha_part", worst_cos},
               {"max_sin_alpha_ratio_deviation", worst_ratio_dev}};
  c.pass = worst_cos <= 1e-7 && worst_ratio_dev <= 1e-6;
  return c;
}

CheckResult check_ensemble_identity(std::mt19937_64& rng, int draws) {
  const PhysicalConstants pc;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    EnsembleParams p;
    p.omega = kOmega;
    p.b_max = 1e-9 * (0.5 + u01(rng));
    p.gamma_e_abs = pc.gamma_e_abs();
    p.drive = RfDrive::resonant(0.5 * kOmega * u01(rng), kTwoPi * u01(rng),
                                50e-6 * u01(rng), kOmega);
    p.tau_corr = 3e-6 * u01(rng);
    const double k = p.prefactor_k();
    const double closed = ensemble_average_closed(p).value;
    const double quad = ensemble_average_quadrature(p).value;
    worst = std::max(worst, std::abs(closed - quad) / k);
  }
  CheckResult c;
  c.id = "ensemble_closed_vs_quadrature";
  c.expectation = "closed ensemble average equals the flat-measure quadrature within 5e-7 K";
  c.metrics = {{"draws", draws}, {"max_abs_diff_over_k", worst}};
  c.pass = worst <= 5e-7;
  return c;
}

CheckResult check_published_displays() {
  const PhysicalConstants pc;
  EnsembleParams base;
  base.omega = kOmega;
  base.b_max = 1e-9;
  base.gamma_e_abs = pc.gamma_e_abs();

  double sign11 = 0.0, sign12 = 0.0, mag11 = 0.0, mag12 = 0.0;
  double eq13_structural = 0.0, eq13_vs_model = 0.0;
  const double k = base.prefactor_k();
  for (int it = 0; it < 40; ++it) {
    for (int ic = 0; ic < 40; ++ic) {
      const double theta = kTwoPi * it / 39.0;
      EnsembleParams p = base;
      p.drive = RfDrive::resonant(theta > 0.0 ? theta / 40e-6 : 0.0, 0.0, 40e-6, kOmega);
      p.tau_corr = 3e-6 * ic / 39.0;
      const double big_t = p.omega * (2.0 * p.drive.t_p + p.tau_corr);

      const SpecialCase s0 = special_case(0.0, p);
      sign11 = std::max(sign11, std::abs(s0.published_value + s0.model.value) / k);
      mag11 = std::max(mag11, std::abs(s0.published_value - s0.model.value) / k);

      const SpecialCase s2 = special_case(0.5 * kPi, p);
      sign12 = std::max(sign12, std::abs(s2.published_value + s2.model.value) / k);
      mag12 = std::max(mag12, std::abs(s2.published_value - s2.model.value) / k);

      const SpecialCase s1 = special_case(0.25 * kPi, p);
      // catalogued structural identity: published display uses full-angle
      // cos^2/sin^2 where the model produces half-angle forms
      const double th = p.drive.rabi() * p.drive.t_p;
      const double half_c = std::cos(0.5 * th), half_s = std::sin(0.5 * th);
      const double full_c = std::cos(th), full_s = std::sin(th);
      const double catalogued =
          k * ((full_c * full_c - half_c * half_c) * std::cos(big_t) -
               (full_s * full_s - half_s * half_s) * std::sin(big_t));
      eq13_structural = std::max(
          eq13_structural,
          std::abs(s1.published_value + s1.model.value - catalogued) / k);
      eq13_vs_model = std::max(eq13_vs_model,
                               std::abs(s1.published_value - s1.model.value) / k);
    }
  }
  CheckResult c;
  c.id = "published_special_cases_vs_closed_form";
  c.expectation =
      "the phi_rf = 0 and pi/2 published displays differ from the closed form by a "
      "global sign only; the pi/4 display differs by the catalogued full-angle vs "
      "half-angle structure";
  c.metrics = {{"max_sign_residual_eq11_over_k", sign11},
               {"max_sign_residual_eq12_over_k", sign12},
               {"eq11_actual_difference_over_k", mag11},
               {"eq12_actual_difference_over_k", mag12},
               {"max_structural_residual_eq13_over_k", eq13_structural},
               {"eq13_actual_difference_over_k", eq13_vs_model}};
  c.pass = sign11 <= 1e-12 && sign12 <= 1e-12 && eq13_structural <= 1e-12 &&
           mag11 > 0.1 && mag12 > 0.1 && eq13_vs_model > 0.1;
  return c;
}

CheckResult check_rwa_budget() {
  const Vec3 z(0.0, 0.0, 1.0);
  std::vector<double> ratios{0.02, 0.01, 0.005};
  std::vector<double> devs;
  for (double ratio : ratios) {
    const double rabi = ratio * kOmega;
    const double tp = kPi / rabi;
    const BlochProblem prob = BlochProblem::from_rabi(z, kOmega, rabi, 0.0, kOmega, 0.0, tp);
    const BlochTrajectory traj = integrate_bloch(prob);
    double dev = 0.0;
    for (size_t i = 0; i < traj.m.size(); i += 13) {
      const double t = i * traj.dt;
      const Vec3 closed =
          (rotation_z(kOmega * t) * (rotation_k(0.0, rabi * t) * Magnetization{z})).v;
      dev = std::max(dev, (traj.m[i] - closed).norm());
    }
    devs.push_back(dev);
  }
  const double c0 = devs[0] / ratios[0];
  const double c1 = devs[1] / ratios[1];
  const double c2 = devs[2] / ratios[2];
  const double cmid = c1;
  const bool linear = c0 >= 0.5 * cmid && c0 <= 1.5 * cmid && c2 >= 0.5 * cmid &&
                      c2 <= 1.5 * cmid;
  CheckResult c;
  c.id = "rwa_budget";
  c.expectation =
      "rotating-frame closed form deviates from the full drive by <= 5 (rabi/omega), "
      "scaling linearly in rabi/omega within +-50%";
  c.metrics = {{"ratios", ratios},
               {"max_devs", devs},
               {"dev_over_ratio", {c0, c1, c2}}};
  c.pass = devs[0] <= 5 * ratios[0] && devs[1] <= 5 * ratios[1] &&
           devs[2] <= 5 * ratios[2] && linear;
  return c;
}

CheckResult check_readout_identity(std::mt19937_64& rng, int draws) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    const PhaseSet p{u(rng), u(rng), u(rng), u(rng)};
    worst = std::max(worst, std::abs(sigma_z_exact(p) - readout_from_propagator(p)));
  }
  CheckResult c;
  c.id = "readout_closed_form_vs_propagator";
  c.expectation = "closed-form readout equals the unitary-product readout within 1e-12";
  c.metrics = {{"draws", draws}, {"max_abs_diff", worst}};
  c.pass = worst <= 1e-12;
  return c;
}

CheckResult check_geometry() {
  const GeometryIntegral g = hemisphere_integral(5e-9, 64);
  const double analytic = kTwoPi / 3.0 * (4.0 - 5.0 / std::sqrt(2.0));
  CheckResult c;
  c.id = "geometry_symmetry";
  c.expectation =
      "transverse hemisphere integrals vanish within the quadrature error; the "
      "axial integral is self-convergent and matches its closed form";
  c.metrics = {{"ix", g.ix},        {"iy", g.iy},        {"i_f", g.i_f},
               {"err_x", g.err_x},  {"err_y", g.err_y},  {"err_f", g.err_f},
               {"i_f_closed_form", analytic}};
  c.pass = std::abs(g.ix) <= g.err_x && std::abs(g.iy) <= g.err_y && g.converged &&
           std::abs(g.i_f - analytic) <= 1e-9;
  return c;
}

CheckResult check_methods_timing() {
  // Quoted interpulse delay vs the resonant half-block tau: the published
  // protocol timing is half the resonant tau; the mapping between the two
  // timings is not specified, so the factor is catalogued, not reconciled.
  const double quoted_interpulse = 188.1e-9;
  const double quoted_larmor_hz = 1.33e6;
  const double tau = resonant_tau(kTwoPi * quoted_larmor_hz);
  const double ratio = tau / quoted_interpulse;
  CheckResult c;
  c.id = "interpulse_delay_vs_resonant_tau";
  c.expectation =
      "resonant tau equals twice the quoted interpulse delay (flagged timing "
      "bookkeeping difference, ratio = 2 within 5e-3)";
  c.metrics = {{"resonant_tau_s", tau},
               {"quoted_interpulse_s", quoted_interpulse},
               {"ratio", ratio}};
  c.pass = std::abs(ratio - 2.0) <= 5e-3;
  return c;
}

CheckResult check_small_angle_guard(std::mt19937_64& rng, int draws) {
  const PhysicalConstants pc;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    EnsembleParams p;
    p.omega = kOmega;
    p.gamma_e_abs = pc.gamma_e_abs();
    p.b_max = 1e-2 * kOmega / p.gamma_e_abs;  // phase scale at the regime boundary
    p.drive = RfDrive::resonant(0.5 * kOmega * u01(rng), kTwoPi * u01(rng),
                                50e-6 * u01(rng), kOmega);
    p.tau_corr = 3e-6 * u01(rng);
    const double k = p.prefactor_k();
    const double approx =
        ensemble_average_quadrature(p, 32, 64, IntegrandForm::small_angle).value;
    const double exact =
        ensemble_average_quadrature(p, 32, 64, IntegrandForm::exact).value;
    worst = std::max(worst, std::abs(exact - approx) / k);
  }
  CheckResult c;
  c.id = "small_angle_regime_guard";
  c.expectation =
      "with b_max |gamma_e| / omega = 1e-2 the exact-readout ensemble average "
      "differs from the small-angle one by <= 1e-4 K";
  c.metrics = {{"draws", draws}, {"max_abs_diff_over_k", worst}};
  c.pass = worst <= 1e-4;
  return c;
}

}  // namespace

ValidationReport run_validation(std::uint64_t seed, bool quick) {
  std::mt19937_64 rng(seed);
  const int n_field = quick ? 100 : 500;
  const int n_phase = quick ? 200 : 1000;
  const int n_phi2 = quick ? 50 : 200;
  const int n_ens = quick ? 50 : 200;
  const int n_readout = quick ? 300 : 1000;
  const int n_guard = quick ? 5 : 20;

  ValidationReport report;
  report.checks.push_back(check_field_expansions(rng, n_field));
  report.checks.push_back(check_phases_vs_quadrature(rng, n_phase));
  report.checks.push_back(check_phi2_printed(rng, n_phi2));
  report.checks.push_back(check_ensemble_identity(rng, n_ens));
  report.checks.push_back(check_published_displays());
  report.checks.push_back(check_rwa_budget());
  report.checks.push_back(check_readout_identity(rng, n_readout));
  report.checks.push_back(check_geometry());
  report.checks.push_back(check_methods_timing());
  report.checks.push_back(check_small_angle_guard(rng, n_guard));
  return report;
}

}  // namespace nvcorr
