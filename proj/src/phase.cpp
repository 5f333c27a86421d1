#include "nvcorr/phase.hpp"

#include <cmath>
#include <stdexcept>

#include "nvcorr/errors.hpp"
#include "nvcorr/quadrature.hpp"
#include "nvcorr/rotations.hpp"

namespace nvcorr {

TogglingPattern TogglingPattern::echo(double start, double half_period) {
  return {start, {{half_period, +1}, {half_period, -1}}};
}

TogglingPattern TogglingPattern::plain(double start, double duration) {
  return {start, {{duration, +1}}};
}

TogglingPattern TogglingPattern::xy8(double start, double interpulse_tau, int repeats) {
  if (repeats < 1) throw std::domain_error("TogglingPattern::xy8: repeats must be >= 1");
  TogglingPattern p;
  p.start = start;
  const int pulses = 8 * repeats;
  int sign = +1;
  p.segments.emplace_back(0.5 * interpulse_tau, sign);
  for (int i = 1; i < pulses; ++i) {
    sign = -sign;
    p.segments.emplace_back(interpulse_tau, sign);
  }
  p.segments.emplace_back(0.5 * interpulse_tau, -sign);
  return p;
}

double TogglingPattern::total_duration() const {
  double total = 0.0;
  for (const auto& [dur, sign] : segments) total += dur;
  return total;
}

double phase_quadrature(const StageField& field, const TogglingPattern& pattern,
                        double gamma_e_abs, int order) {
  if (pattern.segments.empty()) {
    throw std::domain_error("phase_quadrature: empty toggling pattern");
  }
  if (order < 2) throw std::domain_error("phase_quadrature: order must be >= 2");

  const auto run = [&](int panels_per_halfperiod) {
    double t = pattern.start;
    double acc = 0.0;
    for (const auto& [dur, sign] : pattern.segments) {
      if (!(dur > 0.0)) {
        if (dur == 0.0) continue;
        throw std::domain_error("phase_quadrature: segment durations must be positive");
      }
      // Panels no wider than half the fastest oscillation period.
      const double half_period =
          field.max_rate > 0.0 ? kPi / field.max_rate : dur;
      int panels = static_cast<int>(std::ceil(dur / half_period)) * panels_per_halfperiod;
      if (panels < panels_per_halfperiod) panels = panels_per_halfperiod;
      acc += sign * integrate_panels(field.b, t, t + dur, panels, order);
      t += dur;
    }
    return gamma_e_abs * acc;
  };

  // One refinement pass; escalate while the estimated error exceeds the
  // declared bound (converges immediately for these smooth integrands).
  const double bound =
      1e-10 * field.b_max * gamma_e_abs * pattern.total_duration();
  double coarse = run(1);
  for (int refine = 2; refine <= 8; refine *= 2) {
    const double fine = run(refine);
    if (std::abs(fine - coarse) <= bound || refine == 8) return fine;
    coarse = fine;
  }
  return coarse;
}

TogglingPattern pattern_phi1(const SequenceTiming& t) {
  return TogglingPattern::echo(0.0, t.tau);
}
TogglingPattern pattern_phi2(const SequenceTiming& t) {
  return TogglingPattern::plain(2.0 * t.tau, t.t_p);
}
TogglingPattern pattern_phi3(const SequenceTiming& t) {
  return TogglingPattern::plain(2.0 * t.tau + t.t_p, t.tau_corr);
}
TogglingPattern pattern_phi4(const SequenceTiming& t) {
  return TogglingPattern::echo(2.0 * t.tau + t.t_p + t.tau_corr, t.tau);
}

PhaseSet phases_quadrature(const ProtocolParams& p, int order) {
  const StageField f1 = field_stage1(p.angles, p.omega, p.b_max);
  const StageField f2 = field_stage2(p.angles, p.omega, p.drive, p.timing, p.b_max);
  const StageField f3 = field_stage3(p.angles, p.omega, p.drive, p.timing, p.b_max);
  PhaseSet out;
  out.phi1 = p.timing.tau > 0.0
                 ? phase_quadrature(f1, pattern_phi1(p.timing), p.gamma_e_abs, order)
                 : 0.0;
  out.phi2 = p.timing.t_p > 0.0
                 ? phase_quadrature(f2, pattern_phi2(p.timing), p.gamma_e_abs, order)
                 : 0.0;
  out.phi3 = p.timing.tau_corr > 0.0
                 ? phase_quadrature(f3, pattern_phi3(p.timing), p.gamma_e_abs, order)
                 : 0.0;
  out.phi4 = p.timing.tau > 0.0
                 ? phase_quadrature(f3, pattern_phi4(p.timing), p.gamma_e_abs, order)
                 : 0.0;
  return out;
}

namespace {

struct Effective {
  double rabi;
  double phi;
};

Effective effective(const ProtocolParams& p) {
  if (p.drive.rabi() > 0.0) {
    return {p.drive.rabi(), effective_axis(p.drive).phi_eff};
  }
  return {0.0, p.drive.phi_rf};
}

// phi2 closed form, parametrized by the coupling factors applied to the
// sin(alpha) and cos(alpha) term groups.
double phi2_closed(const ProtocolParams& p, double sin_factor, double cos_factor) {
  const auto [rabi, phi] = effective(p);
  const double om = p.omega;
  if (std::abs(om - rabi) < 1e-6 * std::abs(om) ||
      std::abs(om + rabi) < 1e-6 * std::abs(om)) {
    throw singular_denominator_error(
        "phi2 closed form: |omega -+ rabi| below threshold, use quadrature");
  }
  const double sa = std::sin(p.angles.alpha);
  const double ca = std::cos(p.angles.alpha);
  const double be = p.angles.beta;
  const double tau = p.timing.tau;
  const double tp = p.timing.t_p;

  const double t1 = 2.0 * std::cos(be - 2.0 * phi - 0.5 * tp * om) * sa *
                    std::sin(0.5 * tp * om) / om;
  const double t2 = 2.0 * std::cos(be + 0.5 * tp * om + 4.0 * tau * om) * sa *
                    std::sin(0.5 * tp * om) / om;
  const double t3 =
      (ca / ((om - rabi) * (om + rabi))) *
      ((om + rabi) * std::sin(phi + (tp + 2.0 * tau) * (om - rabi)) -
       (om + rabi) * std::sin(phi + 2.0 * tau * om - 2.0 * tau * rabi) +
       (om - rabi) * (std::sin(phi + 2.0 * tau * (om + rabi)) -
                      std::sin(phi + (tp + 2.0 * tau) * (om + rabi))));
  const double t4 =
      (sa * std::sin(be - phi + 2.0 * tau * om) / (om - rabi)) *
      (std::cos(phi + (tp + 2.0 * tau) * (om - rabi)) -
       std::cos(phi + 2.0 * tau * om - 2.0 * tau * rabi));
  const double t5 =
      (sa * std::sin(be - phi + 2.0 * tau * om) / (om + rabi)) *
      (-std::cos(phi + 2.0 * tau * (om + rabi)) +
       std::cos(phi + (tp + 2.0 * tau) * (om + rabi)));

  return 0.5 * p.b_max * (sin_factor * (t1 + t2 + t4 + t5) + cos_factor * t3);
}

}  // namespace

double phi1_analytic(const ProtocolParams& p) {
  const double om = p.omega;
  const double s = std::sin(0.5 * om * p.timing.tau);
  return 4.0 * p.b_max * p.gamma_e_abs / om * s * s * std::sin(p.angles.alpha) *
         std::sin(om * p.timing.tau + p.angles.beta);
}

double phi2_analytic(const ProtocolParams& p) {
  return phi2_closed(p, p.gamma_e_abs, p.gamma_e_abs);
}

double phi2_analytic_printed(const ProtocolParams& p) {
  return phi2_closed(p, 1.0, p.gamma_e_abs);
}

double phi3_analytic(const ProtocolParams& p) {
  const auto [rabi, phi] = effective(p);
  const double om = p.omega;
  const double sa = std::sin(p.angles.alpha);
  const double ca = std::cos(p.angles.alpha);
  const double be = p.angles.beta;
  const double tau = p.timing.tau;
  const double tp = p.timing.t_p;
  const double tc = p.timing.tau_corr;
  const double ch = std::cos(0.5 * tp * rabi);
  const double sh = std::sin(0.5 * tp * rabi);
  return p.b_max * p.gamma_e_abs / om *
         (ch * ch * sa *
              (-std::sin(be + 2.0 * tp * om + 4.0 * tau * om) +
               std::sin(be + (2.0 * tp + 4.0 * tau + tc) * om)) +
          2.0 * std::cos(be - 2.0 * phi - 0.5 * (4.0 * tp + tc) * om) * sa *
              std::sin(0.5 * tc * om) * sh * sh +
          ca *
              (std::cos(phi + 2.0 * (tp + tau) * om) -
               std::cos(phi + (2.0 * (tp + tau) + tc) * om)) *
              std::sin(tp * rabi));
}

double phi4_analytic(const ProtocolParams& p) {
  const auto [rabi, phi] = effective(p);
  const double om = p.omega;
  const double sa = std::sin(p.angles.alpha);
  const double ca = std::cos(p.angles.alpha);
  const double be = p.angles.beta;
  const double tau = p.timing.tau;
  const double tp = p.timing.t_p;
  const double tc = p.timing.tau_corr;
  const double ch = std::cos(0.5 * tp * rabi);
  const double sh = std::sin(0.5 * tp * rabi);
  return p.b_max * p.gamma_e_abs / om *
         (-ch * ch * sa *
              (std::sin(be + (2.0 * tp + 4.0 * tau + tc) * om) -
               2.0 * std::sin(be + (2.0 * tp + 5.0 * tau + tc) * om) +
               std::sin(be + (2.0 * tp + 6.0 * tau + tc) * om)) +
          sa * sh * sh *
              (std::sin(be - 2.0 * phi - (2.0 * tp + tc) * om) -
               2.0 * std::sin(be - 2.0 * phi - (2.0 * tp + tau + tc) * om) +
               std::sin(be - 2.0 * phi - (2.0 * (tp + tau) + tc) * om)) +
          ca * std::sin(tp * rabi) *
              (-2.0 * std::cos(phi + (2.0 * tp + 3.0 * tau + tc) * om) +
               std::cos(phi + (2.0 * tp + 4.0 * tau + tc) * om) +
               std::cos(phi + (2.0 * (tp + tau) + tc) * om)));
}

PhaseSet phases_general(const ProtocolParams& p) {
  PhaseSet out;
  out.phi1 = phi1_analytic(p);
  out.phi3 = phi3_analytic(p);
  out.phi4 = phi4_analytic(p);
  try {
    out.phi2 = phi2_analytic(p);
  } catch (const singular_denominator_error&) {
    const StageField f2 = field_stage2(p.angles, p.omega, p.drive, p.timing, p.b_max);
    out.phi2 = phase_quadrature(f2, pattern_phi2(p.timing), p.gamma_e_abs);
  }
  return out;
}

PhaseSet phases_resonant(const ProtocolParams& p) {
  if (!p.timing.timing_resonant(p.omega)) {
    throw unsupported_mode_error(
        "phases_resonant: timing is not resonant (omega * tau != pi)");
  }
  if (p.drive.rabi() > 0.0 && !p.drive.resonant_with(p.omega)) {
    throw unsupported_mode_error("phases_resonant: drive is off resonance");
  }
  const auto [rabi, phi] = effective(p);
  const double om = p.omega;
  const double sa = std::sin(p.angles.alpha);
  const double ca = std::cos(p.angles.alpha);
  const double be = p.angles.beta;
  const double tp = p.timing.t_p;
  const double tc = p.timing.tau_corr;
  const double pref = p.b_max * p.gamma_e_abs / om;
  const double ch = std::cos(0.5 * tp * rabi);
  const double sh = std::sin(0.5 * tp * rabi);

  PhaseSet out;
  out.phi1 = -4.0 * pref * sa * std::sin(be);
  out.phi3 = 2.0 * pref * std::sin(0.5 * tc * om) *
             (std::cos(be + 2.0 * tp * om + 0.5 * tc * om) * ch * ch * sa +
              std::cos(be - 2.0 * phi - 0.5 * (4.0 * tp + tc) * om) * sa * sh * sh +
              ca * std::sin(phi + 2.0 * tp * om + 0.5 * tc * om) * std::sin(tp * rabi));
  out.phi4 = 4.0 * pref *
             (-ch * ch * sa * std::sin(be + 2.0 * tp * om + tc * om) +
              sa * sh * sh * std::sin(be - 2.0 * phi - (2.0 * tp + tc) * om) +
              ca * std::cos(phi + 2.0 * tp * om + tc * om) * std::sin(tp * rabi));

  ProtocolParams at_res = p;
  at_res.timing = SequenceTiming(kPi / om, tp, tc);
  try {
    out.phi2 = phi2_analytic(at_res);
  } catch (const singular_denominator_error&) {
    const StageField f2 =
        field_stage2(p.angles, p.omega, p.drive, at_res.timing, p.b_max);
    out.phi2 = phase_quadrature(f2, pattern_phi2(at_res.timing), p.gamma_e_abs);
  }
  return out;
}

}  // namespace nvcorr
