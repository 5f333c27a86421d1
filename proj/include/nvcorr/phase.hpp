#pragma once

#include <utility>
#include <vector>

#include "nvcorr/field_model.hpp"
#include "nvcorr/types.hpp"

namespace nvcorr {

// Phases accumulated by the sensor in the four protocol stages.
struct PhaseSet {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi3 = 0.0;
  double phi4 = 0.0;
};

// Sign modulation imposed on a field integral by the decoupling pi pulses,
// as an ordered list of (duration, sign) segments starting at `start` on
// the field's time axis. The canonical windows place each stage integral at
// its global protocol time:
//   phi1: start 0,                 segments (+tau, -tau)
//   phi2: start 2 tau,             segment  (+t_p)
//   phi3: start 2 tau + t_p,       segment  (+tau_corr)
//   phi4: start 2 tau + t_p + tau_corr, segments (+tau, -tau)
struct TogglingPattern {
  double start = 0.0;
  std::vector<std::pair<double, int>> segments;

  static TogglingPattern echo(double start, double half_period);
  static TogglingPattern plain(double start, double duration);
  // 8N pi pulses: segments tau/2, tau, ..., tau, tau/2 with alternating sign.
  static TogglingPattern xy8(double start, double interpulse_tau, int repeats);

  double total_duration() const;
};

// |gamma_e| * sum_segments sign * integral of b over the segment, by
// composite Gauss-Legendre with panels sized from the field's max_rate and
// one refinement pass. Absolute error <= 1e-10 * b_max * gamma_e_abs *
// total duration. Throws std::domain_error on an empty pattern.
double phase_quadrature(const StageField& field, const TogglingPattern& pattern,
                        double gamma_e_abs, int order = 16);

// Everything the four phases depend on. The drive may be misaligned; closed
// forms use its effective Rabi rate and axis phase.
struct ProtocolParams {
  EnsembleAngles angles;
  SequenceTiming timing;
  RfDrive drive;
  double omega;
  double b_max;
  double gamma_e_abs;
};

// Canonical toggling windows for the four stages of `timing`.
TogglingPattern pattern_phi1(const SequenceTiming& timing);
TogglingPattern pattern_phi2(const SequenceTiming& timing);
TogglingPattern pattern_phi3(const SequenceTiming& timing);
TogglingPattern pattern_phi4(const SequenceTiming& timing);

// All four phases by quadrature of the stage fields (the canonical route).
PhaseSet phases_quadrature(const ProtocolParams& p, int order = 16);

// General closed forms (arbitrary timing). phi2_analytic carries the
// |gamma_e| coupling on every term; phi2_analytic_printed reproduces the
// published expression in which the sin(alpha) terms lack that factor (kept
// verbatim as a reconciliation target). Both raise
// singular_denominator_error when |omega -+ rabi| < 1e-6 * omega; route to
// quadrature there.
double phi1_analytic(const ProtocolParams& p);
double phi2_analytic(const ProtocolParams& p);
double phi2_analytic_printed(const ProtocolParams& p);
double phi3_analytic(const ProtocolParams& p);
double phi4_analytic(const ProtocolParams& p);

// Closed forms with automatic quadrature fallback for phi2 near the
// singular denominators.
PhaseSet phases_general(const ProtocolParams& p);

// Resonant-timing forms (omega * tau = pi). phi1/phi3/phi4 use the
// simplified expressions; phi2 evaluates the uniform-|gamma_e| closed form
// at tau = pi/omega (equal to the quadrature definition; the printed
// variant stays available above for the reconciliation report). Throws
// unsupported_mode_error off the resonance conditions.
PhaseSet phases_resonant(const ProtocolParams& p);

}  // namespace nvcorr
