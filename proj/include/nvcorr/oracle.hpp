#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nvcorr/phase.hpp"
#include "nvcorr/readout.hpp"
#include "nvcorr/types.hpp"

namespace nvcorr {

// Classical spin precession dM/dt = w(t) x M with
//   w(t) = gamma * [ b_rf_x cos(omega_rf t + phi_rf),
//                    b_rf_y cos(omega_rf t + phi_rf),
//                    b_ext + b_rf_z cos(omega_rf t + phi_rf) ].
// The counter-rotating part of the linear drive is kept, so this is the
// reference the rotating-frame closed forms are judged against. A linear
// drive of field amplitude b has effective nutation rate gamma*b/2; the
// from_rabi factory sets b_rf_x = 2*rabi/gamma so that `rabi` is the
// rotation rate appearing in the closed forms. The z drive component is
// normally absent; b_rf_z lets tests quantify how much it actually matters.
struct BlochProblem {
  Vec3 m0{0.0, 0.0, 1.0};
  double b_ext = 0.0;     // T
  double b_rf_x = 0.0;    // T (linear drive amplitude)
  double b_rf_y = 0.0;    // T
  double b_rf_z = 0.0;    // T
  double omega_rf = 0.0;  // rad/s
  double phi_rf = 0.0;    // rad
  double gamma = 0.0;     // rad/s/T
  double t_span = 0.0;    // s
  double dt = 0.0;        // s; must satisfy dt <= larmor period / 1000

  static BlochProblem from_rabi(const Vec3& m0, double omega, double rabi_x,
                                double rabi_y, double omega_rf, double phi_rf,
                                double t_span, int steps_per_period = 1000);
  double larmor_period() const;
  void validate() const;  // throws std::domain_error on step-size violation
};

struct BlochTrajectory {
  double dt = 0.0;
  std::vector<Vec3> m;  // m[i] at t = i * dt

  double max_norm_drift() const;  // max |1 - ||m||| along the trajectory
};

// Fixed-step classical 4th-order integration. Deliberately non-adaptive:
// bit-reproducible and trivially analyzable convergence.
BlochTrajectory integrate_bloch(const BlochProblem& problem);

// The correlation sequence as a literal ordered product of 2x2 unitaries:
// phase rotations about z, ideal pi/2 rotations and the pi operator. The
// qubit basis is ordered so the optically initialized level is the
// sigma_z = -1 eigenstate (index 1).
struct QubitPropagator {
  std::vector<Eigen::Matrix2cd> factors;

  static QubitPropagator correlation_sequence(const PhaseSet& phases);
  Eigen::Matrix2cd product() const;         // leftmost factor applied last
  double max_unitarity_defect() const;      // max over factors of |U U+ - I|
};

// <sigma_z> from the propagator product applied to the initialized state.
double readout_from_propagator(const PhaseSet& phases);

struct EndToEndOptions {
  int alpha_nodes = 8;
  int beta_nodes = 8;
  int steps_per_period = 1000;
  bool monte_carlo = false;
  int mc_samples = 256;
  std::uint64_t seed = 1;
  double rf_z_field_ratio = 0.0;  // b_rf_z as a fraction of b_rf_x
};

struct EndToEndResult {
  EnsembleSignal signal;
  bool regime_warning = false;   // b_max * gamma_e / omega above small-angle regime
  double phase_scale = 0.0;      // 4 b_max gamma_e / omega
};

// Full brute-force pipeline with no closed forms: stage fields from Bloch
// trajectories, phases by Simpson integration over the canonical windows,
// readout from the unitary product, ensemble average over (alpha, beta).
EndToEndResult end_to_end_oracle(const EnsembleParams& params,
                                 const EndToEndOptions& options = {});

// Phases for one orientation via the Bloch route (exposed for tests).
PhaseSet bloch_pipeline_phases(const ProtocolParams& params,
                               int steps_per_period = 1000,
                               double rf_z_field_ratio = 0.0);

}  // namespace nvcorr
