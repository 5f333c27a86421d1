#pragma once

#include <functional>

#include "nvcorr/types.hpp"

namespace nvcorr {

// Dipolar geometry integrals over the detection hemisphere (radius equal to
// the sensor depth, sitting on the surface plane directly above it). The
// integrands, with r the position vector from the sensor,
//   g_x = 3 r_z r_x / |r|^5,  g_y = 3 r_z r_y / |r|^5,
//   f   = (3 r_z^2 / |r|^2 - 1) / |r|^3,
// give dimensionless volume integrals. ix and iy vanish by reflection
// symmetry; i_f is depth-independent by scale invariance. Errors are
// refinement estimates (half-order vs full-order differences).
struct GeometryIntegral {
  double ix = 0.0;
  double iy = 0.0;
  double i_f = 0.0;
  double err_x = 0.0;
  double err_y = 0.0;
  double err_f = 0.0;
  int order = 0;
  bool converged = false;
};

// Product-rule spherical quadrature with one refinement step for the error
// estimate. Throws std::domain_error for depth <= 0 or order < 2; a
// non-convergent refinement is reported through `converged`, never thrown.
GeometryIntegral hemisphere_integral(double depth, int order);

// Magnetic field seen by the sensor during one protocol stage, as a closure
// over the stage parameters. Time is stage-local (t = 0 at the stage
// boundary that defines the entry magnetization). max_rate bounds the
// fastest oscillation, used to size quadrature panels. |b(t)| <= b_max for
// all t since every field is b_max times a projection of a unit vector.
struct StageField {
  int stage = 0;
  double b_max = 0.0;
  double max_rate = 0.0;  // rad/s
  std::function<double(double)> b;

  double operator()(double t) const { return b(t); }
};

// Stage 1 (first interrogation block): b_max * (R_z(omega t) M0) . x
StageField field_stage1(const EnsembleAngles& angles, double omega, double b_max);

// Stage 2 (RF pulse): b_max * (R_z(omega t) R_k(rabi t) M1) . x with
// M1 = R_z(2 omega tau) M0. Requires a resonant drive.
StageField field_stage2(const EnsembleAngles& angles, double omega,
                        const RfDrive& drive, const SequenceTiming& timing,
                        double b_max);

// Stage 3 (correlation interval + second block): b_max * (R_z(omega t) M2) . x
// with M2 = R_z(omega t_p) R_k(rabi t_p) M1. Requires a resonant drive.
StageField field_stage3(const EnsembleAngles& angles, double omega,
                        const RfDrive& drive, const SequenceTiming& timing,
                        double b_max);

// Expanded trigonometric forms of the stage fields (general, off-resonant
// timing). These are reconciliation targets for the composition closures
// above, not alternative engines.
double b1_expanded(double t, const EnsembleAngles& angles, double omega,
                   double b_max);
double b2_expanded(double t, const EnsembleAngles& angles, double omega,
                   const RfDrive& drive, const SequenceTiming& timing,
                   double b_max);
double b3_expanded(double t, const EnsembleAngles& angles, double omega,
                   const RfDrive& drive, const SequenceTiming& timing,
                   double b_max);

}  // namespace nvcorr
