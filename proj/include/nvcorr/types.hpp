#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "nvcorr/constants.hpp"

namespace nvcorr {

using Vec3 = Eigen::Vector3d;

// Polar/azimuthal orientation of the initial magnetization vector.
// alpha in [0, pi], beta in [0, 2*pi); ranges enforced at construction.
struct EnsembleAngles {
  EnsembleAngles(double alpha_rad, double beta_rad);
  double alpha;
  double beta;
};

// Unit vector describing the coherent part of the detected nuclear
// ensemble. Propagation is by exact rotations, so the norm is preserved
// to machine precision.
struct Magnetization {
  Vec3 v{0.0, 0.0, 1.0};

  static Magnetization from_angles(const EnsembleAngles& angles) {
    const double sa = std::sin(angles.alpha);
    return {{sa * std::cos(angles.beta), sa * std::sin(angles.beta),
             std::cos(angles.alpha)}};
  }
  double norm() const { return v.norm(); }
  double x() const { return v.x(); }
  double y() const { return v.y(); }
  double z() const { return v.z(); }
};

// RF drive description. omega_x/omega_y are the Rabi angular rates induced
// by the x and y field components (the nutation rates of the corresponding
// aligned drives), omega_rf the carrier, phi_rf the phase referred to the
// global time origin t = 0.
struct RfDrive {
  double omega_x = 0.0;   // rad/s
  double omega_y = 0.0;   // rad/s
  double omega_rf = 0.0;  // rad/s
  double phi_rf = 0.0;    // rad
  double t_p = 0.0;       // s

  double rabi() const { return std::hypot(omega_x, omega_y); }
  bool resonant_with(double omega, double rel_tol = 1e-9) const {
    return std::abs(omega_rf - omega) <= rel_tol * std::abs(omega);
  }
  static RfDrive resonant(double rabi_rate, double phi_rf, double t_p, double omega) {
    return {rabi_rate, 0.0, omega, phi_rf, t_p};
  }
};

// Timing of the four-stage protocol: first interrogation block of length
// 2*tau, RF pulse of length t_p, correlation interval tau_corr, second
// interrogation block of length 2*tau.
struct SequenceTiming {
  SequenceTiming(double tau_s, double t_p_s, double tau_corr_s);
  double tau;
  double t_p;
  double tau_corr;

  double t1() const { return 2.0 * tau; }  // RF onset
  double t2() const { return 2.0 * tau + t_p; }

  // Timing resonance omega*tau = pi (half a Larmor period per echo arm).
  bool timing_resonant(double omega, double rel_tol = 1e-9) const {
    return std::abs(omega * tau - kPi) <= rel_tol * kPi;
  }
};

}  // namespace nvcorr
