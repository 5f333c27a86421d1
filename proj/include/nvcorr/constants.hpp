#pragma once

#include <cmath>

namespace nvcorr {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Physical constants in SI with angular frequencies (rad/s) throughout.
// Configuration files accept Hz-based quantities and convert at the
// boundary; nothing inside the library carries a 2*pi ambiguity.
struct PhysicalConstants {
  double gamma_e = -kTwoPi * 28.8e9;            // electron gyromagnetic ratio, rad/s/T (negative)
  double gamma_n = kTwoPi * 42.58e6;            // nuclear (1H) gyromagnetic ratio, rad/s/T
  double zero_field_splitting = kTwoPi * 2.87e9;  // rad/s
  double hbar = 1.054571817e-34;                // J s
  double mu0 = 1.25663706212e-6;                // T m / A

  // Phase integrals couple through |gamma_e|; the sign only lives here.
  double gamma_e_abs() const { return std::abs(gamma_e); }
};

// Sample/sensor description. b_max is the phenomenological amplitude of
// the transverse-magnetization-to-field coupling seen by one sensor; it is
// a calibration input, defaulting to 1 (normalized units).
struct NvSample {
  double b_ext = 31.2e-3;      // T
  double depth = 5e-9;         // m
  double spin_density = 6e28;  // m^-3, organic (hydrogen-rich) samples
  double b_max = 1.0;          // T
};

// Nuclear Larmor angular frequency gamma_n * B_ext. Throws std::domain_error
// for a non-positive field.
double larmor_frequency(const NvSample& sample, const PhysicalConstants& constants);

// Half interrogation block satisfying the timing resonance omega*tau = pi.
// Throws std::domain_error for non-positive omega.
double resonant_tau(double omega);

}  // namespace nvcorr
