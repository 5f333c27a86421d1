#include "nvcorr/rotations.hpp"

#include <cmath>
#include <stdexcept>

#include "nvcorr/errors.hpp"

namespace nvcorr {

RotationMatrix3 rotation_z(double theta) {
  if (!std::isfinite(theta)) {
    throw std::domain_error("rotation_z: non-finite angle");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  RotationMatrix3 r;
  r.m << c, -s, 0.0,
         s,  c, 0.0,
         0.0, 0.0, 1.0;
  return r;
}

RotationMatrix3 rotation_k(double phi_rf, double theta) {
  if (!std::isfinite(phi_rf) || !std::isfinite(theta)) {
    throw std::domain_error("rotation_k: non-finite input");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double cp = std::cos(phi_rf);
  const double sp = std::sin(phi_rf);
  const double omc = 1.0 - c;
  RotationMatrix3 r;
  r.m << c + omc * cp * cp, omc * cp * sp,      s * sp,
         omc * cp * sp,     c + omc * sp * sp, -s * cp,
         -s * sp,           s * cp,             c;
  return r;
}

DriveAxis effective_axis(const RfDrive& drive) {
  if (!(drive.omega_x * drive.omega_x + drive.omega_y * drive.omega_y > 0.0)) {
    throw std::domain_error("effective_axis: zero drive amplitude");
  }
  // Two-argument arctangent so a pure-y drive (omega_x = 0) is well defined.
  const double phi_eff = drive.phi_rf - std::atan2(drive.omega_y, drive.omega_x);
  return {Vec3{std::cos(phi_eff), std::sin(phi_eff), 0.0}, phi_eff};
}

Magnetization propagate_free(const Magnetization& m0, double omega, double t) {
  return rotation_z(omega * t) * m0;
}

Magnetization propagate_driven(const Magnetization& m0, double omega,
                               const RfDrive& drive, double t) {
  if (!drive.resonant_with(omega)) {
    throw unsupported_mode_error(
        "propagate_driven: drive is off resonance (omega_rf != omega); "
        "no closed form applies, integrate the Bloch equation instead");
  }
  const DriveAxis axis = effective_axis(drive);
  return rotation_z(omega * t) * (rotation_k(axis.phi_eff, drive.rabi() * t) * m0);
}

}  // namespace nvcorr
