#pragma once

#include <Eigen/Dense>

#include "nvcorr/types.hpp"

namespace nvcorr {

// Active SO(3) rotations with the sign conventions used throughout this
// library. Entry-by-entry, the two generators are
//
//   rotation_z(th) = [  cos th  -sin th   0 ]
//                    [  sin th   cos th   0 ]
//                    [    0        0      1 ]
//
//   rotation_k(phi, th), axis k = (cos phi, sin phi, 0):
//     [ c + (1-c) cp^2      (1-c) cp sp       s sp ]
//     [ (1-c) cp sp         c + (1-c) sp^2   -s cp ]
//     [ -s sp               s cp              c    ]
//   with c = cos th, s = sin th, cp = cos phi, sp = sin phi,
//
// i.e. rotation_k is the standard axis-angle (Rodrigues) rotation about a
// unit axis in the xy plane. rotation_z(pi/2) maps x to y;
// rotation_k(0, th) is a rotation about x sending z to (0, -sin th, cos th).

struct RotationMatrix3 {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  RotationMatrix3 operator*(const RotationMatrix3& o) const { return {m * o.m}; }
  Magnetization operator*(const Magnetization& x) const { return {m * x.v}; }
  Vec3 operator*(const Vec3& x) const { return m * x; }

  // max-abs entry of R^T R - I
  double orthogonality_defect() const {
    return (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  }
  double det() const { return m.determinant(); }
};

// Effective drive axis in the rotating frame: a transverse unit vector at
// azimuth phi_eff = phi_rf - atan2(omega_y, omega_x).
struct DriveAxis {
  Vec3 k;
  double phi_eff;
};

RotationMatrix3 rotation_z(double theta);
RotationMatrix3 rotation_k(double phi_rf, double theta);

// Throws std::domain_error when both drive components vanish.
DriveAxis effective_axis(const RfDrive& drive);

// Free precession about z: R_z(omega t) m0.
Magnetization propagate_free(const Magnetization& m0, double omega, double t);

// Resonant driven evolution R_z(omega t) R_k(rabi * t) m0 with rabi and the
// axis phase taken from effective_axis. Requires omega_rf == omega; an
// off-resonant drive has no closed form here and raises
// unsupported_mode_error (use the ODE oracle for that regime).
Magnetization propagate_driven(const Magnetization& m0, double omega,
                               const RfDrive& drive, double t);

}  // namespace nvcorr
