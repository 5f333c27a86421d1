#include "nvcorr/types.hpp"

#include <stdexcept>
#include <string>

namespace nvcorr {

EnsembleAngles::EnsembleAngles(double alpha_rad, double beta_rad)
    : alpha(alpha_rad), beta(beta_rad) {
  if (!(alpha >= 0.0 && alpha <= kPi)) {
    throw std::domain_error("EnsembleAngles: alpha must lie in [0, pi], got " +
                            std::to_string(alpha_rad));
  }
  if (!(beta >= 0.0 && beta < kTwoPi)) {
    throw std::domain_error("EnsembleAngles: beta must lie in [0, 2*pi), got " +
                            std::to_string(beta_rad));
  }
}

SequenceTiming::SequenceTiming(double tau_s, double t_p_s, double tau_corr_s)
    : tau(tau_s), t_p(t_p_s), tau_corr(tau_corr_s) {
  if (!(tau >= 0.0) || !(t_p >= 0.0) || !(tau_corr >= 0.0)) {
    throw std::domain_error("SequenceTiming: all durations must be >= 0");
  }
}

}  // namespace nvcorr
