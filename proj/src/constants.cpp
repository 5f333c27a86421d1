#include "nvcorr/constants.hpp"

#include <stdexcept>

namespace nvcorr {

double larmor_frequency(const NvSample& sample, const PhysicalConstants& constants) {
  if (!(sample.b_ext > 0.0)) {
    throw std::domain_error("larmor_frequency: external field must be positive");
  }
  return constants.gamma_n * sample.b_ext;
}

double resonant_tau(double omega) {
  if (!(omega > 0.0)) {
    throw std::domain_error("resonant_tau: omega must be positive");
  }
  return kPi / omega;
}

}  // namespace nvcorr
