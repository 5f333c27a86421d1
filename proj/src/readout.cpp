#include "nvcorr/readout.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "nvcorr/errors.hpp"
#include "nvcorr/quadrature.hpp"
#include "nvcorr/rotations.hpp"

namespace nvcorr {

double sigma_z_exact(const PhaseSet& p) {
  return std::cos(p.phi1) * std::cos(p.phi4) * std::sin(p.phi3 + p.phi2) -
         std::sin(p.phi1) * std::sin(p.phi4);
}

double sigma_z_small_angle(const PhaseSet& p) {
  return p.phi3 + p.phi2 - p.phi1 * p.phi4;
}

double EnsembleParams::prefactor_k() const {
  const double x = b_max * gamma_e_abs / omega;
  return kTwoPi * x * x;
}

SequenceTiming EnsembleParams::timing() const {
  return SequenceTiming(kPi / omega, drive.t_p, tau_corr);
}

ProtocolParams EnsembleParams::at(const EnsembleAngles& angles) const {
  return ProtocolParams{angles, timing(), drive, omega, b_max, gamma_e_abs};
}

namespace {

void check_resonant(const EnsembleParams& p, const char* who) {
  if (!(p.omega > 0.0)) {
    throw std::domain_error(std::string(who) + ": omega must be positive");
  }
  if (p.drive.rabi() > 0.0 && !p.drive.resonant_with(p.omega)) {
    throw unsupported_mode_error(std::string(who) + ": drive is off resonance");
  }
}

double closed_form_value(const EnsembleParams& p, double rabi, double phi) {
  const double k = p.prefactor_k();
  const double half = 0.5 * rabi * p.drive.t_p;
  const double big_t = p.omega * (2.0 * p.drive.t_p + p.tau_corr);
  const double sh = std::sin(half);
  const double ch = std::cos(half);
  return k * (sh * sh * std::cos(2.0 * phi + big_t) - ch * ch * std::cos(big_t));
}

}  // namespace

EnsembleSignal ensemble_average_closed(const EnsembleParams& params) {
  check_resonant(params, "ensemble_average_closed");
  const double rabi = params.drive.rabi();
  const double phi =
      rabi > 0.0 ? effective_axis(params.drive).phi_eff : params.drive.phi_rf;
  return {closed_form_value(params, rabi, phi), params.prefactor_k(),
          AverageMethod::closed_form, 0.0};
}

namespace {

double grid_average(const EnsembleParams& params, int alpha_nodes, int beta_nodes,
                    IntegrandForm form) {
  const GaussLegendre& gl = gauss_legendre(alpha_nodes);
  const double w_beta = kTwoPi / beta_nodes;
  std::vector<double> parts;
  parts.reserve(static_cast<size_t>(alpha_nodes) * beta_nodes);
  for (int ia = 0; ia < alpha_nodes; ++ia) {
    const double alpha = 0.5 * kPi * (gl.nodes[ia] + 1.0);
    const double w_alpha = 0.5 * kPi * gl.weights[ia];
    for (int ib = 0; ib < beta_nodes; ++ib) {
      const double beta = kTwoPi * ib / beta_nodes;
      const PhaseSet ph = phases_resonant(params.at(EnsembleAngles(alpha, beta)));
      const double f = form == IntegrandForm::small_angle ? sigma_z_small_angle(ph)
                                                          : sigma_z_exact(ph);
      parts.push_back(w_alpha * w_beta * f);
    }
  }
  return pairwise_sum(parts) / (4.0 * kPi);
}

}  // namespace

EnsembleSignal ensemble_average_quadrature(const EnsembleParams& params,
                                           int alpha_nodes, int beta_nodes,
                                           IntegrandForm form) {
  check_resonant(params, "ensemble_average_quadrature");
  if (alpha_nodes < 4 || beta_nodes < 4) {
    throw std::domain_error("ensemble_average_quadrature: need >= 4 nodes per axis");
  }
  const double fine = grid_average(params, alpha_nodes, beta_nodes, form);
  const double coarse =
      grid_average(params, alpha_nodes / 2, beta_nodes / 2, form);
  return {fine, params.prefactor_k(), AverageMethod::quadrature,
          std::abs(fine - coarse)};
}

EnsembleSignal ensemble_average_monte_carlo(const EnsembleParams& params,
                                            int samples, std::uint64_t seed,
                                            IntegrandForm form) {
  check_resonant(params, "ensemble_average_monte_carlo");
  if (samples < 2) throw std::domain_error("ensemble_average_monte_carlo: samples < 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> vals;
  vals.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double alpha = kPi * u01(rng);
    const double beta = kTwoPi * u01(rng);
    const PhaseSet ph = phases_resonant(params.at(EnsembleAngles(alpha, beta)));
    vals.push_back(form == IntegrandForm::small_angle ? sigma_z_small_angle(ph)
                                                      : sigma_z_exact(ph));
  }
  // (1/4pi) * measure(2 pi^2) * mean = (pi/2) * mean
  const double mean = pairwise_sum(vals) / samples;
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= (samples - 1.0);
  const double std_err = 0.5 * kPi * std::sqrt(var / samples);
  return {0.5 * kPi * mean, params.prefactor_k(), AverageMethod::monte_carlo,
          std_err};
}

SpecialCase special_case(double phi_rf, const EnsembleParams& params) {
  check_resonant(params, "special_case");
  const double k = params.prefactor_k();
  const double th = params.drive.rabi() * params.drive.t_p;
  const double big_t = params.omega * (2.0 * params.drive.t_p + params.tau_corr);

  EnsembleParams at_phase = params;
  at_phase.drive.omega_y = 0.0;
  at_phase.drive.omega_x = params.drive.rabi();
  at_phase.drive.phi_rf = phi_rf;

  SpecialCase out;
  out.model = ensemble_average_closed(at_phase);
  const double eps = 1e-12;
  if (std::abs(phi_rf) <= eps) {
    out.published_display = 11;
    out.published_value = k * std::cos(th) * std::cos(big_t);
  } else if (std::abs(phi_rf - 0.25 * kPi) <= eps) {
    out.published_display = 13;
    const double c = std::cos(th), s = std::sin(th);
    out.published_value = k * (c * c * std::cos(big_t) - s * s * std::sin(big_t));
  } else if (std::abs(phi_rf - 0.5 * kPi) <= eps) {
    out.published_display = 12;
    out.published_value = k * std::cos(big_t);
  } else {
    throw std::invalid_argument(
        "special_case: phi_rf must be 0, pi/4 or pi/2; use "
        "ensemble_average_closed for other phases");
  }
  return out;
}

EnsembleSignal misalignment_map(const EnsembleParams& params) {
  if (!(params.drive.rabi() > 0.0)) {
    throw std::domain_error("misalignment_map: zero drive amplitude");
  }
  check_resonant(params, "misalignment_map");
  const DriveAxis axis = effective_axis(params.drive);
  return {closed_form_value(params, params.drive.rabi(), axis.phi_eff),
          params.prefactor_k(), AverageMethod::closed_form, 0.0};
}

}  // namespace nvcorr
