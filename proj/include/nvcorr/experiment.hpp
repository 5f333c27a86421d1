#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nvcorr/config.hpp"
#include "nvcorr/readout.hpp"

namespace nvcorr {

// Generator phase at burst onset t1 such that the drive phase referred to
// t = 0 equals phi_rf; wrapped to [0, 2*pi).
double rf_start_phase(double phi_rf_at_origin, double omega_rf, double t1);

struct TraceMeta {
  double phi_rf = 0.0;
  double rabi = 0.0;             // rad/s
  double rotation_angle = 0.0;   // rabi * t_p
  std::optional<double> vpp;
  Engine engine = Engine::closed_form;
  double omega = 0.0;
  double t_p = 0.0;
  double b_max = 0.0;
  double prefactor_k = 0.0;
  bool is_reference = false;
};

struct Trace {
  std::vector<double> tau_corr;  // strictly increasing
  std::vector<double> signal;
  TraceMeta meta;
};

// Least-squares fit of a0*cos(omega t) + b0*sin(omega t) + c0.
struct SinusoidFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double rms_residual = 0.0;
  double amplitude() const;
  double phase() const;  // atan2(-b, a)
};

// Normal equations with column scaling; exact on noiseless sinusoids.
// Throws std::domain_error on fewer than 4 points and a conditioning error
// (std::runtime_error) when the sweep covers too small a fraction of one
// period to separate the basis functions.
SinusoidFit fit_sinusoid(const std::vector<double>& t,
                         const std::vector<double>& y, double omega);
SinusoidFit fit_sinusoid(const Trace& trace, double omega);

// In-phase / quadrature decomposition of a fitted trace against a reference
// fit: trace = (in_phase + i * quadrature) * reference in the complex
// amplitude (a - i b) representation.
struct QuadratureRatios {
  double in_phase = 0.0;
  double quadrature = 0.0;
};
QuadratureRatios relative_to(const SinusoidFit& fit, const SinusoidFit& reference);

struct TraceResult {
  Trace trace;
  SinusoidFit fit;
  QuadratureRatios ratios;  // vs the zero-amplitude reference at the same phi_rf
};

struct SweepResult {
  std::vector<TraceResult> traces;          // ordered: phi_rf major, drive minor
  std::vector<TraceResult> references;      // one per phi_rf (rabi = 0)
  ExperimentConfig config;
  std::uint64_t seed = 0;
};

// Evaluates the selected engine over the tau_corr grid for every
// (phi_rf, drive) pair plus a zero-amplitude reference per phi_rf.
// Deterministic for any worker count: work items are indexed slots.
SweepResult run_sweep(const ExperimentConfig& cfg, int workers = 1,
                      std::uint64_t seed = 1);

// Writes one CSV per trace plus summary.json into out_dir (created if
// absent). Returns the summary path. Throws io_error on failure.
std::string write_outputs(const SweepResult& result, const std::string& out_dir);

// Parses a trace CSV written by write_outputs (comment lines carry
// key=value metadata).
Trace read_trace_csv(const std::string& path);

nlohmann::ordered_json fit_to_json(const SinusoidFit& fit);

}  // namespace nvcorr
