#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nvcorr/constants.hpp"
#include "nvcorr/units.hpp"

namespace nvcorr {

enum class Engine { closed_form, quadrature, oracle };

std::string engine_name(Engine e);
Engine engine_from_name(const std::string& name);

// Optional linear map from generator amplitude (volts peak-to-peak) to Rabi
// frequency, used only to annotate outputs.
struct VppMap {
  double slope_hz_per_vpp = 0.0;
  double intercept_hz = 0.0;
};

struct EnsembleSettings {
  int alpha_nodes = 32;
  int beta_nodes = 64;
  bool monte_carlo = false;
  int mc_samples = 20000;
};

struct OracleSettings {
  int steps_per_period = 1000;
  int alpha_nodes = 8;
  int beta_nodes = 8;
  bool include_rf_z = false;
  double rf_z_field_ratio = 1.0;  // applied only when include_rf_z
};

struct ExperimentConfig {
  NvSample sample;
  PhysicalConstants constants;

  bool tau_auto = true;  // tau = pi / omega
  double tau = 0.0;      // s, when tau_auto is false
  double t_p = 30e-6;
  SweepSpec tau_corr{60e-6, 63e-6, 51};
  double tau_corr_offset = 0.0;  // idle intervals folded into the correlation time

  std::vector<double> phi_rf{0.0};
  bool drive_as_angles = true;         // values are rotation angles theta = rabi * t_p
  std::vector<double> drive_values{0.0, kPi / 2, kPi, 3 * kPi / 2, kTwoPi};
  double misalignment_ratio = 0.0;     // omega_y / omega_x
  std::optional<VppMap> vpp;

  Engine engine = Engine::closed_form;
  EnsembleSettings ensemble;
  OracleSettings oracle;

  std::string out_dir = "out";
  bool pl_sign_flip = false;

  double omega() const;              // larmor angular frequency
  double resolved_tau() const;       // pi/omega when tau_auto
  double rabi_of(double drive_value) const;  // rad/s for one sweep entry
};

// Strict parse: unknown keys rejected, every failure reported with its
// field path. Unit-suffixed strings per nvcorr/units.hpp.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical config echo for output summaries (stable key order).
nlohmann::ordered_json config_echo(const ExperimentConfig& cfg);

}  // namespace nvcorr
