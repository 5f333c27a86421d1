#include "nvcorr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nvcorr/errors.hpp"

namespace nvcorr {

using nlohmann::json;
using nlohmann::ordered_json;

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::closed_form: return "closed-form";
    case Engine::quadrature: return "quadrature";
    case Engine::oracle: return "oracle";
  }
  return "?";
}

Engine engine_from_name(const std::string& name) {
  if (name == "closed-form") return Engine::closed_form;
  if (name == "quadrature") return Engine::quadrature;
  if (name == "oracle") return Engine::oracle;
  throw config_error("engine", "unknown engine '" + name +
                                   "' (expected closed-form, quadrature or oracle)");
}

double ExperimentConfig::omega() const {
  return larmor_frequency(sample, constants);
}

double ExperimentConfig::resolved_tau() const {
  return tau_auto ? resonant_tau(omega()) : tau;
}

double ExperimentConfig::rabi_of(double drive_value) const {
  if (!drive_as_angles) return drive_value;
  if (drive_value == 0.0) return 0.0;
  if (!(t_p > 0.0)) {
    throw config_error("timing.t_p",
                       "rotation-angle drive values need a positive pulse time");
  }
  return drive_value / t_p;
}

namespace {

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw config_error(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

double get_quantity(const json& obj, const std::string& path, const std::string& key,
                    Dimension dim, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  try {
    if (v.is_number()) {
      if (dim == Dimension::dimensionless || dim == Dimension::angle ||
          dim == Dimension::number_density) {
        return v.get<double>();
      }
      throw config_error("", "dimensional values must be unit-suffixed strings");
    }
    if (v.is_string()) return parse_quantity(v.get<std::string>(), dim);
  } catch (const config_error& e) {
    throw config_error(path + "." + key, e.what());
  }
  throw config_error(path + "." + key, "expected a quantity string");
}

std::vector<double> get_angle_list(const json& obj, const std::string& path,
                                   const std::string& key) {
  std::vector<double> out;
  const json& arr = obj.at(key);
  if (!arr.is_array() || arr.empty()) {
    throw config_error(path + "." + key, "expected a non-empty array");
  }
  for (const auto& v : arr) {
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else if (v.is_string()) {
      try {
        out.push_back(parse_quantity(v.get<std::string>(), Dimension::angle));
      } catch (const config_error& e) {
        throw config_error(path + "." + key, e.what());
      }
    } else {
      throw config_error(path + "." + key, "expected numbers or angle strings");
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error("", std::string("malformed JSON document: ") + e.what());
  }
  if (!root.is_object()) throw config_error("", "top level must be an object");
  reject_unknown(root, "", {"sample", "constants", "timing", "drive", "engine",
                            "ensemble", "oracle", "output"});

  ExperimentConfig cfg;

  if (root.contains("sample")) {
    const json& s = root.at("sample");
    reject_unknown(s, "sample", {"b_ext", "depth", "spin_density", "b_max"});
    cfg.sample.b_ext = get_quantity(s, "sample", "b_ext", Dimension::magnetic_field,
                                    cfg.sample.b_ext);
    cfg.sample.depth = get_quantity(s, "sample", "depth", Dimension::length,
                                    cfg.sample.depth);
    cfg.sample.spin_density = get_quantity(s, "sample", "spin_density",
                                           Dimension::number_density,
                                           cfg.sample.spin_density);
    cfg.sample.b_max = s.contains("b_max") && s.at("b_max").is_number()
                           ? s.at("b_max").get<double>()
                           : get_quantity(s, "sample", "b_max",
                                          Dimension::magnetic_field, cfg.sample.b_max);
    if (!(cfg.sample.b_ext > 0.0)) {
      throw config_error("sample.b_ext", "must be positive");
    }
    if (!(cfg.sample.b_max > 0.0)) {
      throw config_error("sample.b_max", "must be positive");
    }
  }

  if (root.contains("constants")) {
    const json& c = root.at("constants");
    reject_unknown(c, "constants", {"gamma_e", "gamma_n"});
    if (c.contains("gamma_e")) {
      cfg.constants.gamma_e =
          kTwoPi * get_quantity(c, "constants", "gamma_e", Dimension::gyromagnetic,
                                cfg.constants.gamma_e / kTwoPi);
    }
    if (c.contains("gamma_n")) {
      cfg.constants.gamma_n =
          kTwoPi * get_quantity(c, "constants", "gamma_n", Dimension::gyromagnetic,
                                cfg.constants.gamma_n / kTwoPi);
    }
    if (!(cfg.constants.gamma_n > 0.0)) {
      throw config_error("constants.gamma_n", "must be positive");
    }
  }

  if (root.contains("timing")) {
    const json& t = root.at("timing");
    reject_unknown(t, "timing", {"tau", "t_p", "tau_corr", "tau_corr_offset"});
    if (t.contains("tau")) {
      if (t.at("tau").is_string() && t.at("tau").get<std::string>() == "auto") {
        cfg.tau_auto = true;
      } else {
        cfg.tau_auto = false;
        cfg.tau = get_quantity(t, "timing", "tau", Dimension::time, 0.0);
        if (!(cfg.tau > 0.0)) throw config_error("timing.tau", "must be positive");
      }
    }
    cfg.t_p = get_quantity(t, "timing", "t_p", Dimension::time, cfg.t_p);
    if (cfg.t_p < 0.0) throw config_error("timing.t_p", "must be >= 0");
    if (t.contains("tau_corr")) {
      try {
        cfg.tau_corr = parse_sweep(t.at("tau_corr").get<std::string>(), Dimension::time);
      } catch (const config_error& e) {
        throw config_error("timing.tau_corr", e.what());
      }
    }
    cfg.tau_corr_offset = get_quantity(t, "timing", "tau_corr_offset",
                                       Dimension::time, cfg.tau_corr_offset);
    if (cfg.tau_corr_offset < 0.0) {
      throw config_error("timing.tau_corr_offset", "must be >= 0");
    }
  }
  if (cfg.tau_corr.count < 1) throw config_error("timing.tau_corr", "count must be >= 1");
  if (cfg.tau_corr.start < 0.0) throw config_error("timing.tau_corr", "start must be >= 0");

  if (root.contains("drive")) {
    const json& d = root.at("drive");
    reject_unknown(d, "drive",
                   {"rotation_angles", "rabi", "phi_rf", "misalignment_ratio", "vpp_map"});
    if (d.contains("rotation_angles") && d.contains("rabi")) {
      throw config_error("drive", "give rotation_angles or rabi, not both");
    }
    if (d.contains("rotation_angles")) {
      cfg.drive_as_angles = true;
      cfg.drive_values = get_angle_list(d, "drive", "rotation_angles");
    } else if (d.contains("rabi")) {
      cfg.drive_as_angles = false;
      cfg.drive_values.clear();
      const json& arr = d.at("rabi");
      if (!arr.is_array() || arr.empty()) {
        throw config_error("drive.rabi", "expected a non-empty array");
      }
      for (const auto& v : arr) {
        if (!v.is_string()) throw config_error("drive.rabi", "expected quantity strings");
        try {
          cfg.drive_values.push_back(
              kTwoPi * parse_quantity(v.get<std::string>(), Dimension::frequency));
        } catch (const config_error& e) {
          throw config_error("drive.rabi", e.what());
        }
      }
    }
    if (d.contains("phi_rf")) cfg.phi_rf = get_angle_list(d, "drive", "phi_rf");
    cfg.misalignment_ratio = get_quantity(d, "drive", "misalignment_ratio",
                                          Dimension::dimensionless,
                                          cfg.misalignment_ratio);
    if (!std::isfinite(cfg.misalignment_ratio)) {
      throw config_error("drive.misalignment_ratio", "must be finite");
    }
    if (d.contains("vpp_map")) {
      const json& v = d.at("vpp_map");
      reject_unknown(v, "drive.vpp_map", {"slope_hz_per_vpp", "intercept_hz"});
      VppMap map;
      map.slope_hz_per_vpp = v.value("slope_hz_per_vpp", 0.0);
      map.intercept_hz = v.value("intercept_hz", 0.0);
      if (!(map.slope_hz_per_vpp != 0.0)) {
        throw config_error("drive.vpp_map.slope_hz_per_vpp", "must be nonzero");
      }
      cfg.vpp = map;
    }
  }
  if (cfg.phi_rf.empty()) throw config_error("drive.phi_rf", "must not be empty");
  if (cfg.drive_values.empty()) throw config_error("drive", "drive sweep must not be empty");

  if (root.contains("engine")) {
    cfg.engine = engine_from_name(root.at("engine").get<std::string>());
  }

  if (root.contains("ensemble")) {
    const json& e = root.at("ensemble");
    reject_unknown(e, "ensemble", {"alpha_nodes", "beta_nodes", "monte_carlo", "mc_samples"});
    cfg.ensemble.alpha_nodes = e.value("alpha_nodes", cfg.ensemble.alpha_nodes);
    cfg.ensemble.beta_nodes = e.value("beta_nodes", cfg.ensemble.beta_nodes);
    cfg.ensemble.monte_carlo = e.value("monte_carlo", cfg.ensemble.monte_carlo);
    cfg.ensemble.mc_samples = e.value("mc_samples", cfg.ensemble.mc_samples);
    if (cfg.ensemble.alpha_nodes < 4) throw config_error("ensemble.alpha_nodes", "must be >= 4");
    if (cfg.ensemble.beta_nodes < 4) throw config_error("ensemble.beta_nodes", "must be >= 4");
    if (cfg.ensemble.mc_samples < 2) throw config_error("ensemble.mc_samples", "must be >= 2");
  }

  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    reject_unknown(o, "oracle",
                   {"steps_per_period", "alpha_nodes", "beta_nodes", "include_rf_z",
                    "rf_z_field_ratio"});
    cfg.oracle.steps_per_period = o.value("steps_per_period", cfg.oracle.steps_per_period);
    cfg.oracle.alpha_nodes = o.value("alpha_nodes", cfg.oracle.alpha_nodes);
    cfg.oracle.beta_nodes = o.value("beta_nodes", cfg.oracle.beta_nodes);
    cfg.oracle.include_rf_z = o.value("include_rf_z", cfg.oracle.include_rf_z);
    cfg.oracle.rf_z_field_ratio = o.value("rf_z_field_ratio", cfg.oracle.rf_z_field_ratio);
    if (cfg.oracle.steps_per_period < 1000) {
      throw config_error("oracle.steps_per_period", "must be >= 1000");
    }
    if (cfg.oracle.alpha_nodes < 2 || cfg.oracle.beta_nodes < 2) {
      throw config_error("oracle", "alpha_nodes and beta_nodes must be >= 2");
    }
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    reject_unknown(o, "output", {"dir", "pl_sign_flip"});
    cfg.out_dir = o.value("dir", cfg.out_dir);
    cfg.pl_sign_flip = o.value("pl_sign_flip", cfg.pl_sign_flip);
  }

  // Engines built on the resonant closed forms need the resonant timing.
  if (!cfg.tau_auto && cfg.engine != Engine::oracle) {
    const double target = resonant_tau(cfg.omega());
    if (std::abs(cfg.tau - target) > 1e-9 * target) {
      throw config_error("timing.tau",
                         "closed-form and quadrature engines need the resonant tau; "
                         "set tau to \"auto\" or to pi/omega = " + format_double(target) + " s");
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ordered_json config_echo(const ExperimentConfig& cfg) {
  ordered_json j;
  j["sample"] = {{"b_ext_t", cfg.sample.b_ext},
                 {"depth_m", cfg.sample.depth},
                 {"spin_density_per_m3", cfg.sample.spin_density},
                 {"b_max_t", cfg.sample.b_max}};
  j["constants"] = {{"gamma_e_rad_s_t", cfg.constants.gamma_e},
                    {"gamma_n_rad_s_t", cfg.constants.gamma_n}};
  j["timing"] = {{"tau_auto", cfg.tau_auto},
                 {"tau_s", cfg.resolved_tau()},
                 {"t_p_s", cfg.t_p},
                 {"tau_corr_start_s", cfg.tau_corr.start},
                 {"tau_corr_stop_s", cfg.tau_corr.stop},
                 {"tau_corr_count", cfg.tau_corr.count},
                 {"tau_corr_offset_s", cfg.tau_corr_offset}};
  j["drive"] = {{"as_rotation_angles", cfg.drive_as_angles},
                {"values", cfg.drive_values},
                {"phi_rf_rad", cfg.phi_rf},
                {"misalignment_ratio", cfg.misalignment_ratio}};
  if (cfg.vpp) {
    j["drive"]["vpp_map"] = {{"slope_hz_per_vpp", cfg.vpp->slope_hz_per_vpp},
                             {"intercept_hz", cfg.vpp->intercept_hz}};
  }
  j["engine"] = engine_name(cfg.engine);
  j["ensemble"] = {{"alpha_nodes", cfg.ensemble.alpha_nodes},
                   {"beta_nodes", cfg.ensemble.beta_nodes},
                   {"monte_carlo", cfg.ensemble.monte_carlo},
                   {"mc_samples", cfg.ensemble.mc_samples}};
  j["oracle"] = {{"steps_per_period", cfg.oracle.steps_per_period},
                 {"alpha_nodes", cfg.oracle.alpha_nodes},
                 {"beta_nodes", cfg.oracle.beta_nodes},
                 {"include_rf_z", cfg.oracle.include_rf_z},
                 {"rf_z_field_ratio", cfg.oracle.rf_z_field_ratio}};
  j["output"] = {{"pl_sign_flip", cfg.pl_sign_flip}};
  return j;
}

}  // namespace nvcorr
