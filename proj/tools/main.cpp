#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nvcorr/config.hpp"
#include "nvcorr/errors.hpp"
#include "nvcorr/experiment.hpp"
#include "nvcorr/field_model.hpp"
#include "nvcorr/validate.hpp"

namespace fs = std::filesystem;
using nvcorr::config_error;
using nvcorr::io_error;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

nvcorr::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return nvcorr::parse_config("{}");
  return nvcorr::parse_config_file(path);
}

void apply_overrides(nvcorr::ExperimentConfig& cfg, const std::string& engine,
                     const std::string& out_dir) {
  if (!engine.empty()) cfg.engine = nvcorr::engine_from_name(engine);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
}

int cmd_sweep(const std::string& config_path, const std::string& engine,
              const std::string& out_dir, int workers, std::uint64_t seed) {
  nvcorr::ExperimentConfig cfg = load_config(config_path);
  apply_overrides(cfg, engine, out_dir);
  const nvcorr::SweepResult result = nvcorr::run_sweep(cfg, workers, seed);
  const std::string summary = nvcorr::write_outputs(result, cfg.out_dir);
  std::cout << "wrote " << result.traces.size() << " traces + "
            << result.references.size() << " references; summary: " << summary
            << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& engine,
                 const std::string& out_dir, const std::string& phi_rf,
                 const std::string& theta, const std::string& rabi, int workers,
                 std::uint64_t seed) {
  nvcorr::ExperimentConfig cfg = load_config(config_path);
  apply_overrides(cfg, engine, out_dir);
  if (!phi_rf.empty()) {
    cfg.phi_rf = {nvcorr::parse_quantity(phi_rf, nvcorr::Dimension::angle)};
  } else {
    cfg.phi_rf.resize(1);
  }
  if (!theta.empty() && !rabi.empty()) {
    throw config_error("", "give --theta or --rabi, not both");
  }
  if (!theta.empty()) {
    cfg.drive_as_angles = true;
    cfg.drive_values = {nvcorr::parse_quantity(theta, nvcorr::Dimension::angle)};
  } else if (!rabi.empty()) {
    cfg.drive_as_angles = false;
    cfg.drive_values = {nvcorr::kTwoPi *
                        nvcorr::parse_quantity(rabi, nvcorr::Dimension::frequency)};
  } else {
    cfg.drive_values.resize(1);
  }
  const nvcorr::SweepResult result = nvcorr::run_sweep(cfg, workers, seed);
  const std::string summary = nvcorr::write_outputs(result, cfg.out_dir);
  const nvcorr::TraceResult& tr = result.traces.at(0);
  std::cout << "phi_rf = " << tr.trace.meta.phi_rf
            << " rad, rotation angle = " << tr.trace.meta.rotation_angle
            << " rad\nfit: " << nvcorr::fit_to_json(tr.fit).dump()
            << "\nratios: in-phase " << tr.ratios.in_phase << ", quadrature "
            << tr.ratios.quadrature << "\nsummary: " << summary << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& csv_path, const std::string& config_path,
            double freq_hz) {
  const nvcorr::Trace trace = nvcorr::read_trace_csv(csv_path);
  double omega = 0.0;
  if (freq_hz > 0.0) {
    omega = nvcorr::kTwoPi * freq_hz;
  } else if (trace.meta.omega > 0.0) {
    omega = trace.meta.omega;
  } else {
    omega = load_config(config_path).omega();
  }
  const nvcorr::SinusoidFit fit = nvcorr::fit_sinusoid(trace, omega);
  nlohmann::ordered_json out;
  out["file"] = csv_path;
  out["omega_rad_s"] = omega;
  out["fit"] = nvcorr::fit_to_json(fit);
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& out_dir, std::uint64_t seed, bool quick) {
  const nvcorr::ValidationReport report = nvcorr::run_validation(seed, quick);
  for (const nvcorr::CheckResult& c : report.checks) {
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.id << "\n";
  }
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error(out_dir, "cannot create output directory");
    const fs::path path = fs::path(out_dir) / "validation.json";
    std::ofstream out(path);
    if (!out) throw io_error(path.string(), "cannot open for writing");
    out << report.to_json().dump(2) << "\n";
    std::cout << "report: " << path.string() << "\n";
  }
  std::cout << (report.all_pass() ? "all checks passed" : "validation FAILED") << "\n";
  return report.all_pass() ? kExitOk : kExitValidationFailure;
}

int cmd_geometry(const std::string& depth, int order, bool as_json) {
  const double d = nvcorr::parse_quantity(depth, nvcorr::Dimension::length);
  const nvcorr::GeometryIntegral g = nvcorr::hemisphere_integral(d, order);
  if (as_json) {
    nlohmann::ordered_json out{{"depth_m", d},
                               {"order", g.order},
                               {"ix", g.ix},
                               {"iy", g.iy},
                               {"i_f", g.i_f},
                               {"err_x", g.err_x},
                               {"err_y", g.err_y},
                               {"err_f", g.err_f},
                               {"converged", g.converged}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::printf("%-10s %22s %22s\n", "component", "value", "error");
    std::printf("%-10s %22.15e %22.15e\n", "I_x", g.ix, g.err_x);
    std::printf("%-10s %22.15e %22.15e\n", "I_y", g.iy, g.err_y);
    std::printf("%-10s %22.15e %22.15e\n", "I_f", g.i_f, g.err_f);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nvcorr: correlation-spectroscopy response of a shallow spin "
               "sensor under coherent RF control of nuclear spin noise"};
  app.require_subcommand(1);

  std::string config_path, engine, out_dir;
  int workers = 1;
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* sub, bool with_workers = true) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--engine", engine, "closed-form | quadrature | oracle");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed for Monte-Carlo modes");
    if (with_workers) {
      sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    }
  };

  CLI::App* sweep = app.add_subcommand("sweep", "evaluate the full (phi_rf, drive) grid");
  add_common(sweep);

  std::string phi_rf, theta, rabi;
  CLI::App* simulate = app.add_subcommand("simulate", "evaluate a single trace");
  add_common(simulate);
  simulate->add_option("--phi-rf", phi_rf, "drive phase at t = 0 (angle, e.g. pi/4)");
  simulate->add_option("--theta", theta, "rotation angle rabi * t_p (angle)");
  simulate->add_option("--rabi", rabi, "rabi frequency (e.g. 16.7 kHz)");

  std::string csv_path;
  double freq_hz = 0.0;
  CLI::App* fit = app.add_subcommand("fit", "fit an existing trace CSV");
  fit->add_option("csv", csv_path, "trace CSV path")->required();
  fit->add_option("--config", config_path, "config to derive the fit frequency from");
  fit->add_option("--freq-hz", freq_hz, "fit frequency in Hz (overrides metadata)");

  bool quick = false;
  CLI::App* validate = app.add_subcommand("validate", "run the reconciliation suite");
  validate->add_option("--out", out_dir, "directory for validation.json");
  validate->add_option("--seed", seed, "random seed for the suite");
  validate->add_flag("--quick", quick, "reduced draw counts");

  std::string depth = "5 nm";
  int order = 64;
  bool as_json = false;
  CLI::App* geometry = app.add_subcommand("geometry", "hemisphere geometry integrals");
  geometry->add_option("--depth", depth, "sensor depth (e.g. 5 nm)");
  geometry->add_option("--order", order, "quadrature order")->check(CLI::PositiveNumber);
  geometry->add_flag("--json", as_json, "emit JSON instead of columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(config_path, engine, out_dir, workers, seed);
    if (simulate->parsed()) {
      return cmd_simulate(config_path, engine, out_dir, phi_rf, theta, rabi, workers,
                          seed);
    }
    if (fit->parsed()) return cmd_fit(csv_path, config_path, freq_hz);
    if (validate->parsed()) return cmd_validate(out_dir, seed, quick);
    if (geometry->parsed()) return cmd_geometry(depth, order, as_json);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
