#include "nvcorr/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "nvcorr/errors.hpp"
#include "nvcorr/oracle.hpp"

namespace nvcorr {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

double rf_start_phase(double phi_rf_at_origin, double omega_rf, double t1) {
  const double raw = std::fmod(phi_rf_at_origin + omega_rf * t1, kTwoPi);
  return raw < 0.0 ? raw + kTwoPi : raw;
}

double SinusoidFit::amplitude() const { return std::hypot(a, b); }
double SinusoidFit::phase() const { return std::atan2(-b, a); }

SinusoidFit fit_sinusoid(const std::vector<double>& t,
                         const std::vector<double>& y, double omega) {
  if (t.size() != y.size()) {
    throw std::invalid_argument("fit_sinusoid: length mismatch");
  }
  const int n = static_cast<int>(t.size());
  if (n < 4) throw std::domain_error("fit_sinusoid: need at least 4 points");

  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = std::cos(omega * t[i]);
    a(i, 1) = std::sin(omega * t[i]);
    a(i, 2) = 1.0;
    rhs(i) = y[i];
  }
  Eigen::Vector3d scale;
  for (int j = 0; j < 3; ++j) {
    const double norm = a.col(j).norm();
    scale(j) = norm > 0.0 ? 1.0 / norm : 1.0;
    a.col(j) *= scale(j);
  }
  const Eigen::Matrix3d gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > 1e-10 * lmax)) {
    const double span = t.back() - t.front();
    const double fraction = span * omega / kTwoPi;
    std::ostringstream msg;
    msg << "fit_sinusoid: basis is rank-deficient over this sweep (covers "
        << fraction * 100.0 << "% of one period); spread the sweep over at least "
        << format_double(0.05 * kTwoPi / omega) << " s";
    throw std::runtime_error(msg.str());
  }
  const Eigen::Vector3d sol = gram.ldlt().solve(a.transpose() * rhs);

  SinusoidFit fit;
  fit.a = sol(0) * scale(0);
  fit.b = sol(1) * scale(1);
  fit.c = sol(2) * scale(2);
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double model =
        fit.a * std::cos(omega * t[i]) + fit.b * std::sin(omega * t[i]) + fit.c;
    ss += (y[i] - model) * (y[i] - model);
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

SinusoidFit fit_sinusoid(const Trace& trace, double omega) {
  return fit_sinusoid(trace.tau_corr, trace.signal, omega);
}

QuadratureRatios relative_to(const SinusoidFit& fit, const SinusoidFit& reference) {
  // complex amplitudes z = a - i b; ratios = z / z_ref
  const double re = fit.a, im = -fit.b;
  const double rr = reference.a, ri = -reference.b;
  const double denom = rr * rr + ri * ri;
  if (!(denom > 0.0)) {
    throw std::domain_error("relative_to: reference fit has zero amplitude");
  }
  return {(re * rr + im * ri) / denom, (im * rr - re * ri) / denom};
}

namespace {

double engine_value(const ExperimentConfig& cfg, const EnsembleParams& params,
                    std::uint64_t seed, std::uint64_t point_tag) {
  switch (cfg.engine) {
    case Engine::closed_form:
      return ensemble_average_closed(params).value;
    case Engine::quadrature:
      if (cfg.ensemble.monte_carlo) {
        return ensemble_average_monte_carlo(params, cfg.ensemble.mc_samples,
                                            seed ^ (point_tag * 0x9e3779b97f4a7c15ULL))
            .value;
      }
      return ensemble_average_quadrature(params, cfg.ensemble.alpha_nodes,
                                         cfg.ensemble.beta_nodes)
          .value;
    case Engine::oracle: {
      EndToEndOptions opt;
      opt.alpha_nodes = cfg.oracle.alpha_nodes;
      opt.beta_nodes = cfg.oracle.beta_nodes;
      opt.steps_per_period = cfg.oracle.steps_per_period;
      opt.rf_z_field_ratio = cfg.oracle.include_rf_z ? cfg.oracle.rf_z_field_ratio : 0.0;
      return end_to_end_oracle(params, opt).signal.value;
    }
  }
  return 0.0;
}

struct Job {
  int trace_index;   // index into the flat trace array (references appended last)
  int point_index;
};

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, int workers, std::uint64_t seed) {
  if (workers < 1) throw std::domain_error("run_sweep: workers must be >= 1");
  const double omega = cfg.omega();
  const double k = EnsembleParams{omega, cfg.sample.b_max,
                                  cfg.constants.gamma_e_abs(), {}, 0.0}
                       .prefactor_k();

  struct Pending {
    TraceMeta meta;
    EnsembleParams params;  // tau_corr filled per point
  };
  std::vector<Pending> pending;
  const auto make_drive = [&](double rabi, double phi_rf) {
    RfDrive d;
    d.omega_x = rabi;
    d.omega_y = rabi * cfg.misalignment_ratio;
    // rabi is the total effective rate; split so hypot matches it
    const double scale = cfg.misalignment_ratio == 0.0
                             ? 1.0
                             : 1.0 / std::hypot(1.0, cfg.misalignment_ratio);
    d.omega_x *= scale;
    d.omega_y *= scale;
    d.omega_rf = omega;
    d.phi_rf = phi_rf;
    d.t_p = cfg.t_p;
    return d;
  };
  const auto make_meta = [&](double phi_rf, double rabi, bool reference) {
    TraceMeta m;
    m.phi_rf = phi_rf;
    m.rabi = rabi;
    m.rotation_angle = rabi * cfg.t_p;
    if (cfg.vpp && rabi > 0.0) {
      m.vpp = (rabi / kTwoPi - cfg.vpp->intercept_hz) / cfg.vpp->slope_hz_per_vpp;
    }
    m.engine = cfg.engine;
    m.omega = omega;
    m.t_p = cfg.t_p;
    m.b_max = cfg.sample.b_max;
    m.prefactor_k = k;
    m.is_reference = reference;
    return m;
  };

  for (double phi : cfg.phi_rf) {
    for (double value : cfg.drive_values) {
      const double rabi = cfg.rabi_of(value);
      pending.push_back({make_meta(phi, rabi, false),
                         EnsembleParams{omega, cfg.sample.b_max,
                                        cfg.constants.gamma_e_abs(),
                                        make_drive(rabi, phi), 0.0}});
    }
  }
  for (double phi : cfg.phi_rf) {
    pending.push_back({make_meta(phi, 0.0, true),
                       EnsembleParams{omega, cfg.sample.b_max,
                                      cfg.constants.gamma_e_abs(),
                                      make_drive(0.0, phi), 0.0}});
  }

  const int n_traces = static_cast<int>(pending.size());
  const int n_points = cfg.tau_corr.count;
  std::vector<std::vector<double>> signals(n_traces,
                                           std::vector<double>(n_points, 0.0));

  std::vector<Job> jobs;
  jobs.reserve(static_cast<size_t>(n_traces) * n_points);
  for (int ti = 0; ti < n_traces; ++ti) {
    for (int pi = 0; pi < n_points; ++pi) jobs.push_back({ti, pi});
  }

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  const auto worker = [&]() {
    for (;;) {
      const size_t j = next.fetch_add(1);
      if (j >= jobs.size() || failed.load()) break;
      const Job& job = jobs[j];
      try {
        EnsembleParams params = pending[job.trace_index].params;
        params.tau_corr = cfg.tau_corr.at(job.point_index) + cfg.tau_corr_offset;
        const std::uint64_t tag =
            static_cast<std::uint64_t>(job.trace_index) * 100003ULL + job.point_index;
        double v = engine_value(cfg, params, seed, tag);
        if (cfg.pl_sign_flip) v = -v;
        signals[job.trace_index][job.point_index] = v;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          error_message = std::string(e.what()) + " [trace " +
                          std::to_string(job.trace_index) + ", point " +
                          std::to_string(job.point_index) + "]";
        }
        break;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("run_sweep: " + error_message);

  SweepResult result;
  result.config = cfg;
  result.seed = seed;
  std::vector<TraceResult> flat(n_traces);
  for (int ti = 0; ti < n_traces; ++ti) {
    Trace tr;
    tr.meta = pending[ti].meta;
    tr.tau_corr.resize(n_points);
    for (int pi = 0; pi < n_points; ++pi) tr.tau_corr[pi] = cfg.tau_corr.at(pi);
    tr.signal = signals[ti];
    flat[ti].trace = std::move(tr);
    flat[ti].fit = fit_sinusoid(flat[ti].trace, omega);
  }
  const int n_main = static_cast<int>(cfg.phi_rf.size() * cfg.drive_values.size());
  const int n_drives = static_cast<int>(cfg.drive_values.size());
  for (int ti = 0; ti < n_traces; ++ti) {
    const int phi_index = ti < n_main ? ti / n_drives : ti - n_main;
    const SinusoidFit& ref = flat[n_main + phi_index].fit;
    flat[ti].ratios = relative_to(flat[ti].fit, ref);
  }
  result.traces.assign(flat.begin(), flat.begin() + n_main);
  result.references.assign(flat.begin() + n_main, flat.end());
  return result;
}

namespace {

void write_trace_csv(const fs::path& path, const Trace& tr) {
  std::ofstream out(path);
  if (!out) throw io_error(path.string(), "cannot open trace file for writing");
  out << "# nvcorr trace\n";
  out << "# engine=" << engine_name(tr.meta.engine) << "\n";
  out << "# phi_rf_rad=" << format_double(tr.meta.phi_rf) << "\n";
  out << "# rabi_rad_s=" << format_double(tr.meta.rabi) << "\n";
  out << "# rotation_angle_rad=" << format_double(tr.meta.rotation_angle) << "\n";
  if (tr.meta.vpp) out << "# vpp=" << format_double(*tr.meta.vpp) << "\n";
  out << "# omega_rad_s=" << format_double(tr.meta.omega) << "\n";
  out << "# t_p_s=" << format_double(tr.meta.t_p) << "\n";
  out << "# b_max_t=" << format_double(tr.meta.b_max) << "\n";
  out << "# prefactor_k=" << format_double(tr.meta.prefactor_k) << "\n";
  out << "tau_corr_s,signal\n";
  for (size_t i = 0; i < tr.tau_corr.size(); ++i) {
    out << format_double(tr.tau_corr[i]) << "," << format_double(tr.signal[i]) << "\n";
  }
  if (!out) throw io_error(path.string(), "write failed");
}

}  // namespace

ordered_json fit_to_json(const SinusoidFit& fit) {
  return {{"a", fit.a},
          {"b", fit.b},
          {"c", fit.c},
          {"amplitude", fit.amplitude()},
          {"phase_rad", fit.phase()},
          {"rms_residual", fit.rms_residual}};
}

std::string write_outputs(const SweepResult& result, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error(out_dir, "cannot create output directory: " + ec.message());

  ordered_json summary;
  summary["engine"] = engine_name(result.config.engine);
  summary["omega_rad_s"] = result.config.omega();
  summary["prefactor_k"] =
      result.traces.empty()
          ? (result.references.empty() ? 0.0 : result.references[0].trace.meta.prefactor_k)
          : result.traces[0].trace.meta.prefactor_k;
  summary["seed"] = result.seed;
  summary["config"] = config_echo(result.config);

  const int n_drives = static_cast<int>(result.config.drive_values.size());
  ordered_json traces = ordered_json::array();
  for (size_t i = 0; i < result.traces.size(); ++i) {
    const TraceResult& tr = result.traces[i];
    const int pi = static_cast<int>(i) / n_drives;
    const int di = static_cast<int>(i) % n_drives;
    const std::string file =
        "trace_p" + std::to_string(pi) + "_d" + std::to_string(di) + ".csv";
    write_trace_csv(fs::path(out_dir) / file, tr.trace);
    ordered_json t;
    t["file"] = file;
    t["phi_rf_rad"] = tr.trace.meta.phi_rf;
    t["rabi_rad_s"] = tr.trace.meta.rabi;
    t["rotation_angle_rad"] = tr.trace.meta.rotation_angle;
    if (tr.trace.meta.vpp) t["vpp"] = *tr.trace.meta.vpp;
    t["fit"] = fit_to_json(tr.fit);
    t["ratio_in_phase"] = tr.ratios.in_phase;
    t["ratio_quadrature"] = tr.ratios.quadrature;
    traces.push_back(t);
  }
  summary["traces"] = traces;

  ordered_json refs = ordered_json::array();
  for (size_t i = 0; i < result.references.size(); ++i) {
    const TraceResult& tr = result.references[i];
    const std::string file = "trace_p" + std::to_string(i) + "_ref.csv";
    write_trace_csv(fs::path(out_dir) / file, tr.trace);
    ordered_json t;
    t["file"] = file;
    t["phi_rf_rad"] = tr.trace.meta.phi_rf;
    t["fit"] = fit_to_json(tr.fit);
    refs.push_back(t);
  }
  summary["references"] = refs;

  const fs::path summary_path = fs::path(out_dir) / "summary.json";
  std::ofstream out(summary_path);
  if (!out) throw io_error(summary_path.string(), "cannot open summary for writing");
  out << summary.dump(2) << "\n";
  if (!out) throw io_error(summary_path.string(), "write failed");
  return summary_path.string();
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path, "cannot open trace file");
  Trace tr;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const size_t eq = line.find('=');
      if (eq != std::string::npos) {
        const std::string key = line.substr(2, eq - 2);
        const std::string value = line.substr(eq + 1);
        try {
          if (key == "phi_rf_rad") tr.meta.phi_rf = std::stod(value);
          else if (key == "rabi_rad_s") tr.meta.rabi = std::stod(value);
          else if (key == "rotation_angle_rad") tr.meta.rotation_angle = std::stod(value);
          else if (key == "vpp") tr.meta.vpp = std::stod(value);
          else if (key == "omega_rad_s") tr.meta.omega = std::stod(value);
          else if (key == "t_p_s") tr.meta.t_p = std::stod(value);
          else if (key == "b_max_t") tr.meta.b_max = std::stod(value);
          else if (key == "prefactor_k") tr.meta.prefactor_k = std::stod(value);
          else if (key == "engine") tr.meta.engine = engine_from_name(value);
        } catch (const std::invalid_argument&) {
          throw io_error(path, "malformed metadata line '" + line + "'");
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line.rfind("tau_corr_s", 0) != 0) {
        throw io_error(path, "missing 'tau_corr_s,signal' header");
      }
      header_seen = true;
      continue;
    }
    const size_t comma = line.find(',');
    if (comma == std::string::npos) throw io_error(path, "malformed data line '" + line + "'");
    try {
      tr.tau_corr.push_back(std::stod(line.substr(0, comma)));
      tr.signal.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw io_error(path, "malformed data line '" + line + "'");
    }
  }
  if (tr.tau_corr.empty()) throw io_error(path, "no data rows");
  for (size_t i = 1; i < tr.tau_corr.size(); ++i) {
    if (!(tr.tau_corr[i] > tr.tau_corr[i - 1])) {
      throw io_error(path, "tau_corr column must be strictly increasing");
    }
  }
  return tr;
}

}  // namespace nvcorr
