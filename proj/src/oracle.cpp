#include "nvcorr/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "nvcorr/quadrature.hpp"

namespace nvcorr {

using Eigen::Matrix2cd;
using cplx = std::complex<double>;

BlochProblem BlochProblem::from_rabi(const Vec3& m0, double omega, double rabi_x,
                                     double rabi_y, double omega_rf, double phi_rf,
                                     double t_span, int steps_per_period) {
  BlochProblem p;
  p.m0 = m0;
  p.gamma = 1.0;  // field amplitudes below are pre-multiplied angular rates
  p.b_ext = omega;
  p.b_rf_x = 2.0 * rabi_x;  // linear drive, co-rotating half drives the nutation
  p.b_rf_y = 2.0 * rabi_y;
  p.omega_rf = omega_rf;
  p.phi_rf = phi_rf;
  p.t_span = t_span;
  const double period = kTwoPi / std::abs(omega);
  p.dt = period / steps_per_period;
  return p;
}

double BlochProblem::larmor_period() const {
  return kTwoPi / std::abs(gamma * b_ext);
}

void BlochProblem::validate() const {
  if (!(t_span >= 0.0)) throw std::domain_error("BlochProblem: t_span must be >= 0");
  if (!(dt > 0.0)) throw std::domain_error("BlochProblem: dt must be > 0");
  if (gamma * b_ext != 0.0 && dt > larmor_period() / 1000.0 * (1.0 + 1e-12)) {
    throw std::domain_error(
        "BlochProblem: step size exceeds larmor period / 1000");
  }
}

namespace {

struct DriveTerms {
  double ax, ay, az;  // angular-rate amplitudes gamma * b_rf
  double az_static;   // gamma * b_ext
  double omega_rf, phi_rf;
};

inline Vec3 bloch_rhs(const DriveTerms& d, double t, const Vec3& m) {
  const double c = std::cos(d.omega_rf * t + d.phi_rf);
  const Vec3 w(d.ax * c, d.ay * c, d.az_static + d.az * c);
  return w.cross(m);
}

// RK4 march of n steps over [t0, t0 + span]; optionally records m_x at every
// node (n + 1 samples) for window integration.
Vec3 advance(const DriveTerms& d, Vec3 m, double t0, double span, int n,
             std::vector<double>* mx = nullptr) {
  const double h = span / n;
  if (mx) {
    mx->clear();
    mx->reserve(n + 1);
    mx->push_back(m.x());
  }
  double t = t0;
  for (int i = 0; i < n; ++i) {
    const Vec3 k1 = bloch_rhs(d, t, m);
    const Vec3 k2 = bloch_rhs(d, t + 0.5 * h, m + 0.5 * h * k1);
    const Vec3 k3 = bloch_rhs(d, t + 0.5 * h, m + 0.5 * h * k2);
    const Vec3 k4 = bloch_rhs(d, t + h, m + h * k3);
    m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + (i + 1) * h;
    if (mx) mx->push_back(m.x());
  }
  return m;
}

double simpson(const std::vector<double>& y, double h) {
  const size_t n = y.size() - 1;
  double s = y.front() + y.back();
  std::vector<double> odd, even;
  for (size_t i = 1; i < n; i += 2) odd.push_back(y[i]);
  for (size_t i = 2; i < n; i += 2) even.push_back(y[i]);
  s += 4.0 * pairwise_sum(odd) + 2.0 * pairwise_sum(even);
  return s * h / 3.0;
}

// Even step count at the requested per-period resolution.
int even_steps(double span, double period, int steps_per_period) {
  int n = static_cast<int>(std::ceil(span / period * steps_per_period * 0.5)) * 2;
  return n < 2 ? 2 : n;
}

DriveTerms terms_of(const BlochProblem& p) {
  return {p.gamma * p.b_rf_x, p.gamma * p.b_rf_y, p.gamma * p.b_rf_z,
          p.gamma * p.b_ext, p.omega_rf, p.phi_rf};
}

}  // namespace

BlochTrajectory integrate_bloch(const BlochProblem& problem) {
  problem.validate();
  const DriveTerms d = terms_of(problem);
  const int n = std::max(1, static_cast<int>(std::llround(problem.t_span / problem.dt)));
  BlochTrajectory traj;
  traj.dt = problem.t_span / n;
  traj.m.reserve(n + 1);
  traj.m.push_back(problem.m0);
  Vec3 m = problem.m0;
  const double h = traj.dt;
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    const Vec3 k1 = bloch_rhs(d, t, m);
    const Vec3 k2 = bloch_rhs(d, t + 0.5 * h, m + 0.5 * h * k1);
    const Vec3 k3 = bloch_rhs(d, t + 0.5 * h, m + 0.5 * h * k2);
    const Vec3 k4 = bloch_rhs(d, t + h, m + h * k3);
    m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    traj.m.push_back(m);
  }
  return traj;
}

double BlochTrajectory::max_norm_drift() const {
  double worst = 0.0;
  for (const Vec3& v : m) worst = std::max(worst, std::abs(1.0 - v.norm()));
  return worst;
}

namespace {

Matrix2cd pauli_x() { Matrix2cd s; s << 0, 1, 1, 0; return s; }
Matrix2cd pauli_y() { Matrix2cd s; s << 0, cplx(0, -1), cplx(0, 1), 0; return s; }
Matrix2cd pauli_z() { Matrix2cd s; s << 1, 0, 0, -1; return s; }

Matrix2cd exp_pauli(const Matrix2cd& sigma, double a) {  // exp(-i a sigma)
  return std::cos(a) * Matrix2cd::Identity() - cplx(0, 1) * std::sin(a) * sigma;
}

}  // namespace

QubitPropagator QubitPropagator::correlation_sequence(const PhaseSet& p) {
  const double q = 0.25 * kPi;
  QubitPropagator u;
  u.factors = {exp_pauli(pauli_x(), q), pauli_y(),
               exp_pauli(pauli_z(), 0.5 * p.phi4), exp_pauli(pauli_y(), q),
               exp_pauli(pauli_z(), 0.5 * p.phi2), exp_pauli(pauli_z(), 0.5 * p.phi3),
               exp_pauli(pauli_x(), q), pauli_y(),
               exp_pauli(pauli_z(), 0.5 * p.phi1), exp_pauli(pauli_y(), q)};
  return u;
}

Matrix2cd QubitPropagator::product() const {
  Matrix2cd u = Matrix2cd::Identity();
  for (const Matrix2cd& f : factors) u = u * f;
  return u;
}

double QubitPropagator::max_unitarity_defect() const {
  double worst = 0.0;
  for (const Matrix2cd& f : factors) {
    worst = std::max(worst, (f * f.adjoint() - Matrix2cd::Identity())
                                .cwiseAbs()
                                .maxCoeff());
  }
  worst = std::max(worst, (product() * product().adjoint() - Matrix2cd::Identity())
                              .cwiseAbs()
                              .maxCoeff());
  return worst;
}

double readout_from_propagator(const PhaseSet& phases) {
  const Matrix2cd u = QubitPropagator::correlation_sequence(phases).product();
  const Eigen::Vector2cd init(0.0, 1.0);  // initialized level: sigma_z = -1
  const Eigen::Vector2cd psi = u * init;
  return (psi.adjoint() * pauli_z() * psi)(0, 0).real();
}

PhaseSet bloch_pipeline_phases(const ProtocolParams& p, int steps_per_period,
                               double rf_z_field_ratio) {
  const double period = kTwoPi / p.omega;
  const double tau = p.timing.tau;
  const double tp = p.timing.t_p;
  const double tc = p.timing.tau_corr;
  const Vec3 m0 = Magnetization::from_angles(p.angles).v;

  const DriveTerms free_terms{0.0, 0.0, 0.0, p.omega, 0.0, 0.0};
  // Drive at the effective angular amplitudes; the burst phase is referred
  // to the start of the driven evolution, matching the start-phase
  // compensation applied in hardware.
  const DriveTerms drive_terms{2.0 * p.drive.omega_x, 2.0 * p.drive.omega_y,
                               2.0 * p.drive.omega_x * rf_z_field_ratio,
                               p.omega, p.drive.omega_rf, p.drive.phi_rf};

  PhaseSet out;
  std::vector<double> mx;

  // Stage 1: free precession over [0, 2 tau]; echo windows [0,tau],[tau,2tau].
  Vec3 m1 = m0;
  if (tau > 0.0) {
    const int n = even_steps(tau, period, steps_per_period);
    const double h = tau / n;
    Vec3 mid = advance(free_terms, m0, 0.0, tau, n, &mx);
    const double seg_a = simpson(mx, h);
    m1 = advance(free_terms, mid, tau, tau, n, &mx);
    const double seg_b = simpson(mx, h);
    out.phi1 = p.gamma_e_abs * p.b_max * (seg_a - seg_b);
  }

  // Stage 2 field run: drive on over [0, 2 tau + t_p] from m1, window
  // [2 tau, 2 tau + t_p].
  if (tp > 0.0) {
    const int na = even_steps(2.0 * tau, period, steps_per_period);
    const Vec3 at_window = advance(drive_terms, m1, 0.0, 2.0 * tau, na);
    const int nb = even_steps(tp, period, steps_per_period);
    advance(drive_terms, at_window, 2.0 * tau, tp, nb, &mx);
    out.phi2 = p.gamma_e_abs * p.b_max * simpson(mx, tp / nb);
  }

  // Stage 2 state run: drive over [0, t_p] from m1 gives the post-pulse state.
  Vec3 m2 = m1;
  if (tp > 0.0) {
    const int n = even_steps(tp, period, steps_per_period);
    m2 = advance(drive_terms, m1, 0.0, tp, n);
  }

  // Stage 3: free precession from m2; windows on the same global clock,
  // [2tau+tp, +tc] for phi3 and the trailing echo pair for phi4.
  {
    double t0 = 0.0;
    Vec3 m = m2;
    const double lead = 2.0 * tau + tp;
    if (lead > 0.0) {
      const int n = even_steps(lead, period, steps_per_period);
      m = advance(free_terms, m, t0, lead, n);
      t0 += lead;
    }
    if (tc > 0.0) {
      const int n = even_steps(tc, period, steps_per_period);
      m = advance(free_terms, m, t0, tc, n, &mx);
      out.phi3 = p.gamma_e_abs * p.b_max * simpson(mx, tc / n);
      t0 += tc;
    }
    if (tau > 0.0) {
      const int n = even_steps(tau, period, steps_per_period);
      const double h = tau / n;
      m = advance(free_terms, m, t0, tau, n, &mx);
      const double seg_a = simpson(mx, h);
      t0 += tau;
      advance(free_terms, m, t0, tau, n, &mx);
      const double seg_b = simpson(mx, h);
      out.phi4 = p.gamma_e_abs * p.b_max * (seg_a - seg_b);
    }
  }
  return out;
}

EndToEndResult end_to_end_oracle(const EnsembleParams& params,
                                 const EndToEndOptions& options) {
  if (!(params.omega > 0.0)) {
    throw std::domain_error("end_to_end_oracle: omega must be positive");
  }
  EndToEndResult result;
  result.phase_scale = 4.0 * params.b_max * params.gamma_e_abs / params.omega;
  result.regime_warning = params.b_max * params.gamma_e_abs / params.omega > 1e-2;

  const int spp = std::max(options.steps_per_period, 1000);
  const auto eval = [&](double alpha, double beta) {
    const PhaseSet ph = bloch_pipeline_phases(
        params.at(EnsembleAngles(alpha, beta)), spp, options.rf_z_field_ratio);
    return readout_from_propagator(ph);
  };

  double value = 0.0;
  double err = 0.0;
  if (options.monte_carlo) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> vals;
    vals.reserve(options.mc_samples);
    for (int i = 0; i < options.mc_samples; ++i) {
      vals.push_back(eval(kPi * u01(rng), kTwoPi * u01(rng)));
    }
    const double mean = pairwise_sum(vals) / vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (vals.size() - 1.0);
    value = 0.5 * kPi * mean;
    err = 0.5 * kPi * std::sqrt(var / vals.size());
    result.signal = {value, params.prefactor_k(), AverageMethod::monte_carlo, err};
  } else {
    const GaussLegendre& gl = gauss_legendre(options.alpha_nodes);
    std::vector<double> parts;
    parts.reserve(static_cast<size_t>(options.alpha_nodes) * options.beta_nodes);
    for (int ia = 0; ia < options.alpha_nodes; ++ia) {
      const double alpha = 0.5 * kPi * (gl.nodes[ia] + 1.0);
      const double w_alpha = 0.5 * kPi * gl.weights[ia];
      for (int ib = 0; ib < options.beta_nodes; ++ib) {
        const double beta = kTwoPi * ib / options.beta_nodes;
        parts.push_back(w_alpha * (kTwoPi / options.beta_nodes) * eval(alpha, beta));
      }
    }
    value = pairwise_sum(parts) / (4.0 * kPi);
    result.signal = {value, params.prefactor_k(), AverageMethod::quadrature, 0.0};
  }
  return result;
}

}  // namespace nvcorr
