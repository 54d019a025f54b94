#include "qmem/eit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

constexpr cplx kI{0.0, 1.0};

std::string grid_summary(const FrequencyGrid& grid) {
  std::ostringstream os;
  os << "N_f=" << grid.size() << ", dDelta=" << grid.d_delta() << " rad/s, span=[" << grid.delta_min() << ", "
     << grid.delta_max() << "] rad/s";
  return os.str();
}

}  // namespace

cplx cw_line_shape(double Delta, double Omega, const LevelScheme& scheme, Polarization pol) {
  pol.validate();
  const SublevelTable X = dipole_weights(scheme, pol.beta);
  const double G = scheme.Gamma_cb();
  cplx S = 0.0;
  for (int m = X.min_m(); m <= X.max_m(); ++m) {
    const double x2 = X[m] * X[m];
    if (x2 == 0.0) continue;
    const double c = control_coupling(scheme, pol, m);
    const double w = c * c * Omega * Omega;
    if (w == 0.0) {
      // Uncoupled sublevel: the Delta factors cancel, leaving a two-level absorber.
      S += -x2 * G / (Delta + kI * G);
    } else {
      S += x2 * G * Delta / (w - Delta * (Delta + kI * G));
    }
  }
  return S;
}

cplx susceptibility_cw(double Delta, double z, double Omega, const LevelScheme& scheme, Polarization pol,
                       const MediumProfile& medium) {
  return (kSpeedOfLight / scheme.omega_c) * medium.depth_derivative_at(z) * cw_line_shape(Delta, Omega, scheme, pol);
}

TransmissionSpectrum transmission_spectrum(const LevelScheme& scheme, Polarization pol, const MediumProfile& medium,
                                           double Omega, std::span<const double> detunings) {
  scheme.validate();
  pol.validate();
  if (!(Omega >= 0.0) || !std::isfinite(Omega)) throw ValidationError("spectrum: Omega must be finite and >= 0");
  const double d = medium.total_depth();
  TransmissionSpectrum out;
  out.delta.assign(detunings.begin(), detunings.end());
  out.transmittance.reserve(detunings.size());
  for (double Delta : detunings) {
    if (!std::isfinite(Delta)) throw ValidationError("spectrum: non-finite detuning");
    const double T = std::exp(-d * cw_line_shape(Delta, Omega, scheme, pol).imag());
    out.transmittance.push_back(std::clamp(T, 0.0, 1.0));
  }
  return out;
}

TransmissionSpectrum transmission_spectrum(const LevelScheme& scheme, Polarization pol, const MediumProfile& medium,
                                           double Omega, const FrequencyGrid& grid) {
  const std::vector<double> d = grid.detunings();
  return transmission_spectrum(scheme, pol, medium, Omega, std::span<const double>(d));
}

ComplexVector pole_response(const FrequencyGrid& grid, double pole_shift, double gamma0) {
  if (!(gamma0 > 0.0)) throw ValidationError("kernel L: regularization gamma0 must be > 0");
  const std::size_t n = grid.size();
  std::vector<cplx> D(n), out(n);
  for (std::size_t k = 0; k < n; ++k) D[k] = 1.0 / (grid.detuning(k) + pole_shift + kI * gamma0);
  Eigen::FFT<double> fft;
  fft.fwd(out, D);
  ComplexVector g(static_cast<Eigen::Index>(n));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) g[static_cast<Eigen::Index>(j)] = (j % 2 == 0 ? inv_n : -inv_n) * out[j];
  return g;
}

ComplexMatrix kernel_L(const FrequencyGrid& grid, const ComplexVector& omega_t, double control_cg,
                       double pole_shift, double gamma0, ExecutionPolicy policy) {
  if (static_cast<std::size_t>(omega_t.size()) != grid.size()) throw ValidationError("kernel L: control size mismatch");
  const ComplexVector g = pole_response(grid, pole_shift, gamma0);
  const ComplexMatrix a = assemble_coupling_time(omega_t, g, control_cg * control_cg, policy);
  return to_frequency_operator(a, grid, policy);
}

KernelInverse kernel_K_inverse(const FrequencyGrid& grid, const ComplexMatrix& L, double excited_shift,
                               double Gamma_cb, int m, bool exact_residual) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (L.rows() != n || L.cols() != n) throw ValidationError("kernel K: L has the wrong shape");
  if (!(Gamma_cb > 0.0)) throw ValidationError("kernel K: Gamma_cb must be > 0");
  ComplexMatrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx w = 1.0 / (grid.detuning(static_cast<std::size_t>(i)) + excited_shift + kI * Gamma_cb);
    K.row(i) = -w * L.row(i);
    K(i, i) += 1.0;
  }
  if (!K.allFinite()) throw NumericalError("kernel K: non-finite entries for m=" + std::to_string(m));
  Eigen::PartialPivLU<ComplexMatrix> lu(K);
  KernelInverse out;
  out.rcond = lu.rcond();
  if (!(out.rcond >= 1e-12)) {
    std::ostringstream os;
    os << "kernel K ill-conditioned for m=" << m << " (condition ~" << (out.rcond > 0 ? 1.0 / out.rcond : INFINITY)
       << " > 1e12) on grid " << grid_summary(grid);
    throw NumericalError(os.str());
  }
  out.inverse = lu.inverse();
  if (exact_residual) {
    const ComplexMatrix e = K * out.inverse - ComplexMatrix::Identity(n, n);
    out.residual = e.norm() / std::sqrt(static_cast<double>(n));
  } else {
    // E ||E v||^2 = ||E||_F^2 for v with unit-variance complex Gaussian entries.
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    double acc = 0.0;
    constexpr int kProbes = 4;
    for (int p = 0; p < kProbes; ++p) {
      ComplexVector v(n);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(normal(rng), normal(rng));
      const ComplexVector r = K * (out.inverse * v) - v;
      acc += r.squaredNorm() / v.squaredNorm();
    }
    out.residual = std::sqrt(acc / kProbes);
  }
  if (!(out.residual <= 1e-8)) {
    std::ostringstream os;
    os << "kernel K inverse residual " << out.residual << " > 1e-8 for m=" << m << " on grid " << grid_summary(grid);
    throw NumericalError(os.str());
  }
  return out;
}

ChiOperator build_chi_operator(const FrequencyGrid& grid, const LevelScheme& scheme, Polarization pol,
                               const ControlProfile& control, const ZeemanConfig& zeeman,
                               const KernelOptions& options) {
  scheme.validate();
  pol.validate();
  control.validate();
  if (control.r != pol.r) throw ValidationError("chi: control polarization r differs from the configured polarization");
  const double gamma0 = options.gamma0_for(scheme);
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw ValidationError("chi: gamma0 must be > 0");
  if (!(options.storage_skip >= 0.0) || !std::isfinite(options.storage_skip)) {
    throw ValidationError("chi: storage_skip must be finite and >= 0");
  }
  if (options.storage_skip > 0.0 && !control.has_retrieval()) {
    throw ValidationError("chi: storage_skip needs a control with a retrieval edge");
  }
  const double t_last = grid.time(grid.size() - 1);
  if (control.shape == ControlShape::StepOffOn) {
    if (!control.is_on_at(grid.t_start()) || !control.is_on_at(t_last)) {
      throw ValidationError("chi: control must be fully on at both ends of the time window [" +
                            std::to_string(grid.t_start()) + ", " + std::to_string(t_last) + "] s");
    }
    if (control.edge < 2.0 * grid.dt()) {
      std::ostringstream os;
      os << "chi: control edges of " << control.edge << " s are too sharp for " << grid_summary(grid)
         << " (need at least two samples per edge)";
      throw ValidationError(os.str());
    }
    const double frac = out_of_band_fraction(grid, [&](double t) { return cplx(control.omega(t)); }, 4, true);
    if (frac > options.max_out_of_band) {
      std::ostringstream os;
      os << "chi: grid too coarse for the control: " << 100.0 * frac << "% of its switching energy lies outside "
         << grid_summary(grid);
      throw ValidationError(os.str());
    }
  }

  const auto n = static_cast<Eigen::Index>(grid.size());
  const double G = scheme.Gamma_cb();
  ComplexVector right(n);
  for (Eigen::Index k = 0; k < n; ++k) right[k] = 1.0 / (grid.detuning(static_cast<std::size_t>(k)) + kI * G);

  ChiOperator chi;
  chi.grid = grid;
  chi.beta = pol.beta;
  chi.gamma0 = gamma0;
  chi.storage_skip = options.storage_skip;
  chi.M = ComplexMatrix::Zero(n, n);

  const ComplexVector omega_base = control.sample_time(grid);
  const double split = control.split_time();
  const SublevelTable X = dipole_weights(scheme, pol.beta);
  for (int m = X.min_m(); m <= X.max_m(); ++m) {
    const double x2 = X[m] * X[m];
    const double cg = control_coupling(scheme, pol, m);
    if (x2 == 0.0) {
      chi.rcond.push_back(1.0);
      chi.residual.push_back(0.0);
      continue;
    }
    const double pole = zeeman.delta_a + m * zeeman.Delta_ab;
    const double excited = zeeman.delta_c + m * zeeman.Delta_cb;
    ComplexMatrix kinv;
    if (cg == 0.0 || control.Omega0 == 0.0) {
      // L = 0, so K = I.
      kinv = ComplexMatrix::Identity(n, n);
      chi.rcond.push_back(1.0);
      chi.residual.push_back(0.0);
    } else {
      ComplexVector omega_m = omega_base;
      if (options.storage_skip > 0.0) {
        const cplx phase = std::polar(1.0, pole * options.storage_skip);
        for (Eigen::Index i = 0; i < n; ++i) {
          if (grid.time(static_cast<std::size_t>(i)) > split) omega_m[i] *= phase;
        }
      }
      const ComplexMatrix L = kernel_L(grid, omega_m, cg, pole, gamma0, options.policy);
      KernelInverse ki = kernel_K_inverse(grid, L, excited, G, m);
      chi.rcond.push_back(ki.rcond);
      chi.residual.push_back(ki.residual);
      kinv = std::move(ki.inverse);
    }
    chi.M += (x2 * G) * (kinv * right.asDiagonal());
  }
  return chi;
}

ComplexMatrix susceptibility_td(const FrequencyGrid& grid, const MediumProfile& medium, const LevelScheme& scheme,
                                Polarization pol, const ControlProfile& control, const ZeemanConfig& zeeman,
                                double z, const KernelOptions& options) {
  const double dprime = medium.depth_derivative_at(z);
  if (dprime == 0.0) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    return ComplexMatrix::Zero(n, n);
  }
  const ChiOperator chi = build_chi_operator(grid, scheme, pol, control, zeeman, options);
  return (-(kSpeedOfLight / scheme.omega_c) * dprime) * chi.M;
}

namespace {

struct Integration {
  ComplexVector out;
  std::vector<std::pair<double, ComplexVector>> snapshots;
};

Integration integrate_rk4(const ComplexVector& phi0, const ChiOperator& chi, const MediumProfile& medium, int steps,
                          const std::vector<double>& snapshot_z, ExecutionPolicy policy) {
  const FrequencyGrid& grid = chi.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  ComplexVector free_phase(n);
  for (Eigen::Index k = 0; k < n; ++k) free_phase[k] = kI * grid.detuning(static_cast<std::size_t>(k)) / kSpeedOfLight;

  const double length = medium.length();
  const double h = length / steps;
  auto deriv = [&](double z, const ComplexVector& phi) -> ComplexVector {
    ComplexVector r = free_phase.cwiseProduct(phi);
    const double dprime = medium.depth_derivative_at(z);
    if (dprime != 0.0) r += (-0.5 * kI * dprime) * matvec(chi.M, phi, policy);
    return r;
  };

  std::vector<int> snap_steps;
  for (double zs : snapshot_z) {
    if (!(zs >= 0.0 && zs <= length)) throw ValidationError("propagate: snapshot z outside the medium");
    snap_steps.push_back(static_cast<int>(std::lround(length > 0 ? zs / h : 0.0)));
  }

  Integration res;
  ComplexVector phi = phi0;
  auto record = [&](int step) {
    for (std::size_t i = 0; i < snap_steps.size(); ++i) {
      if (snap_steps[i] == step) res.snapshots.emplace_back(step * h, phi);
    }
  };
  record(0);
  for (int s = 0; s < steps; ++s) {
    const double z = s * h;
    const ComplexVector k1 = deriv(z, phi);
    const ComplexVector k2 = deriv(z + 0.5 * h, phi + (0.5 * h) * k1);
    const ComplexVector k3 = deriv(z + 0.5 * h, phi + (0.5 * h) * k2);
    const ComplexVector k4 = deriv(z + h, phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(s + 1);
  }
  res.out = std::move(phi);
  return res;
}

// Applies the storage fast-path bookkeeping to a time-domain output.
void apply_skip(ComplexVector& out_t, const ChiOperator& chi, double split) {
  if (chi.storage_skip <= 0.0) return;
  const double decay = std::exp(-chi.gamma0 * chi.storage_skip);
  for (Eigen::Index i = 0; i < out_t.size(); ++i) {
    if (chi.grid.time(static_cast<std::size_t>(i)) > split) out_t[i] *= decay;
  }
}

double centroid(const ComplexVector& v, const std::vector<double>& t) {
  double w = 0.0, wt = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double p = std::norm(v[i]);
    w += p;
    wt += p * t[static_cast<std::size_t>(i)];
  }
  return w > 0.0 ? wt / w : 0.0;
}

}  // namespace

PropagationResult propagate(const SignalField& input, const ChiOperator& chi, const ControlProfile& control,
                            const MediumProfile& medium, const PropagationOptions& options) {
  if (options.z_steps < 1) throw ValidationError("propagate: z_steps must be >= 1");
  if (!(input.grid == chi.grid)) throw ValidationError("propagate: input grid differs from the operator grid");
  if (input.beta != chi.beta) throw ValidationError("propagate: input polarization differs from the operator");
  if (medium.z.size() < 2) throw ValidationError("propagate: medium profile is empty");
  const FrequencyGrid& grid = chi.grid;
  const SignalField in_t = input.in(Domain::Time);
  if (!in_t.samples.allFinite()) throw ValidationError("propagate: input has non-finite samples");
  const double peak = in_t.samples.cwiseAbs2().maxCoeff();
  if (!(peak > 0.0)) throw ValidationError("propagate: input field is zero");
  const double edge = std::max(std::norm(in_t.samples[0]), std::norm(in_t.samples[in_t.samples.size() - 1]));
  if (edge > 1e-6 * peak) throw ValidationError("propagate: input pulse is not contained in the time window");

  SpectralTransform tr(grid);
  const ComplexVector phi0 = tr.to_frequency(in_t.samples);
  const double split = control.split_time();

  PropagationResult res;
  Integration run = integrate_rk4(phi0, chi, medium, options.z_steps, options.snapshot_z, options.kernel.policy);
  ComplexVector out_t = tr.to_time(run.out);
  apply_skip(out_t, chi, split);

  ComplexVector vac(phi0.size());
  for (Eigen::Index k = 0; k < vac.size(); ++k) {
    vac[k] = phi0[k] * std::polar(1.0, grid.detuning(static_cast<std::size_t>(k)) * medium.length() / kSpeedOfLight);
  }

  res.output = SignalField{grid, out_t, Domain::Time, input.beta};
  res.vacuum = SignalField{grid, tr.to_time(vac), Domain::Time, input.beta};
  res.output_times = grid.times();
  if (chi.storage_skip > 0.0) {
    for (double& t : res.output_times) {
      if (t > split) t += chi.storage_skip;
    }
  }
  for (auto& [z, phi] : run.snapshots) {
    ComplexVector s = tr.to_time(phi);
    res.snapshots.push_back({z, SignalField{grid, std::move(s), Domain::Time, input.beta}});
  }

  res.input_energy = in_t.energy();
  res.output_energy = res.output.energy();
  res.transmitted_fraction = res.output_energy / res.input_energy;
  res.rcond = chi.rcond;
  if (!std::isfinite(res.output_energy)) throw NumericalError("propagate: output is not finite");
  if (res.transmitted_fraction > 1.0 + 1e-6) {
    throw NumericalError("propagate: output energy exceeds input (fraction " + std::to_string(res.transmitted_fraction) +
                         "); the grid does not resolve the problem");
  }
  const std::vector<double> grid_times = grid.times();
  res.group_delay = centroid(res.output.samples, res.output_times) - centroid(res.vacuum.samples, grid_times);
  if (control.has_retrieval()) {
    double e = 0.0;
    for (Eigen::Index i = 0; i < out_t.size(); ++i) {
      if (grid.time(static_cast<std::size_t>(i)) > split) e += std::norm(out_t[i]);
    }
    res.retrieval_efficiency = e * grid.dt() / res.input_energy;
  }

  if (options.check_convergence) {
    Integration fine = integrate_rk4(phi0, chi, medium, 2 * options.z_steps, {}, options.kernel.policy);
    ComplexVector fine_t = tr.to_time(fine.out);
    apply_skip(fine_t, chi, split);
    const double e2 = fine_t.squaredNorm() * grid.dt();
    const double denom = std::max(res.output_energy, 1e-300);
    res.convergence_change = std::abs(e2 - res.output_energy) / denom;
    if (res.convergence_change > options.convergence_tolerance) {
      throw NumericalError("propagate: not converged in z (halving the step changed output energy by " +
                           std::to_string(100.0 * res.convergence_change) + "%)");
    }
  }
  return res;
}

PropagationResult propagate(const SignalField& input, const ControlProfile& control, const MediumProfile& medium,
                            const LevelScheme& scheme, Polarization pol, const ZeemanConfig& zeeman,
                            const PropagationOptions& options) {
  if (input.beta != pol.beta) throw ValidationError("propagate: input polarization differs from configuration");
  const ChiOperator chi = build_chi_operator(input.grid, scheme, pol, control, zeeman, options.kernel);
  return propagate(input, chi, control, medium, options);
}

}  // namespace qmem
