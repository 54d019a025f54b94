#include "qmem/polariton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace qmem {

namespace {

void require_eit(const LevelScheme& scheme, Polarization pol) {
  scheme.validate();
  pol.validate();
  if (!pol.matched()) throw ValidationError("dark-state polariton requires equal signal and control polarizations");
}

// CG ratios C^{Fb 1 Fc}_{m beta m+beta} / C^{Fa 1 Fc}_{m+beta-r r m+beta}.
SublevelTable cg_ratios(const LevelScheme& scheme, Polarization pol) {
  require_eit(scheme, pol);
  SublevelTable rho(scheme.F_b);
  for (int m = -scheme.F_b; m <= scheme.F_b; ++m) {
    const double num = signal_coupling(scheme, pol.beta, m);
    if (num == 0.0) continue;  // sublevel not coupled to the signal
    const double den = control_coupling(scheme, pol, m);
    if (den == 0.0) {
      throw ValidationError("no dark state for this scheme/polarization (control coefficient vanishes for m=" +
                            std::to_string(m) + ")");
    }
    rho[m] = num / den;
  }
  return rho;
}

}  // namespace

SublevelTable spin_wave_weights(const LevelScheme& scheme, Polarization pol) {
  SublevelTable rho = cg_ratios(scheme, pol);
  double sum = 0.0;
  for (double v : rho.values()) sum += v * v;
  if (!(sum > 0.0)) throw ValidationError("no dark state for this scheme/polarization (no coupled sublevel)");
  SublevelTable p(scheme.F_b);
  for (int m = -scheme.F_b; m <= scheme.F_b; ++m) p[m] = rho[m] * rho[m] / sum;
  return p;
}

PolaritonDecomposition dsp_decompose(double Omega, double collective_coupling, const LevelScheme& scheme,
                                     Polarization pol) {
  if (!std::isfinite(Omega) || !std::isfinite(collective_coupling) || collective_coupling < 0.0) {
    throw ValidationError("dsp: Omega must be finite and the collective coupling finite and >= 0");
  }
  const SublevelTable rho = cg_ratios(scheme, pol);
  double sum = 0.0;
  for (double v : rho.values()) sum += v * v;
  if (!(sum > 0.0)) throw ValidationError("no dark state for this scheme/polarization (no coupled sublevel)");

  PolaritonDecomposition d;
  const double omega2 = Omega * Omega;
  const double atom2 = collective_coupling * collective_coupling * sum;
  if (omega2 + atom2 == 0.0) throw ValidationError("dsp: Omega and collective coupling both vanish");
  d.photonic_weight = omega2 / (omega2 + atom2);
  d.atomic_weight = atom2 / (omega2 + atom2);
  d.spin_wave.F_b = scheme.F_b;
  d.weights = SublevelTable(scheme.F_b);
  const double inv = 1.0 / std::sqrt(sum);
  for (int m = -scheme.F_b; m <= scheme.F_b; ++m) {
    d.spin_wave.amplitudes.emplace_back(rho[m] * inv, 0.0);
    d.weights[m] = rho[m] * rho[m] / sum;
  }
  return d;
}

double polariton_number(double t, const ZeemanConfig& zeeman, const LevelScheme& scheme, Polarization pol) {
  if (!std::isfinite(t)) throw ValidationError("polariton number: t must be finite");
  const SublevelTable p = spin_wave_weights(scheme, pol);
  // sum_{m,m'} p_m p_m' cos((m-m') w t) = |sum_m p_m e^{i m w t}|^2
  std::complex<double> s = 0.0;
  for (int m = p.min_m(); m <= p.max_m(); ++m) s += p[m] * std::polar(1.0, m * zeeman.Delta_ab * t);
  return std::norm(s);
}

CollapseCurve collapse_curve(std::span<const double> times, const ZeemanConfig& zeeman, const LevelScheme& scheme,
                             Polarization pol) {
  CollapseCurve c;
  c.times.assign(times.begin(), times.end());
  for (double t : times) c.values.push_back(polariton_number(t, zeeman, scheme, pol));
  return c;
}

double eta_squared(const LevelScheme& scheme, Polarization pol) {
  const SublevelTable p = spin_wave_weights(scheme, pol);
  double acc = 0.0;
  for (int m = p.min_m(); m <= p.max_m(); ++m) {
    for (int mp = p.min_m(); mp <= p.max_m(); ++mp) acc += p[m] * p[mp] * (m - mp) * (m - mp);
  }
  return acc;
}

double revival_time(const ZeemanConfig& zeeman, FieldOrientation orientation, double n, bool allow_half_integer) {
  if (!std::isfinite(n) || n < 0.0) throw ValidationError("revival: index n must be finite and >= 0");
  const double twice = 2.0 * n;
  if (allow_half_integer) {
    if (twice != std::round(twice)) throw ValidationError("revival: n must be an integer or half-integer");
  } else if (n != std::round(n)) {
    throw ValidationError("revival: n must be an integer (enable half-integer indices for that field geometry)");
  }
  if (zeeman.B_z == 0.0 || zeeman.Delta_ab == 0.0) throw ValidationError("no Larmor period (zero ground splitting)");
  const double t_par = 2.0 * std::numbers::pi * n / std::abs(zeeman.Delta_ab);
  return orientation == FieldOrientation::Parallel ? t_par : 2.0 * t_par;
}

CollapseFit fit_collapse(std::span<const CollapseSample> samples, const FitOptions& options) {
  if (samples.size() < 3) throw ValidationError("fit: need at least 3 samples");
  double t_scale = 0.0;
  for (const auto& s : samples) {
    if (!std::isfinite(s.t) || !std::isfinite(s.g_si)) throw ValidationError("fit: non-finite sample");
    if (!(s.sigma > 0.0)) throw ValidationError("fit: sigma must be > 0");
    if (s.g_si < 1.0 - options.noise_tolerance) {
      throw ValidationError("fit: g_si = " + std::to_string(s.g_si) + " lies below 1 - noise tolerance");
    }
    t_scale = std::max(t_scale, std::abs(s.t));
  }
  if (!(t_scale > 0.0)) throw ValidationError("fit: all samples at t = 0");

  const std::size_t n = samples.size();
  std::vector<double> u(n), y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = samples[i].t / t_scale;
    y[i] = samples[i].g_si;
    w[i] = 1.0 / (samples[i].sigma * samples[i].sigma);
  }

  auto cost_of = [&](double B, double tau) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (1.0 + B * std::exp(-u[i] * u[i] / (tau * tau)));
      c += w[i] * r * r;
    }
    return c;
  };
  auto rms_of = [&](double B, double tau) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double model = std::isinf(tau) ? 1.0 + B : 1.0 + B * std::exp(-u[i] * u[i] / (tau * tau));
      c += (y[i] - model) * (y[i] - model);
    }
    return std::sqrt(c / static_cast<double>(n));
  };

  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  const double y_max = *ymax_it;
  CollapseFit fit;

  if (y_max - *ymin_it <= 1e-12 * std::max(1.0, std::abs(y_max))) {
    // Flat data: amplitude is the offset, tau is not determined.
    fit.B = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n) - 1.0;
    fit.tau = std::numeric_limits<double>::infinity();
    fit.tau_identifiable = false;
    fit.converged = true;
    fit.rms_residual = rms_of(fit.B, fit.tau);
    return fit;
  }

  // Initial guesses: B0 = max(g) - 1, tau0 where g first falls to 1 + B0/e.
  double B = y_max - 1.0;
  double tau = 1.0;
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(u[a]) < std::abs(u[b]); });
    const double level = 1.0 + B / std::numbers::e;
    for (std::size_t k = 1; k < n; ++k) {
      const std::size_t i0 = order[k - 1], i1 = order[k];
      if (y[i1] <= level && y[i0] > level) {
        const double f = (y[i0] - level) / (y[i0] - y[i1]);
        tau = std::abs(u[i0]) + f * (std::abs(u[i1]) - std::abs(u[i0]));
        break;
      }
    }
    tau = std::max(tau, 1e-3);
  }

  double lambda = 1e-3;
  double cost = cost_of(B, tau);
  for (int it = 0; it < options.max_iterations; ++it) {
    fit.iterations = it + 1;
    double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-u[i] * u[i] / (tau * tau));
      const double r = y[i] - (1.0 + B * e);
      const double jB = e;
      const double jt = B * e * 2.0 * u[i] * u[i] / (tau * tau * tau);
      a11 += w[i] * jB * jB;
      a12 += w[i] * jB * jt;
      a22 += w[i] * jt * jt;
      g1 += w[i] * jB * r;
      g2 += w[i] * jt * r;
    }
    const double grad = std::hypot(g1, g2 * tau);
    if (grad <= 1e-13 * (1.0 + std::sqrt(cost)) * std::sqrt(a11 + 1e-300) || cost == 0.0) {
      fit.converged = true;
      break;
    }
    bool accepted = false;
    while (lambda < 1e16) {
      const double m11 = a11 * (1.0 + lambda), m22 = a22 * (1.0 + lambda);
      const double det = m11 * m22 - a12 * a12;
      if (det == 0.0 || !std::isfinite(det)) {
        lambda *= 10.0;
        continue;
      }
      const double dB = (m22 * g1 - a12 * g2) / det;
      const double dt = (m11 * g2 - a12 * g1) / det;
      const double B_new = B + dB, tau_new = tau + dt;
      if (!(tau_new > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const double cost_new = cost_of(B_new, tau_new);
      if (cost_new <= cost) {
        const double rel = std::max(std::abs(dB) / std::max(std::abs(B_new), 1e-300), std::abs(dt) / tau_new);
        B = B_new;
        tau = tau_new;
        cost = cost_new;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel < 1e-13) fit.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (fit.converged) break;
    if (!accepted) {
      // No descent direction left: a minimum to working precision.
      fit.converged = true;
      break;
    }
  }

  fit.B = B;
  fit.tau = tau * t_scale;
  fit.rms_residual = rms_of(B, tau);
  fit.tau_identifiable = std::abs(B) > 1e-10 && tau < 1e3;
  if (!fit.converged) {
    throw FitError("fit: no convergence after " + std::to_string(options.max_iterations) +
                       " iterations (best B=" + std::to_string(fit.B) + ", tau=" + std::to_string(fit.tau) + " s)",
                   fit);
  }
  return fit;
}

double extract_larmor_frequency(double tau, const LevelScheme& scheme, Polarization pol) {
  if (!(tau > 0.0)) throw ValidationError("larmor: tau must be > 0");
  const double eta2 = eta_squared(scheme, pol);
  if (!(eta2 > 0.0)) throw ValidationError("collapse cannot determine field (eta^2 = 0)");
  if (std::isinf(tau)) return 0.0;
  return std::sqrt(2.0) / (std::sqrt(eta2) * tau);
}

}  // namespace qmem
