#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qmem/atomic.hpp"
#include "qmem/errors.hpp"

namespace qmem {

/// Stored spin-wave superposition over ground coherences m in [-F_b, F_b].
struct SpinWaveMode {
  int F_b = 0;
  std::vector<std::complex<double>> amplitudes;  ///< index m + F_b
  double q = 0.0;                                ///< wavevector label, bookkeeping only
  std::complex<double> amplitude(int m) const { return amplitudes.at(static_cast<std::size_t>(m + F_b)); }
};

struct PolaritonDecomposition {
  double photonic_weight = 0.0;
  double atomic_weight = 0.0;
  SpinWaveMode spin_wave;
  /// |amplitude_m|^2, the weights entering the polariton number.
  SublevelTable weights;
};

/// Dark-state polariton for real control Rabi frequency Omega and collective
/// coupling sqrt(N/(2F_b+1))|g|. Requires beta == r; throws ValidationError
/// "no dark state for this scheme/polarization" when a coupled sublevel has a
/// vanishing control coefficient.
PolaritonDecomposition dsp_decompose(double Omega, double collective_coupling, const LevelScheme& scheme,
                                     Polarization pol);

/// Normalized spin-wave weights p_m; sum to 1.
SublevelTable spin_wave_weights(const LevelScheme& scheme, Polarization pol);

/// N_p(t)/N_p(0) for a field along z.
double polariton_number(double t, const ZeemanConfig& zeeman, const LevelScheme& scheme, Polarization pol);

struct CollapseCurve {
  std::vector<double> times;
  std::vector<double> values;
};
CollapseCurve collapse_curve(std::span<const double> times, const ZeemanConfig& zeeman, const LevelScheme& scheme,
                             Polarization pol);

/// Larmor curvature: sum_{m,m'} p_m p_m' (m - m')^2.
double eta_squared(const LevelScheme& scheme, Polarization pol);

enum class FieldOrientation { Parallel, Perpendicular };

/// t_n = 2 pi n / |Delta_ab| for a parallel field, twice that for a
/// perpendicular one. n must be a nonnegative integer, or a half-integer
/// when allow_half_integer is set.
double revival_time(const ZeemanConfig& zeeman, FieldOrientation orientation, double n,
                    bool allow_half_integer = false);

struct CollapseSample {
  double t = 0.0;      ///< storage time, s
  double g_si = 0.0;
  double sigma = 1.0;  ///< weight 1/sigma^2 in the fit
};

struct CollapseFit {
  double B = 0.0;
  double tau = 0.0;  ///< s; +inf when unidentifiable from flat data
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool tau_identifiable = true;
};

struct FitOptions {
  int max_iterations = 500;
  double noise_tolerance = 0.1;  ///< g_si below 1 - tolerance is rejected
};

/// Thrown when the fit does not converge; carries the best parameters seen.
class FitError : public NumericalError {
 public:
  FitError(const std::string& what, CollapseFit best) : NumericalError(what), best_(best) {}
  const CollapseFit& best() const { return best_; }

 private:
  CollapseFit best_;
};

/// Least-squares fit of g(t) = 1 + B exp(-t^2/tau^2) by damped Gauss-Newton
/// (Levenberg-Marquardt) with an analytic Jacobian.
CollapseFit fit_collapse(std::span<const CollapseSample> samples, const FitOptions& options = {});

/// Delta_ab = sqrt(2)/(eta tau), rad/s.
double extract_larmor_frequency(double tau, const LevelScheme& scheme, Polarization pol);

}  // namespace qmem
