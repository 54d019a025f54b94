#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace qmem {

using cplx = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Uniform detuning samples Delta_k = (k - N/2) dDelta paired with a time
/// window t_n = t_start + n dt, dt dDelta = 2 pi / N. The discrete transform
/// treats the window as periodic.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;

  /// N samples spanning [t_start, t_start + duration).
  static FrequencyGrid from_time_window(std::size_t n, double t_start, double duration);
  /// N samples with delta_max = (N/2 - 1) dDelta ~ `delta_max`; the time
  /// window starts at t_start.
  static FrequencyGrid from_detuning_span(std::size_t n, double delta_max, double t_start);

  std::size_t size() const { return n_; }
  double dt() const { return dt_; }
  double d_delta() const { return d_delta_; }
  double t_start() const { return t_start_; }
  double duration() const { return dt_ * static_cast<double>(n_); }
  double time(std::size_t i) const { return t_start_ + dt_ * static_cast<double>(i); }
  double detuning(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(n_ / 2)) * d_delta_;
  }
  double delta_min() const { return detuning(0); }
  double delta_max() const { return detuning(n_ - 1); }
  /// Index of the Delta = 0 sample.
  std::size_t zero_index() const { return n_ / 2; }

  std::vector<double> times() const;
  std::vector<double> detunings() const;

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

 private:
  FrequencyGrid(std::size_t n, double t_start, double dt);
  std::size_t n_ = 0;
  double t_start_ = 0.0;
  double dt_ = 0.0;
  double d_delta_ = 0.0;
};

/// Time <-> detuning transforms on a FrequencyGrid.
///
/// Continuous normalization: Phi(Delta) = (1/sqrt(2 pi)) int Phi(t) e^{i Delta t} dt,
/// so sum |Phi(t)|^2 dt == sum |Phi(Delta)|^2 dDelta. The unitary variants
/// apply F_{kn} = e^{i Delta_k t_n} / sqrt(N) and its adjoint.
/// Not thread safe: use one instance per thread.
class SpectralTransform {
 public:
  explicit SpectralTransform(const FrequencyGrid& grid);

  ComplexVector to_frequency(const ComplexVector& time_samples);
  ComplexVector to_time(const ComplexVector& spectrum);

  ComplexVector unitary_forward(const ComplexVector& time_samples);
  ComplexVector unitary_inverse(const ComplexVector& spectrum);

  const FrequencyGrid& grid() const { return grid_; }

 private:
  FrequencyGrid grid_;
  std::vector<cplx> t0_phase_;  // e^{i Delta_k t_start}
  std::vector<cplx> buf_in_, buf_out_;
  Eigen::FFT<double> fft_;
};

enum class Domain { Time, Frequency };

/// Complex signal envelope on a grid. Vacuum input normalized so the peak
/// of |Phi(t)|^2 is 1.
struct SignalField {
  FrequencyGrid grid;
  ComplexVector samples;
  Domain domain = Domain::Time;
  int beta = 1;

  SignalField in(Domain target) const;
  /// sum |Phi|^2 times the sample spacing of the current domain.
  double energy() const;
  /// Intensity-weighted mean time; requires nonzero energy.
  double centroid_time() const;

  /// Gaussian intensity profile with the given FWHM centred at t_center.
  static SignalField gaussian(const FrequencyGrid& grid, double fwhm, double t_center, int beta);
};

/// Fraction of the energy of f(t) that lies outside the band of `grid` when
/// f is sampled `oversample` times finer over the same window. With
/// remove_mean the window average is subtracted first, so a constant offset
/// does not dilute the measure. Used to reject under-resolved inputs.
double out_of_band_fraction(const FrequencyGrid& grid, const std::function<cplx(double)>& f,
                            int oversample = 4, bool remove_mean = false);

}  // namespace qmem
