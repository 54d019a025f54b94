#include "qmem/grid.hpp"

#include <cmath>
#include <numbers>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double alternating(std::size_t n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

FrequencyGrid::FrequencyGrid(std::size_t n, double t_start, double dt)
    : n_(n), t_start_(t_start), dt_(dt), d_delta_(kTwoPi / (static_cast<double>(n) * dt)) {}

FrequencyGrid FrequencyGrid::from_time_window(std::size_t n, double t_start, double duration) {
  if (n < 2 || n % 2 != 0) throw ValidationError("grid: N_f must be even and >= 2");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError("grid: duration must be > 0");
  if (!std::isfinite(t_start)) throw ValidationError("grid: t_start must be finite");
  return FrequencyGrid(n, t_start, duration / static_cast<double>(n));
}

FrequencyGrid FrequencyGrid::from_detuning_span(std::size_t n, double delta_max, double t_start) {
  if (n < 4 || n % 2 != 0) throw ValidationError("grid: N_f must be even and >= 4");
  if (!(delta_max > 0.0) || !std::isfinite(delta_max)) throw ValidationError("grid: delta_max must be > 0");
  const double d_delta = delta_max / static_cast<double>(n / 2 - 1);
  const double duration = kTwoPi / d_delta;
  return from_time_window(n, t_start, duration);
}

std::vector<double> FrequencyGrid::times() const {
  std::vector<double> t(n_);
  for (std::size_t i = 0; i < n_; ++i) t[i] = time(i);
  return t;
}

std::vector<double> FrequencyGrid::detunings() const {
  std::vector<double> d(n_);
  for (std::size_t k = 0; k < n_; ++k) d[k] = detuning(k);
  return d;
}

SpectralTransform::SpectralTransform(const FrequencyGrid& grid)
    : grid_(grid), t0_phase_(grid.size()), buf_in_(grid.size()), buf_out_(grid.size()) {
  if (grid.size() < 2) throw ValidationError("spectral transform: empty grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    t0_phase_[k] = std::polar(1.0, grid.detuning(k) * grid.t_start());
  }
}

ComplexVector SpectralTransform::unitary_forward(const ComplexVector& x) {
  const std::size_t n = grid_.size();
  if (static_cast<std::size_t>(x.size()) != n) throw ValidationError("spectral transform: size mismatch");
  for (std::size_t i = 0; i < n; ++i) buf_in_[i] = alternating(i) * x[static_cast<Eigen::Index>(i)];
  fft_.inv(buf_out_, buf_in_);
  const double scale = std::sqrt(static_cast<double>(n));
  ComplexVector y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) y[static_cast<Eigen::Index>(k)] = t0_phase_[k] * scale * buf_out_[k];
  return y;
}

ComplexVector SpectralTransform::unitary_inverse(const ComplexVector& y) {
  const std::size_t n = grid_.size();
  if (static_cast<std::size_t>(y.size()) != n) throw ValidationError("spectral transform: size mismatch");
  for (std::size_t k = 0; k < n; ++k) buf_in_[k] = std::conj(t0_phase_[k]) * y[static_cast<Eigen::Index>(k)];
  fft_.fwd(buf_out_, buf_in_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexVector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = alternating(i) * scale * buf_out_[i];
  return x;
}

ComplexVector SpectralTransform::to_frequency(const ComplexVector& x) {
  const double factor = std::sqrt(grid_.dt() / grid_.d_delta());
  return factor * unitary_forward(x);
}

ComplexVector SpectralTransform::to_time(const ComplexVector& y) {
  const double factor = std::sqrt(grid_.d_delta() / grid_.dt());
  return factor * unitary_inverse(y);
}

SignalField SignalField::in(Domain target) const {
  if (target == domain) return *this;
  SpectralTransform tr(grid);
  SignalField out = *this;
  out.domain = target;
  out.samples = (target == Domain::Frequency) ? tr.to_frequency(samples) : tr.to_time(samples);
  return out;
}

double SignalField::energy() const {
  const double h = (domain == Domain::Time) ? grid.dt() : grid.d_delta();
  return samples.squaredNorm() * h;
}

double SignalField::centroid_time() const {
  const SignalField t = in(Domain::Time);
  double w = 0.0, wt = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = std::norm(t.samples[static_cast<Eigen::Index>(i)]);
    w += p;
    wt += p * grid.time(i);
  }
  if (!(w > 0.0)) throw NumericalError("signal field: centroid of a zero field");
  return wt / w;
}

SignalField SignalField::gaussian(const FrequencyGrid& grid, double fwhm, double t_center, int beta) {
  if (!(fwhm > 0.0)) throw ValidationError("signal: pulse FWHM must be > 0");
  SignalField f;
  f.grid = grid;
  f.beta = beta;
  f.domain = Domain::Time;
  f.samples.resize(static_cast<Eigen::Index>(grid.size()));
  const double a = 2.0 * std::numbers::ln2 / (fwhm * fwhm);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid.time(i) - t_center;
    f.samples[static_cast<Eigen::Index>(i)] = std::exp(-a * u * u);
  }
  return f;
}

double out_of_band_fraction(const FrequencyGrid& grid, const std::function<cplx(double)>& f,
                            int oversample, bool remove_mean) {
  if (oversample < 1) throw ValidationError("out_of_band_fraction: oversample must be >= 1");
  const std::size_t n = grid.size() * static_cast<std::size_t>(oversample);
  const FrequencyGrid fine = FrequencyGrid::from_time_window(n, grid.t_start(), grid.duration());
  ComplexVector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = f(fine.time(i));
  if (remove_mean) x.array() -= x.mean();
  const double total = x.squaredNorm();
  if (!(total > 0.0)) return 0.0;
  SpectralTransform tr(fine);
  const ComplexVector y = tr.unitary_forward(x);
  const double lo = grid.delta_min() - 0.5 * grid.d_delta();
  const double hi = grid.delta_max() + 0.5 * grid.d_delta();
  double outside = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = fine.detuning(k);
    if (d < lo || d > hi) outside += std::norm(y[static_cast<Eigen::Index>(k)]);
  }
  return outside / total;
}

}  // namespace qmem
