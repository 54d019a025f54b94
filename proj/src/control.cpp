#include "qmem/control.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

// 1 -> 0 over [-w/2, w/2].
double falling_edge(double u, double w) {
  if (u <= -0.5 * w) return 1.0;
  if (u >= 0.5 * w) return 0.0;
  return 0.5 * (1.0 - std::sin(std::numbers::pi * u / w));
}

}  // namespace

ControlProfile ControlProfile::constant(double omega0, int r) {
  ControlProfile c;
  c.shape = ControlShape::Constant;
  c.Omega0 = omega0;
  c.r = r;
  c.validate();
  return c;
}

ControlProfile ControlProfile::step_off_on(double omega0, double t_off, double t_on, double edge, int r) {
  ControlProfile c;
  c.shape = ControlShape::StepOffOn;
  c.Omega0 = omega0;
  c.t_off = t_off;
  c.t_on = t_on;
  c.edge = edge;
  c.r = r;
  c.validate();
  return c;
}

void ControlProfile::validate() const {
  if (!(Omega0 >= 0.0) || !std::isfinite(Omega0)) throw ValidationError("control: Omega must be finite and >= 0");
  if (r != 1 && r != -1) throw ValidationError("control: polarization r must be +1 or -1");
  if (shape == ControlShape::StepOffOn) {
    if (!(edge > 0.0) || !std::isfinite(edge)) throw ValidationError("control: edge width must be > 0");
    if (!std::isfinite(t_off)) throw ValidationError("control: t_off must be finite");
    if (std::isnan(t_on)) throw ValidationError("control: t_on must not be NaN");
    if (!(t_on - t_off >= edge)) throw ValidationError("control: t_on - t_off must be >= edge width");
  }
}

double ControlProfile::omega(double t) const {
  if (shape == ControlShape::Constant) return Omega0;
  const double down = falling_edge(t - t_off, edge);
  const double up = std::isfinite(t_on) ? 1.0 - falling_edge(t - t_on, edge) : 0.0;
  return Omega0 * (t < 0.5 * (t_off + t_on) || !std::isfinite(t_on) ? down : up);
}

bool ControlProfile::has_retrieval() const { return shape == ControlShape::StepOffOn && std::isfinite(t_on); }

double ControlProfile::split_time() const {
  if (!has_retrieval()) return std::numeric_limits<double>::infinity();
  return 0.5 * (t_off + t_on);
}

ComplexVector ControlProfile::sample_time(const FrequencyGrid& grid) const {
  ComplexVector v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = omega(grid.time(i));
  return v;
}

ComplexVector ControlProfile::spectrum(const FrequencyGrid& grid) const {
  SpectralTransform tr(grid);
  return tr.to_frequency(sample_time(grid));
}

std::string ControlProfile::describe() const {
  std::ostringstream os;
  if (shape == ControlShape::Constant) {
    os << "constant Omega=" << Omega0 << " rad/s";
  } else {
    os << "step off/on Omega0=" << Omega0 << " rad/s t_off=" << t_off << " s t_on=" << t_on
       << " s edge=" << edge << " s";
  }
  os << " r=" << r;
  return os.str();
}

}  // namespace qmem
