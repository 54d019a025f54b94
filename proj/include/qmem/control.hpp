#pragma once

#include <limits>
#include <string>

#include "qmem/grid.hpp"

namespace qmem {

enum class ControlShape { Constant, StepOffOn };

/// Control-field Rabi frequency Omega(t) (rad/s), real and nonnegative.
///
/// StepOffOn: Omega0 before t_off, raised-cosine fall of full width `edge`
/// centred on t_off, zero until the symmetric rise centred on t_on, Omega0
/// afterwards. t_on = +inf keeps the field off (storage without retrieval).
struct ControlProfile {
  ControlShape shape = ControlShape::Constant;
  double Omega0 = 0.0;
  double t_off = 0.0;
  double t_on = std::numeric_limits<double>::infinity();
  double edge = 30e-9;
  int r = 1;

  static ControlProfile constant(double omega0, int r = 1);
  static ControlProfile step_off_on(double omega0, double t_off, double t_on, double edge, int r = 1);

  void validate() const;
  double omega(double t) const;
  bool has_retrieval() const;
  /// Midpoint of the dark interval; times after it belong to retrieval.
  double split_time() const;
  /// True when Omega is Omega0 outside [t_off - edge/2, t_on + edge/2].
  bool is_on_at(double t) const { return omega(t) == Omega0; }

  ComplexVector sample_time(const FrequencyGrid& grid) const;
  /// Omega(Delta) on the grid, continuous normalization (see SpectralTransform).
  ComplexVector spectrum(const FrequencyGrid& grid) const;
  std::string describe() const;
};

}  // namespace qmem
