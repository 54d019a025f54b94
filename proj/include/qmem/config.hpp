#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "qmem/atomic.hpp"
#include "qmem/control.hpp"
#include "qmem/counting.hpp"
#include "qmem/grid.hpp"

namespace qmem {

inline constexpr int kSchemaVersion = 1;

struct MediumSection {
  double optical_depth = 0.0;  ///< required
  double length = 2e-3;        ///< m
  std::size_t points = 201;
  DensityShape shape = DensityShape::Uniform;
  double gaussian_sigma = 0.0;  ///< m, Gaussian shape only
};

struct ControlSection {
  double Omega = 0.0;  ///< rad/s, required (as omega_rad_s or omega_over_gamma_c)
  bool given_in_gamma = true;
  double t_off = 10e-9;  ///< s, switch-off centre relative to the pulse centre
  double edge = 30e-9;   ///< s
};

struct ZeemanSection {
  enum class Input { FieldGauss, SplittingHz };
  Input input = Input::SplittingHz;
  double value = 0.0;  ///< B_z (gauss) or Delta_ab/2pi (Hz); required
  double mu_B_over_hbar = kBohrMagnetonOverHbar;
};

struct GridSection {
  std::size_t n_f = 1024;
  double t_start = -0.6e-6;  ///< s
  double duration = 1.6e-6;  ///< s
  double gamma0_over_gamma_cb = 1e-4;
  int z_steps = 64;
};

struct SignalSection {
  double fwhm = 120e-9;  ///< s
  double t_center = 0.0;
};

struct SpectrumSection {
  double delta_min_over_gamma = -3.0;
  double delta_max_over_gamma = 3.0;
  std::size_t points = 601;
};

struct StoreSection {
  double short_storage = 500e-9;  ///< s, simulated directly
  double long_storage = 15e-6;    ///< s, via the Larmor-phase fast path
};

struct LarmorSection {
  double B0 = 7.0;
  double t_max = 20e-6;  ///< s
  std::size_t points = 81;
  double fit_max_time = 6e-6;  ///< s; samples beyond are reported but not fitted
};

struct CountingSection {
  CountingConfig source;  ///< source.s is required (as s or raman_gain)
  bool s_given_as_gain = false;
  std::vector<double> sweep_s{0.03, 0.05, 0.08, 0.12, 0.16, 0.2, 0.25, 0.3};
  double storage_efficiency = 0.06;
  double retrieved_background = 0.08;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  LevelScheme scheme = LevelScheme::rb85_d1();
  std::string scheme_preset = "rb85_d1";
  Polarization polarization;
  MediumSection medium;
  ControlSection control;
  ZeemanSection zeeman;
  GridSection grid;
  SignalSection signal;
  SpectrumSection spectrum;
  StoreSection store;
  LarmorSection larmor;
  CountingSection counting;
  std::vector<std::string> pipelines{"spectrum", "store", "larmor", "counting"};

  ZeemanConfig zeeman_config() const;
  double B_z() const;
  double Delta_ab() const;
  MediumProfile medium_profile() const;
  FrequencyGrid frequency_grid() const;
  double gamma0() const { return grid.gamma0_over_gamma_cb * scheme.Gamma_cb(); }

  /// Revalidates every embedded type; throws ValidationError.
  void validate() const;
};

/// Parses a config document. Errors are ValidationError with a message of
/// the form "<source>:<line>:<col>: ..." when a location is known.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Full document with every default written out.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

}  // namespace qmem
