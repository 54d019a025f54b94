#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qmem {

inline constexpr double kSpeedOfLight = 299792458.0;                              // m/s
inline constexpr double kBohrMagnetonOverHbar = 2.0 * std::numbers::pi * 1.39962449171e6;  // rad/s per gauss

/// The Lambda system: signal on b <-> c, control on a <-> c.
struct LevelScheme {
  int F_a = 0;
  int F_b = 0;
  int F_c = 0;
  double g_a = 0.0;
  double g_b = 0.0;
  double g_c = 0.0;
  double Gamma_c = 0.0;  ///< spontaneous emission rate of c (rad/s)
  double omega_c = 0.0;  ///< signal transition angular frequency (rad/s)
  double f_cb = 1.0;     ///< branching fraction of c into b
  std::string label_a;
  std::string label_b;
  std::string label_c;

  /// Optical coherence decay rate; always Gamma_c / 2.
  double Gamma_cb() const { return 0.5 * Gamma_c; }

  void validate() const;

  /// 85Rb D1: a = 5S1/2 F=3, b = 5S1/2 F=2, c = 5P1/2 F'=3, Lande g-factors
  /// from the hyperfine formula with I = 5/2.
  static LevelScheme rb85_d1();
};

/// Circular polarizations of signal (beta) and control (r), each +1 or -1.
struct Polarization {
  int beta = 1;
  int r = 1;
  void validate() const;
  bool matched() const { return beta == r; }
};

struct ZeemanConfig {
  double B_z = 0.0;  ///< gauss
  double mu_B_over_hbar = kBohrMagnetonOverHbar;
  double delta_c = 0.0;
  double Delta_cb = 0.0;
  double delta_a = 0.0;
  double Delta_ab = 0.0;
};

/// Zeeman shift frequencies for a field along z.
ZeemanConfig zeeman_frequencies(const LevelScheme& scheme, Polarization pol, double B_z,
                                double mu_B_over_hbar = kBohrMagnetonOverHbar);

/// Field that produces the given ground-state splitting Delta_ab (rad/s).
double field_for_ground_splitting(const LevelScheme& scheme, double Delta_ab,
                                  double mu_B_over_hbar = kBohrMagnetonOverHbar);

/// Fine-structure Lande factor (g_s = 2, g_l = 1).
double lande_g_j(double L, double S, double J);
/// Hyperfine Lande factor, nuclear magnetic moment neglected.
double lande_g_f(double J, double I, double F, double g_J);

/// Values indexed by a ground sublevel m in [-F, F].
class SublevelTable {
 public:
  SublevelTable() = default;
  explicit SublevelTable(int F) : F_(F), values_(2 * F + 1, 0.0) {}

  int F() const { return F_; }
  int min_m() const { return -F_; }
  int max_m() const { return F_; }
  double& operator[](int m) { return values_.at(m + F_); }
  double operator[](int m) const { return values_.at(m + F_); }
  std::span<const double> values() const { return values_; }

 private:
  int F_ = 0;
  std::vector<double> values_;
};

/// C^{F_b 1 F_c}_{m, beta, m+beta}: signal coupling of |b,m> to |c,m+beta>.
double signal_coupling(const LevelScheme& scheme, int beta, int m);
/// C^{F_a 1 F_c}_{m+beta-r, r, m+beta}: control coupling of the excited
/// state |c,m+beta> to |a,m+beta-r>.
double control_coupling(const LevelScheme& scheme, Polarization pol, int m);

/// Normalized dipole weights X_{m,beta}; sum of squares is 1.
SublevelTable dipole_weights(const LevelScheme& scheme, int beta);

/// Density and cumulative optical depth tabulated on one z grid.
struct MediumProfile {
  std::vector<double> z;                 ///< m, increasing, z.front() == 0
  std::vector<double> density;           ///< m^-3
  std::vector<double> depth;             ///< d_beta(z)
  std::vector<double> depth_derivative;  ///< d_beta'(z), 1/m

  double length() const { return z.empty() ? 0.0 : z.back(); }
  double total_depth() const { return depth.empty() ? 0.0 : depth.back(); }
  /// Linear interpolation of d_beta'(z); zero outside the medium.
  double depth_derivative_at(double zq) const;
};

/// Optical depth per unit density: 6 pi f_cb (c/omega_c)^2 times the
/// Zeeman-averaged squared Clebsch-Gordan sum.
double depth_per_density(const LevelScheme& scheme, int beta);

/// Cumulative trapezoidal d_beta(z). Throws ValidationError on negative
/// density or a non-increasing grid.
MediumProfile optical_depth(const LevelScheme& scheme, int beta, std::span<const double> z,
                            std::span<const double> density);

enum class DensityShape { Uniform, Gaussian };

/// Builds n(z) of the given shape on `points` nodes over [0, length] and
/// scales it so that d_beta(length) == total_depth.
MediumProfile medium_with_depth(const LevelScheme& scheme, int beta, DensityShape shape,
                                double length, std::size_t points, double total_depth,
                                double gaussian_sigma = 0.0);

}  // namespace qmem
