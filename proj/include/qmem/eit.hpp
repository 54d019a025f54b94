#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qmem/atomic.hpp"
#include "qmem/control.hpp"
#include "qmem/grid.hpp"
#include "qmem/kernels.hpp"

namespace qmem {

/// Default ground-coherence regularization, in units of Gamma_cb.
inline constexpr double kDefaultGamma0OverGammaCb = 1e-4;

/// Constant-control susceptibility chi_beta(Delta, z), Zeeman shifts
/// neglected. The control Clebsch-Gordan coefficient is
/// C^{F_a 1 F_c}_{m+beta-r, r, m+beta}; sublevels where it vanishes respond
/// as bare two-level absorbers.
cplx susceptibility_cw(double Delta, double z, double Omega, const LevelScheme& scheme, Polarization pol,
                       const MediumProfile& medium);

/// Dimensionless line shape S(Delta) with chi = (c/omega_c) d'(z) S.
cplx cw_line_shape(double Delta, double Omega, const LevelScheme& scheme, Polarization pol);

struct TransmissionSpectrum {
  std::vector<double> delta;          ///< rad/s
  std::vector<double> transmittance;  ///< intensity, in [0, 1]
};

/// Intensity transmittance through the whole medium under constant control.
TransmissionSpectrum transmission_spectrum(const LevelScheme& scheme, Polarization pol, const MediumProfile& medium,
                                           double Omega, std::span<const double> detunings);
TransmissionSpectrum transmission_spectrum(const LevelScheme& scheme, Polarization pol, const MediumProfile& medium,
                                           double Omega, const FrequencyGrid& grid);

/// Time-domain kernel g_j of 1/(Delta + pole_shift + i gamma0) on the grid,
/// so that the coupling operator is F (omega g omega^*) F^+.
ComplexVector pole_response(const FrequencyGrid& grid, double pole_shift, double gamma0);

/// L_{m,beta}(Delta, Delta') on the grid.
///
/// omega_t: control Rabi frequency sampled on the time grid (complex to
/// allow the per-sublevel retrieval phase of the storage fast path);
/// control_cg: C^{F_a 1 F_c}_{m+beta-r, r, m+beta};
/// pole_shift: delta_a + m Delta_ab. Requires gamma0 > 0.
ComplexMatrix kernel_L(const FrequencyGrid& grid, const ComplexVector& omega_t, double control_cg,
                       double pole_shift, double gamma0, ExecutionPolicy policy = ExecutionPolicy::Parallel);

struct KernelInverse {
  ComplexMatrix inverse;
  double rcond = 1.0;     ///< reciprocal condition number estimate of K
  double residual = 0.0;  ///< ||K K^-1 - I||_F / ||I||_F (probe estimate unless exact)
};

/// Inverts K = I - diag(1/(Delta + excited_shift + i Gamma_cb)) L, with
/// excited_shift = delta_c + m Delta_cb. Throws NumericalError when the
/// condition number exceeds 1e12 or the residual exceeds 1e-8; `m` is used
/// in the message only. exact_residual computes the full product (O(N^3)).
KernelInverse kernel_K_inverse(const FrequencyGrid& grid, const ComplexMatrix& L, double excited_shift,
                               double Gamma_cb, int m, bool exact_residual = false);

struct KernelOptions {
  double gamma0 = -1.0;  ///< rad/s; negative selects the default 1e-4 Gamma_cb
  /// Extra dark time represented by a per-sublevel phase on the retrieval
  /// part of the control (storage fast path), seconds.
  double storage_skip = 0.0;
  /// Reject controls whose non-constant part has more than this fraction of
  /// its energy outside the grid band.
  double max_out_of_band = 0.05;
  ExecutionPolicy policy = ExecutionPolicy::Parallel;

  double gamma0_for(const LevelScheme& scheme) const {
    return gamma0 < 0.0 ? kDefaultGamma0OverGammaCb * scheme.Gamma_cb() : gamma0;
  }
};

/// The z-independent part M of the time-dependent susceptibility:
/// chi(Delta, Delta', z) = -(c/omega_c) d'(z) M(Delta, Delta'), with
/// M = sum_m X_m^2 Gamma_cb K_m^-1 diag(1/(Delta' + i Gamma_cb)).
struct ChiOperator {
  FrequencyGrid grid;
  int beta = 1;
  double gamma0 = 0.0;
  double storage_skip = 0.0;
  ComplexMatrix M;
  std::vector<double> rcond;     ///< per sublevel, m = -F_b..F_b
  std::vector<double> residual;  ///< per sublevel
};

ChiOperator build_chi_operator(const FrequencyGrid& grid, const LevelScheme& scheme, Polarization pol,
                               const ControlProfile& control, const ZeemanConfig& zeeman,
                               const KernelOptions& options = {});

/// chi_beta(Delta, Delta', z) on the grid.
ComplexMatrix susceptibility_td(const FrequencyGrid& grid, const MediumProfile& medium, const LevelScheme& scheme,
                                Polarization pol, const ControlProfile& control, const ZeemanConfig& zeeman,
                                double z, const KernelOptions& options = {});

struct PropagationOptions {
  int z_steps = 64;
  bool check_convergence = true;
  double convergence_tolerance = 0.01;
  std::vector<double> snapshot_z;  ///< rounded to the nearest step boundary
  KernelOptions kernel;
};

struct Snapshot {
  double z = 0.0;
  SignalField field;  ///< time domain
};

struct PropagationResult {
  SignalField output;  ///< time domain at z = L_med, grid time labels
  SignalField vacuum;  ///< same input propagated with chi = 0
  /// Physical time of each output sample: grid time, plus storage_skip for
  /// samples after the control's split time.
  std::vector<double> output_times;
  std::vector<Snapshot> snapshots;
  double input_energy = 0.0;
  double output_energy = 0.0;
  double transmitted_fraction = 0.0;  ///< output / input energy
  double group_delay = 0.0;           ///< centroid shift vs vacuum, s
  /// Energy after the control's split time over input energy; empty when
  /// the control has no retrieval edge.
  std::optional<double> retrieval_efficiency;
  double convergence_change = 0.0;  ///< relative energy change at 2x z_steps
  std::vector<double> rcond;
};

/// Integrates dPhi/dz = i(Delta/c) Phi - (i/2) d'(z) M Phi across the medium
/// with fixed-step RK4. Throws NumericalError when doubling z_steps changes
/// the output energy by more than the tolerance.
PropagationResult propagate(const SignalField& input, const ControlProfile& control, const MediumProfile& medium,
                            const LevelScheme& scheme, Polarization pol, const ZeemanConfig& zeeman,
                            const PropagationOptions& options = {});

/// Same, reusing a prebuilt operator (it must match grid and control).
PropagationResult propagate(const SignalField& input, const ChiOperator& chi, const ControlProfile& control,
                            const MediumProfile& medium, const PropagationOptions& options = {});

}  // namespace qmem
