#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmem/kernels.hpp"

namespace qmem {

/// Detectors that report the number of photoelectrons in a gate, or plain
/// click/no-click threshold detectors.
enum class DetectorModel { PhotonCounting, Threshold };

/// Two-mode squeezed pair source, or independent coherent idler and signal
/// fields of the same mean photon numbers (classical reference).
enum class SourceModel { PairSource, Coherent };

struct Gate {
  double t0_ns = 0.0;
  double width_ns = 0.0;
  bool contains(double t_ns) const { return t_ns >= t0_ns && t_ns < t0_ns + width_ns; }
};

/// Detector index in TrialRecord arrays.
enum Detector : std::size_t { kD1 = 0, kD2 = 1, kD3 = 2, kDa = 3 };

struct CountingConfig {
  double s = 0.0;          ///< sinh^2 of the Raman gain: mean pairs per trial
  double B_s = 0.0;        ///< coherent background in the signal mode, mean photons per gate
  double epsilon_1 = 1.0;  ///< idler detection probability (D1)
  double epsilon_2 = 1.0;  ///< signal detection probability behind the splitter (D2)
  double epsilon_3 = 1.0;  ///< (D3)
  double T2 = 0.5;         ///< |T|^2 of the signal splitter; |R|^2 = 1 - T2
  double w_i = 1.0;        ///< idler channel transmission (reporting only)
  double w_s = 1.0;        ///< signal channel transmission (reporting only)
  std::array<Gate, 4> gates{Gate{0, 140}, Gate{0, 240}, Gate{0, 240}, Gate{0, 140}};
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  DetectorModel detector = DetectorModel::PhotonCounting;
  SourceModel source = SourceModel::PairSource;
  /// g_ii mode: an extra splitter in the idler path sends a fraction
  /// 1 - idler_T2 of the idler photons to detector D_a.
  bool auxiliary_idler = false;
  double idler_T2 = 0.5;
  double epsilon_a = 1.0;
  double dark_count_probability = 0.0;  ///< per detector and gate

  double R2() const { return 1.0 - T2; }
  double raman_gain() const;
  static double s_from_raman_gain(double eta);
  /// h = epsilon_1 / w_i, the heralding strength.
  double heralding_ratio() const { return epsilon_1 / w_i; }
  void validate() const;
};

/// One trial: photoelectron count per detector (0/1 for threshold
/// detectors) and the time of the earliest event in the gate (ns, 2 ns
/// resolution, -1 when the detector saw nothing).
struct TrialRecord {
  std::uint64_t index = 0;
  std::array<std::uint32_t, 4> counts{};
  std::array<std::int32_t, 4> t_ns{-1, -1, -1, -1};
};

/// (1 + 2s + B)/(s + B). Throws ValidationError when s = B = 0.
double analytic_g_si(double s, double B_s);
/// [s(4 + 6s) + 4B(1 + 2s)]/(1 + 2s + B)^2, exactly as published.
double analytic_alpha(double s, double B_s);

struct SinglesRates {
  double R1 = 0.0, R2 = 0.0, R3 = 0.0;  ///< s^-1
  bool low_rate_regime = true;          ///< every R_i <= 0.1 W
};
SinglesRates singles_rates(const CountingConfig& config, double W);

/// Signal-path efficiencies scaled by the storage efficiency E and the
/// background replaced by B_prime; the idler path is unchanged.
CountingConfig memory_chain(const CountingConfig& source, double E, double B_prime);

/// Pair-number truncation: smallest n with P(N <= n) > 1 - 1e-10.
int pair_truncation(double s);

/// Deterministic per-block trial generator (blocks of kBlockTrials trials,
/// each with its own mt19937_64 seeded from (seed, block index)).
class TrialGenerator {
 public:
  static constexpr std::uint64_t kBlockTrials = 4096;

  explicit TrialGenerator(const CountingConfig& config);

  std::uint64_t block_count() const;
  /// Trials [first, first + count) of block b are produced; count is the
  /// block length (shorter for the final block).
  template <class Visitor>
  void run_block(std::uint64_t b, Visitor&& visit) const;

  const CountingConfig& config() const { return config_; }
  int n_max() const { return n_max_; }

 private:
  void generate_block(std::uint64_t b, std::vector<TrialRecord>& out) const;
  CountingConfig config_;
  int n_max_ = 0;
  std::vector<double> pair_cdf_;
  std::vector<std::vector<double>> signal_cdf_;  ///< per pair number n, CDF of signal photons
};

template <class Visitor>
void TrialGenerator::run_block(std::uint64_t b, Visitor&& visit) const {
  std::vector<TrialRecord> buf;
  generate_block(b, buf);
  for (const auto& r : buf) visit(r);
}

/// All records of the configured run (small M only; memory grows with M).
std::vector<TrialRecord> simulate_trials(const CountingConfig& config);

/// Running sums of the per-trial feature vector
/// [c1, c2, c3, ca, c1c2, c1c3, c2c3, c1c2c3, c1ca] and its outer product.
/// Counts are photoelectron numbers or, for threshold detectors, 0/1.
struct CountAccumulator {
  static constexpr std::size_t kFeatures = 9;
  std::uint64_t trials = 0;
  std::array<std::uint64_t, kFeatures> sum{};
  std::array<std::uint64_t, kFeatures * kFeatures> sum2{};

  void add(const TrialRecord& r, DetectorModel model);
  void merge(const CountAccumulator& other);
  friend bool operator==(const CountAccumulator&, const CountAccumulator&) = default;
};

/// Generates and folds every trial without storing records. Result is
/// independent of policy and thread count.
CountAccumulator accumulate_trials(const CountingConfig& config, ExecutionPolicy policy = ExecutionPolicy::Parallel);

struct Estimate {
  std::optional<double> value;
  double se = 0.0;
  std::string undefined_reason;
  bool defined() const { return value.has_value(); }
  friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct StatisticsReport {
  std::uint64_t trials = 0;
  double p1 = 0, p2 = 0, p3 = 0, pa = 0, p12 = 0, p13 = 0, p23 = 0, p123 = 0, p1a = 0;
  double se_p1 = 0, se_p2 = 0, se_p3 = 0, se_pa = 0, se_p12 = 0, se_p13 = 0, se_p23 = 0, se_p123 = 0, se_p1a = 0;
  Estimate g_si, alpha, g_ss, g_ii, R_clauser;
  friend bool operator==(const StatisticsReport&, const StatisticsReport&) = default;
};

/// Estimators p_i = N_i/M etc. with delta-method standard errors from the
/// full feature covariance. A feature with zero total gets a one-count
/// variance floor.
StatisticsReport estimate_statistics(const CountAccumulator& acc, bool auxiliary_idler);
StatisticsReport estimate_statistics(std::span<const TrialRecord> records, DetectorModel model, bool auxiliary_idler);

/// Convenience: accumulate_trials + estimate_statistics.
StatisticsReport run_counting(const CountingConfig& config, ExecutionPolicy policy = ExecutionPolicy::Parallel);

}  // namespace qmem
