#include "qmem/counting.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

constexpr double kPairTail = 1e-10;
constexpr double kSignalTail = 1e-13;
constexpr int kTimeResolutionNs = 2;

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string("counting: ") + name + " must lie in [0, 1]");
}

void check_gate(const Gate& g, const char* name) {
  if (!std::isfinite(g.t0_ns) || !(g.width_ns >= kTimeResolutionNs) || !std::isfinite(g.width_ns)) {
    throw ValidationError(std::string("counting: gate ") + name + " needs a finite start and width >= 2 ns");
  }
}

// |<k|D(beta)|n>|^2 with |beta|^2 = B.
double displaced_fock(int n, int k, double B) {
  const int lo = std::min(n, k), d = std::abs(k - n);
  const double lag = std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(d), B);
  if (lag == 0.0) return 0.0;
  const double log_p = std::lgamma(lo + 1.0) - std::lgamma(lo + d + 1.0) + d * std::log(B) - B + 2.0 * std::log(std::abs(lag));
  return std::exp(log_p);
}

std::vector<double> displaced_fock_cdf(int n, double B) {
  std::vector<double> cdf;
  double acc = 0.0;
  for (int k = 0;; ++k) {
    acc += displaced_fock(n, k, B);
    cdf.push_back(acc);
    if (k > n && 1.0 - acc < kSignalTail) break;
    if (k > n + 200) throw NumericalError("counting: displaced Fock distribution did not converge");
  }
  for (double& c : cdf) c /= acc;
  return cdf;
}

std::uint32_t sample_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint32_t>(std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1));
}

std::uint32_t thin(std::mt19937_64& rng, std::uint32_t n, double p) {
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  std::binomial_distribution<std::uint32_t> bin(n, p);
  return bin(rng);
}

}  // namespace

double CountingConfig::raman_gain() const { return std::asinh(std::sqrt(s)); }

double CountingConfig::s_from_raman_gain(double eta) {
  if (!std::isfinite(eta)) throw ValidationError("counting: Raman gain must be finite");
  const double sh = std::sinh(eta);
  return sh * sh;
}

void CountingConfig::validate() const {
  if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("counting: s must be finite and >= 0");
  if (!(B_s >= 0.0) || !std::isfinite(B_s)) throw ValidationError("counting: B_s must be finite and >= 0");
  check_probability(epsilon_1, "epsilon_1");
  check_probability(epsilon_2, "epsilon_2");
  check_probability(epsilon_3, "epsilon_3");
  check_probability(epsilon_a, "epsilon_a");
  check_probability(T2, "|T|^2");
  check_probability(idler_T2, "idler splitter |T|^2");
  check_probability(dark_count_probability, "dark-count probability");
  if (!(w_i > 0.0 && w_i <= 1.0) || !(w_s > 0.0 && w_s <= 1.0)) {
    throw ValidationError("counting: channel transmissions w_i, w_s must lie in (0, 1]");
  }
  check_gate(gates[kD1], "D1");
  check_gate(gates[kD2], "D2");
  check_gate(gates[kD3], "D3");
  check_gate(gates[kDa], "Da");
}

double analytic_g_si(double s, double B_s) {
  if (!(s >= 0.0) || !(B_s >= 0.0)) throw ValidationError("g_si: s and B_s must be >= 0");
  if (s + B_s == 0.0) throw ValidationError("g_si undefined (no signal)");
  return (1.0 + 2.0 * s + B_s) / (s + B_s);
}

double analytic_alpha(double s, double B_s) {
  if (!(s >= 0.0) || !(B_s >= 0.0)) throw ValidationError("alpha: s and B_s must be >= 0");
  const double den = 1.0 + 2.0 * s + B_s;
  return (s * (4.0 + 6.0 * s) + 4.0 * B_s * (1.0 + 2.0 * s)) / (den * den);
}

SinglesRates singles_rates(const CountingConfig& config, double W) {
  config.validate();
  if (!(W > 0.0) || !std::isfinite(W)) throw ValidationError("singles rates: repetition rate must be > 0");
  SinglesRates r;
  r.R1 = config.epsilon_1 * config.s * W;
  r.R2 = config.T2 * config.epsilon_2 * config.s * W;
  r.R3 = config.R2() * config.epsilon_3 * config.s * W;
  r.low_rate_regime = std::max({r.R1, r.R2, r.R3}) <= 0.1 * W;
  return r;
}

CountingConfig memory_chain(const CountingConfig& source, double E, double B_prime) {
  if (!(E >= 0.0 && E <= 1.0)) throw ValidationError("memory chain: E must lie in [0, 1]");
  if (!(B_prime >= 0.0) || !std::isfinite(B_prime)) throw ValidationError("memory chain: B_s' must be >= 0");
  CountingConfig out = source;
  out.epsilon_2 = source.epsilon_2 * E;
  out.epsilon_3 = source.epsilon_3 * E;
  out.B_s = B_prime;
  return out;
}

int pair_truncation(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("truncation: s must be finite and >= 0");
  if (s == 0.0) return 0;
  // P(N > n) = (s/(1+s))^{n+1}
  const double q = s / (1.0 + s);
  const int n = static_cast<int>(std::ceil(std::log(kPairTail) / std::log(q))) - 1;
  int m = std::max(n, 0);
  while (std::pow(q, m + 1) >= kPairTail) ++m;
  while (m > 0 && std::pow(q, m) < kPairTail) --m;
  return m;
}

TrialGenerator::TrialGenerator(const CountingConfig& config) : config_(config) {
  config_.validate();
  if (config_.source == SourceModel::PairSource) {
    n_max_ = pair_truncation(config_.s);
    const double q = config_.s / (1.0 + config_.s);
    double acc = 0.0, pn = 1.0 / (1.0 + config_.s);
    for (int n = 0; n <= n_max_; ++n) {
      acc += pn;
      pair_cdf_.push_back(acc);
      pn *= q;
    }
    if (config_.B_s > 0.0) {
      for (int n = 0; n <= n_max_; ++n) signal_cdf_.push_back(displaced_fock_cdf(n, config_.B_s));
    }
  }
}

std::uint64_t TrialGenerator::block_count() const {
  return (config_.trials + kBlockTrials - 1) / kBlockTrials;
}

void TrialGenerator::generate_block(std::uint64_t b, std::vector<TrialRecord>& out) const {
  const std::uint64_t first = b * kBlockTrials;
  if (first >= config_.trials) {
    out.clear();
    return;
  }
  const std::uint64_t count = std::min(kBlockTrials, config_.trials - first);
  out.resize(count);
  std::seed_seq seq{static_cast<std::uint32_t>(config_.seed), static_cast<std::uint32_t>(config_.seed >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::poisson_distribution<std::uint32_t> idler_poisson(config_.s > 0 ? config_.s : 1.0);
  std::poisson_distribution<std::uint32_t> signal_poisson(config_.s + config_.B_s > 0 ? config_.s + config_.B_s : 1.0);
  const CountingConfig& c = config_;

  for (std::uint64_t i = 0; i < count; ++i) {
    TrialRecord& r = out[i];
    r = TrialRecord{};
    r.index = first + i;

    std::uint32_t n_idler = 0, n_signal = 0;
    if (c.source == SourceModel::PairSource) {
      if (c.s > 0.0) n_idler = sample_cdf(pair_cdf_, unif(rng));
      n_signal = n_idler;
      if (c.B_s > 0.0) n_signal = sample_cdf(signal_cdf_[n_idler], unif(rng));
    } else {
      if (c.s > 0.0) n_idler = idler_poisson(rng);
      if (c.s + c.B_s > 0.0) n_signal = signal_poisson(rng);
    }

    if (c.auxiliary_idler) {
      const std::uint32_t to_d1 = thin(rng, n_idler, c.idler_T2);
      r.counts[kD1] = thin(rng, to_d1, c.epsilon_1);
      r.counts[kDa] = thin(rng, n_idler - to_d1, c.epsilon_a);
    } else {
      r.counts[kD1] = thin(rng, n_idler, c.epsilon_1);
    }
    const std::uint32_t to_d2 = thin(rng, n_signal, c.T2);
    r.counts[kD2] = thin(rng, to_d2, c.epsilon_2);
    r.counts[kD3] = thin(rng, n_signal - to_d2, c.epsilon_3);

    const std::size_t n_det = c.auxiliary_idler ? 4 : 3;
    if (c.dark_count_probability > 0.0) {
      for (std::size_t d = 0; d < n_det; ++d) {
        if (unif(rng) < c.dark_count_probability) ++r.counts[d];
      }
    }
    for (std::size_t d = 0; d < n_det; ++d) {
      if (r.counts[d] == 0) continue;
      if (c.detector == DetectorModel::Threshold) r.counts[d] = 1;
      const auto slots = static_cast<std::int32_t>(c.gates[d].width_ns / kTimeResolutionNs);
      std::uniform_int_distribution<std::int32_t> slot(0, slots - 1);
      std::int32_t earliest = slots;
      for (std::uint32_t e = 0; e < r.counts[d]; ++e) earliest = std::min(earliest, slot(rng));
      r.t_ns[d] = static_cast<std::int32_t>(std::lround(c.gates[d].t0_ns)) + kTimeResolutionNs * earliest;
    }
  }
}

std::vector<TrialRecord> simulate_trials(const CountingConfig& config) {
  const TrialGenerator gen(config);
  std::vector<TrialRecord> all;
  all.reserve(config.trials);
  for (std::uint64_t b = 0; b < gen.block_count(); ++b) {
    gen.run_block(b, [&](const TrialRecord& r) { all.push_back(r); });
  }
  return all;
}

void CountAccumulator::add(const TrialRecord& r, DetectorModel model) {
  std::array<std::uint64_t, 4> c{};
  for (std::size_t d = 0; d < 4; ++d) {
    c[d] = model == DetectorModel::Threshold ? (r.counts[d] > 0 ? 1 : 0) : r.counts[d];
  }
  const std::array<std::uint64_t, kFeatures> f{
      c[kD1],         c[kD2], c[kD3], c[kDa], c[kD1] * c[kD2], c[kD1] * c[kD3], c[kD2] * c[kD3],
      c[kD1] * c[kD2] * c[kD3], c[kD1] * c[kDa]};
  ++trials;
  if (c[kD1] == 0 && c[kD2] == 0 && c[kD3] == 0 && c[kDa] == 0) return;
  for (std::size_t i = 0; i < kFeatures; ++i) {
    if (f[i] == 0) continue;
    sum[i] += f[i];
    for (std::size_t j = 0; j < kFeatures; ++j) sum2[i * kFeatures + j] += f[i] * f[j];
  }
}

void CountAccumulator::merge(const CountAccumulator& o) {
  trials += o.trials;
  for (std::size_t i = 0; i < kFeatures; ++i) sum[i] += o.sum[i];
  for (std::size_t i = 0; i < kFeatures * kFeatures; ++i) sum2[i] += o.sum2[i];
}

CountAccumulator accumulate_trials(const CountingConfig& config, ExecutionPolicy policy) {
  const TrialGenerator gen(config);
  const auto nb = static_cast<std::int64_t>(gen.block_count());
  std::vector<CountAccumulator> blocks(static_cast<std::size_t>(nb));
  auto run = [&](std::int64_t b) {
    CountAccumulator& acc = blocks[static_cast<std::size_t>(b)];
    gen.run_block(static_cast<std::uint64_t>(b), [&](const TrialRecord& r) { acc.add(r, config.detector); });
  };
  if (policy == ExecutionPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t b = 0; b < nb; ++b) run(b);
  } else {
    for (std::int64_t b = 0; b < nb; ++b) run(b);
  }
  // Integer sums: the reduction is exact and order independent.
  CountAccumulator total;
  for (const auto& a : blocks) total.merge(a);
  return total;
}

namespace {

enum Feature : std::size_t { f1, f2, f3, fa, f12, f13, f23, f123, f1a };

using Grad = std::array<double, CountAccumulator::kFeatures>;

double delta_variance(const Grad& g, const std::vector<double>& cov) {
  double v = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == 0.0) continue;
    for (std::size_t j = 0; j < g.size(); ++j) v += g[i] * cov[i * g.size() + j] * g[j];
  }
  return std::max(v, 0.0);
}

Estimate undefined(std::string why) {
  Estimate e;
  e.undefined_reason = std::move(why);
  return e;
}

}  // namespace

StatisticsReport estimate_statistics(const CountAccumulator& acc, bool auxiliary_idler) {
  if (acc.trials == 0) throw ValidationError("statistics: need M >= 1 trials");
  constexpr std::size_t K = CountAccumulator::kFeatures;
  const double M = static_cast<double>(acc.trials);
  std::array<double, K> mu{};
  for (std::size_t i = 0; i < K; ++i) mu[i] = static_cast<double>(acc.sum[i]) / M;
  // Covariance of the feature means.
  std::vector<double> cov(K * K);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      cov[i * K + j] = (static_cast<double>(acc.sum2[i * K + j]) / M - mu[i] * mu[j]) / M;
    }
    if (acc.sum[i] == 0) cov[i * K + i] = 1.0 / (M * M);
  }
  auto se = [&](Feature f) { return std::sqrt(std::max(cov[f * K + f], 0.0)); };

  StatisticsReport r;
  r.trials = acc.trials;
  r.p1 = mu[f1];
  r.p2 = mu[f2];
  r.p3 = mu[f3];
  r.pa = mu[fa];
  r.p12 = mu[f12];
  r.p13 = mu[f13];
  r.p23 = mu[f23];
  r.p123 = mu[f123];
  r.p1a = mu[f1a];
  r.se_p1 = se(f1);
  r.se_p2 = se(f2);
  r.se_p3 = se(f3);
  r.se_pa = se(fa);
  r.se_p12 = se(f12);
  r.se_p13 = se(f13);
  r.se_p23 = se(f23);
  r.se_p123 = se(f123);
  r.se_p1a = se(f1a);

  Grad g_gsi{}, g_gss{}, g_gii{};
  if (r.p1 > 0.0 && r.p2 + r.p3 > 0.0) {
    const double den = r.p1 * (r.p2 + r.p3);
    const double v = (r.p12 + r.p13) / den;
    g_gsi[f12] = g_gsi[f13] = 1.0 / den;
    g_gsi[f1] = -v / r.p1;
    g_gsi[f2] = g_gsi[f3] = -v / (r.p2 + r.p3);
    r.g_si.value = v;
    r.g_si.se = std::sqrt(delta_variance(g_gsi, cov));
  } else {
    r.g_si = undefined("no idler or signal counts");
  }

  if (r.p12 > 0.0 && r.p13 > 0.0) {
    const double v = r.p1 * r.p123 / (r.p12 * r.p13);
    Grad g{};
    g[f1] = r.p123 / (r.p12 * r.p13);
    g[f123] = r.p1 / (r.p12 * r.p13);
    g[f12] = -v / r.p12;
    g[f13] = -v / r.p13;
    r.alpha.value = v;
    r.alpha.se = std::sqrt(delta_variance(g, cov));
  } else {
    r.alpha = undefined("insufficient coincidences");
  }

  if (r.p2 > 0.0 && r.p3 > 0.0) {
    const double v = r.p23 / (r.p2 * r.p3);
    g_gss[f23] = 1.0 / (r.p2 * r.p3);
    g_gss[f2] = -v / r.p2;
    g_gss[f3] = -v / r.p3;
    r.g_ss.value = v;
    r.g_ss.se = std::sqrt(delta_variance(g_gss, cov));
  } else {
    r.g_ss = undefined("no counts on D2 or D3");
  }

  if (!auxiliary_idler) {
    r.g_ii = undefined("g_ii needs the auxiliary idler detector");
  } else if (r.p1 > 0.0 && r.pa > 0.0) {
    const double v = r.p1a / (r.p1 * r.pa);
    g_gii[f1a] = 1.0 / (r.p1 * r.pa);
    g_gii[f1] = -v / r.p1;
    g_gii[fa] = -v / r.pa;
    r.g_ii.value = v;
    r.g_ii.se = std::sqrt(delta_variance(g_gii, cov));
  } else {
    r.g_ii = undefined("no counts on D1 or Da");
  }

  if (r.g_si.defined() && r.g_ss.defined() && r.g_ii.defined() && *r.g_ss.value > 0.0 && *r.g_ii.value > 0.0 &&
      *r.g_si.value > 0.0) {
    const double v = (*r.g_si.value) * (*r.g_si.value) / ((*r.g_ss.value) * (*r.g_ii.value));
    Grad g{};
    for (std::size_t i = 0; i < K; ++i) {
      g[i] = v * (2.0 * g_gsi[i] / *r.g_si.value - g_gss[i] / *r.g_ss.value - g_gii[i] / *r.g_ii.value);
    }
    r.R_clauser.value = v;
    r.R_clauser.se = std::sqrt(delta_variance(g, cov));
  } else {
    r.R_clauser = undefined("needs defined, nonzero g_si, g_ss and g_ii");
  }
  return r;
}

StatisticsReport estimate_statistics(std::span<const TrialRecord> records, DetectorModel model, bool auxiliary_idler) {
  CountAccumulator acc;
  for (const auto& r : records) acc.add(r, model);
  return estimate_statistics(acc, auxiliary_idler);
}

StatisticsReport run_counting(const CountingConfig& config, ExecutionPolicy policy) {
  return estimate_statistics(accumulate_trials(config, policy), config.auxiliary_idler);
}

}  // namespace qmem
