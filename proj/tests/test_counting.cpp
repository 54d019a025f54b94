#include <cmath>

#include "doctest.h"
#include "oracles/fock_oracle.hpp"
#include "qmem/counting.hpp"
#include "qmem/errors.hpp"

using namespace qmem;

namespace {

CountingConfig reference_source(double s, double B, std::uint64_t trials, std::uint64_t seed = 7) {
  CountingConfig c;
  c.s = s;
  c.B_s = B;
  c.epsilon_1 = 0.039;
  c.epsilon_2 = c.epsilon_3 = 0.15;
  c.w_i = 0.25;
  c.w_s = 0.15;
  c.trials = trials;
  c.seed = seed;
  return c;
}

oracle::FockSetup fock_of(const CountingConfig& c) {
  oracle::FockSetup f;
  f.s = c.s;
  f.B = c.B_s;
  f.eps1 = c.epsilon_1;
  f.eps2 = c.epsilon_2;
  f.eps3 = c.epsilon_3;
  f.T2 = c.T2;
  f.threshold = c.detector == DetectorModel::Threshold;
  return f;
}

void check_within(const Estimate& e, double expect, double sigmas) {
  REQUIRE(e.defined());
  CAPTURE(*e.value);
  CAPTURE(e.se);
  CAPTURE(expect);
  CHECK(std::abs(*e.value - expect) <= sigmas * e.se);
}

}  // namespace

TEST_CASE("analytic formulas") {
  CHECK(analytic_g_si(0.12, 0.0) == doctest::Approx(1.24 / 0.12));
  CHECK(analytic_g_si(0.1, 0.1) == doctest::Approx(1.3 / 0.2));
  CHECK(analytic_alpha(0.0, 0.0) == 0.0);
  CHECK(analytic_alpha(0.1, 0.0) == doctest::Approx(0.1 * 4.6 / 1.44));
  CHECK(analytic_alpha(0.1, 0.08) == doctest::Approx((0.46 + 0.32 * 1.2) / (1.28 * 1.28)));
  CHECK_THROWS_AS(analytic_g_si(0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(analytic_alpha(-0.1, 0.0), ValidationError);
  CHECK(CountingConfig::s_from_raman_gain(reference_source(0.3, 0, 0).raman_gain()) == doctest::Approx(0.3));
}

TEST_CASE("Fock-enumeration oracle: g_si exact, alpha exact without background") {
  for (double s : {0.01, 0.05, 0.12, 0.5}) {
    for (double B : {0.0, 0.08}) {
      CAPTURE(s);
      CAPTURE(B);
      const auto p = oracle::fock_probabilities(fock_of(reference_source(s, B, 0)));
      CHECK(std::abs(p.g_si() - analytic_g_si(s, B)) < 1e-10 * analytic_g_si(s, B));
      // With coherent background the exact alpha gains B^2 in the numerator.
      const double den = 1.0 + 2.0 * s + B;
      CHECK(std::abs(p.alpha() - (analytic_alpha(s, B) + B * B / (den * den))) < 1e-10);
      // Source-side second-order coherence 2(s^2 + 2sB) + B^2 over (s + B)^2 ... checked via the MC below.
      CHECK(p.g_ss() > 1.0);
    }
  }
}

TEST_CASE("Monte Carlo agrees with the Fock oracle") {
  for (auto det : {DetectorModel::PhotonCounting, DetectorModel::Threshold}) {
    for (double B : {0.0, 0.08}) {
      CountingConfig c = reference_source(0.3, B, 2'000'000, 99);
      c.epsilon_2 = c.epsilon_3 = 0.6;
      c.detector = det;
      CAPTURE(B);
      CAPTURE(static_cast<int>(det));
      const auto p = oracle::fock_probabilities(fock_of(c));
      const StatisticsReport r = run_counting(c);
      CHECK(std::abs(r.p1 - p.p1) <= 4.0 * r.se_p1);
      CHECK(std::abs(r.p2 - p.p2) <= 4.0 * r.se_p2);
      CHECK(std::abs(r.p12 - p.p12) <= 4.0 * r.se_p12);
      CHECK(std::abs(r.p23 - p.p23) <= 4.0 * r.se_p23);
      check_within(r.alpha, p.alpha(), 4.0);
      check_within(r.g_ss, p.g_ss(), 4.0);
    }
  }
}

TEST_CASE("pair-number truncation") {
  CHECK(pair_truncation(0.0) == 0);
  for (double s : {0.01, 0.12, 0.5, 2.0}) {
    const int n = pair_truncation(s);
    const double q = s / (1.0 + s);
    CHECK(std::pow(q, n + 1) < 1e-10);
    CHECK(std::pow(q, n) >= 1e-10);
  }
}

TEST_CASE("determinism and thread independence") {
  const CountingConfig c = reference_source(0.12, 0.08, 100'000, 5);
  const CountAccumulator a = accumulate_trials(c, ExecutionPolicy::Serial);
  const CountAccumulator b = accumulate_trials(c, ExecutionPolicy::Parallel);
  CHECK(a == b);
  CHECK(estimate_statistics(a, false) == estimate_statistics(b, false));
  CHECK(run_counting(c) == run_counting(c));
  CountingConfig other = c;
  other.seed = 6;
  CHECK_FALSE(accumulate_trials(other) == a);
  // Records and the streaming fold give the same report.
  const auto records = simulate_trials(c);
  CHECK(records.size() == c.trials);
  CHECK(estimate_statistics(records, c.detector, false) == estimate_statistics(a, false));
  // A prefix of the run reproduces the same trials.
  CountingConfig shorter = c;
  shorter.trials = 5000;
  const auto head = simulate_trials(shorter);
  for (std::size_t i = 0; i < head.size(); ++i) CHECK(head[i].counts == records[i].counts);
}

TEST_CASE("gate discipline and threshold clipping") {
  CountingConfig c = reference_source(0.5, 0.08, 20'000, 3);
  c.epsilon_1 = c.epsilon_2 = c.epsilon_3 = 0.9;
  c.gates[kD1] = Gate{10, 100};
  c.gates[kD2] = Gate{50, 240};
  c.detector = DetectorModel::Threshold;
  for (const auto& r : simulate_trials(c)) {
    for (std::size_t d = 0; d < 3; ++d) {
      CHECK(r.counts[d] <= 1);
      if (r.counts[d] == 0) {
        CHECK(r.t_ns[d] == -1);
      } else {
        CHECK(c.gates[d].contains(r.t_ns[d]));
        CHECK(r.t_ns[d] % 2 == 0);
      }
    }
    CHECK(r.t_ns[kDa] == -1);
  }
}

TEST_CASE("nonclassicality: pair source versus coherent fields") {
  CountingConfig pdc = reference_source(0.12, 0.0, 2'000'000, 21);
  pdc.epsilon_2 = pdc.epsilon_3 = 0.5;
  pdc.epsilon_1 = pdc.epsilon_a = 0.5;
  pdc.auxiliary_idler = true;
  const StatisticsReport q = run_counting(pdc);
  REQUIRE(q.alpha.defined());
  REQUIRE(q.R_clauser.defined());
  CHECK(*q.alpha.value + 3.0 * q.alpha.se < 1.0);
  CHECK(*q.R_clauser.value - 3.0 * q.R_clauser.se > 1.0);
  // Thermal marginals: g_ss and g_ii near 2.
  CHECK(*q.g_ss.value == doctest::Approx(2.0).epsilon(0.1));
  CHECK(*q.g_ii.value == doctest::Approx(2.0).epsilon(0.1));

  CountingConfig coh = pdc;
  coh.source = SourceModel::Coherent;
  const StatisticsReport k = run_counting(coh);
  CHECK(*k.alpha.value + 3.0 * k.alpha.se >= 1.0);
  CHECK(*k.R_clauser.value - 3.0 * k.R_clauser.se <= 1.0);
}

TEST_CASE("estimator edge cases") {
  CountingConfig none = reference_source(0.0, 0.0, 1000, 1);
  const StatisticsReport r = run_counting(none);
  CHECK_FALSE(r.g_si.defined());
  CHECK_FALSE(r.alpha.defined());
  CHECK(r.se_p1 == doctest::Approx(1.0 / 1000.0));  // zero-count floor
  CHECK_FALSE(r.g_ii.defined());
  CHECK_THROWS_AS(estimate_statistics(CountAccumulator{}, false), ValidationError);
}

TEST_CASE("memory chain and singles rates") {
  const CountingConfig c = reference_source(0.1, 0.0, 0);
  const CountingConfig m = memory_chain(c, 0.06, 0.08);
  CHECK(m.epsilon_1 == c.epsilon_1);
  CHECK(m.epsilon_2 == doctest::Approx(0.009));
  CHECK(m.B_s == 0.08);
  CHECK_THROWS_AS(memory_chain(c, 1.5, 0.0), ValidationError);
  const SinglesRates rates = singles_rates(c, 1e6);
  CHECK(rates.R1 == doctest::Approx(0.039 * 0.1 * 1e6));
  CHECK(rates.low_rate_regime);
  CHECK(c.heralding_ratio() == doctest::Approx(0.156));
}

TEST_CASE("config validation") {
  CountingConfig c = reference_source(0.1, 0.0, 10);
  c.epsilon_2 = 1.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = reference_source(-0.1, 0.0, 10);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = reference_source(0.1, 0.0, 10);
  c.gates[kD2].width_ns = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = reference_source(0.1, 0.0, 10);
  c.w_i = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}
