#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qmem/angular.hpp"
#include "qmem/atomic.hpp"
#include "qmem/errors.hpp"

using namespace qmem;

TEST_CASE("85Rb D1 preset") {
  const LevelScheme s = LevelScheme::rb85_d1();
  CHECK(s.F_a == 3);
  CHECK(s.F_b == 2);
  CHECK(s.F_c == 3);
  CHECK(s.g_a == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.g_b == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(s.g_c == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(s.Gamma_cb() == doctest::Approx(std::numbers::pi * 5.75e6));
  CHECK(s.f_cb == doctest::Approx(5.0 / 9.0));
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("scheme validation") {
  LevelScheme s = LevelScheme::rb85_d1();
  s.F_c = 5;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = LevelScheme::rb85_d1();
  s.Gamma_c = 0.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = LevelScheme::rb85_d1();
  s.f_cb = 1.5;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  CHECK_THROWS_AS((Polarization{0, 1}.validate()), ValidationError);
}

TEST_CASE("Zeeman frequencies are linear in the field") {
  const LevelScheme s = LevelScheme::rb85_d1();
  const Polarization pol{1, 1};
  const double B = field_for_ground_splitting(s, 2.0 * std::numbers::pi * 14e3);
  CHECK(B == doctest::Approx(0.015).epsilon(0.02));
  const ZeemanConfig z = zeeman_frequencies(s, pol, B);
  CHECK(z.Delta_ab == doctest::Approx(2.0 * std::numbers::pi * 14e3).epsilon(1e-12));
  CHECK(z.delta_a == 0.0);  // beta = r
  const ZeemanConfig z2 = zeeman_frequencies(s, pol, 2.0 * B);
  CHECK(z2.Delta_ab == doctest::Approx(2.0 * z.Delta_ab));
  CHECK(z2.Delta_cb == doctest::Approx(2.0 * z.Delta_cb));
  const ZeemanConfig mismatch = zeeman_frequencies(s, Polarization{1, -1}, B);
  CHECK(mismatch.delta_a == doctest::Approx(2.0 * s.g_a * kBohrMagnetonOverHbar * B));
  CHECK_THROWS_AS(zeeman_frequencies(s, pol, NAN), ValidationError);
}

TEST_CASE("Lande factors") {
  CHECK(lande_g_j(0, 0.5, 0.5) == doctest::Approx(2.0));
  CHECK(lande_g_j(1, 0.5, 0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(lande_g_f(0.5, 1.5, 2.0, 2.0) == doctest::Approx(0.5));  // 87Rb F=2
}

TEST_CASE("dipole weights are normalized and follow the CG table") {
  const LevelScheme s = LevelScheme::rb85_d1();
  for (int beta : {-1, 1}) {
    const SublevelTable x = dipole_weights(s, beta);
    double sum = 0.0;
    for (double v : x.values()) sum += v * v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
  const SublevelTable x = dipole_weights(s, 1);
  CHECK(x[2] / x[0] == doctest::Approx(signal_coupling(s, 1, 2) / signal_coupling(s, 1, 0)));
}

TEST_CASE("control coupling uses the control polarization") {
  const LevelScheme s = LevelScheme::rb85_d1();
  // |a, m+beta-r> -> |c, m+beta>, polarization r.
  CHECK(control_coupling(s, {1, 1}, 0) == doctest::Approx(clebsch_gordan(3.0, 0.0, 1.0, 1.0, 3.0, 1.0)));
  CHECK(control_coupling(s, {1, -1}, 0) == doctest::Approx(clebsch_gordan(3.0, 2.0, 1.0, -1.0, 3.0, 1.0)));
  // m_a = 4 does not exist: zero coupling rather than an error.
  CHECK(control_coupling(s, {1, -1}, 2) == 0.0);
}

TEST_CASE("medium optical depth") {
  const LevelScheme s = LevelScheme::rb85_d1();
  const MediumProfile m = medium_with_depth(s, 1, DensityShape::Uniform, 2e-3, 201, 8.0);
  CHECK(m.total_depth() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(m.length() == doctest::Approx(2e-3));
  CHECK(m.depth_derivative_at(1e-3) == doctest::Approx(4000.0).epsilon(1e-12));
  CHECK(m.depth_derivative_at(3e-3) == 0.0);
  const MediumProfile g = medium_with_depth(s, 1, DensityShape::Gaussian, 2e-3, 401, 8.0, 0.3e-3);
  CHECK(g.total_depth() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(g.depth_derivative_at(1e-3) > g.depth_derivative_at(0.2e-3));

  // Depth from a tabulated density: d = k n L for uniform n.
  const std::vector<double> z{0.0, 1e-3, 2e-3};
  const std::vector<double> n{1e16, 1e16, 1e16};
  const MediumProfile t = optical_depth(s, 1, z, n);
  CHECK(t.total_depth() == doctest::Approx(depth_per_density(s, 1) * 1e16 * 2e-3).epsilon(1e-12));

  CHECK_THROWS_AS(medium_with_depth(s, 1, DensityShape::Uniform, 2e-3, 201, -1.0), ValidationError);
  CHECK_THROWS_AS(medium_with_depth(s, 1, DensityShape::Gaussian, 2e-3, 201, 8.0), ValidationError);
  const std::vector<double> bad{0.0, 2e-3, 1e-3};
  CHECK_THROWS_AS(optical_depth(s, 1, bad, n), ValidationError);
}
