#include <cmath>

#include "doctest.h"
#include "qmem/control.hpp"
#include "qmem/errors.hpp"

using namespace qmem;

TEST_CASE("constant control") {
  const auto c = ControlProfile::constant(2.0, 1);
  CHECK(c.omega(-1.0) == 2.0);
  CHECK(c.omega(1.0) == 2.0);
  CHECK_FALSE(c.has_retrieval());
  CHECK(std::isinf(c.split_time()));
}

TEST_CASE("step off/on profile") {
  const auto c = ControlProfile::step_off_on(1.0, 0.0, 500e-9, 30e-9, 1);
  CHECK(c.omega(-16e-9) == 1.0);
  CHECK(c.omega(0.0) == doctest::Approx(0.5));
  CHECK(c.omega(16e-9) == 0.0);
  CHECK(c.omega(250e-9) == 0.0);
  CHECK(c.omega(500e-9) == doctest::Approx(0.5));
  CHECK(c.omega(520e-9) == 1.0);
  CHECK(c.split_time() == doctest::Approx(250e-9));
  CHECK(c.has_retrieval());
  CHECK(c.is_on_at(-1e-6));
  CHECK_FALSE(c.is_on_at(0.0));
  // Monotone fall.
  double prev = 2.0;
  for (double t = -20e-9; t <= 20e-9; t += 1e-9) {
    CHECK(c.omega(t) <= prev);
    prev = c.omega(t);
  }
  const auto keep = ControlProfile::step_off_on(1.0, 0.0, INFINITY, 30e-9, 1);
  CHECK(keep.omega(1.0) == 0.0);
  CHECK_FALSE(keep.has_retrieval());
}

TEST_CASE("control validation") {
  CHECK_THROWS_AS(ControlProfile::step_off_on(1.0, 0.0, 10e-9, 30e-9, 1), ValidationError);
  CHECK_THROWS_AS(ControlProfile::step_off_on(1.0, 0.0, 1e-6, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(ControlProfile::constant(-1.0, 1), ValidationError);
  CHECK_THROWS_AS(ControlProfile::constant(1.0, 0), ValidationError);
  CHECK_THROWS_AS(ControlProfile::step_off_on(1.0, NAN, 1e-6, 30e-9, 1), ValidationError);
}

TEST_CASE("sampled spectrum of the constant control is a DC line") {
  const auto g = FrequencyGrid::from_time_window(64, -0.3e-6, 1.0e-6);
  const auto c = ControlProfile::constant(1.0, 1);
  const ComplexVector s = c.spectrum(g);
  double off = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (static_cast<std::size_t>(k) != g.zero_index()) off += std::norm(s[k]);
  }
  CHECK(off < 1e-20 * std::norm(s[static_cast<Eigen::Index>(g.zero_index())]));
  CHECK(c.describe().find("constant") != std::string::npos);
}
