#include "qmem/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

// n! for n <= 2*(3*20)+1; long double keeps the alternating Racah sum
// accurate to ~1e-15 for the j <= 4 range the physics uses.
constexpr int kMaxFactorial = 3 * kMaxTwiceJ / 2 + 2;

const std::array<long double, kMaxFactorial + 1>& factorials() {
  static const auto table = [] {
    std::array<long double, kMaxFactorial + 1> f{};
    f[0] = 1.0L;
    for (int n = 1; n <= kMaxFactorial; ++n) f[n] = f[n - 1] * n;
    return f;
  }();
  return table;
}

// Argument is twice the integer; callers guarantee evenness.
long double fact2(int twice) { return factorials()[twice / 2]; }

void check_pair(Spin j, Spin m) {
  if (j.twice() < 0) throw ValidationError("negative angular momentum " + j.str());
  if (j.twice() > kMaxTwiceJ) throw ValidationError("angular momentum " + j.str() + " exceeds 20");
  if ((j.twice() + m.twice()) % 2 != 0) {
    throw ValidationError("mixed parity: j=" + j.str() + " and m=" + m.str() +
                          " differ by a non-integer");
  }
}

}  // namespace

Spin Spin::from_double(double value) {
  const double twice = 2.0 * value;
  const double rounded = std::round(twice);
  if (!std::isfinite(value) || std::abs(twice - rounded) > 1e-9) {
    throw ValidationError("not an integer or half-integer: " + std::to_string(value));
  }
  return from_twice(static_cast<int>(rounded));
}

std::string Spin::str() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

double clebsch_gordan(Spin j1, Spin m1, Spin j2, Spin m2, Spin J, Spin M) {
  check_pair(j1, m1);
  check_pair(j2, m2);
  check_pair(J, M);

  if (m1.twice() + m2.twice() != M.twice()) return 0.0;
  if (std::abs(m1.twice()) > j1.twice() || std::abs(m2.twice()) > j2.twice() ||
      std::abs(M.twice()) > J.twice()) {
    return 0.0;
  }
  const int a = j1.twice(), b = j2.twice(), c = J.twice();
  if (c < std::abs(a - b) || c > a + b || (a + b + c) % 2 != 0) return 0.0;

  const long double prefactor =
      (c + 1) * fact2(c + a - b) * fact2(c - a + b) * fact2(a + b - c) / fact2(a + b + c + 2);
  const long double projections = fact2(c + M.twice()) * fact2(c - M.twice()) *
                                  fact2(a - m1.twice()) * fact2(a + m1.twice()) *
                                  fact2(b - m2.twice()) * fact2(b + m2.twice());

  // k runs over all values keeping every factorial argument nonnegative.
  const int k_lo = std::max({0, (b - c - m1.twice()) / 2, (a - c + m2.twice()) / 2});
  const int k_hi = std::min({(a + b - c) / 2, (a - m1.twice()) / 2, (b + m2.twice()) / 2});
  long double sum = 0.0L;
  for (int k = k_lo; k <= k_hi; ++k) {
    const long double denom = factorials()[k] * fact2(a + b - c - 2 * k) *
                              fact2(a - m1.twice() - 2 * k) * fact2(b + m2.twice() - 2 * k) *
                              fact2(c - b + m1.twice() + 2 * k) *
                              fact2(c - a - m2.twice() + 2 * k);
    sum += (k % 2 == 0 ? 1.0L : -1.0L) / denom;
  }
  return static_cast<double>(std::sqrt(prefactor * projections) * sum);
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
  return clebsch_gordan(Spin::from_double(j1), Spin::from_double(m1), Spin::from_double(j2),
                        Spin::from_double(m2), Spin::from_double(J), Spin::from_double(M));
}

}  // namespace qmem
