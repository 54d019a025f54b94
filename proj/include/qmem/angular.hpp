#pragma once

#include <cstdlib>
#include <string>

namespace qmem {

/// An angular momentum quantum number or projection, stored as twice its
/// value so half-integers are exact.
class Spin {
 public:
  constexpr Spin() = default;
  constexpr explicit Spin(int value) : twice_(2 * value) {}

  static constexpr Spin from_twice(int twice) {
    Spin s;
    s.twice_ = twice;
    return s;
  }

  /// Throws ValidationError unless `value` is an integer or half-integer.
  static Spin from_double(double value);

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  friend constexpr Spin operator+(Spin a, Spin b) { return from_twice(a.twice_ + b.twice_); }
  friend constexpr Spin operator-(Spin a, Spin b) { return from_twice(a.twice_ - b.twice_); }
  friend constexpr Spin operator-(Spin a) { return from_twice(-a.twice_); }
  friend constexpr bool operator==(Spin a, Spin b) = default;

  std::string str() const;

 private:
  int twice_ = 0;
};

/// Largest j accepted by clebsch_gordan.
inline constexpr int kMaxTwiceJ = 40;

/// <j1 m1; j2 m2 | J M> in the Condon-Shortley convention, from the Racah
/// closed-form sum.
///
/// Returns 0 when m1 + m2 != M, when the triangle rule fails, or when a
/// projection lies outside [-j, j]. Throws ValidationError for j > 20, for
/// negative j, and for mixed parity (j and m differing by a non-integer).
double clebsch_gordan(Spin j1, Spin m1, Spin j2, Spin m2, Spin J, Spin M);

/// Convenience overload; each argument must be an integer or half-integer.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

}  // namespace qmem
