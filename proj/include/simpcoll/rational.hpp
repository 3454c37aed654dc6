#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Core>

#include "simpcoll/errors.hpp"

namespace simpcoll {

/// Exact fraction p/q over 128-bit integers, kept in lowest terms with q > 0.
///
/// Contingency-table arithmetic only ever forms sums, products and ratios of
/// cell counts, so 128 bits go a long way; any operation whose result does
/// not fit throws NumericalError instead of wrapping. Comparisons never
/// overflow: they fall back to a continued-fraction walk.
class Rational {
 public:
  __extension__ typedef __int128 Int;

  constexpr Rational() = default;
  template <std::integral I>
  constexpr Rational(I n) : num_(static_cast<Int>(n)) {}  // NOLINT: implicit by design
  Rational(Int num, Int den) : num_(num), den_(den) {
    if (den_ == 0) throw InputError("rational with zero denominator");
    normalize();
  }
  template <std::integral I, std::integral J>
  Rational(I num, J den) : Rational(static_cast<Int>(num), static_cast<Int>(den)) {}
  /// Exact value of a finite double.
  explicit Rational(double x);

  Int numerator() const { return num_; }
  Int denominator() const { return den_; }

  explicit operator double() const;

  /// "p/q", or "p" for an integer.
  std::string str() const;

  Rational operator-() const {
    Rational r;
    r.num_ = checked_neg(num_);
    r.den_ = den_;
    return r;
  }
  friend Rational operator+(const Rational& a, const Rational& b) { return add(a, b, false); }
  friend Rational operator-(const Rational& a, const Rational& b) { return add(a, b, true); }
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend int compare(const Rational& a, const Rational& b);
  friend bool operator<(const Rational& a, const Rational& b) { return compare(a, b) < 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return compare(a, b) > 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return compare(a, b) <= 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return compare(a, b) >= 0; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static Int checked_neg(Int a);
  static Int checked_mul(Int a, Int b);
  static Int checked_add(Int a, Int b);
  static Rational add(const Rational& a, const Rational& b, bool subtract);
  void normalize();

  Int num_ = 0;
  Int den_ = 1;
};

std::string to_decimal(Rational::Int v);

}  // namespace simpcoll

namespace Eigen {

template <>
struct NumTraits<simpcoll::Rational> : GenericNumTraits<simpcoll::Rational> {
  typedef simpcoll::Rational Real;
  typedef simpcoll::Rational NonInteger;
  typedef simpcoll::Rational Literal;
  typedef simpcoll::Rational Nested;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 16,
    MulCost = 32
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 38; }
};

}  // namespace Eigen
