#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "simpcoll/rational.hpp"

namespace simpcoll {

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return static_cast<double>(x); }

inline double abs_value(double x) { return std::abs(x); }
inline Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }

/// Scalar constructed from a double; exact for Rational (binary fraction).
template <class Scalar>
Scalar from_double(double x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return Scalar(x);
  }
}

inline std::string to_string(double x) { return std::to_string(x); }
inline std::string to_string(const Rational& x) { return x.str(); }

template <class Scalar>
int sign_of(const Scalar& x) {
  if (x > 0) return 1;
  if (x < 0) return -1;
  return 0;
}

template <class Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

}  // namespace simpcoll
