#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace dgpr {

/// Arbitrary-precision rational scalar for exact exponent arithmetic.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }
inline double to_double(double x) { return x; }

}  // namespace dgpr
