#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace stoprule {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Exact rational with the same value as a binary double.
inline Rational exact_rational(double x) { return Rational(x); }

}  // namespace stoprule
