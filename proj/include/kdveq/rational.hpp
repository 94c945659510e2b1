#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace kdveq {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_integer(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

inline BigInt numerator_of(const Rational& r) {
  return boost::multiprecision::numerator(r);
}

inline BigInt denominator_of(const Rational& r) {
  return boost::multiprecision::denominator(r);
}

/// "5", "-5", "2/3", "-2/3".
std::string to_string(const Rational& r);

double to_double(const Rational& r);

/// Exact value of a decimal literal such as "3", "2.5", "-0.125", "1/3".
/// Throws Error(Syntax) on malformed input.
Rational parse_rational(std::string_view text);

}  // namespace kdveq
