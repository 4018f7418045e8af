#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace cpa {

// Expression templates are off so that `auto` and ternaries yield values.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

// Parses "p/q", "p", or a finite decimal such as "0.375". Throws
// std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

// Canonical "p/q" form ("p" when the denominator is 1).
std::string to_string(const Rational& r);

BigInt floor_int(const Rational& r);
BigInt ceil_int(const Rational& r);

// floor(r / unit) as a machine integer; throws std::overflow_error when the
// quotient does not fit.
std::int64_t floor_units(const Rational& r, const Rational& unit);
std::int64_t ceil_units(const Rational& r, const Rational& unit);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

// Exact rational value of a double (every finite double is a dyadic rational).
Rational from_double(double x);

}  // namespace cpa
