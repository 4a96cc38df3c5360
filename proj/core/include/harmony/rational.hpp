#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace harmony {

/// Exact rational number. Expression templates are off so that `auto` locals
/// never capture a dangling expression.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

/// Thrown on malformed user input (problem files, CLI values, oracle specs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a mathematical property the library relies on is observed to
/// fail at runtime, e.g. an oracle that breaks its declared assumptions.
class PropertyViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Parses "3", "-3/4", "0.125", "-.5" or "1e-3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" rendering ("p" when q == 1).
std::string to_string(const Rational& value);

double to_double(const Rational& value);

BigInt numerator_of(const Rational& value);
BigInt denominator_of(const Rational& value);

/// Converts to int64, throwing std::overflow_error when out of range.
std::int64_t checked_int64(const BigInt& value);

}  // namespace harmony
