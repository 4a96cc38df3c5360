#include "harmony/rational.hpp"

#include <cctype>
#include <limits>

namespace harmony {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

/// Leading zeros would make the string constructor read octal.
BigInt decimal_integer(std::string_view digits) {
  auto nonzero = digits.find_first_not_of('0');
  return nonzero == std::string_view::npos ? BigInt(0) : BigInt(std::string(digits.substr(nonzero)));
}

BigInt pow10(long exponent) {
  BigInt result = 1;
  for (long i = 0; i < exponent; ++i) result *= 10;
  return result;
}

Rational parse_decimal(std::string_view text, std::string_view original) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 4) {
      throw InputError("malformed rational '" + std::string(original) + "'");
    }
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string digits;
  long fraction_digits = 0;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty())) {
      throw InputError("malformed rational '" + std::string(original) + "'");
    }
    digits = std::string(whole) + std::string(frac);
    fraction_digits = static_cast<long>(frac.size());
  } else {
    if (!all_digits(text)) throw InputError("malformed rational '" + std::string(original) + "'");
    digits = std::string(text);
  }
  BigInt mantissa = decimal_integer(digits);
  long scale = exponent - fraction_digits;
  Rational value = scale >= 0 ? Rational(mantissa * pow10(scale))
                              : Rational(mantissa) / Rational(pow10(-scale));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view original = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InputError("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    bool negative = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
      negative = num.front() == '-';
      num.remove_prefix(1);
    }
    if (!all_digits(num) || !all_digits(den)) {
      throw InputError("malformed rational '" + std::string(original) + "'");
    }
    BigInt d = decimal_integer(den);
    if (d == 0) throw InputError("zero denominator in '" + std::string(original) + "'");
    Rational value = Rational(decimal_integer(num)) / Rational(d);
    return negative ? Rational(-value) : value;
  }
  return parse_decimal(text, original);
}

std::string to_string(const Rational& value) { return value.str(); }

double to_double(const Rational& value) { return value.convert_to<double>(); }

BigInt numerator_of(const Rational& value) { return boost::multiprecision::numerator(value); }

BigInt denominator_of(const Rational& value) { return boost::multiprecision::denominator(value); }

std::int64_t checked_int64(const BigInt& value) {
  if (value > std::numeric_limits<std::int64_t>::max() ||
      value < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("integer does not fit in 64 bits: " + value.str());
  }
  return value.convert_to<std::int64_t>();
}

}  // namespace harmony
