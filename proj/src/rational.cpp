#include "cpa/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpa {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  BigInt v{std::string(s)};
  return negative ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash), text);
    BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) int_part.remove_prefix(1);
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)) ||
        (int_part.empty() && frac_part.empty())) {
      throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    }
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    BigInt whole = int_part.empty() ? BigInt(0) : BigInt(std::string(int_part));
    BigInt frac = frac_part.empty() ? BigInt(0) : BigInt(std::string(frac_part));
    Rational r(whole * scale + frac, scale);
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

BigInt floor_int(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  BigInt q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) q -= 1;
  return q;
}

BigInt ceil_int(const Rational& r) {
  BigInt f = floor_int(r);
  if (Rational(f) != r) f += 1;
  return f;
}

namespace {
std::int64_t narrow(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("integer quotient exceeds 64 bits: " + v.str());
  }
  return v.convert_to<std::int64_t>();
}
}  // namespace

std::int64_t floor_units(const Rational& r, const Rational& unit) {
  if (unit <= 0) throw std::invalid_argument("unit must be positive");
  return narrow(floor_int(r / unit));
}

std::int64_t ceil_units(const Rational& r, const Rational& unit) {
  if (unit <= 0) throw std::invalid_argument("unit must be positive");
  return narrow(ceil_int(r / unit));
}

Rational from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite double");
  return Rational(x);
}

}  // namespace cpa
