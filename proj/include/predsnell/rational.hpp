#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace predsnell {

// Exact arbitrary-precision rational. Every identity checked by the engine
// is an exact equality or inequality; no floating point anywhere.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Renders in lowest terms: "p/q", or "n" when the denominator is 1.
inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Parses a nonnegative rational written as "p" or "p/q" (decimal digits
/// only, q > 0). Anything else -- signs, decimals, whitespace -- is rejected.
inline std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const auto slash = text.find('/');
  const std::string_view num_part = text.substr(0, slash);
  if (num_part.empty()) return std::nullopt;
  for (char c : num_part)
    if (c < '0' || c > '9') return std::nullopt;
  BigInt num{std::string(num_part)};
  if (slash == std::string_view::npos) return Rational(num);
  const std::string_view den_part = text.substr(slash + 1);
  if (den_part.empty()) return std::nullopt;
  for (char c : den_part)
    if (c < '0' || c > '9') return std::nullopt;
  BigInt den{std::string(den_part)};
  if (den == 0) return std::nullopt;
  return Rational(num, den);
}

}  // namespace predsnell
