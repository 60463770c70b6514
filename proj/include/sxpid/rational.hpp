#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace sxpid {

/// Arbitrary precision rational used for exact masses and exact log arguments.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "0.375", "3/8", "1", "1e-3" into an exact rational. Returns nullopt
/// for anything that is not a finite decimal or fraction.
std::optional<Rational> parse_rational(std::string_view text);

/// "num/den", or "num" when the denominator is one.
std::string to_string(const Rational& r);

/// True when both numerator and denominator fit in 64 bits.
bool fits_u64(const Rational& r);

} // namespace sxpid
