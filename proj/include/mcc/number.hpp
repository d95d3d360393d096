#pragma once

// Exact decimal <-> rational conversion and log10 helpers shared by the
// formats, counter and harness layers.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace mcc {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Parses `[+-]digits[.digits][(e|E)[+-]digits]` into an exact rational.
/// Returns nullopt for anything else (including empty mantissas and "inf").
std::optional<Rational> parse_decimal(std::string_view text);

/// Parses a non-negative decimal integer (digits only).
std::optional<BigInt> parse_integer(std::string_view text);

/// Renders `value` with exactly `digits` digits after the decimal point,
/// rounding half to even. `digits == 0` yields an integer string.
std::string format_fixed(const Rational& value, unsigned digits);

/// Like format_fixed, then strips trailing zeros while keeping at least one
/// fractional digit ("6.000" -> "6.0", "0.333" stays).
std::string format_trimmed(const Rational& value, unsigned digits);

/// Exact shortest decimal text of a rational whose denominator has only the
/// prime factors 2 and 5, with at least one fractional digit. Returns nullopt
/// for non-terminating expansions (e.g. 1/3).
std::optional<std::string> format_exact(const Rational& value);

/// log10(value) for value > 0, carried at roughly `digits` decimal digits of
/// fractional accuracy plus guard bits, returned as an exact rational image of
/// the binary approximation.
Rational log10_approx(const Rational& value, unsigned digits);

/// 10^exponent approximated with `digits` significant digits of guard.
Rational exp10_approx(const Rational& exponent, unsigned digits);

}  // namespace mcc
