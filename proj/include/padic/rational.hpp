#pragma once

// Exact integer and rational helpers on top of GMP.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace padic {

using Integer = mpz_class;
using Rational = mpq_class;

Rational make_rational(const Integer& num, const Integer& den);

/// Lowest-terms text form: "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& r);
std::string to_string(const Integer& z);

/// Parses "a", "-a", "a/b" (whitespace tolerant). Throws Errc::Parse.
Rational parse_rational(std::string_view text);

/// Parses a whitespace- or comma-separated list of rationals.
std::vector<Rational> parse_rational_list(std::string_view text);

Integer ipow(const Integer& base, unsigned long exp);
Integer ipow(long base, unsigned long exp);
/// base^exp for any integer exp (base must be nonzero when exp < 0).
Rational rpow(const Rational& base, long exp);

Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);
Integer abs(const Integer& a);
Rational abs(const Rational& a);

/// Largest k with p^k | z; z must be nonzero.
long integer_valuation(const Integer& z, long p);

double to_double(const Rational& r);

bool is_integer(const Rational& r);

/// Converts to a machine integer; throws if it does not fit.
long to_long(const Integer& z);

}  // namespace padic
