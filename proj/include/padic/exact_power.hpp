#pragma once

// Products of rational powers b^e (b > 0 rational, e rational), compared
// exactly by raising both sides to a common integer power.

#include <optional>
#include <string>
#include <vector>

#include "padic/rational.hpp"

namespace padic {

struct PowerTerm {
  Rational base;      // > 0
  Rational exponent;  // non-integer after normalization
};

class ExactPower {
 public:
  ExactPower() = default;  // the value 1
  explicit ExactPower(const Rational& value);
  static ExactPower power(const Rational& base, const Rational& exponent);

  ExactPower& operator*=(const ExactPower& other);
  friend ExactPower operator*(ExactPower a, const ExactPower& b) { return a *= b; }
  ExactPower inverse() const;
  ExactPower pow(const Rational& exponent) const;

  /// Rational factor collecting every integer-exponent term.
  const Rational& coefficient() const noexcept { return coeff_; }
  const std::vector<PowerTerm>& terms() const noexcept { return terms_; }
  std::optional<Rational> as_rational() const;

  double log() const;
  double to_double() const;
  std::string to_string() const;

 private:
  void normalize();

  Rational coeff_{1};
  std::vector<PowerTerm> terms_;
};

/// Sign of a - b, decided exactly.
int compare(const ExactPower& a, const ExactPower& b);

inline bool operator<(const ExactPower& a, const ExactPower& b) { return compare(a, b) < 0; }
inline bool operator<=(const ExactPower& a, const ExactPower& b) { return compare(a, b) <= 0; }
inline bool operator>(const ExactPower& a, const ExactPower& b) { return compare(a, b) > 0; }
inline bool operator>=(const ExactPower& a, const ExactPower& b) { return compare(a, b) >= 0; }
inline bool operator==(const ExactPower& a, const ExactPower& b) { return compare(a, b) == 0; }

ExactPower max(const ExactPower& a, const ExactPower& b);

/// p^e for integer e.
ExactPower prime_power(long p, long e);

/// Smallest integer t with p^-t < bound.
long smallest_exponent_below(long p, const ExactPower& bound);
/// Smallest integer t with p^-t <= bound.
long smallest_exponent_at_most(long p, const ExactPower& bound);

/// Smallest integer H >= 1 with H >= value.
Integer ceil_of(const ExactPower& value);

}  // namespace padic
