#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "padic/rational.hpp"

namespace padic {

/// A p-adic integer known modulo p^K. The residue is kept in [0, p^K).
class PAdicInt {
 public:
  PAdicInt(long p, int precision, const Integer& residue);

  long prime() const noexcept { return p_; }
  int precision() const noexcept { return k_; }
  const Integer& residue() const noexcept { return r_; }
  Integer modulus() const { return ipow(p_, static_cast<unsigned long>(k_)); }

  bool is_zero() const { return r_ == 0; }
  /// nullopt when the residue is 0, i.e. zero to known precision.
  std::optional<int> valuation() const;
  /// |x|_p when nonzero; otherwise the bound p^-K.
  Rational norm_bound() const;

  int digit(int i) const;
  /// Base-p digits a_0..a_{K-1}, least significant first.
  std::vector<int> digits() const;

  PAdicInt truncate(int precision) const;
  PAdicInt operator-() const;

  friend PAdicInt operator+(const PAdicInt& a, const PAdicInt& b);
  friend PAdicInt operator-(const PAdicInt& a, const PAdicInt& b);
  friend PAdicInt operator*(const PAdicInt& a, const PAdicInt& b);
  friend bool operator==(const PAdicInt& a, const PAdicInt& b) {
    return a.p_ == b.p_ && a.k_ == b.k_ && a.r_ == b.r_;
  }

 private:
  long p_;
  int k_;
  Integer r_;
};

bool is_prime(long q);

/// v_p(x) for nonzero rational x. Throws Errc::InfiniteValuation for 0.
long valuation(const Rational& x, long p);
/// p^-v_p(x), and 0 for x = 0.
Rational norm_p(const Rational& x, long p);

/// The residue r with b r = a (mod p^K). Throws Errc::NotPAdicInteger when p | b.
PAdicInt embed_rational(const Integer& a, const Integer& b, long p, int precision);
PAdicInt embed_rational(const Rational& x, long p, int precision);

/// Digit shift: drops a_0 and adds 1 when a_0 != 0. Output precision K-1.
PAdicInt shift_map(const PAdicInt& x);

std::uint64_t euler_phi(std::uint64_t q);
/// phi(0..n), with phi(0) = 0.
std::vector<std::uint64_t> phi_table(std::uint64_t n);

struct Params {
  long p = 3;
  int n = 1;
  int d = 0;
  int m = 0;

  void validate() const;
  void validate_manifold() const;
};

}  // namespace padic
