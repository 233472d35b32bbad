#include "padic/padic_int.hpp"

#include <numeric>

#include "padic/error.hpp"

namespace padic {

namespace {

void check_prime(long p) {
  if (!is_prime(p)) throw Error(Errc::InvalidArgument, "not a prime: " + std::to_string(p));
}

void check_same_prime(const PAdicInt& a, const PAdicInt& b) {
  if (a.prime() != b.prime())
    throw Error(Errc::MismatchedPrime, "mismatched primes " + std::to_string(a.prime()) + " and " +
                                           std::to_string(b.prime()));
}

Integer reduce(const Integer& v, const Integer& mod) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t());
  return r;
}

}  // namespace

PAdicInt::PAdicInt(long p, int precision, const Integer& residue) : p_(p), k_(precision) {
  if (p < 2) throw Error(Errc::InvalidArgument, "prime must be at least 2");
  if (precision < 1) throw Error(Errc::InvalidArgument, "precision must be positive");
  r_ = reduce(residue, modulus());
}

std::optional<int> PAdicInt::valuation() const {
  if (r_ == 0) return std::nullopt;
  return static_cast<int>(integer_valuation(r_, p_));
}

Rational PAdicInt::norm_bound() const {
  auto v = valuation();
  return rpow(Rational(p_), -(v ? *v : k_));
}

int PAdicInt::digit(int i) const {
  if (i < 0 || i >= k_) throw Error(Errc::InvalidArgument, "digit index out of range");
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r_.get_mpz_t(), ipow(p_, static_cast<unsigned long>(i)).get_mpz_t());
  return static_cast<int>(mpz_fdiv_ui(q.get_mpz_t(), static_cast<unsigned long>(p_)));
}

std::vector<int> PAdicInt::digits() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k_));
  Integer v = r_;
  for (int i = 0; i < k_; ++i) {
    out.push_back(static_cast<int>(
        mpz_fdiv_q_ui(v.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(p_))));
  }
  return out;
}

PAdicInt PAdicInt::truncate(int precision) const {
  if (precision > k_) throw Error(Errc::InsufficientPrecision, "cannot extend precision");
  return PAdicInt(p_, precision, r_);
}

PAdicInt PAdicInt::operator-() const { return PAdicInt(p_, k_, -r_); }

PAdicInt operator+(const PAdicInt& a, const PAdicInt& b) {
  check_same_prime(a, b);
  return PAdicInt(a.p_, std::min(a.k_, b.k_), a.r_ + b.r_);
}

PAdicInt operator-(const PAdicInt& a, const PAdicInt& b) {
  check_same_prime(a, b);
  return PAdicInt(a.p_, std::min(a.k_, b.k_), a.r_ - b.r_);
}

PAdicInt operator*(const PAdicInt& a, const PAdicInt& b) {
  check_same_prime(a, b);
  return PAdicInt(a.p_, std::min(a.k_, b.k_), a.r_ * b.r_);
}

bool is_prime(long q) {
  if (q < 2) return false;
  for (long f = 2; f * f <= q; ++f)
    if (q % f == 0) return false;
  return true;
}

long valuation(const Rational& x, long p) {
  if (x == 0) throw Error(Errc::InfiniteValuation, "valuation undefined (infinite) for 0");
  return integer_valuation(x.get_num(), p) - integer_valuation(x.get_den(), p);
}

Rational norm_p(const Rational& x, long p) {
  if (x == 0) return Rational(0);
  return rpow(Rational(p), -valuation(x, p));
}

PAdicInt embed_rational(const Integer& a, const Integer& b, long p, int precision) {
  if (b == 0) throw Error(Errc::InvalidArgument, "zero denominator");
  if (mpz_divisible_ui_p(b.get_mpz_t(), static_cast<unsigned long>(p)))
    throw Error(Errc::NotPAdicInteger, "not a p-adic integer: " + b.get_str() + " is divisible by " +
                                           std::to_string(p));
  Integer mod = ipow(p, static_cast<unsigned long>(precision));
  Integer inv;
  mpz_invert(inv.get_mpz_t(), b.get_mpz_t(), mod.get_mpz_t());
  return PAdicInt(p, precision, a * inv);
}

PAdicInt embed_rational(const Rational& x, long p, int precision) {
  return embed_rational(x.get_num(), x.get_den(), p, precision);
}

PAdicInt shift_map(const PAdicInt& x) {
  if (x.precision() < 2) throw Error(Errc::InsufficientPrecision, "shift map needs precision >= 2");
  Integer q;
  unsigned long a0 = mpz_fdiv_q_ui(q.get_mpz_t(), x.residue().get_mpz_t(),
                                   static_cast<unsigned long>(x.prime()));
  if (a0 != 0) q += 1;
  return PAdicInt(x.prime(), x.precision() - 1, q);
}

std::uint64_t euler_phi(std::uint64_t q) {
  if (q == 0) throw Error(Errc::InvalidArgument, "euler_phi needs q >= 1");
  std::uint64_t result = q;
  for (std::uint64_t f = 2; f * f <= q; ++f) {
    if (q % f != 0) continue;
    while (q % f == 0) q /= f;
    result -= result / f;
  }
  if (q > 1) result -= result / q;
  return result;
}

std::vector<std::uint64_t> phi_table(std::uint64_t n) {
  std::vector<std::uint64_t> phi(n + 1);
  std::iota(phi.begin(), phi.end(), std::uint64_t{0});
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (phi[i] != i) continue;
    for (std::uint64_t j = i; j <= n; j += i) phi[j] -= phi[j] / i;
  }
  return phi;
}

void Params::validate() const {
  check_prime(p);
  if (n < 1) throw Error(Errc::InvalidArgument, "dimension n must be at least 1");
}

void Params::validate_manifold() const {
  validate();
  if (d < 1 || m < 1) throw Error(Errc::InvalidArgument, "need d >= 1 and m >= 1");
  if (d + m != n) throw Error(Errc::InvalidArgument, "need n = d + m");
}

}  // namespace padic
