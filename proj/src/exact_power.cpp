#include "padic/exact_power.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "padic/error.hpp"

namespace padic {

namespace {

double log_rational(const Rational& r) {
  // log of a positive rational without overflowing doubles
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, r.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, r.get_den_mpz_t());
  return std::log(mn) - std::log(md) + static_cast<double>(en - ed) * std::log(2.0);
}

bool is_power(const Integer& z) { return z == 1 || mpz_perfect_power_p(z.get_mpz_t()) != 0; }

// Rewrites base^e as r^(k e) with r > 1 not a perfect power.
void reduce_base(Rational& base, Rational& e) {
  if (base < 1) {
    base = 1 / base;
    e = -e;
  }
  while (is_power(base.get_num()) && is_power(base.get_den())) {
    const auto bits = std::max(mpz_sizeinbase(base.get_num_mpz_t(), 2), mpz_sizeinbase(base.get_den_mpz_t(), 2));
    bool reduced = false;
    for (unsigned long k = 2; k <= bits && !reduced; ++k) {
      Integer rn, rd;
      if (mpz_root(rn.get_mpz_t(), base.get_num_mpz_t(), k) == 0) continue;
      if (mpz_root(rd.get_mpz_t(), base.get_den_mpz_t(), k) == 0) continue;
      base = make_rational(rn, rd);
      e *= Rational(static_cast<long>(k));
      reduced = true;
    }
    if (!reduced) break;
  }
}

struct RationalLess {
  bool operator()(const Rational& a, const Rational& b) const { return cmp(a, b) < 0; }
};

}  // namespace

ExactPower::ExactPower(const Rational& value) : coeff_(value) {
  if (value <= 0) throw Error(Errc::InvalidArgument, "power base must be positive");
}

ExactPower ExactPower::power(const Rational& base, const Rational& exponent) {
  if (base <= 0) throw Error(Errc::InvalidArgument, "power base must be positive");
  ExactPower r;
  r.terms_.push_back({base, exponent});
  r.normalize();
  return r;
}

void ExactPower::normalize() {
  std::map<Rational, Rational, RationalLess> grouped;
  for (auto& t : terms_) {
    if (t.base == 1 || t.exponent == 0) continue;
    if (is_integer(t.exponent)) {
      coeff_ *= rpow(t.base, to_long(t.exponent.get_num()));
      continue;
    }
    Rational base = t.base, e = t.exponent;
    reduce_base(base, e);
    grouped[base] += e;
  }
  terms_.clear();
  for (auto& [base, e] : grouped) {
    Rational ex = e;
    ex.canonicalize();
    if (ex == 0) continue;
    Integer whole = ex.get_num() / ex.get_den();  // truncates toward zero
    if (whole != 0) {
      coeff_ *= rpow(base, to_long(whole));
      ex -= Rational(whole);
    }
    if (ex != 0) terms_.push_back({base, ex});
  }
  coeff_.canonicalize();
}

ExactPower& ExactPower::operator*=(const ExactPower& other) {
  coeff_ *= other.coeff_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  normalize();
  return *this;
}

ExactPower ExactPower::inverse() const {
  ExactPower r;
  r.coeff_ = 1 / coeff_;
  for (const auto& t : terms_) r.terms_.push_back({t.base, -t.exponent});
  r.normalize();
  return r;
}

ExactPower ExactPower::pow(const Rational& exponent) const {
  ExactPower r;
  r.terms_.push_back({coeff_, exponent});
  for (const auto& t : terms_) r.terms_.push_back({t.base, t.exponent * exponent});
  r.normalize();
  return r;
}

std::optional<Rational> ExactPower::as_rational() const {
  if (!terms_.empty()) return std::nullopt;
  return coeff_;
}

double ExactPower::log() const {
  double s = log_rational(coeff_);
  for (const auto& t : terms_) s += t.exponent.get_d() * log_rational(t.base);
  return s;
}

double ExactPower::to_double() const { return std::exp(log()); }

std::string ExactPower::to_string() const {
  std::string out;
  if (coeff_ != 1 || terms_.empty()) out = padic::to_string(coeff_);
  for (const auto& t : terms_) {
    if (!out.empty()) out += "*";
    std::string b = padic::to_string(t.base);
    if (t.base.get_den() != 1) b = "(" + b + ")";
    out += b + "^(" + padic::to_string(t.exponent) + ")";
  }
  return out;
}

int compare(const ExactPower& a, const ExactPower& b) {
  // a / b compared with 1; raise to the lcm of exponent denominators.
  ExactPower q = a * b.inverse();
  if (q.terms().empty()) {
    int c = cmp(q.coefficient(), Rational(1));
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }

  double est = q.log();
  if (est > 1e-6) return 1;
  if (est < -1e-6) return -1;

  Integer l = 1;
  for (const auto& t : q.terms()) l = lcm(l, t.exponent.get_den());
  unsigned long L = static_cast<unsigned long>(to_long(l));
  Integer num = ipow(q.coefficient().get_num(), L);
  Integer den = ipow(q.coefficient().get_den(), L);
  for (const auto& t : q.terms()) {
    Rational scaled = t.exponent * Rational(l);
    long k = to_long(scaled.get_num());
    auto ak = static_cast<unsigned long>(k < 0 ? -k : k);
    if (k >= 0) {
      num *= ipow(t.base.get_num(), ak);
      den *= ipow(t.base.get_den(), ak);
    } else {
      num *= ipow(t.base.get_den(), ak);
      den *= ipow(t.base.get_num(), ak);
    }
  }
  int c = cmp(num, den);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

ExactPower max(const ExactPower& a, const ExactPower& b) { return compare(a, b) >= 0 ? a : b; }

ExactPower prime_power(long p, long e) { return ExactPower(rpow(Rational(p), e)); }

long smallest_exponent_below(long p, const ExactPower& bound) {
  long t = static_cast<long>(std::floor(-bound.log() / std::log(static_cast<double>(p)))) + 1;
  while (!(prime_power(p, -t) < bound)) ++t;
  while (prime_power(p, -(t - 1)) < bound) --t;
  return t;
}

long smallest_exponent_at_most(long p, const ExactPower& bound) {
  long t = static_cast<long>(std::ceil(-bound.log() / std::log(static_cast<double>(p))));
  while (!(prime_power(p, -t) <= bound)) ++t;
  while (prime_power(p, -(t - 1)) <= bound) --t;
  return t;
}

Integer ceil_of(const ExactPower& value) {
  double est = std::ceil(value.to_double());
  Integer h = est < 1 ? Integer(1) : Integer(est);
  while (h > 1 && ExactPower(Rational(h - 1)) >= value) --h;
  while (ExactPower(Rational(h)) < value) ++h;
  return h;
}

}  // namespace padic
