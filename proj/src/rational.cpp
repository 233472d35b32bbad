#include "padic/rational.hpp"

#include <cctype>
#include <limits>

#include "padic/error.hpp"

namespace padic {

const char* errc_name(Errc e) {
  switch (e) {
    case Errc::InvalidArgument: return "invalid_argument";
    case Errc::InfiniteValuation: return "infinite_valuation";
    case Errc::NotPAdicInteger: return "not_padic_integer";
    case Errc::MismatchedPrime: return "mismatched_prime";
    case Errc::InsufficientDepth: return "insufficient_depth";
    case Errc::InsufficientPrecision: return "insufficient_precision";
    case Errc::BelowThreshold: return "below_threshold";
    case Errc::BudgetExceeded: return "budget_exceeded";
    case Errc::NoSolution: return "no_solution";
    case Errc::Hypothesis: return "hypothesis";
    case Errc::Parse: return "parse";
  }
  return "unknown";
}

namespace {
std::string join_failures(const std::vector<std::string>& failed) {
  std::string out = "hypothesis violated:";
  for (const auto& f : failed) out += " [" + f + "]";
  return out;
}
}  // namespace

HypothesisError::HypothesisError(std::vector<std::string> failed)
    : Error(Errc::Hypothesis, join_failures(failed)), failed_(std::move(failed)) {}

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw Error(Errc::InvalidArgument, "zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  s = trim(s);
  std::size_t i = 0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
  if (i == s.size()) throw Error(Errc::Parse, "not a rational: '" + std::string(whole) + "'");
  for (std::size_t j = i; j < s.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(s[j])))
      throw Error(Errc::Parse, "not a rational: '" + std::string(whole) + "'");
  }
  std::string digits(s[0] == '+' ? s.substr(1) : s);
  return Integer(digits);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto s = trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(s, text));
  Integer num = parse_integer(s.substr(0, slash), text);
  Integer den = parse_integer(s.substr(slash + 1), text);
  if (den == 0) throw Error(Errc::Parse, "zero denominator in '" + std::string(text) + "'");
  return make_rational(num, den);
}

std::vector<Rational> parse_rational_list(std::string_view text) {
  std::vector<Rational> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(parse_rational(cur));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c)))
      flush();
    else
      cur.push_back(c);
  }
  flush();
  return out;
}

Integer ipow(const Integer& base, unsigned long exp) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

Integer ipow(long base, unsigned long exp) { return ipow(Integer(base), exp); }

Rational rpow(const Rational& base, long exp) {
  if (exp >= 0) {
    return make_rational(ipow(base.get_num(), static_cast<unsigned long>(exp)),
                         ipow(base.get_den(), static_cast<unsigned long>(exp)));
  }
  if (base == 0) throw Error(Errc::InvalidArgument, "zero to a negative power");
  auto e = static_cast<unsigned long>(-exp);
  return make_rational(ipow(base.get_den(), e), ipow(base.get_num(), e));
}

Integer gcd(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Integer abs(const Integer& a) { return a < 0 ? Integer(-a) : a; }
Rational abs(const Rational& a) { return a < 0 ? Rational(-a) : a; }

long integer_valuation(const Integer& z, long p) {
  if (z == 0) throw Error(Errc::InfiniteValuation, "valuation of zero is infinite");
  Integer pz(p);
  Integer rest;
  return static_cast<long>(
      mpz_remove(rest.get_mpz_t(), z.get_mpz_t(), pz.get_mpz_t()));
}

double to_double(const Rational& r) { return r.get_d(); }

bool is_integer(const Rational& r) { return r.get_den() == 1; }

long to_long(const Integer& z) {
  if (!z.fits_slong_p()) throw Error(Errc::InvalidArgument, "integer too large: " + z.get_str());
  return z.get_si();
}

}  // namespace padic
