#include "padic/polynomial.hpp"

#include <algorithm>
#include <map>

#include "padic/error.hpp"

namespace padic {

Polynomial::Polynomial(int vars, std::vector<Monomial> terms) : vars_(vars), terms_(std::move(terms)) {
  if (vars < 1) throw Error(Errc::InvalidArgument, "polynomial needs at least one variable");
  for (const auto& t : terms_) {
    if (t.exponents.size() != static_cast<std::size_t>(vars))
      throw Error(Errc::InvalidArgument, "monomial arity does not match variable count");
    for (int e : t.exponents)
      if (e < 0) throw Error(Errc::InvalidArgument, "negative exponent in polynomial");
  }
  normalize();
}

void Polynomial::normalize() {
  std::map<std::vector<int>, Rational> merged;
  for (const auto& t : terms_) merged[t.exponents] += t.coeff;
  terms_.clear();
  for (auto& [e, c] : merged) {
    c.canonicalize();
    if (c != 0) terms_.push_back({c, e});
  }
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exponents) s += e;
    d = std::max(d, s);
  }
  return d;
}

Rational Polynomial::eval(std::span<const Rational> x) const {
  if (x.size() != static_cast<std::size_t>(vars_)) throw Error(Errc::InvalidArgument, "point arity mismatch");
  Rational s = 0;
  for (const auto& t : terms_) {
    Rational v = t.coeff;
    for (int i = 0; i < vars_; ++i) v *= rpow(x[i], t.exponents[i]);
    s += v;
  }
  return s;
}

PAdicInt Polynomial::eval(std::span<const PAdicInt> x) const {
  if (x.size() != static_cast<std::size_t>(vars_)) throw Error(Errc::InvalidArgument, "point arity mismatch");
  long p = x[0].prime();
  int k = x[0].precision();
  for (const auto& xi : x) k = std::min(k, xi.precision());
  PAdicInt s(p, k, 0);
  for (const auto& t : terms_) {
    PAdicInt v = embed_rational(t.coeff, p, k);
    for (int i = 0; i < vars_; ++i)
      for (int e = 0; e < t.exponents[i]; ++e) v = v * x[i];
    s = s + v;
  }
  return s;
}

std::vector<std::uint64_t> Polynomial::residues_mod(std::uint64_t m) const {
  std::vector<std::uint64_t> out;
  Integer mz(static_cast<unsigned long>(m));
  for (const auto& t : terms_) {
    Integer inv;
    if (mpz_invert(inv.get_mpz_t(), t.coeff.get_den_mpz_t(), mz.get_mpz_t()) == 0 && m > 1)
      throw Error(Errc::NotPAdicInteger, "coefficient " + padic::to_string(t.coeff) + " is not p-integral");
    Integer cz = t.coeff.get_num() * inv;
    out.push_back(m == 1 ? 0 : mpz_fdiv_ui(cz.get_mpz_t(), static_cast<unsigned long>(m)));
  }
  return out;
}

std::uint64_t Polynomial::eval_mod(std::span<const std::uint64_t> x, std::uint64_t m,
                                   std::span<const std::uint64_t> coeffs) const {
  unsigned __int128 s = 0;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    std::uint64_t v = coeffs[k];
    for (int i = 0; i < vars_; ++i)
      for (int e = 0; e < terms_[k].exponents[i]; ++e)
        v = static_cast<std::uint64_t>((static_cast<unsigned __int128>(v) * x[i]) % m);
    s = (s + v) % m;
  }
  return static_cast<std::uint64_t>(s);
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= vars_) throw Error(Errc::InvalidArgument, "derivative variable out of range");
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    if (t.exponents[var] == 0) continue;
    Monomial m = t;
    m.coeff *= t.exponents[var];
    m.exponents[var] -= 1;
    out.push_back(std::move(m));
  }
  return Polynomial(vars_, std::move(out));
}

namespace {

Integer binomial(int n, int k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

}  // namespace

std::vector<Polynomial> Polynomial::taylor_coefficients(int min_order) const {
  // (x + h)^beta = sum_{alpha <= beta} C(beta, alpha) x^(beta - alpha) h^alpha
  std::map<std::vector<int>, std::vector<Monomial>> by_alpha;
  for (const auto& t : terms_) {
    std::vector<int> alpha(static_cast<std::size_t>(vars_), 0);
    while (true) {
      int order = 0;
      for (int a : alpha) order += a;
      if (order >= min_order) {
        Monomial m{t.coeff, std::vector<int>(static_cast<std::size_t>(vars_))};
        for (int i = 0; i < vars_; ++i) {
          m.coeff *= Rational(binomial(t.exponents[i], alpha[i]));
          m.exponents[i] = t.exponents[i] - alpha[i];
        }
        by_alpha[alpha].push_back(std::move(m));
      }
      int i = 0;
      while (i < vars_ && alpha[i] == t.exponents[i]) alpha[i++] = 0;
      if (i == vars_) break;
      ++alpha[i];
    }
  }
  std::vector<Polynomial> out;
  for (auto& [alpha, terms] : by_alpha) {
    Polynomial p(vars_, std::move(terms));
    if (!p.is_zero()) out.push_back(std::move(p));
  }
  return out;
}

bool Polynomial::is_p_integral(long p) const {
  for (const auto& t : terms_)
    if (t.coeff.get_den() % p == 0) return false;
  return true;
}

Rational Polynomial::coefficient_norm(long p) const {
  Rational best = 0;
  for (const auto& t : terms_) best = std::max(best, norm_p(t.coeff, p));
  return best;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    out += padic::to_string(t.coeff);
    for (int i = 0; i < vars_; ++i) {
      if (t.exponents[i] == 0) continue;
      out += "*x" + std::to_string(i + 1);
      if (t.exponents[i] > 1) out += "^" + std::to_string(t.exponents[i]);
    }
  }
  return out;
}

}  // namespace padic
