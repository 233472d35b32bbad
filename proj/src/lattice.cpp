#include "padic/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "padic/error.hpp"

namespace padic {

namespace {

Integer dot(const IntVector& a, const IntVector& b) {
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Extended gcd: returns (g, s, t) with s*a + t*b = g >= 0.
void xgcd(const Integer& a, const Integer& b, Integer& g, Integer& s, Integer& t) {
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

}  // namespace

IntBasis congruence_lattice(const std::vector<IntVector>& forms, const std::vector<Integer>& moduli, int dim) {
  if (forms.size() != moduli.size()) throw Error(Errc::InvalidArgument, "one modulus per form");
  IntBasis basis(static_cast<std::size_t>(dim), IntVector(static_cast<std::size_t>(dim), Integer(0)));
  for (int i = 0; i < dim; ++i) basis[i][i] = 1;

  for (std::size_t f = 0; f < forms.size(); ++f) {
    const Integer& q = moduli[f];
    if (q <= 0) throw Error(Errc::InvalidArgument, "moduli must be positive");
    if (q == 1) continue;
    // Values of the form on the current basis, reduced mod q.
    std::vector<Integer> v(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) v[k] = mod_floor(dot(forms[f], basis[k]), q);
    // Unimodular row operations pushing gcd(v) into row 0.
    for (std::size_t k = 1; k < basis.size(); ++k) {
      if (v[k] == 0) continue;
      Integer g, s, t;
      xgcd(v[0], v[k], g, s, t);
      Integer a = v[0] / g, b = v[k] / g;
      IntVector r0(basis[0].size()), rk(basis[0].size());
      for (std::size_t j = 0; j < r0.size(); ++j) {
        r0[j] = s * basis[0][j] + t * basis[k][j];
        rk[j] = -b * basis[0][j] + a * basis[k][j];
      }
      basis[0] = std::move(r0);
      basis[k] = std::move(rk);
      v[0] = g;
      v[k] = 0;
    }
    Integer g = gcd(v[0], q);
    Integer scale = q / g;
    for (auto& x : basis[0]) x *= scale;
    lll_reduce(basis);
  }
  return basis;
}

void lll_reduce(IntBasis& b) {
  const std::size_t n = b.size();
  if (n < 2) return;
  const Rational delta(3, 4);
  std::vector<std::vector<Rational>> mu(n, std::vector<Rational>(n));
  std::vector<Rational> bnorm(n);
  std::vector<std::vector<Rational>> bstar(n);

  auto gram_schmidt = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      bstar[i].assign(b[i].size(), Rational(0));
      for (std::size_t j = 0; j < b[i].size(); ++j) bstar[i][j] = Rational(b[i][j]);
      for (std::size_t j = 0; j < i; ++j) {
        Rational num = 0;
        for (std::size_t c = 0; c < b[i].size(); ++c) num += Rational(b[i][c]) * bstar[j][c];
        mu[i][j] = bnorm[j] == 0 ? Rational(0) : Rational(num / bnorm[j]);
        for (std::size_t c = 0; c < b[i].size(); ++c) bstar[i][c] -= mu[i][j] * bstar[j][c];
      }
      bnorm[i] = 0;
      for (const auto& x : bstar[i]) bnorm[i] += x * x;
    }
  };

  gram_schmidt();
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t jj = k; jj-- > 0;) {
      Rational m = mu[k][jj];
      // nearest integer to mu
      Integer r;
      Rational shifted = m + Rational(1, 2);
      mpz_fdiv_q(r.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
      if (r == 0) continue;
      for (std::size_t c = 0; c < b[k].size(); ++c) b[k][c] -= r * b[jj][c];
      for (std::size_t l = 0; l <= jj; ++l) mu[k][l] -= Rational(r) * (l == jj ? Rational(1) : mu[jj][l]);
    }
    if (bnorm[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bnorm[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gram_schmidt();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
}

namespace {

bool better(const IntVector& cand, const Rational& cand_sup, const std::optional<IntVector>& best,
            const Rational& best_sup) {
  if (!best) return true;
  int c = cmp(cand_sup, best_sup);
  if (c != 0) return c < 0;
  return cand < *best;
}

}  // namespace

std::optional<IntVector> smallest_in_box(const IntBasis& basis_in, const std::vector<Integer>& bounds,
                                         std::uint64_t budget) {
  const std::size_t d = bounds.size();
  if (basis_in.empty()) return std::nullopt;
  for (const auto& h : bounds)
    if (h < 0) throw Error(Errc::InvalidArgument, "box bounds must be nonnegative");

  // Scale coordinate j by S / H_j so that the box becomes a cube of side S.
  Integer S = 1;
  for (const auto& h : bounds)
    if (h > 0) S = lcm(S, h);
  std::vector<Integer> w(d);
  for (std::size_t j = 0; j < d; ++j) w[j] = bounds[j] > 0 ? Integer(S / bounds[j]) : Integer(S);
  IntBasis basis = basis_in;
  for (auto& v : basis)
    for (std::size_t j = 0; j < d; ++j) v[j] *= w[j];
  lll_reduce(basis);

  const std::size_t n = basis.size();
  using ld = long double;
  std::vector<std::vector<ld>> bstar(n, std::vector<ld>(d));
  std::vector<std::vector<ld>> mu(n, std::vector<ld>(n, 0));
  std::vector<ld> B(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) bstar[i][j] = static_cast<ld>(basis[i][j].get_d());
    for (std::size_t k = 0; k < i; ++k) {
      ld num = 0;
      for (std::size_t j = 0; j < d; ++j) num += static_cast<ld>(basis[i][j].get_d()) * bstar[k][j];
      mu[i][k] = B[k] > 0 ? num / B[k] : 0;
      for (std::size_t j = 0; j < d; ++j) bstar[i][j] -= mu[i][k] * bstar[k][j];
    }
    B[i] = 0;
    for (std::size_t j = 0; j < d; ++j) B[i] += bstar[i][j] * bstar[i][j];
  }

  std::optional<IntVector> best;
  Rational best_sup(1);
  ld Sd = static_cast<ld>(S.get_d());
  ld radius2 = static_cast<ld>(d) * Sd * Sd * (1 + 1e-9L);
  std::uint64_t visited = 0;
  std::vector<long long> z(n, 0);

  auto consider = [&] {
    IntVector y(d, Integer(0));
    bool nonzero = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (z[i] == 0) continue;
      nonzero = true;
      for (std::size_t j = 0; j < d; ++j) y[j] += Integer(static_cast<long>(z[i])) * basis[i][j];
    }
    if (!nonzero) return;
    Integer sup = 0;
    for (const auto& v : y) sup = std::max(sup, abs(v));
    if (sup > S) return;
    IntVector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = y[j] / w[j];
    for (const auto& v : x) {
      if (v == 0) continue;
      if (v < 0)
        for (auto& u : x) u = -u;
      break;
    }
    Rational sup_r = make_rational(sup, S);
    if (better(x, sup_r, best, best_sup)) {
      best = x;
      best_sup = sup_r;
      ld s = static_cast<ld>(sup.get_d());
      radius2 = static_cast<ld>(d) * s * s * (1 + 1e-9L);
    }
  };

  auto search = [&](auto&& self, std::size_t level, ld partial) -> void {
    if (++visited > budget) throw Error(Errc::BudgetExceeded, "lattice enumeration budget exceeded");
    std::size_t i = level;
    ld c = 0;
    for (std::size_t j = i + 1; j < n; ++j) c -= static_cast<ld>(z[j]) * mu[j][i];
    ld room = radius2 - partial;
    if (room < 0) return;
    ld span = B[i] > 0 ? std::sqrt(room / B[i]) : 0;
    auto lo = static_cast<long long>(std::ceil(c - span));
    auto hi = static_cast<long long>(std::floor(c + span));
    for (long long v = lo; v <= hi; ++v) {
      z[i] = v;
      ld diff = static_cast<ld>(v) - c;
      ld next = partial + diff * diff * B[i];
      if (next > radius2) continue;
      if (i == 0)
        consider();
      else
        self(self, i - 1, next);
    }
    z[i] = 0;
  };
  search(search, n - 1, 0);
  return best;
}

}  // namespace padic
