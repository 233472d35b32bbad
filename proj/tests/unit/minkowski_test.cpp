#include "../support/gen.hpp"
#include "doctest.h"
#include "padic/error.hpp"
#include "padic/lattice.hpp"
#include "padic/minkowski.hpp"

using namespace padic;

namespace {

Integer det3(const IntBasis& b) {
  return b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
         b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
}

bool satisfies(const std::vector<IntVector>& forms, const std::vector<Integer>& moduli, const IntVector& x) {
  for (std::size_t i = 0; i < forms.size(); ++i) {
    Integer s = 0;
    for (std::size_t j = 0; j < x.size(); ++j) s += forms[i][j] * x[j];
    if (s % moduli[i] != 0) return false;
  }
  return true;
}

LinearFormSystem one_form(long p, const PAdicInt& alpha, long h0, long h1) {
  LinearFormSystem sys;
  sys.p = p;
  sys.forms = {{alpha, PAdicInt(p, alpha.precision(), alpha.modulus() - 1)}};  // alpha x0 - x1
  sys.heights = {h0, h1};
  sys.tau = {Rational(2)};
  sys.sigma = {Rational(1)};
  return sys;
}

// min(v_p(L_i(x)), precision)
long form_valuation(const LinearFormSystem& sys, int i, const std::vector<long>& x) {
  Integer s = 0;
  for (std::size_t j = 0; j < x.size(); ++j) s += sys.forms[i][j].residue() * x[j];
  const Integer mod = sys.forms[i][0].modulus();
  s %= mod;
  if (s == 0) return sys.precision();
  return integer_valuation(s, sys.p);
}

LinearFormSystem random_system(gen::Rng& rng, long max_h) {
  LinearFormSystem sys;
  sys.p = gen::pick(rng, std::vector<long>{2, 3, 5});
  const int n = static_cast<int>(gen::uniform(rng, 1, 2));
  for (int j = 0; j <= n; ++j) sys.heights.push_back(gen::uniform(rng, 1, max_h));
  sys.tau = gen::split(rng, n, Rational(n + 1), 5);
  sys.sigma = gen::split(rng, n, Rational(n), 5);
  for (int i = 0; i < n; ++i) {
    std::vector<PAdicInt> row;
    for (int j = 0; j <= n; ++j) row.push_back(gen::padic_int(rng, sys.p, 20));
    sys.forms.push_back(row);
  }
  return sys;
}

}  // namespace

TEST_CASE("congruence lattice") {
  gen::Rng rng(30);
  for (int trial = 0; trial < 40; ++trial) {
    const long p = gen::pick(rng, std::vector<long>{2, 3});
    std::vector<IntVector> forms;
    std::vector<Integer> moduli;
    for (int i = 0; i < 2; ++i) {
      const Integer m = ipow(p, static_cast<unsigned long>(gen::uniform(rng, 0, 2)));
      forms.push_back({Integer(gen::uniform(rng, 0, 50)), Integer(gen::uniform(rng, 0, 50)), Integer(-1)});
      moduli.push_back(m);
    }
    IntBasis basis = congruence_lattice(forms, moduli, 3);
    REQUIRE(basis.size() == 3);
    for (const auto& v : basis) CHECK(satisfies(forms, moduli, v));
    // index of the lattice equals the solution density of the congruences
    const long M = to_long(moduli[0] * moduli[1]);
    long count = 0;
    for (long a = 0; a < M; ++a)
      for (long b = 0; b < M; ++b)
        for (long c = 0; c < M; ++c) count += satisfies(forms, moduli, {Integer(a), Integer(b), Integer(c)});
    const Integer index = Integer(M * M * M / count);
    CHECK(abs(det3(basis)) == index);
    lll_reduce(basis);
    CHECK(abs(det3(basis)) == index);
    for (const auto& v : basis) CHECK(satisfies(forms, moduli, v));
  }
}

TEST_CASE("smallest vector in a box") {
  gen::Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<IntVector> forms{{Integer(gen::uniform(rng, 1, 80)), Integer(-1)}};
    const std::vector<Integer> moduli{Integer(81)};
    IntBasis basis = congruence_lattice(forms, moduli, 2);
    lll_reduce(basis);
    const std::vector<Integer> bounds{Integer(gen::uniform(rng, 1, 12)), Integer(gen::uniform(rng, 1, 12))};
    const auto got = smallest_in_box(basis, bounds);
    // exhaustive: minimize max |x_j| / bound_j
    std::optional<Rational> best;
    for (long a = -to_long(bounds[0]); a <= to_long(bounds[0]); ++a)
      for (long b = -to_long(bounds[1]); b <= to_long(bounds[1]); ++b) {
        if ((a == 0 && b == 0) || !satisfies(forms, moduli, {Integer(a), Integer(b)})) continue;
        const Rational score = std::max(Rational(std::labs(a)) / bounds[0], Rational(std::labs(b)) / bounds[1]);
        if (!best || score < *best) best = score;
      }
    REQUIRE(got.has_value() == best.has_value());
    if (got) {
      CHECK(satisfies(forms, moduli, *got));
      CHECK(std::max(Rational(abs((*got)[0])) / bounds[0], Rational(abs((*got)[1])) / bounds[1]) == *best);
    }
  }
}

TEST_CASE("bucket exponents") {
  const auto sys = one_form(3, PAdicInt(3, 12, 5), 2, 2);
  const auto b = bucket_exponents(sys);
  // 3^(d-1) <= 3^-1 * 3^2 < 3^d
  REQUIRE(b.delta.size() == 1);
  CHECK(b.delta[0] == 2);
  CHECK(b.at_boundary[0]);
  const auto big = bucket_exponents(one_form(3, PAdicInt(3, 12, 5), 8, 8));
  CHECK(big.delta[0] == 4);  // 27 <= 27 < 81
  gen::Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_system(rng, 12);
    try {
      const auto e = bucket_exponents(s);
      const Integer T_pow = s.box_volume();
      for (int i = 0; i < s.n(); ++i) {
        // p^(d-1) <= p^-sigma T^tau < p^d, raised to the common power
        const ExactPower value = ExactPower::power(Rational(T_pow), s.tau[i] / (s.n() + 1)) *
                                 ExactPower::power(Rational(s.p), -s.sigma[i]);
        CHECK(prime_power(s.p, e.delta[i] - 1) <= value);
        CHECK(value < prime_power(s.p, e.delta[i]));
      }
    } catch (const Error& err) {
      CHECK(err.code() == Errc::BelowThreshold);
    }
  }
}

TEST_CASE("solve on a single form") {
  gen::Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sys = one_form(3, gen::padic_int(rng, 3, 12), 8, 8);
    const auto r = solve(sys);
    CHECK(r.verified);
    CHECK(std::max(std::labs(r.x[0]), std::labs(r.x[1])) <= 8);
    CHECK((r.x[0] != 0 || r.x[1] != 0));
    // |alpha x0 - x1|_3 <= 3 * 81^-1
    CHECK(form_valuation(sys, 0, r.x) >= 3);
    CHECK(brute_force(sys).has_value());
  }
  // alpha an integer within the heights: (1, alpha) has zero form value
  const auto exact = one_form(5, PAdicInt(5, 10, 4), 6, 6);
  const auto bf = brute_force(exact);
  REQUIRE(bf);
  CHECK(form_valuation(exact, 0, *bf) >= 1);
  const auto zero = solve(one_form(3, PAdicInt(3, 12, 0), 4, 4));
  CHECK(zero.verified);
}

TEST_CASE("solve is sound, deterministic and agrees with exhaustive search") {
  gen::Rng rng(34);
  int surplus = 0, none = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto sys = random_system(rng, 10);
    std::optional<MinkowskiResult> r;
    try {
      r = solve(sys);
    } catch (const Error& err) {
      CHECK((err.code() == Errc::BelowThreshold || err.code() == Errc::NoSolution));
    }
    const auto bf = brute_force(sys);
    if (!bf) ++none;
    if (r) {
      if (r->surplus) ++surplus;
      CHECK(r->verified);
      CHECK(check_solution(sys, r->x, r->used_exponents).ok());
      for (std::size_t j = 0; j < r->x.size(); ++j) CHECK(std::labs(r->x[j]) <= sys.heights[j]);
      CHECK(bf.has_value());
      CHECK(solve(sys).x == r->x);
    }
    if (!bf && r) CHECK(!r->surplus);
  }
  CHECK(surplus > 0);
}

TEST_CASE("system validation") {
  auto sys = one_form(3, PAdicInt(3, 12, 5), 2, 2);
  sys.tau = {Rational(3)};
  CHECK_THROWS_AS(sys.validate(), Error);
  auto low = one_form(3, PAdicInt(3, 2, 5), 8, 8);
  CHECK_THROWS_AS(solve(low), Error);  // precision below the bucket exponent
  auto mixed = one_form(3, PAdicInt(3, 12, 5), 8, 8);
  mixed.forms[0][1] = PAdicInt(5, 12, 1);
  CHECK_THROWS_AS(mixed.validate(), Error);
}
