#include <set>

#include "../support/gen.hpp"
#include "doctest.h"
#include "padic/error.hpp"
#include "padic/manifold.hpp"

using namespace padic;

namespace {

Polynomial poly(int vars, std::vector<Monomial> terms) { return Polynomial(vars, std::move(terms)); }

DQEMap x_squared() { return DQEMap(3, 1, {poly(1, {{Rational(1), {2}}})}); }

DirichletInstance fixture(const PAdicInt& x, long H) {
  return {x_squared(), {x}, {Rational(7, 5)}, {Rational(8, 5)}, H};
}

// |a1^2/a0^2 - a2/a0|_3 < h^-7/5, decided by 3^(5v) > h^7
bool member_x_squared(long a0, long a1, long a2) {
  if (a0 % 3 == 0 || std::gcd(std::gcd(a0, std::labs(a1)), std::labs(a2)) != 1) return false;
  const long h = std::max({a0, std::labs(a1), std::labs(a2)});
  const Integer num = Integer(a1) * a1 - Integer(a0) * a2;
  if (num == 0) return true;
  const long v = integer_valuation(num, 3);
  return ipow(3, static_cast<unsigned long>(5 * v)) > ipow(h, 7);
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
  // 2 x^2 y - 3 x + 1/2, with a duplicate term to merge
  const auto f = poly(2, {{Rational(2), {2, 1}}, {Rational(-3), {1, 0}}, {Rational(1, 2), {0, 0}}, {Rational(0), {5, 5}}});
  CHECK(f.degree() == 3);
  CHECK(f.terms().size() == 3);
  const std::vector<Rational> at{Rational(2), Rational(-1, 3)};
  CHECK(f.eval(at) == Rational(2 * 4) * Rational(-1, 3) - 6 + Rational(1, 2));
  CHECK(f.derivative(0).eval(at) == Rational(4 * 2) * Rational(-1, 3) - 3);
  CHECK(f.derivative(1).eval(at) == Rational(8));
  CHECK(!f.is_p_integral(2));
  CHECK(f.is_p_integral(3));
  CHECK(f.coefficient_norm(2) == 2);
  CHECK(poly(1, {{Rational(1), {1}}, {Rational(-1), {1}}}).is_zero());
  CHECK(poly(1, {{Rational(1), {2}}}).to_string() == "1*x1^2");
}

TEST_CASE("taylor coefficients reproduce the shifted polynomial") {
  gen::Rng rng(40);
  for (int trial = 0; trial < 60; ++trial) {
    const int deg = static_cast<int>(gen::uniform(rng, 2, 6));
    std::vector<Monomial> terms{{Rational(gen::uniform(rng, 1, 5)), {deg}}};
    for (int i = 0; i < 3; ++i) terms.push_back({Rational(gen::uniform(rng, -5, 5)), {static_cast<int>(gen::uniform(rng, 0, deg - 1))}});
    const auto f = poly(1, terms);
    const std::vector<Rational> x{gen::rational(rng, -3, 3, 4)}, h{gen::rational(rng, -3, 3, 4)};
    const std::vector<Rational> shifted{x[0] + h[0]};
    // one coefficient per order 0..deg, none of them zero in one variable
    const auto all = f.taylor_coefficients(0);
    REQUIRE(all.size() == static_cast<std::size_t>(deg + 1));
    Rational sum = 0, power = 1;
    for (const auto& c : all) sum += c.eval(x) * power, power *= h[0];
    CHECK(sum == f.eval(shifted));
    const auto high = f.taylor_coefficients(2);
    REQUIRE(high.size() == static_cast<std::size_t>(deg - 1));
    Rational rest = 0;
    power = h[0] * h[0];
    for (const auto& c : high) rest += c.eval(x) * power, power *= h[0];
    CHECK(rest == f.eval(shifted) - f.eval(x) - f.derivative(0).eval(x) * h[0]);
  }
}

TEST_CASE("modular evaluation") {
  gen::Rng rng(41);
  const auto f = poly(2, {{Rational(3, 2), {2, 1}}, {Rational(-7), {0, 3}}, {Rational(5), {0, 0}}});
  const std::uint64_t m = 3 * 3 * 3 * 3 * 3 * 3 * 3;
  const auto coeffs = f.residues_mod(m);
  for (int trial = 0; trial < 100; ++trial) {
    const long a = gen::uniform(rng, 0, static_cast<long>(m) - 1), b = gen::uniform(rng, 0, static_cast<long>(m) - 1);
    const std::vector<std::uint64_t> x{static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)};
    const Rational exact = f.eval(std::vector<Rational>{Rational(a), Rational(b)});
    CHECK(f.eval_mod(x, m, coeffs) == to_long(embed_rational(exact, 3, 7).residue()));
    const std::vector<PAdicInt> px{PAdicInt(3, 7, a), PAdicInt(3, 7, b)};
    CHECK(f.eval(px).residue() == embed_rational(exact, 3, 7).residue());
  }
  CHECK_THROWS_AS(f.residues_mod(16), Error);
}

TEST_CASE("map validation") {
  CHECK_THROWS_AS(DQEMap(4, 1, {poly(1, {{Rational(1), {2}}})}), Error);
  CHECK_THROWS_AS(DQEMap(3, 1, {poly(1, {{Rational(1, 3), {2}}})}), Error);
  CHECK_THROWS_AS(DQEMap(3, 1, {poly(2, {{Rational(1), {2, 0}}})}), Error);
  CHECK_THROWS_AS(DQEMap(3, 1, {}), Error);
  const auto f = x_squared();
  CHECK(f.n() == 2);
  CHECK(f.partial(0, 0).eval(std::vector<Rational>{Rational(5)}) == 10);
}

TEST_CASE("differentiability constants") {
  gen::Rng rng(42);
  const auto x = std::vector<PAdicInt>{gen::padic_int(rng, 3, 20)};
  const auto sq = dqe_constants(x_squared(), x);
  CHECK(sq.C == 1);
  CHECK(sq.epsilon == 1);
  CHECK(sq.lambda == 0);
  const auto cube = dqe_constants(DQEMap(3, 1, {poly(1, {{Rational(3), {3}}})}), x);
  CHECK(cube.C == 1);
  CHECK(cube.lambda == 0);
  CHECK(cube.taylor_bound <= 1);
  // second order remainder of x^2 is exactly (y - x)^2
  for (int i = 0; i < 20; ++i) {
    const Rational a = gen::rational(rng, -9, 9, 5), b = gen::rational(rng, -9, 9, 5);
    if (a.get_den() % 3 == 0 || b.get_den() % 3 == 0) continue;
    const Rational rem = b * b - a * a - 2 * a * (b - a);
    CHECK(norm_p(rem, 3) <= sq.C * norm_p(b - a, 3) * norm_p(b - a, 3));
  }
}

TEST_CASE("instance hypotheses") {
  const PAdicInt x(3, 30, 17);
  CHECK(fixture(x, 50).hypotheses().ok());
  auto bad = fixture(x, 50);
  bad.tau = {Rational(2)};
  const auto report = bad.hypotheses();
  CHECK(!report.ok());
  CHECK(std::find(report.failed().begin(), report.failed().end(), "sum tau_j < m+1") != report.failed().end());
  CHECK_THROWS_AS(bad.validate(), HypothesisError);
  bad = fixture(x, 50);
  bad.v = {Rational(1)};
  CHECK(!bad.hypotheses().ok());
}

TEST_CASE("threshold for the curve fixture") {
  const auto h0 = dirichlet_h0(fixture(PAdicInt(3, 60, 12345), 100));
  // beta = (3^((n + m lambda)/d))^(1/(v - 1)) with n = 2, d = 1, v = 8/5
  const ExactPower expect = ExactPower::power(Rational(3), Rational(2) / (Rational(8, 5) - 1));
  CHECK(h0.value == expect);
  CHECK(h0.beta == expect);
  CHECK(h0.gamma == expect);
  CHECK(h0.alpha1 == ExactPower());
  CHECK(h0.alpha2 == ExactPower());
  CHECK(h0.binding == "beta");
  CHECK(h0.admits(39));
  CHECK(!h0.admits(38));
  CHECK(std::abs(h0.value.to_double() - std::pow(3.0, 10.0 / 3.0)) < 1e-9);
}

TEST_CASE("dirichlet solutions verify and match the exhaustive oracle") {
  gen::Rng rng(43);
  CHECK_THROWS_AS(dirichlet_solve(fixture(PAdicInt(3, 60, 5), 38)), Error);
  for (int trial = 0; trial < 25; ++trial) {
    const auto x = gen::padic_int(rng, 3, 60);
    for (long H : {39L, 60L, 120L, 400L}) {
      const auto inst = fixture(x, H);
      const auto sol = dirichlet_solve(inst);
      CHECK(sol.check.ok());
      CHECK(check_dirichlet(inst, sol.point, sol.k).ok());
      CHECK(sol.point.condition_a());
      CHECK(sol.point.a[0] > 0);
      CHECK(sol.point.height * ipow(3, static_cast<unsigned long>(sol.k)) <= H);
      const auto ex = dirichlet_exhaustive(inst);
      REQUIRE(ex.has_value());
      CHECK(check_dirichlet(inst, ex->point, ex->k).ok());
      // the oracle returns the least shift, so it cannot exceed the solver's
      CHECK(ex->k <= sol.k);
    }
  }
}

TEST_CASE("rational base point") {
  // x = 1/2 is hit exactly by a1/a0 = 1/2
  const auto x = embed_rational(Integer(1), Integer(2), 3, 60);
  const auto inst = fixture(x, 5000);
  const auto sol = dirichlet_solve(inst);
  CHECK(sol.check.ok());
  const auto ex = dirichlet_exhaustive(inst);
  REQUIRE(ex);
  CHECK(ex->check.ok());
}

TEST_CASE("rational points") {
  const auto pt = make_point({Integer(1), Integer(2), Integer(4)}, 3, 1);
  CHECK(pt.condition_a());
  CHECK(pt.height == 4);
  CHECK(pt.to_string() == "(1, 2, 4)");
  CHECK(!make_point({Integer(3), Integer(1), Integer(1)}, 3, 1).condition_a());
  CHECK(!make_point({Integer(2), Integer(4), Integer(6)}, 3, 1).primitive);
  const std::vector<Rational> tau{Rational(7, 5)};
  CHECK(in_s_tau(x_squared(), tau, pt));
}

TEST_CASE("resonant points match the direct membership test") {
  const std::vector<Rational> tau{Rational(7, 5)};
  const long H = 40;
  const auto pts = enumerate_s_tau(x_squared(), tau, H);
  std::set<std::vector<long>> got;
  for (const auto& pt : pts) {
    got.insert({to_long(pt.a[0]), to_long(pt.a[1]), to_long(pt.a[2])});
    CHECK(in_s_tau(x_squared(), tau, pt));
  }
  std::set<std::vector<long>> want;
  for (long a0 = 1; a0 <= H; ++a0)
    for (long a1 = -H; a1 <= H; ++a1)
      for (long a2 = -H; a2 <= H; ++a2)
        if (member_x_squared(a0, a1, a2)) want.insert({a0, a1, a2});
  CHECK(got == want);
  // x^2 is even
  for (const auto& a : got) CHECK(got.count({a[0], -a[1], a[2]}) == 1);
  // threads do not change the result
  const auto threaded = enumerate_s_tau(x_squared(), tau, H, {1ull << 28, 3});
  REQUIRE(threaded.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(threaded[i].a == pts[i].a);
  std::size_t total = 0;
  for (const auto& [b, c] : dyadic_counts(pts)) total += c;
  CHECK(total == pts.size());
  CHECK(enumerate_s_tau(x_squared(), tau, 80).size() > pts.size());
}

TEST_CASE("preimage cover") {
  const auto f = x_squared();
  const std::vector<Rational> tau{Rational(12, 5), Rational(7, 5)};
  CHECK(cover_hypotheses(f, tau, Rational(1)).ok());
  CHECK(!cover_hypotheses(f, std::vector<Rational>{Rational(7, 5), Rational(12, 5)}, Rational(1)).ok());
  CHECK(!cover_hypotheses(f, tau, Rational(2)).ok());
  Rational prev = 0;
  for (long H : {10L, 20L, 40L, 80L}) {
    const auto c = cover_preimage(f, tau, Rational(1, 9), H, 14);
    CHECK(c.set.measure() >= prev);
    prev = c.set.measure();
  }
  CHECK(cover_preimage(f, tau, Rational(1, 27), 40, 14).set.measure() <=
        cover_preimage(f, tau, Rational(1, 3), 40, 14).set.measure());
  // direct union of the balls around each resonant point
  const auto pts = enumerate_s_tau(f, std::vector<Rational>{Rational(7, 5)}, 30);
  ClopenBuilder b(3, 1, 14);
  for (const auto& pt : pts) {
    const Rational h(pt.height);
    long t = 0;
    // 3^-t < (1/3) h^-12/5  <=>  3^(5t - 5) > h^12
    while (!(ipow(3, static_cast<unsigned long>(5 * t)) > ipow(Integer(pt.height), 12) * ipow(3, 5))) ++t;
    b.add({{make_rational(pt.a[1], pt.a[0])}, {static_cast<int>(t)}});
  }
  const auto c = cover_preimage(f, tau, Rational(1, 3), 30, 14);
  CHECK(c.points == pts.size());
  CHECK(c.set == b.build());
  CHECK_THROWS_AS(cover_preimage(f, tau, Rational(1, 3), 200, 4), Error);
}
