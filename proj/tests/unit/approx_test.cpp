#include <numeric>
#include <set>

#include "../support/gen.hpp"
#include "doctest.h"
#include "padic/approx.hpp"
#include "padic/error.hpp"

using namespace padic;

namespace {

// t with p^-t < psi <= p^(-t+1), by stepping
long naive_step(const Rational& psi, long p) {
  long t = 0;
  Rational pt = 1;  // p^-t
  while (!(pt < psi)) ++t, pt /= p;
  return t;
}

// Distinct residues a * a0^-1 mod p^t over the admissible numerators.
std::set<long> layer_residues(long a0, long p, long t, bool reduced) {
  const long mod = to_long(ipow(p, static_cast<unsigned long>(t)));
  long inv = 0;
  for (long r = 0; r < mod; ++r)
    if ((a0 % mod) * r % mod == 1 % mod) {
      inv = r;
      break;
    }
  std::set<long> out;
  for (long a = -a0; a <= a0; ++a) {
    if (reduced && std::gcd(std::labs(a), a0) != 1) continue;
    out.insert(((a % mod + mod) % mod) * inv % mod);
  }
  return out;
}

}  // namespace

TEST_CASE("approximation function grammar") {
  CHECK(*parse_psi("1/(2q)").rational_at(4) == Rational(1, 8));
  CHECK(*parse_psi("q^-2").rational_at(3) == Rational(1, 9));
  CHECK(*parse_psi("3q^-2").rational_at(3) == Rational(1, 3));
  CHECK(*parse_psi("3*q^-2").rational_at(3) == Rational(1, 3));
  CHECK(*parse_psi("1/q^2").rational_at(2) == Rational(1, 4));
  CHECK(!parse_psi("q^(-5/2)").rational_at(2));
  CHECK(parse_psi("q^(-5/2)").at(4) == ExactPower(Rational(1, 32)));
  CHECK(*parse_psi("table:1=1/2,2=1/8").rational_at(2) == Rational(1, 8));
  CHECK_THROWS_AS(parse_psi("sin(q)"), Error);
}

TEST_CASE("step exponent") {
  CHECK(step_exponent(parse_psi("q^-2"), 2, 3).t == 2);
  CHECK(step_exponent(parse_psi("1/(2q)"), 4, 2).t == 4);
  CHECK(step_exponent(parse_psi("1/(2q)"), 2, 2).t == 3);  // psi = 2^-2 lands on the boundary
  CHECK(step_exponent(parse_psi("table:1=3"), 1, 3).clipped);
  gen::Rng rng(20);
  for (int i = 0; i < 500; ++i) {
    const long p = gen::pick(rng, std::vector<long>{2, 3, 5});
    const long a0 = gen::uniform(rng, 1, 500);
    const auto text = gen::pick(rng, std::vector<std::string>{"1/(2q)", "q^-2", "1/(3q)", "q^-3"});
    const auto psi = parse_psi(text);
    CHECK(step_exponent(psi, a0, p).t == naive_step(*psi.rational_at(a0), p));
  }
  // irrational values: check both inequalities exactly
  for (long a0 = 1; a0 <= 300; ++a0) {
    const auto psi = parse_psi("q^(-5/2)");
    const long t = step_exponent(psi, a0, 3).t;
    CHECK(prime_power(3, -t) < psi.at(a0));
    CHECK(psi.at(a0) <= prime_power(3, 1 - t));
  }
}

TEST_CASE("proper points and admissible counts") {
  CHECK(improper_points({parse_psi("q^-2")}, 1, 10) == std::vector<long>{1});
  CHECK(improper_points({parse_psi("1/(2q)")}, 1, 10).empty());
  CHECK(admissible_count(1, true) == 3);
  CHECK(admissible_count(4, true) == 4);
  CHECK(admissible_count(4, false) == 9);
}

TEST_CASE("layers match coset enumeration") {
  for (long p : {2L, 3L, 5L})
    for (const auto* text : {"1/(2q)", "q^-2"})
      for (bool reduced : {true, false})
        for (long a0 = 1; a0 <= 40; ++a0) {
          const auto psi = parse_psi(text);
          const long t = step_exponent(psi, a0, p).t;
          const ClopenSet layer = build_layer({p, 1}, {psi}, a0, reduced, 12);
          if (a0 % p == 0) {
            if (reduced) CHECK(layer.is_empty());
            continue;
          }
          const auto res = layer_residues(a0, p, t, reduced);
          const Rational expect = make_rational(Integer(static_cast<long>(res.size())), ipow(Integer(p), static_cast<unsigned long>(t)));
          CHECK(layer.measure() == expect);
          CHECK(layer == build_layer_by_rectangles({p, 1}, {psi}, a0, reduced, 12));
          // two-dimensional layer is the square
          const ClopenSet square = build_layer({p, 2}, {psi, psi}, a0, reduced, 12);
          CHECK(square.measure() == expect * expect);
        }
}

TEST_CASE("layer at 4 for p = 3") {
  const auto layer = build_layer({3, 1}, {parse_psi("1/(2q)")}, 4, true, 6);
  CHECK(layer.measure() == Rational(4, 9));
  CHECK(layer.box_count(2) == 4);
  // disjoint count is 2 phi(4) balls of radius 3^-2
  CHECK(layer.measure() == Rational(2 * 2, 9));
}

TEST_CASE("layer depth is checked") {
  CHECK_THROWS_AS(build_layer({3, 1}, {parse_psi("q^-2")}, 50, true, 3), Error);
}

TEST_CASE("permuting components permutes coordinates") {
  const ApproxTuple ab{parse_psi("1/(2q)"), parse_psi("q^-2")}, ba{parse_psi("q^-2"), parse_psi("1/(2q)")};
  for (long a0 : {1L, 2L, 4L, 5L, 7L, 11L}) {
    const auto x = build_layer({3, 2}, ab, a0, true, 8), y = build_layer({3, 2}, ba, a0, true, 8);
    CHECK(x.measure() == y.measure());
    CHECK(x.box_count(4) == y.box_count(4));
  }
}

TEST_CASE("partial limsup") {
  const Params params{3, 1};
  const ApproxTuple psi{parse_psi("1/(2q)")};
  LimsupOptions opts{true, 10, 1};
  CHECK(partial_limsup(params, psi, 7, 7, opts) == build_layer(params, psi, 7, true, 10));
  Rational prev = 0;
  for (long N = 1; N <= 60; ++N) {
    const Rational mu = partial_limsup(params, psi, 1, N, opts).measure();
    CHECK(mu >= prev);
    prev = mu;
  }
  // the union is at most the sum of the layers
  const ApproxTuple conv{parse_psi("q^(-5/2)")};
  LimsupOptions deep{true, 14, 1};
  for (long N : {5L, 20L}) {
    Rational sum = 0;
    for (long a0 = N; a0 <= 80; ++a0) sum += build_layer(params, conv, a0, true, 14).measure();
    CHECK(partial_limsup(params, conv, N, 80, deep).measure() <= sum);
  }
  LimsupOptions threads{true, 10, 3};
  CHECK(partial_limsup({2, 2}, {parse_psi("q^-2"), parse_psi("q^-2")}, 1, 30, threads) ==
        partial_limsup({2, 2}, {parse_psi("q^-2"), parse_psi("q^-2")}, 1, 30, {true, 10, 1}));
  CHECK_THROWS_AS(partial_limsup(params, psi, 5, 4, opts), Error);
}

TEST_CASE("generation counts") {
  const Params params{3, 1};
  const ApproxTuple psi{parse_psi("q^(-5/2)")};
  const LimsupOptions opts{true, 13, 1};
  const auto counts = generation_box_counts(params, psi, 1, 60, opts);
  for (const auto& [k, n] : counts) {
    // rebuild the generation directly
    ClopenSet gen(3, 1, 13);
    for (long a0 = 1; a0 <= 60; ++a0) {
      if (a0 % 3 == 0) continue;
      if (step_exponent(psi[0], a0, 3).t == k) gen = set_union(gen, build_layer(params, psi, a0, true, 13));
    }
    CHECK(gen.box_count(k) == n);
  }
}

TEST_CASE("series partial sums") {
  const ApproxTuple half{parse_psi("1/(2q)")};
  CHECK(khintchine_sum(1, half, 4).exact == Rational(2));
  CHECK(khintchine_sum(1, half, 0).exact == Rational(0));
  CHECK(khintchine_sum(1, half, 0).approx == 0.0);
  // terms q^n prod q^-tau_i with sum tau = n + 2 are q^-2
  const ApproxTuple two{parse_psi("q^-2"), parse_psi("q^-2")};
  Rational basel = 0;
  for (long q = 1; q <= 30; ++q) basel += Rational(1, q * q);
  CHECK(khintchine_sum(2, two, 30).exact == basel);
  // phi(q) psi(q) with phi = 1, 1, 2, 2
  const auto table = ApproxTuple{parse_psi("table:1=1/2,2=1/4,3=1/6,4=1/8")};
  CHECK(duffin_schaeffer_sum(1, table, 4).exact == Rational(1, 2) + Rational(1, 4) + Rational(1, 3) + Rational(1, 4));
  for (long N : {1L, 10L, 100L}) {
    const auto ratio = series_ratio(duffin_schaeffer_sum(1, half, N), khintchine_sum(1, half, N));
    CHECK(*ratio.exact <= 1);
  }
  const auto irr = khintchine_sum(1, {parse_psi("q^(-5/2)")}, 100);
  CHECK(!irr.exact);
  double direct = 0;
  for (long q = 1; q <= 100; ++q) direct += std::pow(static_cast<double>(q), -1.5);
  CHECK(irr.approx == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("claims report") {
  const auto r = measure_claims_check({3, 1}, {parse_psi("1/(2q)")}, 4, 4, 6);
  CHECK(r.layer_measure == Rational(4, 9));
  CHECK(r.phi_reference == Rational(2, 9));
  CHECK(!r.phi_equal);
  CHECK(r.disjoint);
  CHECK(r.intersection_measure == r.layer_measure);
  const auto s = measure_claims_check({3, 1}, {parse_psi("q^-2")}, 5, 7, 8);
  CHECK(s.intersection_measure == set_intersection(build_layer({3, 1}, {parse_psi("q^-2")}, 5, true, 8),
                                                   build_layer({3, 1}, {parse_psi("q^-2")}, 7, true, 8))
                                      .measure());
}
