#include <algorithm>

#include "../support/gen.hpp"
#include "doctest.h"
#include "padic/clopen_set.hpp"
#include "padic/error.hpp"

using namespace padic;

namespace {

BallSpec ball(std::vector<Rational> center, std::vector<int> t) { return {std::move(center), std::move(t)}; }

std::vector<BallSpec> random_balls(gen::Rng& rng, long p, int n, int depth, int count) {
  std::vector<BallSpec> out;
  for (int i = 0; i < count; ++i) {
    BallSpec b;
    for (int j = 0; j < n; ++j) {
      long den = gen::uniform(rng, 1, 9);
      if (den % p == 0) ++den;
      b.center.push_back(make_rational(Integer(gen::uniform(rng, -40, 40)), Integer(den)));
      b.exponents.push_back(static_cast<int>(gen::uniform(rng, 0, depth)));
    }
    out.push_back(std::move(b));
  }
  return out;
}

// Fraction of grid points mod p^depth lying in some ball.
Rational grid_measure(const std::vector<BallSpec>& balls, long p, int n, int depth) {
  const long mod = to_long(ipow(p, static_cast<unsigned long>(depth)));
  std::vector<std::vector<long>> centers;
  for (const auto& b : balls) {
    std::vector<long> c;
    for (const auto& x : b.center) c.push_back(to_long(embed_rational(x, p, depth).residue()));
    centers.push_back(c);
  }
  long total = 1;
  for (int i = 0; i < n; ++i) total *= mod;
  long hits = 0;
  std::vector<long> x(static_cast<std::size_t>(n), 0);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (int i = 0; i < n; ++i) x[i] = rest % mod, rest /= mod;
    for (std::size_t b = 0; b < balls.size(); ++b) {
      bool in = true;
      for (int i = 0; i < n && in; ++i) {
        const long m = to_long(ipow(p, static_cast<unsigned long>(balls[b].exponents[i])));
        in = (x[i] - centers[b][i]) % m == 0;
      }
      if (in) {
        ++hits;
        break;
      }
    }
  }
  return make_rational(Integer(hits), Integer(total));
}

ClopenSet build(const std::vector<BallSpec>& balls, long p, int n, int depth) {
  ClopenBuilder b(p, n, depth);
  for (const auto& x : balls) b.add(x);
  return b.build();
}

}  // namespace

TEST_CASE("rectangle examples") {
  const ClopenSet empty(3, 1, 4);
  CHECK(empty.insert_rectangle(ball({Rational(0)}, {1})).measure() == Rational(1, 3));
  const auto once = empty.insert_rectangle(ball({Rational(5)}, {2}));
  CHECK(once.insert_rectangle(ball({Rational(5)}, {2})) == once);
  const auto pair = empty.insert_rectangle(ball({Rational(1, 2)}, {2})).insert_rectangle(ball({Rational(-1, 2)}, {2}));
  CHECK(pair.measure() == grid_measure({ball({Rational(1, 2)}, {2}), ball({Rational(-1, 2)}, {2})}, 3, 1, 2));
  CHECK(pair.measure() == Rational(2, 9));
  CHECK(ClopenSet::full(5, 2, 3).measure() == 1);
  CHECK(ClopenSet::rectangle(3, 1, 4, ball({Rational(0)}, {2})).measure() == Rational(1, 9));
  CHECK(ClopenSet::rectangle(3, 2, 4, ball({Rational(0), Rational(1)}, {1, 2})).measure() == Rational(1, 27));
  CHECK_THROWS_AS(empty.insert_rectangle(ball({Rational(0)}, {5})), Error);
  CHECK_THROWS_AS(empty.insert_rectangle(ball({Rational(1, 3)}, {1})), Error);
}

TEST_CASE("set algebra basics") {
  const ClopenSet empty(2, 2, 3);
  CHECK(complement(empty).measure() == 1);
  CHECK(complement(empty).is_full());
  const auto a = ClopenSet::rectangle(2, 2, 3, ball({Rational(1), Rational(0)}, {2, 1}));
  CHECK(set_intersection(a, a) == a);
  CHECK(set_difference(a, a).is_empty());
  CHECK_THROWS_AS(set_union(a, ClopenSet(3, 2, 3)), Error);
  CHECK_THROWS_AS(set_union(a, ClopenSet(2, 1, 3)), Error);
}

TEST_CASE("measure matches grid count on random unions") {
  gen::Rng rng(10);
  for (int trial = 0; trial < 60; ++trial) {
    const long p = gen::pick(rng, std::vector<long>{2, 3, 5});
    const int n = static_cast<int>(gen::uniform(rng, 1, 2));
    const int depth = n == 1 ? 4 : (p == 5 ? 2 : 3);
    const auto balls = random_balls(rng, p, n, depth, static_cast<int>(gen::uniform(rng, 1, 12)));
    CHECK(build(balls, p, n, depth).measure() == grid_measure(balls, p, n, depth));
  }
}

TEST_CASE("algebra laws on random sets") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const long p = gen::pick(rng, std::vector<long>{2, 3});
    const int n = static_cast<int>(gen::uniform(rng, 1, 2)), depth = 5;
    const auto a = build(random_balls(rng, p, n, depth, 6), p, n, depth);
    const auto b = build(random_balls(rng, p, n, depth, 6), p, n, depth);
    const auto c = build(random_balls(rng, p, n, depth, 6), p, n, depth);
    CHECK(set_union(a, b).measure() == a.measure() + b.measure() - set_intersection(a, b).measure());
    CHECK(complement(complement(a)) == a);
    CHECK(set_union(a, b) == set_union(b, a));
    CHECK(set_intersection(a, set_union(b, c)) == set_union(set_intersection(a, b), set_intersection(a, c)));
    CHECK(set_difference(a, b) == set_intersection(a, complement(b)));
    CHECK(complement(set_union(a, b)) == set_intersection(complement(a), complement(b)));
    for (int k = 0; k <= depth; ++k) {
      const Rational cover = Rational(a.box_count(k)) / Rational(ipow(Integer(p), static_cast<unsigned long>(n * k)));
      CHECK(cover >= a.measure());
      CHECK(a.enumerate_cosets(k).size() == a.box_count(k).get_ui());
    }
    CHECK(Rational(a.box_count(depth)) / Rational(ipow(Integer(p), static_cast<unsigned long>(n * depth))) == a.measure());
  }
}

TEST_CASE("disjoint families add up") {
  gen::Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    // distinct level-t cosets are disjoint
    const long p = 3;
    const int t = static_cast<int>(gen::uniform(rng, 1, 4));
    const long mod = to_long(ipow(p, static_cast<unsigned long>(t)));
    std::vector<long> residues;
    for (long r = 0; r < mod; ++r)
      if (gen::uniform(rng, 0, 2) == 0) residues.push_back(r);
    ClopenBuilder b(p, 1, 5);
    Rational sum = 0;
    for (long r : residues) {
      b.add(ball({Rational(r)}, {t}));
      sum += Rational(1, mod);
    }
    CHECK(b.build().measure() == sum);
  }
}

TEST_CASE("insertion order does not matter") {
  gen::Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    auto balls = random_balls(rng, 2, 2, 6, 10);
    const auto first = build(balls, 2, 2, 6);
    std::shuffle(balls.begin(), balls.end(), rng);
    CHECK(build(balls, 2, 2, 6) == first);
    ClopenSet one_by_one(2, 2, 6);
    for (const auto& x : balls) one_by_one = one_by_one.insert_rectangle(x);
    CHECK(one_by_one == first);
    CHECK(one_by_one.serialize() == first.serialize());
  }
}

TEST_CASE("box counts and cosets") {
  CHECK(ClopenSet::full(3, 2, 4).box_count(3) == 729);
  CHECK(ClopenSet::rectangle(3, 1, 6, ball({Rational(4)}, {2})).box_count(5) == 27);
  CHECK(ClopenSet(3, 1, 4).box_count(4) == 0);
  CHECK_THROWS_AS(ClopenSet(3, 1, 4).box_count(5), Error);
  const auto cosets = ClopenSet::rectangle(3, 1, 2, ball({Rational(0)}, {1})).enumerate_cosets(1);
  REQUIRE(cosets.size() == 1);
  CHECK(cosets[0][0] == 0);
  CHECK(ClopenSet::full(2, 2, 2).enumerate_cosets(1).size() == 4);
}

TEST_CASE("membership") {
  const auto s = ClopenSet::rectangle(3, 1, 4, ball({Rational(1, 2)}, {3}));
  const std::vector<PAdicInt> inside{embed_rational(Integer(1), Integer(2), 3, 6)};
  const std::vector<PAdicInt> outside{embed_rational(Integer(-1), Integer(2), 3, 6)};
  CHECK(s.contains(inside));
  CHECK(!s.contains(outside));
}

TEST_CASE("serialization round trip") {
  gen::Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const long p = gen::pick(rng, std::vector<long>{2, 3, 5});
    const auto s = build(random_balls(rng, p, 2, 4, 8), p, 2, 4);
    const auto text = s.serialize();
    CHECK(ClopenSet::deserialize(text) == s);
    CHECK(ClopenSet::deserialize(text).serialize() == text);
  }
  CHECK_THROWS_AS(ClopenSet::deserialize("garbage"), Error);
}

TEST_CASE("products") {
  gen::Rng rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = build(random_balls(rng, 3, 1, 4, 5), 3, 1, 4);
    const auto b = build(random_balls(rng, 3, 1, 4, 5), 3, 1, 4);
    const std::vector<ClopenSet> parts{a, b};
    const auto prod = ClopenSet::product(parts);
    CHECK(prod.dim() == 2);
    CHECK(prod.measure() == a.measure() * b.measure());
    CHECK(prod.box_count(3) == a.box_count(3) * b.box_count(3));
    // intersections of products are products of intersections
    const std::vector<ClopenSet> aa{a, a}, bb{b, b};
    const auto i1 = set_intersection(a, b);
    const std::vector<ClopenSet> ii{i1, i1};
    CHECK(set_intersection(ClopenSet::product(aa), ClopenSet::product(bb)) == ClopenSet::product(ii));
  }
}
