#pragma once

// Hand-rolled random generators shared by property tests and acceptance runs.

#include <cstdint>
#include <random>
#include <vector>

#include "padic/padic_int.hpp"
#include "padic/rational.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(xs.size()) - 1))];
}

/// num/den with num in [lo*den, hi*den], den in [1, max_den].
inline padic::Rational rational(Rng& rng, long lo, long hi, long max_den) {
  const long den = uniform(rng, 1, max_den);
  return padic::make_rational(padic::Integer(uniform(rng, lo * den, hi * den)), padic::Integer(den));
}

/// Uniform residue mod p^k.
inline padic::PAdicInt padic_int(Rng& rng, long p, int k) {
  padic::Integer r = 0;
  for (int i = 0; i < k; ++i) r = r * p + uniform(rng, 0, p - 1);
  return padic::PAdicInt(p, k, r);
}

/// n weights > 1 with sum > n+1, denominators <= max_den.
inline std::vector<padic::Rational> heavy_weights(Rng& rng, int n, long max_den) {
  while (true) {
    std::vector<padic::Rational> t;
    padic::Rational s = 0;
    for (int i = 0; i < n; ++i) {
      padic::Rational x = 1 + padic::make_rational(padic::Integer(uniform(rng, 1, 4 * max_den)), padic::Integer(uniform(rng, 1, max_den)));
      t.push_back(x);
      s += x;
    }
    if (s > n + 1) return t;
  }
}

/// Positive rationals with the given sum: total * w_i / sum w.
inline std::vector<padic::Rational> split(Rng& rng, int n, const padic::Rational& total, long max_w) {
  std::vector<long> w;
  long s = 0;
  for (int i = 0; i < n; ++i) {
    w.push_back(uniform(rng, 1, max_w));
    s += w.back();
  }
  std::vector<padic::Rational> out;
  for (long wi : w) out.push_back(total * padic::make_rational(padic::Integer(wi), padic::Integer(s)));
  return out;
}

}  // namespace gen
