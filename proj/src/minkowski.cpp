#include "padic/minkowski.hpp"

#include <algorithm>
#include <numeric>

#include "padic/error.hpp"
#include "padic/lattice.hpp"

namespace padic {

int LinearFormSystem::precision() const {
  if (forms.empty() || forms[0].empty()) return 0;
  return forms[0][0].precision();
}

Integer LinearFormSystem::box_volume() const {
  Integer v = 1;
  for (long h : heights) v *= Integer(h + 1);
  return v;
}

ExactPower LinearFormSystem::norm_bound(int i) const {
  Rational exp = tau[i] / Rational(n() + 1);
  return ExactPower::power(Rational(p), sigma[i]) * ExactPower::power(Rational(box_volume()), -exp);
}

void LinearFormSystem::validate() const {
  if (!is_prime(p)) throw Error(Errc::InvalidArgument, "not a prime: " + std::to_string(p));
  const int nn = n();
  if (nn < 1) throw Error(Errc::InvalidArgument, "need at least one linear form");
  if (heights.size() != static_cast<std::size_t>(nn + 1))
    throw Error(Errc::InvalidArgument, "need n+1 height bounds");
  if (tau.size() != static_cast<std::size_t>(nn) || sigma.size() != static_cast<std::size_t>(nn))
    throw Error(Errc::InvalidArgument, "need n weights and n shifts");
  int k = precision();
  for (const auto& row : forms) {
    if (row.size() != static_cast<std::size_t>(nn + 1))
      throw Error(Errc::InvalidArgument, "each form needs n+1 coefficients");
    for (const auto& c : row) {
      if (c.prime() != p) throw Error(Errc::MismatchedPrime, "coefficient prime differs from system prime");
      if (c.precision() != k) throw Error(Errc::InvalidArgument, "coefficients need a common precision");
    }
  }
  for (long h : heights)
    if (h < 1) throw Error(Errc::InvalidArgument, "height bounds must be at least 1");
  HypothesisCheck check;
  Rational ts = 0, ss = 0;
  for (const auto& t : tau) {
    check.require(t > 0, "tau_i > 0");
    ts += t;
  }
  for (const auto& s : sigma) ss += s;
  check.require(ts == nn + 1, "sum tau_i = n+1");
  check.require(ss == nn, "sum sigma_i = n");
  check.throw_if_failed();
}

BucketExponents bucket_exponents(const LinearFormSystem& sys) {
  sys.validate();
  BucketExponents out;
  for (int i = 0; i < sys.n(); ++i) {
    ExactPower x = sys.norm_bound(i).inverse();  // p^-sigma_i T^tau_i
    long d = smallest_exponent_below(sys.p, x.inverse());
    out.delta.push_back(d);
    out.at_boundary.push_back(x == prime_power(sys.p, d - 1));
  }
  for (std::size_t i = 0; i < out.delta.size(); ++i) {
    if (out.delta[i] < 0)
      throw Error(Errc::BelowThreshold, "below H_sigma threshold: bucket exponent " + std::to_string(i + 1) +
                                            " is " + std::to_string(out.delta[i]));
  }
  return out;
}

std::string method_name(SolveMethod m) {
  switch (m) {
    case SolveMethod::Pigeonhole: return "pigeonhole";
    case SolveMethod::Lattice: return "lattice";
    case SolveMethod::BruteForce: return "brute_force";
  }
  return "unknown";
}

namespace {

std::uint64_t small_power(long p, long e) {
  Integer m = ipow(p, static_cast<unsigned long>(e));
  if (!m.fits_ulong_p() || m > Integer("4611686018427387904"))
    throw Error(Errc::BudgetExceeded, "modulus p^" + std::to_string(e) + " too large");
  return m.get_ui();
}

std::uint64_t reduce_to(const Integer& r, std::uint64_t m) {
  return mpz_fdiv_ui(r.get_mpz_t(), static_cast<unsigned long>(m));
}

// Returns later - earlier for the first bucket collision in row-major order.
std::optional<std::vector<long>> pigeonhole(const LinearFormSystem& sys, const std::vector<long>& delta) {
  const int n = sys.n();
  const int vars = n + 1;
  std::vector<std::uint64_t> mod(n);
  std::vector<std::vector<std::uint64_t>> coef(n, std::vector<std::uint64_t>(vars));
  std::uint64_t buckets = 1;
  std::vector<std::uint64_t> radix(n);
  for (int i = 0; i < n; ++i) {
    mod[i] = small_power(sys.p, delta[i]);
    radix[i] = buckets;
    buckets *= mod[i];
    for (int j = 0; j < vars; ++j) coef[i][j] = reduce_to(sys.forms[i][j].residue(), mod[i]);
  }
  std::vector<std::int64_t> table(buckets, -1);
  std::vector<long> y(vars, 0);
  std::vector<std::uint64_t> val(n, 0);
  std::int64_t index = 0;

  auto recompute = [&] {
    for (int i = 0; i < n; ++i) {
      unsigned __int128 s = 0;
      for (int j = 0; j < vars; ++j) s += static_cast<unsigned __int128>(coef[i][j]) * static_cast<std::uint64_t>(y[j]);
      val[i] = static_cast<std::uint64_t>(s % mod[i]);
    }
  };
  auto decode = [&](std::int64_t idx) {
    std::vector<long> v(vars);
    for (int j = vars - 1; j >= 0; --j) {
      v[j] = static_cast<long>(idx % (sys.heights[j] + 1));
      idx /= (sys.heights[j] + 1);
    }
    return v;
  };

  recompute();
  while (true) {
    std::uint64_t key = 0;
    for (int i = 0; i < n; ++i) key += val[i] * radix[i];
    if (table[key] >= 0) {
      auto a = decode(table[key]);
      std::vector<long> x(vars);
      for (int j = 0; j < vars; ++j) x[j] = y[j] - a[j];
      return x;
    }
    table[key] = index++;
    int j = vars - 1;
    while (j >= 0 && y[j] == sys.heights[j]) y[j--] = 0;
    if (j < 0) break;
    ++y[j];
    if (j == vars - 1) {
      for (int i = 0; i < n; ++i) {
        val[i] += coef[i][j];
        if (val[i] >= mod[i]) val[i] -= mod[i];
      }
    } else {
      recompute();
    }
  }
  return std::nullopt;
}

std::optional<std::vector<long>> lattice_search(const LinearFormSystem& sys, const std::vector<long>& delta) {
  const int n = sys.n();
  std::vector<IntVector> forms;
  std::vector<Integer> moduli;
  for (int i = 0; i < n; ++i) {
    Integer m = ipow(sys.p, static_cast<unsigned long>(delta[i]));
    IntVector row;
    for (const auto& c : sys.forms[i]) {
      Integer r;
      mpz_fdiv_r(r.get_mpz_t(), c.residue().get_mpz_t(), m.get_mpz_t());
      row.push_back(r);
    }
    forms.push_back(std::move(row));
    moduli.push_back(m);
  }
  IntBasis basis = congruence_lattice(forms, moduli, n + 1);
  std::vector<Integer> bounds;
  for (long h : sys.heights) bounds.emplace_back(h);
  auto v = smallest_in_box(basis, bounds);
  if (!v) return std::nullopt;
  std::vector<long> x;
  for (const auto& c : *v) x.push_back(to_long(c));
  return x;
}

}  // namespace

bool meets_valuations(const LinearFormSystem& sys, const std::vector<long>& x, const std::vector<long>& exponents) {
  for (int i = 0; i < sys.n(); ++i) {
    if (exponents[i] <= 0) continue;
    if (exponents[i] > sys.precision())
      throw Error(Errc::InsufficientPrecision, "valuation test beyond coefficient precision");
    Integer m = ipow(sys.p, static_cast<unsigned long>(exponents[i]));
    Integer s = 0;
    for (std::size_t j = 0; j < x.size(); ++j) s += sys.forms[i][j].residue() * Integer(x[j]);
    if (!mpz_divisible_p(s.get_mpz_t(), m.get_mpz_t())) return false;
  }
  return true;
}

std::vector<long> norm_exponents(const LinearFormSystem& sys) {
  std::vector<long> e;
  for (int i = 0; i < sys.n(); ++i) e.push_back(smallest_exponent_at_most(sys.p, sys.norm_bound(i)));
  return e;
}

SolutionCheck check_solution(const LinearFormSystem& sys, const std::vector<long>& x,
                             const std::vector<long>& used_exponents) {
  SolutionCheck c;
  c.nonzero = std::any_of(x.begin(), x.end(), [](long v) { return v != 0; });
  c.within_heights = x.size() == sys.heights.size();
  for (std::size_t j = 0; c.within_heights && j < x.size(); ++j)
    if (std::labs(x[j]) > sys.heights[j]) c.within_heights = false;
  if (!c.within_heights) return c;
  c.buckets = meets_valuations(sys, x, used_exponents);
  auto e = norm_exponents(sys);
  for (auto& v : e) v = std::max(v, 0L);
  c.norms = meets_valuations(sys, x, e);
  return c;
}

MinkowskiResult solve(const LinearFormSystem& sys, const SolveOptions& opts) {
  BucketExponents be = bucket_exponents(sys);
  long max_delta = *std::max_element(be.delta.begin(), be.delta.end());
  if (sys.precision() < max_delta)
    throw Error(Errc::InsufficientPrecision, "coefficient precision " + std::to_string(sys.precision()) +
                                                 " below bucket exponent " + std::to_string(max_delta));
  MinkowskiResult r;
  r.bucket_exponents = be.delta;
  long sum = std::accumulate(be.delta.begin(), be.delta.end(), 0L);
  Integer volume = sys.box_volume();
  r.surplus = volume > ipow(sys.p, static_cast<unsigned long>(sum));

  std::vector<long> eps = be.delta;
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (be.at_boundary[i]) eps[i] = std::max(eps[i] - 1, 0L);

  const bool small = volume <= Integer(static_cast<unsigned long>(opts.pigeonhole_budget));
  auto attempt = [&](const std::vector<long>& delta) {
    return small ? pigeonhole(sys, delta) : lattice_search(sys, delta);
  };

  std::optional<std::vector<long>> x = attempt(be.delta);
  r.used_exponents = be.delta;
  if (!x && eps != be.delta) {
    x = attempt(eps);
    r.used_exponents = eps;
    r.boundary = true;
  }
  r.method = small ? SolveMethod::Pigeonhole : SolveMethod::Lattice;
  if (!x) {
    x = brute_force(sys, opts.brute_force_budget);
    if (!x) throw Error(Errc::NoSolution, "no solution found in the box");
    r.method = SolveMethod::BruteForce;
    r.used_exponents = norm_exponents(sys);
    for (auto& v : r.used_exponents) v = std::max(v, 0L);
    r.boundary = true;
  }
  r.x = *x;
  r.verified = check_solution(sys, r.x, r.used_exponents).ok();
  return r;
}

std::optional<std::vector<long>> brute_force(const LinearFormSystem& sys, std::uint64_t budget) {
  sys.validate();
  Integer count = 1;
  for (long h : sys.heights) count *= Integer(2 * h + 1);
  if (count > Integer(static_cast<unsigned long>(budget)))
    throw Error(Errc::BudgetExceeded, "brute force budget exceeded: box has " + count.get_str() + " points");
  const int n = sys.n();
  const int vars = n + 1;
  auto e = norm_exponents(sys);
  std::vector<std::uint64_t> mod(n);
  std::vector<std::vector<std::uint64_t>> coef(n, std::vector<std::uint64_t>(vars));
  for (int i = 0; i < n; ++i) {
    long ei = std::max(e[i], 0L);
    if (ei > sys.precision())
      throw Error(Errc::InsufficientPrecision, "norm exponent beyond coefficient precision");
    mod[i] = small_power(sys.p, ei);
    for (int j = 0; j < vars; ++j) coef[i][j] = reduce_to(sys.forms[i][j].residue(), mod[i]);
  }
  std::vector<long> x(vars);
  for (int j = 0; j < vars; ++j) x[j] = -sys.heights[j];
  while (true) {
    bool zero = std::all_of(x.begin(), x.end(), [](long v) { return v == 0; });
    if (!zero) {
      bool ok = true;
      for (int i = 0; ok && i < n; ++i) {
        __int128 s = 0;
        for (int j = 0; j < vars; ++j) s += static_cast<__int128>(coef[i][j]) * x[j];
        __int128 m = static_cast<__int128>(mod[i]);
        if (((s % m) + m) % m != 0) ok = false;
      }
      if (ok) return x;
    }
    int j = vars - 1;
    while (j >= 0 && x[j] == sys.heights[j]) {
      x[j] = -sys.heights[j];
      --j;
    }
    if (j < 0) break;
    ++x[j];
  }
  return std::nullopt;
}

}  // namespace padic
