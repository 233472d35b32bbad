#include "padic/manifold.hpp"

#include <algorithm>
#include <exception>
#include <sstream>
#include <thread>

#include "padic/error.hpp"

namespace padic {

DQEMap::DQEMap(long p, int d, std::vector<Polynomial> polys) : p_(p), d_(d), polys_(std::move(polys)) {
  if (!is_prime(p)) throw Error(Errc::InvalidArgument, "p must be prime");
  if (d < 1) throw Error(Errc::InvalidArgument, "need d >= 1");
  if (polys_.empty()) throw Error(Errc::InvalidArgument, "need m >= 1");
  for (const auto& f : polys_) {
    if (f.vars() != d) throw Error(Errc::InvalidArgument, "polynomial variable count must equal d");
    if (!f.is_p_integral(p))
      throw Error(Errc::NotPAdicInteger, "coefficients must be p-adic integers: " + f.to_string());
  }
  for (const auto& f : polys_) {
    std::vector<Polynomial> row;
    for (int i = 0; i < d; ++i) row.push_back(f.derivative(i));
    partials_.push_back(std::move(row));
  }
}

DQEConstants dqe_constants(const DQEMap& f, std::span<const PAdicInt> x) {
  if (x.size() != static_cast<std::size_t>(f.d())) throw Error(Errc::InvalidArgument, "base point has wrong dimension");
  DQEConstants c;
  c.taylor_bound = 0;
  for (const auto& poly : f.polys())
    for (const auto& coeff : poly.taylor_coefficients(2)) c.taylor_bound = std::max(c.taylor_bound, coeff.coefficient_norm(f.prime()));
  c.C = std::max(Rational(1), c.taylor_bound);
  c.epsilon = 1;
  Rational top = 1;
  for (int j = 0; j < f.m(); ++j)
    for (int i = 0; i < f.d(); ++i) top = std::max(top, f.partial(j, i).eval(x).norm_bound());
  // top is a power of p
  c.lambda = 0;
  while (top > 1) {
    top /= f.prime();
    ++c.lambda;
  }
  return c;
}

HypothesisCheck DirichletInstance::hypotheses() const {
  HypothesisCheck h;
  const int d = map.d(), m = map.m(), n = map.n();
  h.require(x.size() == static_cast<std::size_t>(d), "base point has d coordinates");
  for (const auto& xi : x) h.require(xi.prime() == map.prime(), "base point uses the map's prime");
  h.require(tau.size() == static_cast<std::size_t>(m), "tau has m entries");
  h.require(v.size() == static_cast<std::size_t>(d), "v has d entries");
  Rational st = 0, sv = 0;
  for (const auto& t : tau) {
    st += t;
    h.require(t > 1, "tau_j > 1");
  }
  for (const auto& vi : v) {
    sv += vi;
    h.require(vi > 1, "v_i > 1");
  }
  h.require(st < m + 1, "sum tau_j < m+1");
  h.require(sv == Rational(n + 1) - st, "sum v_i = n+1 - sum tau_j");
  h.require(H >= 1, "H >= 1");
  return h;
}

void DirichletInstance::validate() const { hypotheses().throw_if_failed(); }

namespace {

Rational min_of(const std::vector<Rational>& v) { return *std::min_element(v.begin(), v.end()); }
Rational max_of(const std::vector<Rational>& v) { return *std::max_element(v.begin(), v.end()); }

Rational shift_exponent(const DirichletInstance& inst, long lambda) {
  return Rational(inst.map.n() + inst.map.m() * lambda, inst.map.d());
}

std::vector<Rational> sigma_of(const DirichletInstance& inst, long lambda) {
  std::vector<Rational> s(static_cast<std::size_t>(inst.map.d()), shift_exponent(inst, lambda));
  for (int j = 0; j < inst.map.m(); ++j) s.push_back(Rational(-lambda));
  return s;
}

std::vector<Rational> weights_of(const DirichletInstance& inst) {
  std::vector<Rational> w = inst.v;
  w.insert(w.end(), inst.tau.begin(), inst.tau.end());
  return w;
}

ExactPower power_or_one(const Rational& base, const Rational& exponent) {
  if (base == 1) return ExactPower();
  return ExactPower::power(base, exponent);
}

}  // namespace

bool H0Report::admits(long H) const { return ExactPower(Rational(H)) > value; }

H0Report dirichlet_h0(const DirichletInstance& inst) {
  inst.validate();
  const auto c = dqe_constants(inst.map, inst.x);
  const long p = inst.map.prime();
  const int n = inst.map.n(), d = inst.map.d();
  const Rational vmin = min_of(inst.v), tmax = max_of(inst.tau);
  const Rational gap = 2 * vmin - tmax;
  if (gap <= 0) throw Error(Errc::InvalidArgument, "2 v_min - tau_max must be positive");
  H0Report r;
  r.alpha1 = power_or_one(c.C, 2 / gap);
  r.alpha2 = power_or_one(c.C, 1 / (vmin - 1));
  r.beta = (ExactPower(1 / c.epsilon) * ExactPower::power(p, shift_exponent(inst, c.lambda))).pow(1 / (vmin - 1));
  r.gamma = ExactPower::power(p, make_rational(Integer(n + n * c.lambda), Integer(d)) / (vmin - 1));

  // all bucket exponents >= 0  <=>  T^w_i >= p^(sigma_i - 1) for T = H + 1
  const auto sigma = sigma_of(inst, c.lambda);
  const auto w = weights_of(inst);
  ExactPower need(Rational(2));
  for (std::size_t i = 0; i < w.size(); ++i) need = max(need, ExactPower::power(p, (sigma[i] - 1) / w[i]));
  r.feasibility = ceil_of(need) - 1;

  const std::pair<const char*, ExactPower> cases[] = {{"alpha1", r.alpha1},
                                                      {"alpha2", r.alpha2},
                                                      {"beta", r.beta},
                                                      {"gamma", r.gamma},
                                                      {"feasibility", ExactPower(Rational(r.feasibility))}};
  r.value = cases[0].second;
  r.binding = cases[0].first;
  for (const auto& [name, val] : cases)
    if (val > r.value) {
      r.value = val;
      r.binding = name;
    }
  return r;
}

RationalPoint make_point(std::vector<Integer> a, long p, int d) {
  if (a.empty()) throw Error(Errc::InvalidArgument, "empty point");
  RationalPoint pt;
  pt.height = 0;
  Integer g = 0;
  for (const auto& ai : a) {
    pt.height = std::max(pt.height, Integer(padic::abs(ai)));
    g = padic::gcd(g, ai);
  }
  pt.a0_coprime_to_p = a[0] % p != 0;
  pt.primitive = g == 1;
  pt.in_domain = a[0] != 0;
  if (pt.in_domain) {
    const long v0 = integer_valuation(a[0], p);
    for (int i = 1; i <= d && i < static_cast<int>(a.size()); ++i)
      if (a[i] != 0 && integer_valuation(a[i], p) < v0) pt.in_domain = false;
  }
  pt.a = std::move(a);
  return pt;
}

std::string RationalPoint::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + padic::to_string(a[i]);
  return s + ")";
}

bool DirichletCheck::ok() const {
  return height && std::all_of(independent.begin(), independent.end(), [](bool b) { return b; }) &&
         std::all_of(dependent.begin(), dependent.end(), [](bool b) { return b; });
}

namespace {

std::vector<Rational> ratios(const RationalPoint& pt, int d) {
  std::vector<Rational> y;
  for (int i = 1; i <= d; ++i) y.push_back(make_rational(pt.a[i], pt.a[0]));
  return y;
}

/// |f_j(y) - a_{d+j}/a_0|_p < bound, exactly.
bool dependent_ok(const DQEMap& f, int j, std::span<const Rational> y, const RationalPoint& pt, const ExactPower& bound) {
  Rational diff = f.polys()[j].eval(y) - make_rational(pt.a[f.d() + 1 + j], pt.a[0]);
  if (diff == 0) return true;
  return prime_power(f.prime(), -valuation(diff, f.prime())) < bound;
}

}  // namespace

DirichletCheck check_dirichlet(const DirichletInstance& inst, const RationalPoint& pt, long k) {
  const auto& f = inst.map;
  const long p = f.prime();
  const int d = f.d(), m = f.m();
  if (pt.a.size() != static_cast<std::size_t>(f.n() + 1)) throw Error(Errc::InvalidArgument, "point has wrong length");
  if (pt.a[0] == 0) throw Error(Errc::InvalidArgument, "a_0 must be nonzero");
  const auto c = dqe_constants(f, inst.x);
  const Integer pk = ipow(Integer(p), static_cast<unsigned long>(k));
  DirichletCheck out;
  out.height = pk * pt.height <= inst.H;

  const ExactPower scale = ExactPower::power(p, shift_exponent(inst, c.lambda) + k);
  const long v0 = integer_valuation(pt.a[0], p);
  for (int i = 0; i < d; ++i) {
    const ExactPower bound = scale * ExactPower::power(Rational(inst.H), -inst.v[i]);
    const auto& xi = inst.x[i];
    // a_0 x_i - a_i at the precision of x_i
    PAdicInt lhs = PAdicInt(p, xi.precision(), pt.a[0]) * xi - PAdicInt(p, xi.precision(), pt.a[i + 1]);
    if (auto v = lhs.valuation()) {
      out.independent.push_back(prime_power(p, -(*v - v0)) < bound);
    } else {
      if (!(prime_power(p, -(xi.precision() - v0)) < bound))
        throw Error(Errc::InsufficientPrecision, "base point precision too small to decide |x_i - a_i/a_0|_p");
      out.independent.push_back(true);
    }
  }
  const auto y = ratios(pt, d);
  for (int j = 0; j < m; ++j) {
    const ExactPower bound = ExactPower::power(make_rational(Integer(inst.H), pk), -inst.tau[j]);
    out.dependent.push_back(dependent_ok(f, j, y, pt, bound));
  }
  return out;
}

namespace {

LinearFormSystem linearized_system(const DirichletInstance& inst, long lambda) {
  const auto& f = inst.map;
  const long p = f.prime();
  const int d = f.d(), m = f.m(), n = f.n();
  int K = inst.x[0].precision();
  for (const auto& xi : inst.x) K = std::min(K, xi.precision());
  std::vector<PAdicInt> x;
  for (const auto& xi : inst.x) x.push_back(xi.truncate(K));

  LinearFormSystem sys;
  sys.p = p;
  sys.heights.assign(static_cast<std::size_t>(n + 1), inst.H);
  sys.tau = weights_of(inst);
  sys.sigma = sigma_of(inst, lambda);
  const PAdicInt zero(p, K, 0), one(p, K, 1);
  for (int i = 0; i < d; ++i) {
    std::vector<PAdicInt> row(static_cast<std::size_t>(n + 1), zero);
    row[0] = x[i];
    row[i + 1] = -one;
    sys.forms.push_back(std::move(row));
  }
  const PAdicInt scale(p, K, ipow(Integer(p), static_cast<unsigned long>(lambda)));
  for (int j = 0; j < m; ++j) {
    std::vector<PAdicInt> row(static_cast<std::size_t>(n + 1), zero);
    PAdicInt constant = f.polys()[j].eval(std::span<const PAdicInt>(x));
    for (int i = 0; i < d; ++i) {
      PAdicInt g = f.partial(j, i).eval(std::span<const PAdicInt>(x));
      constant = constant - g * x[i];
      row[i + 1] = scale * g;
    }
    row[0] = scale * constant;
    row[d + 1 + j] = -scale;
    sys.forms.push_back(std::move(row));
  }
  return sys;
}

/// Divide out the prime-to-p part of the gcd, then p^v_p(b_0).
std::optional<std::pair<RationalPoint, long>> cancel(const std::vector<long>& b, long p, int d) {
  Integer g = 0;
  for (long bi : b) g = padic::gcd(g, Integer(bi));
  if (g == 0 || b[0] == 0) return std::nullopt;
  const long vg = integer_valuation(g, p);
  const Integer unit = g / ipow(Integer(p), static_cast<unsigned long>(vg));
  std::vector<Integer> a;
  for (long bi : b) a.push_back(Integer(bi) / unit);
  const long k = integer_valuation(a[0], p);
  const Integer pk = ipow(Integer(p), static_cast<unsigned long>(k));
  for (auto& ai : a) {
    if (ai % pk != 0) return std::nullopt;
    ai /= pk;
  }
  if (a[0] < 0)
    for (auto& ai : a) ai = -ai;
  return std::make_pair(make_point(std::move(a), p, d), k);
}

}  // namespace

DirichletSolution dirichlet_solve(const DirichletInstance& inst, const SolveOptions& opts) {
  const auto h0 = dirichlet_h0(inst);
  if (!h0.admits(inst.H))
    throw Error(Errc::BelowThreshold, "H = " + std::to_string(inst.H) + " does not exceed H_0 = " + h0.value.to_string());
  const auto c = dqe_constants(inst.map, inst.x);
  const auto sys = linearized_system(inst, c.lambda);
  std::optional<MinkowskiResult> mr;
  try {
    mr = solve(sys, opts);
  } catch (const Error& e) {
    if (e.code() != Errc::NoSolution && e.code() != Errc::BudgetExceeded) throw;
  }
  if (mr) {
    if (auto cut = cancel(mr->x, inst.map.prime(), inst.map.d())) {
      auto& [pt, k] = *cut;
      auto check = check_dirichlet(inst, pt, k);
      if (check.ok() && pt.condition_a()) return DirichletSolution{pt, k, "minkowski", *mr, check};
    }
  }
  if (auto ex = dirichlet_exhaustive(inst)) return *ex;
  throw Error(Errc::NoSolution, "no solution found");
}

namespace {

/// Integers in [-bound, bound] congruent to r mod M, ascending.
std::vector<Integer> congruent_in_range(const Integer& r, const Integer& M, const Integer& bound) {
  std::vector<Integer> out;
  Integer lo = -bound;
  Integer start = lo + ((r - lo) % M + M) % M;
  for (Integer v = start; v <= bound; v += M) out.push_back(v);
  return out;
}

}  // namespace

std::optional<DirichletSolution> dirichlet_exhaustive(const DirichletInstance& inst, std::uint64_t budget) {
  inst.validate();
  const auto& f = inst.map;
  const long p = f.prime();
  const int d = f.d(), m = f.m();
  const auto c = dqe_constants(f, inst.x);
  int K = inst.x[0].precision();
  for (const auto& xi : inst.x) K = std::min(K, xi.precision());
  const Integer PK = ipow(Integer(p), static_cast<unsigned long>(K));
  std::uint64_t spent = 0;

  for (long k = 0; ipow(Integer(p), static_cast<unsigned long>(k)) <= inst.H; ++k) {
    const Integer pk = ipow(Integer(p), static_cast<unsigned long>(k));
    const Integer Hk = Integer(inst.H) / pk;
    const ExactPower scale = ExactPower::power(p, shift_exponent(inst, c.lambda) + k);
    std::vector<Integer> mod_ind, mod_dep;
    for (int i = 0; i < d; ++i) {
      long e = smallest_exponent_below(p, scale * ExactPower::power(Rational(inst.H), -inst.v[i]));
      if (e > K) throw Error(Errc::InsufficientPrecision, "base point precision too small for exhaustive search");
      mod_ind.push_back(ipow(Integer(p), static_cast<unsigned long>(std::max(e, 0L))));
    }
    for (int j = 0; j < m; ++j) {
      long e = smallest_exponent_below(p, ExactPower::power(make_rational(Integer(inst.H), pk), -inst.tau[j]));
      mod_dep.push_back(ipow(Integer(p), static_cast<unsigned long>(std::max(e, 0L))));
    }
    for (Integer a0 = 1; a0 <= Hk; ++a0) {
      if (a0 % p == 0) continue;
      std::vector<std::vector<Integer>> cand;
      for (int i = 0; i < d; ++i) {
        Integer r = (a0 * inst.x[i].residue()) % PK;
        cand.push_back(congruent_in_range(r % mod_ind[i], mod_ind[i], Hk));
      }
      std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
      bool any = std::all_of(cand.begin(), cand.end(), [](const auto& c) { return !c.empty(); });
      while (any) {
        std::vector<Rational> y;
        for (int i = 0; i < d; ++i) y.push_back(make_rational(cand[i][idx[i]], a0));
        std::vector<std::vector<Integer>> dep;
        for (int j = 0; j < m; ++j) {
          Rational target = f.polys()[j].eval(std::span<const Rational>(y)) * a0;
          // a0 f_j(y) is p-integral; reduce it mod the dependent modulus
          Integer inv;
          mpz_invert(inv.get_mpz_t(), target.get_den_mpz_t(), mod_dep[j].get_mpz_t());
          Integer r = mod_dep[j] == 1 ? Integer(0) : Integer((target.get_num() * inv) % mod_dep[j]);
          dep.push_back(congruent_in_range(r, mod_dep[j], Hk));
        }
        std::vector<std::size_t> jdx(static_cast<std::size_t>(m), 0);
        bool more = std::all_of(dep.begin(), dep.end(), [](const auto& c) { return !c.empty(); });
        while (more) {
          if (++spent > budget) throw Error(Errc::BudgetExceeded, "exhaustive Dirichlet search exceeded budget");
          std::vector<Integer> a{a0};
          for (int i = 0; i < d; ++i) a.push_back(cand[i][idx[i]]);
          for (int j = 0; j < m; ++j) a.push_back(dep[j][jdx[j]]);
          auto pt = make_point(std::move(a), p, d);
          if (pt.condition_a()) {
            auto check = check_dirichlet(inst, pt, k);
            if (check.ok()) return DirichletSolution{pt, k, "exhaustive", {}, check};
          }
          int t = m - 1;
          while (t >= 0 && ++jdx[t] == dep[t].size()) jdx[t--] = 0;
          more = t >= 0;
        }
        int t = d - 1;
        while (t >= 0 && ++idx[t] == cand[t].size()) idx[t--] = 0;
        any = t >= 0;
      }
    }
  }
  return std::nullopt;
}

bool in_s_tau(const DQEMap& f, std::span<const Rational> tau, const RationalPoint& pt) {
  if (tau.size() != static_cast<std::size_t>(f.m())) throw Error(Errc::InvalidArgument, "tau has m entries");
  if (pt.a.size() != static_cast<std::size_t>(f.n() + 1)) throw Error(Errc::InvalidArgument, "point has wrong length");
  if (!pt.condition_a()) return false;
  const auto y = ratios(pt, f.d());
  for (int j = 0; j < f.m(); ++j)
    if (!dependent_ok(f, j, y, pt, ExactPower::power(Rational(pt.height), -tau[j]))) return false;
  return true;
}

namespace {

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  __int128 r0 = static_cast<__int128>(m), r1 = static_cast<__int128>(a % m);
  __int128 s0 = 0, s1 = 1;
  while (r1 != 0) {
    const __int128 q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    s0 -= q * s1;
    std::swap(s0, s1);
  }
  if (s0 < 0) s0 += static_cast<__int128>(m);
  return static_cast<std::uint64_t>(s0);
}

std::uint64_t mod_signed(long v, std::uint64_t m) {
  long r = v % static_cast<long>(m);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<long>(m) : r);
}

struct ModContext {
  std::uint64_t modulus = 1;
  std::vector<std::vector<std::uint64_t>> coeffs;  // per polynomial
};

class STauScanner {
 public:
  STauScanner(const DQEMap& f, std::span<const Rational> tau, long Hmax) : f_(f), tau_(tau.begin(), tau.end()), Hmax_(Hmax) {
    const long p = f.prime();
    // largest cap with p^cap < 2^61
    cap_ = 0;
    for (unsigned __int128 pc = static_cast<unsigned __int128>(p); pc < (static_cast<unsigned __int128>(1) << 61); pc *= static_cast<unsigned>(p))
      ++cap_;
    // e_j(h) = smallest e with p^-e < h^-tau_j; cap_ + 1 means beyond the modular range
    int top = 0;
    exps_.assign(static_cast<std::size_t>(f.m()), std::vector<int>(static_cast<std::size_t>(Hmax + 1), 0));
    for (int j = 0; j < f.m(); ++j)
      for (long h = 1; h <= Hmax; ++h) {
        long e = smallest_exponent_below(p, ExactPower::power(Rational(h), -tau_[j]));
        exps_[j][h] = static_cast<int>(std::clamp(e, 0L, static_cast<long>(cap_) + 1));
        top = std::max(top, std::min(exps_[j][h], cap_));
      }
    std::uint64_t mod = 1;
    for (int e = 0; e <= top; ++e) {
      ModContext ctx;
      ctx.modulus = mod;
      for (const auto& poly : f.polys()) ctx.coeffs.push_back(poly.residues_mod(mod));
      ctx_.push_back(std::move(ctx));
      mod *= static_cast<std::uint64_t>(p);
    }
  }

  void scan_a0(long a0, std::vector<RationalPoint>& out) const {
    const int d = f_.d(), m = f_.m();
    std::vector<long> a(static_cast<std::size_t>(d), -Hmax_);
    std::vector<std::vector<long>> cand(static_cast<std::size_t>(m));
    while (true) {
      long h0 = a0;
      for (long ai : a) h0 = std::max(h0, std::labs(ai));
      bool ok = true;
      for (int j = 0; j < m && ok; ++j) {
        cand[j].clear();
        const int e = std::min(exps_[j][h0], cap_);
        const std::uint64_t M = ctx_[e].modulus;
        const std::uint64_t r = target(a0, a, j, e);
        const long start = -Hmax_ + static_cast<long>(mod_signed(static_cast<long>(r) + Hmax_, M));
        for (long v = start; v <= Hmax_; v += static_cast<long>(M)) cand[j].push_back(v);
        ok = !cand[j].empty();
      }
      if (ok) emit(a0, a, cand, out);
      int t = d - 1;
      while (t >= 0 && a[t] == Hmax_) a[t--] = -Hmax_;
      if (t < 0) break;
      ++a[t];
    }
  }

 private:
  /// a0 f_j(a / a0) mod p^e
  std::uint64_t target(long a0, const std::vector<long>& a, int j, int e) const {
    const auto& ctx = ctx_[e];
    const std::uint64_t M = ctx.modulus;
    if (M == 1) return 0;
    const std::uint64_t inv = inverse_mod(static_cast<std::uint64_t>(a0) % M, M);
    std::uint64_t xs[16];
    std::vector<std::uint64_t> big;
    std::uint64_t* x = xs;
    if (a.size() > 16) {
      big.resize(a.size());
      x = big.data();
    }
    for (std::size_t i = 0; i < a.size(); ++i)
      x[i] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(mod_signed(a[i], M)) * inv) % M);
    const std::uint64_t r = f_.polys()[j].eval_mod(std::span<const std::uint64_t>(x, a.size()), M, ctx.coeffs[j]);
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(r) * (static_cast<std::uint64_t>(a0) % M)) % M);
  }

  void emit(long a0, const std::vector<long>& a, const std::vector<std::vector<long>>& cand,
            std::vector<RationalPoint>& out) const {
    const int d = f_.d(), m = f_.m();
    long h0 = a0;
    for (long ai : a) h0 = std::max(h0, std::labs(ai));
    std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
    while (true) {
      long h = h0;
      for (int j = 0; j < m; ++j) h = std::max(h, std::labs(cand[j][idx[j]]));
      // the candidates already satisfy the congruence for h0; a larger h needs a finer one
      bool member = true, exact = false;
      for (int j = 0; j < m && member; ++j) {
        const int e = exps_[j][h];
        if (e <= std::min(exps_[j][h0], cap_)) continue;
        if (e > cap_) {
          exact = true;
          continue;
        }
        const std::uint64_t M = ctx_[e].modulus;
        member = mod_signed(cand[j][idx[j]], M) == target(a0, a, j, e);
      }
      if (member) {
        std::vector<Integer> pt{Integer(a0)};
        for (long ai : a) pt.push_back(Integer(ai));
        for (int j = 0; j < m; ++j) pt.push_back(Integer(cand[j][idx[j]]));
        auto rp = make_point(std::move(pt), f_.prime(), d);
        if (rp.condition_a() && (!exact || in_s_tau(f_, tau_, rp))) out.push_back(std::move(rp));
      }
      int t = m - 1;
      while (t >= 0 && ++idx[t] == cand[t].size()) idx[t--] = 0;
      if (t < 0) break;
    }
  }

  const DQEMap& f_;
  std::vector<Rational> tau_;
  long Hmax_;
  int cap_;
  std::vector<std::vector<int>> exps_;
  std::vector<ModContext> ctx_;
};

}  // namespace

std::vector<RationalPoint> enumerate_s_tau(const DQEMap& f, std::span<const Rational> tau, long Hmax,
                                           const STauOptions& opts) {
  if (tau.size() != static_cast<std::size_t>(f.m())) throw Error(Errc::InvalidArgument, "tau has m entries");
  for (const auto& t : tau)
    if (t <= 0) throw Error(Errc::InvalidArgument, "tau_j must be positive");
  if (Hmax < 1) throw Error(Errc::InvalidArgument, "Hmax must be >= 1");
  if (Hmax > (1L << 40)) throw Error(Errc::BudgetExceeded, "Hmax too large");
  Integer work = Integer(Hmax) * ipow(Integer(2 * Hmax + 1), static_cast<unsigned long>(f.d()));
  if (work > Integer(static_cast<unsigned long>(opts.budget)))
    throw Error(Errc::BudgetExceeded, "S_tau enumeration needs " + to_string(work) + " base tuples");

  const STauScanner scanner(f, tau, Hmax);
  const int jobs = std::max(1, opts.jobs);
  std::vector<std::vector<RationalPoint>> shards(static_cast<std::size_t>(jobs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  auto work_on = [&](int s) {
    try {
      for (long a0 = 1 + s; a0 <= Hmax; a0 += jobs)
        if (a0 % f.prime() != 0) scanner.scan_a0(a0, shards[s]);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  if (jobs == 1) {
    work_on(0);
  } else {
    std::vector<std::jthread> threads;
    for (int s = 0; s < jobs; ++s) threads.emplace_back(work_on, s);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<RationalPoint> all;
  for (auto& s : shards)
    for (auto& pt : s) all.push_back(std::move(pt));
  std::sort(all.begin(), all.end(), [](const RationalPoint& x, const RationalPoint& y) { return x.a < y.a; });
  return all;
}

std::map<int, std::size_t> dyadic_counts(std::span<const RationalPoint> pts) {
  std::map<int, std::size_t> out;
  for (const auto& pt : pts) ++out[static_cast<int>(mpz_sizeinbase(pt.height.get_mpz_t(), 2)) - 1];
  return out;
}

HypothesisCheck cover_hypotheses(const DQEMap& f, std::span<const Rational> tau, const Rational& delta) {
  HypothesisCheck h;
  h.require(tau.size() == static_cast<std::size_t>(f.n()), "tau has n entries");
  h.require(delta > 0 && delta <= 1, "0 < delta <= 1");
  if (tau.size() != static_cast<std::size_t>(f.n())) return h;
  for (const auto& t : tau) h.require(t > 0, "tau_i > 0");
  const Rational lo = *std::min_element(tau.begin(), tau.begin() + f.d());
  const Rational hi = *std::max_element(tau.begin() + f.d(), tau.end());
  // p-integral polynomials are 1-Lipschitz on Z_p^d
  h.require(lo > hi || (lo == hi && delta <= 1), "min_{i<=d} tau_i >= max_j tau_{d+j}, with delta <= 1/L on equality");
  return h;
}

CoverResult cover_preimage(const DQEMap& f, std::span<const Rational> tau, const Rational& delta, long Hmax, int depth,
                           const STauOptions& opts) {
  cover_hypotheses(f, tau, delta).throw_if_failed();
  const long p = f.prime();
  const int d = f.d();
  const auto pts = enumerate_s_tau(f, tau.subspan(static_cast<std::size_t>(d)), Hmax, opts);

  // exponent table per height and coordinate
  std::vector<std::vector<int>> texp(static_cast<std::size_t>(d), std::vector<int>(static_cast<std::size_t>(Hmax + 1), 0));
  for (int i = 0; i < d; ++i)
    for (long h = 1; h <= Hmax; ++h) {
      long t = smallest_exponent_below(p, ExactPower(delta) * ExactPower::power(Rational(h), -tau[i]));
      texp[i][h] = static_cast<int>(std::max(t, 0L));
    }

  ClopenBuilder all(p, d, depth);
  std::map<int, ClopenBuilder> gens;
  std::vector<std::uint64_t> res(static_cast<std::size_t>(d));
  std::vector<int> exps(static_cast<std::size_t>(d));
  for (const auto& pt : pts) {
    const long h = pt.height.get_si();
    int top = 0;
    for (int i = 0; i < d; ++i) {
      exps[i] = texp[i][h];
      if (exps[i] > depth)
        throw Error(Errc::InsufficientDepth, "ball exponent " + std::to_string(exps[i]) + " exceeds depth " + std::to_string(depth));
      top = std::max(top, exps[i]);
      const Integer M = ipow(Integer(p), static_cast<unsigned long>(exps[i]));
      Integer inv;
      mpz_invert(inv.get_mpz_t(), pt.a[0].get_mpz_t(), M.get_mpz_t());
      Integer r = M == 1 ? Integer(0) : Integer(pt.a[i + 1] * inv);
      mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), M.get_mpz_t());
      res[i] = r.get_ui();
    }
    all.add_cell(res, exps);
    gens.try_emplace(top, p, d, depth).first->second.add_cell(res, exps);
  }
  CoverResult out{all.build(), pts.size(), {}, 0};
  for (int i = 0; i < d; ++i) {
    long t = smallest_exponent_below(p, ExactPower(delta) * ExactPower::power(Rational(Hmax + 1), -tau[i]));
    out.complete_below = std::max(out.complete_below, static_cast<int>(std::max(t, 0L)));
  }
  for (const auto& [k, b] : gens) out.generation_counts[k] = b.build().box_count(k);
  return out;
}

}  // namespace padic
