#include "padic/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace padic {

namespace {

Rational sum_of(std::span<const Rational> v) { return std::accumulate(v.begin(), v.end(), Rational(0)); }

Rational weighted_min(std::span<const Rational> tau) {
  const int n = static_cast<int>(tau.size());
  std::optional<Rational> best;
  for (const auto& ti : tau) {
    Rational num = n + 1;
    for (const auto& tj : tau)
      if (tj < ti) num += ti - tj;
    Rational cand = num / ti;
    if (!best || cand < *best) best = cand;
  }
  return *best;
}

}  // namespace

Rational jb_dimension(std::span<const Rational> tau) {
  HypothesisCheck h;
  h.require(!tau.empty(), "n >= 1");
  for (const auto& t : tau) h.require(t > 1, "tau_i > 1");
  h.require(sum_of(tau) > Rational(static_cast<long>(tau.size()) + 1), "sum tau_i > n+1");
  h.throw_if_failed();
  return weighted_min(tau);
}

RynneValue rynne_dimension(std::span<const Rational> tau) {
  HypothesisCheck h;
  h.require(!tau.empty(), "n >= 1");
  for (const auto& t : tau) h.require(t > 0, "tau_i > 0");
  h.require(sum_of(tau) >= 1, "sum tau_i >= 1");
  h.throw_if_failed();
  std::vector<Rational> s(tau.begin(), tau.end());
  RynneValue r;
  r.reordered = !std::is_sorted(s.begin(), s.end(), std::greater<>());
  std::sort(s.begin(), s.end(), std::greater<>());
  const int n = static_cast<int>(s.size());
  std::optional<Rational> best;
  for (int k = 0; k < n; ++k) {
    Rational num = n + 1;
    for (int i = k; i < n; ++i) num += s[k] - s[i];
    Rational cand = num / (s[k] + 1);
    if (!best || cand < *best) best = cand;
  }
  r.value = *best;
  return r;
}

std::vector<LimitExponent> limit_exponents(const ApproxTuple& psi, long from, long to) {
  std::vector<LimitExponent> out;
  for (const auto& f : psi) {
    LimitExponent e;
    if (!f.is_table()) {
      e.exact = f.exponent();
      e.estimate = to_double(f.exponent());
    } else {
      std::vector<std::pair<long, double>> pts;
      for (const auto& [q, v] : f.values())
        if (q >= from && q <= to && q > 1 && v > 0) pts.emplace_back(q, to_double(v));
      if (pts.size() >= 2) {
        const auto [q0, v0] = pts[pts.size() - 2];
        const auto [q1, v1] = pts.back();
        e.estimate = -(std::log(v1) - std::log(v0)) / (std::log(static_cast<double>(q1)) - std::log(static_cast<double>(q0)));
      } else if (pts.size() == 1) {
        e.estimate = -std::log(pts[0].second) / std::log(static_cast<double>(pts[0].first));
      } else {
        e.estimate = std::nan("");
      }
    }
    out.push_back(e);
  }
  return out;
}

std::string variant_name(WWVariant v) { return v == WWVariant::K2Sum ? "K2-sum" : "K3-sum"; }

WWValue ww_exponent(std::span<const Rational> a, std::span<const Rational> t, WWVariant variant) {
  if (a.size() != t.size() || a.empty()) throw Error(Errc::InvalidArgument, "a and t need the same positive length");
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] <= 0 || t[j] < 0) throw Error(Errc::InvalidArgument, "need a_j > 0 and t_j >= 0");
  std::vector<Rational> cands;
  for (std::size_t j = 0; j < a.size(); ++j) {
    cands.push_back(a[j]);
    cands.push_back(a[j] + t[j]);
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  std::optional<WWValue> best;
  for (const auto& A : cands) {
    WWValue w;
    w.argmin = A;
    Rational a3 = 0, sub = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const int idx = static_cast<int>(j);
      if (a[j] >= A) {
        w.k1.push_back(idx);
      } else if (a[j] + t[j] <= A) {
        w.k2.push_back(idx);
        if (variant == WWVariant::K2Sum) sub += t[j];
      } else {
        w.k3.push_back(idx);
        a3 += a[j];
        if (variant == WWVariant::K3Sum) sub += t[j];
      }
    }
    w.value = Rational(static_cast<long>(w.k1.size() + w.k2.size())) + (a3 - sub) / A;
    if (!best || w.value < best->value) best = std::move(w);
  }
  return *best;
}

Waterfill waterfill(std::span<const Rational> weights, const Rational& target) {
  if (weights.empty()) throw Error(Errc::InvalidArgument, "no weights");
  if (sum_of(weights) < target) throw Error(Errc::InvalidArgument, "weights sum below target");
  std::vector<Rational> s(weights.begin(), weights.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  Rational below = 0;
  Waterfill w;
  for (std::size_t k = 0; k < n; ++k) {
    // the k smallest weights are filled, the rest sit at the level
    Rational c = (target - below) / Rational(static_cast<long>(n - k));
    if (c <= s[k] && (k == 0 || c >= s[k - 1])) {
      w.level = c;
      break;
    }
    below += s[k];
  }
  for (const auto& x : weights) w.values.push_back(std::min(x, w.level));
  return w;
}

Waterfill waterfill_alpha(std::span<const Rational> tau) {
  jb_dimension(tau);  // hypotheses
  auto w = waterfill(tau, Rational(static_cast<long>(tau.size()) + 1));
  if (w.level <= 1) throw Error(Errc::InvalidArgument, "level fill dropped to 1 or below");
  return w;
}

Waterfill waterfill_v(std::span<const Rational> tau, int d, int m) {
  manifold_hypotheses(tau, d, m, ManifoldBound::General).throw_if_failed();
  const auto dep = tau.subspan(static_cast<std::size_t>(d));
  auto w = waterfill(tau.first(static_cast<std::size_t>(d)), Rational(d + m + 1) - sum_of(dep));
  for (const auto& v : w.values)
    if (v <= 1) throw HypothesisError({"hypotheses do not support construction (v_i > 1)"});
  return w;
}

std::string bound_name(ManifoldBound b) {
  switch (b) {
    case ManifoldBound::EqualWeights: return "equal";
    case ManifoldBound::Curve: return "curve";
    case ManifoldBound::General: return "general";
  }
  return "?";
}

ManifoldBound parse_bound(const std::string& s) {
  if (s == "equal") return ManifoldBound::EqualWeights;
  if (s == "curve") return ManifoldBound::Curve;
  if (s == "general") return ManifoldBound::General;
  throw Error(Errc::Parse, "unknown bound '" + s + "' (equal, curve, general)");
}

HypothesisCheck manifold_hypotheses(std::span<const Rational> tau, int d, int m, ManifoldBound which) {
  HypothesisCheck h;
  const int n = d + m;
  h.require(d >= 1 && m >= 0, "d >= 1 and m >= 0");
  switch (which) {
    case ManifoldBound::EqualWeights: {
      h.require(tau.size() == 1, "a single tau");
      h.require(m >= 1, "m >= 1");
      if (tau.size() != 1 || m < 1 || d < 1) break;
      h.require(tau[0] > 1 + Rational(1, n), "tau > 1 + 1/n");
      h.require(tau[0] < 1 + Rational(1, m), "tau < 1 + 1/m");
      break;
    }
    case ManifoldBound::Curve: {
      h.require(d == 1, "d = 1");
      h.require(tau.size() == static_cast<std::size_t>(n), "tau has n entries");
      if (d != 1 || tau.size() != static_cast<std::size_t>(n) || n < 2) break;
      const Rational rest = sum_of(tau.subspan(1));
      h.require(rest < n, "sum_{j>=2} tau_j < n");
      for (int i = 1; i < n; ++i) h.require(tau[i] > 1, "tau_i > 1 for i >= 2");
      Rational top = Rational(n + 1) - rest;
      for (int i = 1; i < n; ++i) top = std::max(top, tau[i]);
      h.require(tau[0] >= top, "tau_1 >= max(tau_i, n+1 - sum_{j>=2} tau_j)");
      break;
    }
    case ManifoldBound::General: {
      h.require(tau.size() == static_cast<std::size_t>(n), "tau has n entries");
      if (tau.size() != static_cast<std::size_t>(n) || d < 1) break;
      for (const auto& t : tau) h.require(t > 1, "tau_i > 1");
      h.require(sum_of(tau.subspan(static_cast<std::size_t>(d))) < m + 1, "sum_j tau_{d+j} < m+1");
      h.require(sum_of(tau) > n + 1, "sum tau_i > n+1");
      if (m > 0) {
        const Rational lo = *std::min_element(tau.begin(), tau.begin() + d);
        const Rational hi = *std::max_element(tau.begin() + d, tau.end());
        h.require(lo >= hi, "min_{i<=d} tau_i >= max_j tau_{d+j}");
      }
      break;
    }
  }
  return h;
}

Rational manifold_lower_bound(std::span<const Rational> tau, int d, int m, ManifoldBound which) {
  manifold_hypotheses(tau, d, m, which).throw_if_failed();
  const int n = d + m;
  switch (which) {
    case ManifoldBound::EqualWeights:
      return Rational(n + 1) / tau[0] - m;
    case ManifoldBound::Curve:
      return (Rational(n + 1) - sum_of(tau.subspan(1))) / tau[0];
    case ManifoldBound::General: {
      std::optional<Rational> best;
      for (int i = 0; i < d; ++i) {
        Rational num = n + 1;
        for (const auto& tj : tau)
          if (tj < tau[i]) num += tau[i] - tj;
        Rational cand = num / tau[i] - m;
        if (!best || cand < *best) best = cand;
      }
      return *best;
    }
  }
  return 0;
}

BoxDimFit boxdim_estimate(const std::map<int, Integer>& counts, long p, int exclude) {
  std::vector<std::pair<int, double>> pts;
  for (const auto& [k, c] : counts)
    if (c > 0) pts.emplace_back(k, std::log(to_double(Rational(c))));
  if (pts.size() < 3) throw Error(Errc::InvalidArgument, "box-dimension fit needs at least 3 nonzero levels");
  const std::size_t drop = std::min<std::size_t>(static_cast<std::size_t>(std::max(exclude, 0)), pts.size() - 3);
  pts.erase(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(drop));
  const double lp = std::log(static_cast<double>(p));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [k, y] : pts) {
    const double x = k * lp;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  BoxDimFit fit;
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  for (const auto& [k, y] : pts) {
    fit.levels.push_back(k);
    fit.residuals.push_back(y - (fit.intercept + fit.slope * k * lp));
  }
  return fit;
}

}  // namespace padic
