#pragma once

// Closed-form dimension formulas, exponent constructions and a box-counting
// slope fit.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "padic/approx.hpp"
#include "padic/error.hpp"
#include "padic/rational.hpp"

namespace padic {

/// Weighted Jarnik-Besicovitch dimension; needs tau_i > 1 and sum tau_i > n+1.
Rational jb_dimension(std::span<const Rational> tau);

struct RynneValue {
  Rational value;
  bool reordered = false;  // input was not descending
};

/// Real-case weighted formula; needs sum tau_i >= 1.
RynneValue rynne_dimension(std::span<const Rational> tau);

struct LimitExponent {
  std::optional<Rational> exact;
  double estimate = 0;
};

/// lim -log psi_i(q) / log q. Tables give an estimate over [from, to].
std::vector<LimitExponent> limit_exponents(const ApproxTuple& psi, long from, long to);

enum class WWVariant { K2Sum, K3Sum };
std::string variant_name(WWVariant v);

struct WWValue {
  Rational value;
  Rational argmin;
  std::vector<int> k1, k2, k3;  // 0-based indices
};

/// Mass transference exponent for rectangles, unit Ahlfors exponents and zero scaling.
WWValue ww_exponent(std::span<const Rational> a, std::span<const Rational> t, WWVariant variant);

struct Waterfill {
  Rational level;
  std::vector<Rational> values;  // min(w_i, level)
};

/// Unique level c with sum min(w_i, c) = target; needs sum w_i >= target.
Waterfill waterfill(std::span<const Rational> weights, const Rational& target);
/// Level fill of tau to n+1.
Waterfill waterfill_alpha(std::span<const Rational> tau);
/// Level fill of the first d weights to n+1 - sum of the last m.
Waterfill waterfill_v(std::span<const Rational> tau, int d, int m);

enum class ManifoldBound {
  EqualWeights,  // scalar tau in (1 + 1/n, 1 + 1/m)
  Curve,         // d = 1
  General,
};
std::string bound_name(ManifoldBound b);
ManifoldBound parse_bound(const std::string& s);

HypothesisCheck manifold_hypotheses(std::span<const Rational> tau, int d, int m, ManifoldBound which);
/// For EqualWeights tau holds a single value.
Rational manifold_lower_bound(std::span<const Rational> tau, int d, int m, ManifoldBound which);

struct BoxDimFit {
  double slope = 0;
  double intercept = 0;
  std::vector<int> levels;
  std::vector<double> residuals;
};

/// Least-squares slope of log N_k against k log p. Zero counts are dropped,
/// then the coarsest min(exclude, count - 3) levels.
BoxDimFit boxdim_estimate(const std::map<int, Integer>& counts, long p, int exclude = 2);

}  // namespace padic
