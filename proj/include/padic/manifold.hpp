#pragma once

// Polynomial maps Z_p^d -> Z_p^m, the Dirichlet-style system on their graphs,
// resonant integer points near the graph, and finite covers of preimages.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "padic/clopen_set.hpp"
#include "padic/error.hpp"
#include "padic/exact_power.hpp"
#include "padic/minkowski.hpp"
#include "padic/polynomial.hpp"

namespace padic {

class DQEMap {
 public:
  DQEMap(long p, int d, std::vector<Polynomial> polys);

  long prime() const noexcept { return p_; }
  int d() const noexcept { return d_; }
  int m() const noexcept { return static_cast<int>(polys_.size()); }
  int n() const noexcept { return d() + m(); }
  const std::vector<Polynomial>& polys() const noexcept { return polys_; }
  /// partial f_j / partial x_i
  const Polynomial& partial(int j, int i) const { return partials_[j][i]; }

 private:
  long p_;
  int d_;
  std::vector<Polynomial> polys_;
  std::vector<std::vector<Polynomial>> partials_;
};

struct DQEConstants {
  Rational C;             // max(1, taylor_bound)
  Rational taylor_bound;  // max p-adic norm over order >= 2 Taylor coefficients
  Rational epsilon;
  long lambda = 0;
};

DQEConstants dqe_constants(const DQEMap& f, std::span<const PAdicInt> x);

struct DirichletInstance {
  DQEMap map;
  std::vector<PAdicInt> x;
  std::vector<Rational> tau;  // dependent block, size m
  std::vector<Rational> v;    // independent block, size d
  long H = 1;

  HypothesisCheck hypotheses() const;
  void validate() const;
};

struct H0Report {
  ExactPower alpha1, alpha2, beta, gamma;
  Integer feasibility;  // smallest H with all bucket exponents >= 0
  ExactPower value;
  std::string binding;
  /// H > H_0
  bool admits(long H) const;
};

H0Report dirichlet_h0(const DirichletInstance& inst);

struct RationalPoint {
  std::vector<Integer> a;  // a_0..a_n
  Integer height;
  bool a0_coprime_to_p = false;
  bool primitive = false;
  bool in_domain = false;
  bool condition_a() const { return a0_coprime_to_p && primitive && in_domain; }
  std::string to_string() const;
};

/// Domain is Z_p^d, so in_domain asks for a_1/a_0..a_d/a_0 in Z_p.
RationalPoint make_point(std::vector<Integer> a, long p, int d);

struct DirichletCheck {
  std::vector<bool> independent;  // one per i <= d
  std::vector<bool> dependent;    // one per j <= m
  bool height = false;
  bool ok() const;
};

/// Exact re-evaluation of the Dirichlet system for a point and shift k.
DirichletCheck check_dirichlet(const DirichletInstance& inst, const RationalPoint& pt, long k);

struct DirichletSolution {
  RationalPoint point;
  long k = 0;
  std::string method;  // "minkowski" or "exhaustive"
  MinkowskiResult minkowski;
  DirichletCheck check;
};

DirichletSolution dirichlet_solve(const DirichletInstance& inst, const SolveOptions& opts = {});

/// Lowest (k, a_0, a_1, ...) solution by direct search.
std::optional<DirichletSolution> dirichlet_exhaustive(const DirichletInstance& inst,
                                                      std::uint64_t budget = 1ull << 26);

/// Membership in the resonant set with dependent exponents tau (size m).
bool in_s_tau(const DQEMap& f, std::span<const Rational> tau, const RationalPoint& pt);

struct STauOptions {
  std::uint64_t budget = 1ull << 28;
  int jobs = 1;
};

/// Every member with a_0 > 0 and height <= Hmax, ordered by (a_0, a_1, ...).
std::vector<RationalPoint> enumerate_s_tau(const DQEMap& f, std::span<const Rational> tau, long Hmax,
                                           const STauOptions& opts = {});

/// Counts per dyadic height block [2^b, 2^(b+1)).
std::map<int, std::size_t> dyadic_counts(std::span<const RationalPoint> pts);

struct CoverResult {
  ClopenSet set;
  std::size_t points = 0;
  /// box_count(k) of the balls whose finest exponent is k
  std::map<int, Integer> generation_counts;
  /// Levels below this hold every ball they ever will; higher ones miss heights > Hmax.
  int complete_below = 0;
};

HypothesisCheck cover_hypotheses(const DQEMap& f, std::span<const Rational> tau, const Rational& delta);

/// Union of the rectangles |x_i - a_i/a_0|_p < delta h^-tau_i over the
/// resonant points of height <= Hmax, at depth K. tau has size n.
CoverResult cover_preimage(const DQEMap& f, std::span<const Rational> tau, const Rational& delta, long Hmax,
                           int depth, const STauOptions& opts = {});

}  // namespace padic
