#pragma once

// Small integer solutions of systems of p-adic linear forms by pigeonhole
// bucketing, with a lattice search for large boxes and an exhaustive oracle.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padic/exact_power.hpp"
#include "padic/padic_int.hpp"

namespace padic {

/// n forms L_i in n+1 variables, heights H_0..H_n, weights tau and shifts
/// sigma with sum tau = n+1 and sum sigma = n.
struct LinearFormSystem {
  long p = 3;
  std::vector<std::vector<PAdicInt>> forms;
  std::vector<long> heights;
  std::vector<Rational> tau;
  std::vector<Rational> sigma;

  int n() const { return static_cast<int>(forms.size()); }
  int precision() const;
  /// prod (H_j + 1) = T^(n+1)
  Integer box_volume() const;
  /// p^sigma_i T^-tau_i
  ExactPower norm_bound(int i) const;
  void validate() const;
};

struct BucketExponents {
  std::vector<long> delta;
  /// p^(delta_i - 1) = p^-sigma_i T^tau_i exactly.
  std::vector<bool> at_boundary;
};

BucketExponents bucket_exponents(const LinearFormSystem& sys);

enum class SolveMethod { Pigeonhole, Lattice, BruteForce };
std::string method_name(SolveMethod m);

struct MinkowskiResult {
  std::vector<long> x;
  std::vector<long> bucket_exponents;
  std::vector<long> used_exponents;
  bool surplus = false;   // prod (H_j + 1) > p^(sum delta)
  bool boundary = false;  // only the limiting non-strict bound is certified
  bool verified = false;
  SolveMethod method = SolveMethod::Pigeonhole;
};

struct SolveOptions {
  std::uint64_t pigeonhole_budget = 1ull << 24;
  std::uint64_t brute_force_budget = 1ull << 24;
};

MinkowskiResult solve(const LinearFormSystem& sys, const SolveOptions& opts = {});

/// Smallest e_i with p^-e_i <= p^sigma_i T^-tau_i.
std::vector<long> norm_exponents(const LinearFormSystem& sys);

/// Lexicographically smallest nonzero x in prod [-H_j, H_j] with
/// |L_i(x)|_p <= p^sigma_i T^-tau_i for all i.
std::optional<std::vector<long>> brute_force(const LinearFormSystem& sys, std::uint64_t budget = 1ull << 24);

/// v_p(L_i(x)) >= exponents[i] for all i, decided at the coefficient precision.
bool meets_valuations(const LinearFormSystem& sys, const std::vector<long>& x, const std::vector<long>& exponents);

struct SolutionCheck {
  bool nonzero = false;
  bool within_heights = false;
  bool buckets = false;
  bool norms = false;
  bool ok() const { return nonzero && within_heights && buckets && norms; }
};

SolutionCheck check_solution(const LinearFormSystem& sys, const std::vector<long>& x,
                             const std::vector<long>& used_exponents);

}  // namespace padic
