#pragma once

// Approximation functions, layer sets and their limsup unions, and the
// volume series attached to them.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "padic/clopen_set.hpp"
#include "padic/exact_power.hpp"
#include "padic/padic_int.hpp"

namespace padic {

/// psi(q) = c * q^-e, or an explicit finite table.
class ApproxFunction {
 public:
  static ApproxFunction power_law(const Rational& exponent);
  static ApproxFunction scaled(const Rational& c, const Rational& exponent);
  static ApproxFunction table(std::map<long, Rational> values);

  bool is_table() const noexcept { return !table_.empty(); }
  const Rational& scale() const noexcept { return scale_; }
  const Rational& exponent() const noexcept { return exponent_; }
  const std::map<long, Rational>& values() const noexcept { return table_; }

  ExactPower at(long q) const;
  /// Exact rational value when psi(q) is rational.
  std::optional<Rational> rational_at(long q) const;
  double approx(long q) const;
  std::string to_string() const;

 private:
  Rational scale_{1};
  Rational exponent_{0};
  std::map<long, Rational> table_;
};

using ApproxTuple = std::vector<ApproxFunction>;

/// Grammar: "1/(2q)", "q^-2", "q^(-5/2)", "3q^-2", "3*q^-2", "1/q^2",
/// "table:1=1/2,2=1/8".
ApproxFunction parse_psi(std::string_view text);

struct StepExponent {
  long t = 0;
  bool clipped = false;  // psi(a0) > 1
};

/// The unique t with p^-t < psi(a0) <= p^(-t+1).
StepExponent step_exponent(const ApproxFunction& psi, long a0, long p);

/// psi(q) < 1/q, decided exactly.
bool is_proper_at(const ApproxFunction& psi, long q);
/// Values of q in [from, to] where some component fails psi(q) < 1/q.
std::vector<long> improper_points(const ApproxTuple& psi, long from, long to);

/// Count of numerators |a| <= a0 entering the layer (gcd(a, a0) = 1 when reduced).
Integer admissible_count(long a0, bool reduced);

/// Exponents t_i(a0) for every component.
std::vector<long> layer_exponents(const ApproxTuple& psi, long a0, long p);

ClopenSet build_layer(const Params& params, const ApproxTuple& psi, long a0, bool reduced, int depth);
/// Oracle: inserts one rectangle per admissible numerator tuple.
ClopenSet build_layer_by_rectangles(const Params& params, const ApproxTuple& psi, long a0, bool reduced,
                                    int depth);

struct LimsupOptions {
  bool reduced = true;
  int depth = 24;
  unsigned jobs = 1;
};

ClopenSet partial_limsup(const Params& params, const ApproxTuple& psi, long from, long to,
                         const LimsupOptions& opts);

/// Level-k box counts of the union of the layers whose largest exponent is k.
std::map<int, Integer> generation_box_counts(const Params& params, const ApproxTuple& psi, long from,
                                             long to, const LimsupOptions& opts);

struct SeriesValue {
  std::optional<Rational> exact;
  double approx = 0.0;
  std::string to_string() const;
};

SeriesValue khintchine_sum(int n, const ApproxTuple& psi, long count);
SeriesValue duffin_schaeffer_sum(int n, const ApproxTuple& psi, long count);
/// Ratio of the Duffin-Schaeffer sum to the Khintchine sum.
SeriesValue series_ratio(const SeriesValue& ds, const SeriesValue& kh);

struct ClaimsReport {
  long a0 = 0, b0 = 0;
  std::vector<long> exponents;
  Rational layer_measure;
  Rational phi_reference;          // phi(a0)^n prod p^-t_i
  Rational admissible_reference;   // N(a0)^n prod p^-t_i, the disjoint-union value
  bool phi_equal = false;
  bool disjoint = false;           // layer measure equals the admissible reference
  Rational intersection_measure;
  ExactPower claim_c_scale;        // a0^n b0^n prod psi_i(a0) psi_i(b0)
  double claim_c_ratio = 0.0;
};

/// Ratio intersection / scale as an exact comparison key (0 when the intersection is empty).
std::optional<ExactPower> claim_c_ratio_exact(const ClaimsReport& r);

ClaimsReport measure_claims_check(const Params& params, const ApproxTuple& psi, long a0, long b0, int depth);

struct LimsupRow {
  long a0 = 0;
  std::vector<long> exponents;
  Rational layer_measure;
  Rational phi_reference;
  Rational admissible_reference;
  Rational union_measure;
  SeriesValue khintchine_partial;
  SeriesValue duffin_schaeffer_partial;
};

std::vector<LimsupRow> limsup_rows(const Params& params, const ApproxTuple& psi, long from, long to,
                                   const LimsupOptions& opts);

}  // namespace padic
