#pragma once

#include <span>
#include <string>
#include <vector>

#include "padic/padic_int.hpp"
#include "padic/rational.hpp"

namespace padic {

struct Monomial {
  Rational coeff;
  std::vector<int> exponents;
};

/// Sparse multivariate polynomial with rational coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int vars, std::vector<Monomial> terms);

  int vars() const noexcept { return vars_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  int degree() const;
  bool is_zero() const noexcept { return terms_.empty(); }

  Rational eval(std::span<const Rational> x) const;
  /// Needs p-integral coefficients.
  PAdicInt eval(std::span<const PAdicInt> x) const;
  /// Coefficients mod m in term order; needs p-integral coefficients and m a power of p.
  std::vector<std::uint64_t> residues_mod(std::uint64_t m) const;
  /// Evaluation mod m < 2^62 with coefficients from residues_mod(m).
  std::uint64_t eval_mod(std::span<const std::uint64_t> x, std::uint64_t m,
                         std::span<const std::uint64_t> coeffs) const;

  Polynomial derivative(int var) const;
  /// Coefficient polynomials c_alpha(x) of f(x + h) = sum_alpha c_alpha(x) h^alpha
  /// over every alpha with |alpha| >= min_order.
  std::vector<Polynomial> taylor_coefficients(int min_order) const;

  bool is_p_integral(long p) const;
  /// max |coefficient|_p, 0 for the zero polynomial.
  Rational coefficient_norm(long p) const;

  std::string to_string() const;

 private:
  void normalize();

  int vars_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace padic
