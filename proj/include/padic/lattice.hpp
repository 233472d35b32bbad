#pragma once

// Integer lattices cut out by congruences, LLL reduction, and search for
// short vectors inside a box.

#include <cstdint>
#include <optional>
#include <vector>

#include "padic/rational.hpp"

namespace padic {

using IntVector = std::vector<Integer>;
using IntBasis = std::vector<IntVector>;  // one basis vector per row

/// Basis of {x in Z^dim : forms[i] . x = 0 (mod moduli[i]) for all i}.
IntBasis congruence_lattice(const std::vector<IntVector>& forms, const std::vector<Integer>& moduli, int dim);

/// In-place LLL reduction with parameter 3/4, exact rational Gram-Schmidt.
void lll_reduce(IntBasis& basis);

/// Nonzero lattice vector in the box |x_j| <= bounds[j] minimizing
/// max_j |x_j| / bounds[j]; ties go to the lexicographically smallest
/// vector whose first nonzero entry is positive. Throws Errc::BudgetExceeded
/// after visiting `budget` enumeration nodes.
std::optional<IntVector> smallest_in_box(const IntBasis& basis, const std::vector<Integer>& bounds,
                                         std::uint64_t budget = 50'000'000);

}  // namespace padic
