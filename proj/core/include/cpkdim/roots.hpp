#pragma once

#include <span>
#include <vector>

#include "cpkdim/polynomial.hpp"

namespace cpkdim {

/// Roots of sum_j c[j] z^j (leading coefficient c.back() must be nonzero, degree <= 8).
/// Closed form for degree 2, Aberth iteration above that with a companion-matrix
/// eigenvalue fallback followed by Newton polishing.
std::vector<cd> polynomial_roots(std::span<const cd> coeffs);

/// Zeros in CP^1 of the binary form sum_j g[j] u^j v^(d-j), returned as normalized
/// (u, v) pairs; roots at infinity of either chart are kept, so exactly d roots come back
/// unless the form vanishes identically.
std::vector<CVec> binary_form_roots(std::span<const cd> g);

}  // namespace cpkdim
