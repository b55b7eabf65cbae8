#pragma once

#include <vector>

#include "module.hpp"

namespace torkos {

// One syzygy of a homogeneous matrix over the nonnegative-orthant grading:
// at degree `deg`, the columns active there combine to zero with these
// coefficients (full-length vector, zero on inactive columns).
struct SyzygyGen {
  LVec deg;
  std::vector<Rat> coeffs;
};

// Generators of the kernel of the free-module map given by a homogeneous
// matrix in flavor-B grading (column j is active at x iff col_deg[j] <= x
// coordinatewise). Candidate degrees are the join closure of the column
// degrees; processed in a linear extension of the coordinatewise order, a
// kernel vector is kept only when it extends the span of the generators
// already valid at that degree. The result generates the kernel degreewise
// at every degree, not just at the candidates.
std::vector<SyzygyGen> syzygy_basis(const HomMat& m);

}  // namespace torkos
