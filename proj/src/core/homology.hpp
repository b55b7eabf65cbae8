#pragma once

#include "sheaf.hpp"

namespace torkos {

// What a complex of sheaves or cosheaves becomes once a cone and a degree
// are fixed: finite-dimensional rational vector spaces and plain matrices.
struct EvaluatedComplex {
  int lo = 0;              // cohomological degree of dims[0]
  std::vector<int> dims;   // consecutive term dimensions
  std::vector<QMat> mats;  // mats[i]: degree lo+i -> lo+i+1
};

EvaluatedComplex evaluate_complex(const SheafComplex& c, int cone, const LVec& m);
EvaluatedComplex evaluate_complex(const CoSheafComplex& c, int cone, const LVec& m);

// dims[k] - rank d_k - rank d_{k-1} spot by spot, indexed like ec.dims.
// Throws NotAComplex naming the first pair of consecutive maps whose
// composite fails to vanish.
std::vector<int> cohomology_dims(const EvaluatedComplex& ec);
bool is_exact(const EvaluatedComplex& ec);

// Integer box spanned by the given degrees, padded by `radius` on every
// side, listed in lexicographic order. An empty input boxes the origin.
std::vector<LVec> degree_window(const std::vector<LVec>& degrees, int rank, int radius = 2);

// One point per sign pattern of the pairings <m, r> - <t, r> (rays r of the
// fan, reference degrees t), scanning the padded box around the references;
// patterns whose chamber only opens up further out stay represented by the
// first box point realizing them.
std::vector<LVec> chamber_representatives(const Fan& fan, const std::vector<LVec>& refs,
                                          int radius = 2);

}  // namespace torkos
