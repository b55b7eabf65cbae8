#pragma once

#include <functional>

#include "homology.hpp"

namespace torkos {

// Cellular chain complex of the closed face interval [xi, sigma] with
// constant rank-one coefficients: one line in degree -dim tau for every
// cone xi ⊆ tau ⊆ sigma, signed incidence boundaries. Exact whenever
// xi is a strict face of sigma; a single line in degree -dim sigma when
// they coincide.
EvaluatedComplex interval_cell_complex(const Fan& fan, int xi, int sigma);

// A diagram over the face poset describing a complex of formal duals: at
// each cone the list of M-twists of its dual summands, and for each facet
// pair (sigma, tau) the coefficient matrix of the carrier blocks (row =
// summand of sigma, column = summand of tau; absent pairs are zero).
struct CellDiagram {
  const Fan* fan = nullptr;
  Flavor flavor = Flavor::A;
  std::vector<std::vector<LVec>> cells;
  std::map<std::pair<int, int>, QMat> blocks;
};

// Assembles ⊕_{dim sigma = k} (U_sigma(t))^v into cohomological degree -k
// with the signed facet blocks as differentials. The signed boundary must
// square to zero entrywise; a flipped sign fails with SignIncoherence
// naming the first offending cone.
CoSheafComplex cellular_complex(const CellDiagram& d, const SignTable& signs);
CoSheafComplex cellular_complex(const CellDiagram& d);

// The duality functor on complexes of sheaves with free stalks: each stalk
// generator g of a term N^t over sigma contributes the dual summand
// (U_sigma(-g))^v in total degree t - dim sigma; differentials combine the
// signed cellular boundary (restriction coefficients of each term) with the
// input differentials carrying the sign (-1)^{dim sigma}. A single sheaf is
// placed in degree zero, after a projective resolution when its stalks are
// not free. `cells` records the (cone, twist) layout of every term.
struct KoszulResult {
  CoSheafComplex cx;
  std::map<int, std::vector<std::pair<int, LVec>>> cells;
};
KoszulResult koszul_K(const SheafComplex& n, const SignTable& signs);
KoszulResult koszul_K(const SheafComplex& n);
KoszulResult koszul_K(const Sheaf& f, const SignTable& signs);
KoszulResult koszul_K(const Sheaf& f);

// Degree-s homs of formal duals are sheaf homs in the reverse direction.
inline int cosheaf_hom_dim(const CoSheaf& c, const CoSheaf& d, const LVec& s) {
  return hom_pieces(d.under, c.under, s);
}

// On a complete fan the top term of K(structure sheaf) receives the formal
// dual of the structure sheaf itself: the sum of the top-cone inclusions,
// with orientations absorbed into the incidence signs. Prepending it makes
// the complex exact in every degree.
struct AugmentedKoszul {
  KoszulResult k;
  CoSheaf aug;
  CoSheafMorphism eps;  // aug -> k.cx.terms.at(-rank)
};
AugmentedKoszul augmented_K_structure(const Fan& fan, Flavor flavor);  // FanNotComplete otherwise
EvaluatedComplex evaluate_augmented(const AugmentedKoszul& a, int cone, const LVec& m);

// Regrading to ray coordinates, termwise.
CoSheaf delta_cosheaf(const CoSheaf& c);
CoSheafComplex delta_cosheaf_complex(const CoSheafComplex& c);

// Compares the regrading of the dual of f against the dual of the regrading
// of f: costalk dimensions and differential matrices at every cone and
// window degree. Returns the first mismatch description, empty on success.
// Inputs with non-free stalks are resolved first so both routes start from
// the same presentation.
std::string commute_square_check(const SheafComplex& n, const std::vector<LVec>& window);
std::string commute_square_check(const Sheaf& f, const std::vector<LVec>& window);

}  // namespace torkos
