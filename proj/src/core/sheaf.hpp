#pragma once

#include <map>
#include <utility>
#include <vector>

#include "module.hpp"

namespace torkos {

// A sheaf of graded modules on the fan, given by one stalk per cone and a
// restriction morphism for every strict face pair tau ⊂ sigma (the map from
// sections over [sigma] to sections over [tau]). Restrictions target modules
// over the larger algebra of the face, so their entries may use any character
// supported there.
struct Sheaf {
  const Fan* fan = nullptr;
  Flavor flavor = Flavor::A;
  std::vector<Module> stalks;  // indexed by cone id
  std::map<std::pair<int, int>, Morphism> res;

  const Module& stalk(int c) const { return stalks[c]; }
  Morphism restriction(int sigma, int tau) const;  // identity when sigma == tau
  int piece_dim(int c, const LVec& m) const { return piece_dim_at_M(stalks[c], m); }
};

// Assembles a sheaf from facet-level restrictions: longer face pairs are
// composites along a canonical facet chain, and the composition law is
// verified degreewise at all stalk generator degrees (which determines maps
// out of a stalk completely). Missing facet entries default to zero
// morphisms, which is only coherent when a stalk involved is zero.
Sheaf make_sheaf(const Fan& fan, Flavor flavor, std::vector<Module> stalks,
                 std::map<std::pair<int, int>, Morphism> facet_res);

Sheaf zero_sheaf(const Fan& fan, Flavor flavor);
bool is_zero_sheaf(const Sheaf& f);

// The projective generator supported on [sigma]: stalk A_tau(m) at every face
// tau ⊆ sigma with canonical inclusions; zero elsewhere. For flavor B the
// twist is graded per cone as the ray pairings of m.
Sheaf standard_open(const Fan& fan, Flavor flavor, int sigma, const LVec& m);
// The skyscraper with single stalk A_sigma(m) at sigma.
Sheaf standard_point(const Fan& fan, Flavor flavor, int sigma, const LVec& m);
// Free rank-one stalk in degree zero on every cone, coefficient-one
// restrictions.
Sheaf structure_sheaf(const Fan& fan, Flavor flavor);

Sheaf twist_sheaf(const Sheaf& f, const LVec& m);
Sheaf direct_sum_sheaf(const std::vector<Sheaf>& parts);
// Stalkwise regrading to ray coordinates (flavor A to flavor B).
Sheaf delta_sheaf(const Sheaf& f);

// Dimension of degree-m sheaf homomorphisms F -> G: the equalizer of
// stalkwise homs against restriction compatibility over facet pairs.
int hom_pieces(const Sheaf& f, const Sheaf& g, const LVec& m);

// Extension by zero of F restricted to the locally closed set z (a set of
// cone ids closed under "betweenness" in the face order; equivalently a
// difference of two opens). Stalks off z become zero.
Sheaf extension_by_zero(const Sheaf& f, const std::vector<int>& z);
// The open set [sigma_1] ∪ ... as a sorted list of cone ids.
std::vector<int> open_set(const Fan& fan, const std::vector<int>& tops);

// Degree-`shift` morphism of sheaves: one component per cone, commuting with
// restrictions (verified degreewise at stalk generator degrees).
struct SheafMorphism {
  Sheaf src, tgt;
  std::vector<Morphism> comp;  // indexed by cone id
  LVec shift;                  // in M; flavor B components carry its ray pairings
};
SheafMorphism make_sheaf_morphism(Sheaf src, Sheaf tgt, std::vector<Morphism> comp, LVec shift);
SheafMorphism zero_sheaf_morphism(const Sheaf& src, const Sheaf& tgt, const LVec& shift);
QMat evaluate_at(const SheafMorphism& f, int cone, const LVec& m);
SheafMorphism compose(const SheafMorphism& g, const SheafMorphism& f);
// Componentwise regrading to ray coordinates; the shift stays in M.
SheafMorphism delta_sheaf_morphism(const SheafMorphism& f);

// True iff every facet structure map A_tau ⊗_{A_sigma} F_sigma -> F_tau is an
// isomorphism: surjective at target generator degrees and with zero kernel.
bool is_coherent(const Sheaf& f);

// F_sigma reinterpreted as a module over a face cone (base change of the
// presentation; degrees project for flavor B).
Module rebase(const Module& m, int face_cone);

// Inverse image along a fan morphism: stalk at tau is F at the image cone
// with all degrees pulled back through the character map.
Sheaf pullback(const FanMorphism& fm, const Sheaf& f);

// Direct image as a degreewise-evaluable view: the stalk over a target cone
// is the space of compatible families over the preimage poset. Stalks need
// not be finitely generated, so only evaluation is offered.
struct PushforwardView {
  const FanMorphism* fm;
  const Sheaf* f;
  int piece_dim(int tgt_cone, const LVec& src_m) const;
};
PushforwardView pushforward(const FanMorphism& fm, const Sheaf& f);

// Cochain complex of sheaves: diffs[i] maps terms[i] -> terms[i+1].
struct SheafComplex {
  std::map<int, Sheaf> terms;
  std::map<int, SheafMorphism> diffs;
};

SheafComplex delta_sheaf_complex(const SheafComplex& c);

// P_k sits at cohomological degree -k; augmentation maps the degree-0 term
// onto F. Every term is a finite direct sum of standard_open objects.
struct ResolutionResult {
  SheafComplex cx;
  SheafMorphism aug;
  int length = 0;
};
ResolutionResult projective_resolution(const Sheaf& f, int max_length = 16);

// Formal dual: a torsion-cofinite cosheaf presented by the sheaf it
// dualizes. Costalk pieces and corestriction evaluations are duals of the
// underlying data; corestrictions run from faces upward.
struct CoSheaf {
  Sheaf under;
  int costalk_dim(int c, const LVec& m) const;
  // beta_{tau sigma}: costalk_tau -> costalk_sigma at degree m, the transpose
  // of the underlying restriction evaluated at -m.
  QMat coevaluate(int sigma, int tau, const LVec& m) const;
};
inline CoSheaf sheaf_dual(Sheaf f) { return CoSheaf{std::move(f)}; }
inline Sheaf cosheaf_dual(CoSheaf c) { return std::move(c.under); }

// Degree-`shift` cosheaf morphism, the formal dual of a sheaf morphism in
// the opposite direction: C -> D is carried by D.under -> C.under. Dualizing
// transposes evaluations but keeps the degree, so the carrier has the same
// shift.
struct CoSheafMorphism {
  CoSheaf src, tgt;
  SheafMorphism carrier;  // tgt.under -> src.under, same shift
  LVec shift;
};
CoSheafMorphism make_cosheaf_morphism(CoSheaf src, CoSheaf tgt, SheafMorphism carrier, LVec shift);
QMat evaluate_at(const CoSheafMorphism& f, int cone, const LVec& m);

struct CoSheafComplex {
  std::map<int, CoSheaf> terms;
  std::map<int, CoSheafMorphism> diffs;  // diffs[i]: terms[i] -> terms[i+1]
};

}  // namespace torkos
