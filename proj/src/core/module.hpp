#pragma once

#include <map>
#include <utility>
#include <vector>

#include "fan.hpp"
#include "numeric.hpp"

namespace torkos {

// Flavor A: modules over the semigroup algebra of the dual cone, graded by M.
// Flavor B: modules over the polynomial subalgebra on the cone's own rays,
// graded by M_sigma (one coordinate per ray of the cone).
enum class Flavor { A, B };

// A coefficient times a single character. Every graded piece of the stalk
// algebras is at most one-dimensional, so homogeneous matrix entries never
// need more than one term.
struct ScaledChar {
  Rat coeff;
  LVec deg;
};

// Homogeneous matrix: entry (i,j) has degree col_deg[j] - row_deg[i] (plus a
// morphism shift/projection where applicable). Zero entries are absent.
struct HomMat {
  std::vector<LVec> row_deg;
  std::vector<LVec> col_deg;
  std::map<std::pair<int, int>, ScaledChar> entries;

  int rows() const { return static_cast<int>(row_deg.size()); }
  int cols() const { return static_cast<int>(col_deg.size()); }
  const ScaledChar* entry(int i, int j) const;
  void set(int i, int j, Rat coeff, LVec deg);
};

struct Module {
  const Fan* fan = nullptr;
  int cone = 0;
  Flavor flavor = Flavor::A;
  std::vector<LVec> gens;  // generator degrees
  HomMat rels;             // rows = generators, columns = relations

  int deg_len() const;
  int num_gens() const { return static_cast<int>(gens.size()); }
  // Membership of a degree difference in the allowed support (dual cone for
  // flavor A, nonnegative orthant for flavor B).
  bool member(const LVec& d) const;
  LVec local_of_M(const LVec& m) const;  // M-degree to this module's grading
};

Module make_module(const Fan& fan, int cone, Flavor flavor, std::vector<LVec> gens, HomMat rels);
Module free_module(const Fan& fan, int cone, Flavor flavor, std::vector<LVec> gens);
Module zero_module(const Fan& fan, int cone, Flavor flavor);
Module twisted(const Module& m, const LVec& t);
Module direct_sum(const std::vector<Module>& parts);
bool is_zero_module(const Module& m);

// The degree-d slice of a module: active generators modulo evaluated
// relations, with an explicit basis and projection for that quotient.
struct Piece {
  std::vector<int> active;  // active generator indices
  QMat basis;               // num_gens x dim; columns are basis lifts
  QMat proj;                // dim x num_gens; proj * basis = identity
  int dim() const { return basis.cols(); }
};

Piece piece(const Module& m, const LVec& local_deg);
int piece_dim(const Module& m, const LVec& local_deg);
Piece piece_at_M(const Module& m, const LVec& M_deg);
int piece_dim_at_M(const Module& m, const LVec& M_deg);

// Degree-preserving (up to shift) module morphism. For flavor A the cones may
// differ if tgt.cone is a face of src.cone (restriction direction); entry
// degrees and the shift then live in the target cone's grading for flavor B.
struct Morphism {
  Module src;
  Module tgt;
  HomMat mat;  // rows = tgt generators, cols = src generators
  LVec shift;

  LVec tgt_deg(const LVec& src_local_deg) const;
};

// Validates the degree law of mat, support membership of entries, and that
// relations of src map into relations of tgt (checked at source relation
// degrees, which determines the submodule membership exactly).
Morphism make_morphism(Module src, Module tgt, HomMat mat, LVec shift);
Morphism zero_morphism(Module src, Module tgt, LVec shift);
Morphism identity_morphism(const Module& m);
// Multiplication by c.coeff * x^{c.deg} as a morphism with shift c.deg.
Morphism mult_morphism(const Module& m, const ScaledChar& c);
Morphism twisted(const Morphism& f, const LVec& t);
Morphism compose(const Morphism& g, const Morphism& f);
// blocks[i][j] maps src_parts[j] into tgt_parts[i] (nullptr = zero block);
// all listed blocks must carry the given shift.
Morphism direct_sum_morphism(const std::vector<std::vector<const Morphism*>>& blocks,
                             const std::vector<Module>& src_parts, const std::vector<Module>& tgt_parts,
                             LVec shift);

QMat evaluate(const Morphism& f, const LVec& src_local_deg);
QMat evaluate_at_M(const Morphism& f, const LVec& m);

// Regrade a flavor-A module along M -> M_sigma (pairing with the cone's rays).
Module delta_extension(const Module& m);
Morphism delta_extension_morphism(const Morphism& f);

bool module_equal(const Module& a, const Module& b);

// The linear system cutting out Hom(x, y) at `shift`: one unknown block per
// generator of x (its image piece in y), with the relation columns of x as
// constraint rows. module_hom_dim is total unknowns minus the rank.
struct HomSystem {
  std::vector<Piece> gen_piece;
  std::vector<int> col_off;  // prefix sums; back() = total unknowns
  QMat rows;
};
HomSystem module_hom_system(const Module& x, const Module& y, const LVec& shift);

// Dimension of degree-`shift` module homs X -> Y (images of generators cut by
// the relation constraints of X).
int module_hom_dim(const Module& x, const Module& y, const LVec& shift);

// Kernel of f as a presented module with its inclusion into f.src. The
// inclusion evaluates injectively degreewise with image ker(evaluate(f, -)).
struct KernelResult {
  Module ker;
  Morphism incl;
};
KernelResult kernel_presentation(const Morphism& f);

// Formal graded dual: dual_piece(m) = piece(u, -m). Twists obey (F(t))v = Fv(-t).
struct DualModule {
  Module u;
};
inline DualModule dual_of(Module m) { return DualModule{std::move(m)}; }
inline DualModule dual_twisted(const DualModule& d, const LVec& t) {
  return DualModule{twisted(d.u, neg(t))};
}
int dual_piece_dim(const DualModule& d, const LVec& local_deg);
int dual_piece_dim_at_M(const DualModule& d, const LVec& m);

}  // namespace torkos
