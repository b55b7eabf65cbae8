#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lattice.hpp"

namespace torkos {

// A cone is identified by the sorted list of its ray indices. The zero cone
// (empty list) is always present and always has id 0.
struct Cone {
  std::vector<int> rays;  // sorted, indices into Fan::ray
  int flip = 1;           // orientation correction for top cones of complete fans
  int dim() const { return static_cast<int>(rays.size()); }
};

class Fan {
public:
  // Validates rays (nonzero, primitive, distinct), smoothness of every cone
  // (ray sets extend to Z-bases), and the fan condition (any two cones meet
  // in a common face). Faces are closed up automatically.
  static Fan build(int rank, std::vector<LVec> rays, std::vector<std::vector<int>> max_cones,
                   int orientation = 1);

  int rank() const { return rank_; }
  int num_rays() const { return static_cast<int>(rays_.size()); }
  const LVec& ray(int i) const { return rays_[i]; }
  int num_cones() const { return static_cast<int>(cones_.size()); }
  const Cone& cone(int id) const { return cones_[id]; }
  const std::vector<int>& max_cones() const { return max_cones_; }
  bool complete() const { return complete_; }
  int orientation() const { return orientation_; }

  int cone_id(const std::vector<int>& rays) const;  // -1 if absent
  int dim(int id) const { return cones_[id].dim(); }
  bool is_face(int tau, int sigma) const;  // tau ⊆ sigma
  int meet(int a, int b) const;            // the common face
  std::vector<int> facets(int sigma) const;
  std::vector<int> cofacets(int tau) const;
  std::vector<int> star(int tau) const;  // all cones containing tau
  std::vector<int> cones_of_dim(int d) const;
  int first_max_containing(int tau) const;

  // Pairings of m with the rays of sigma, in sigma's ray order; this is the
  // image of m under M -> M_sigma.
  LVec b_degree(int sigma, const LVec& m) const;
  bool dual_member(int sigma, const LVec& m) const;        // m in sigma-dual cone
  bool strictly_negative(int sigma, const LVec& m) const;  // all ray pairings < 0
  // Section of M -> M_sigma fixed by the cone's unimodular completion: the
  // i-th coordinate goes to the i-th dual ray vector.
  LVec lift_b_degree(int sigma, const LVec& bdeg) const;
  // Coordinate projection M_sigma -> M_tau for tau ⊆ sigma.
  LVec project_b(int sigma, int tau, const LVec& bdeg) const;
  const BasisCompletion& completion(int sigma) const;
  bool contains_vector(int sigma, const LVec& x) const;

private:
  int rank_ = 0;
  int orientation_ = 1;
  std::vector<LVec> rays_;
  std::vector<Cone> cones_;
  std::map<std::vector<int>, int> index_;
  std::vector<int> max_cones_;
  bool complete_ = false;
  mutable std::vector<std::optional<BasisCompletion>> completion_cache_;
};

// Simplicial boundary signs. Kept as an explicit table so tests can flip a
// single entry and watch d^2 = 0 fail.
struct SignTable {
  std::map<std::pair<int, int>, int> entries;  // (sigma, facet tau) -> ±1
  int sign(int sigma, int tau) const;
  void flip(int sigma, int tau);
};

SignTable incidence_signs(const Fan& fan);

struct FanMorphism {
  const Fan* src = nullptr;
  const Fan* tgt = nullptr;
  std::vector<LVec> lattice_map;  // tgt.rank rows, each of length src.rank
  std::vector<int> image_cone;    // per source cone: minimal target cone containing the image

  LVec apply(const LVec& x) const;          // N_src -> N_tgt
  LVec char_pullback(const LVec& m) const;  // M_tgt -> M_src (transpose)
};

// Fails with NoContainingCone if some cone's image meets no target cone.
FanMorphism build_fan_morphism(const Fan& src, const Fan& tgt, const std::vector<LVec>& lattice_map);

}  // namespace torkos
