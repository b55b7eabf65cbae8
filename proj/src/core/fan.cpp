#include "fan.hpp"

#include <algorithm>
#include <set>

namespace torkos {

namespace {

Int int_det(const std::vector<LVec>& rows) {
  int n = static_cast<int>(rows.size());
  std::vector<std::vector<Int>> a(n, std::vector<Int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = rows[i][j];
  Int prev = 1;
  int sign = 1;
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int i = c; i < n; ++i)
      if (a[i][c] != 0) { p = i; break; }
    if (p < 0) return 0;
    if (p != c) { std::swap(a[p], a[c]); sign = -sign; }
    for (int i = c + 1; i < n; ++i) {
      for (int j = c + 1; j < n; ++j) a[i][j] = (a[c][c] * a[i][j] - a[i][c] * a[c][j]) / prev;
      a[i][c] = 0;
    }
    prev = a[c][c];
  }
  return n == 0 ? Int(1) : Int(sign) * a[n - 1][n - 1];
}

Int int_dot(const std::vector<Int>& a, const LVec& b) {
  Int s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<Int> normalize_gen(std::vector<Int> v) {
  Int g = 0;
  for (const Int& x : v) g = gcd(g, abs(x));
  if (g > 1)
    for (Int& x : v) x /= g;
  return v;
}

}  // namespace

Fan Fan::build(int rank, std::vector<LVec> rays, std::vector<std::vector<int>> max_cones,
               int orientation) {
  require(rank >= 0, ErrCode::RankMismatch, "fan rank must be nonnegative");
  require(orientation == 1 || orientation == -1, ErrCode::Parse, "orientation must be +1 or -1");
  Fan f;
  f.rank_ = rank;
  f.orientation_ = orientation;
  f.rays_ = std::move(rays);

  for (size_t i = 0; i < f.rays_.size(); ++i) {
    const LVec& r = f.rays_[i];
    require(static_cast<int>(r.size()) == rank, ErrCode::RankMismatch,
            "ray " + std::to_string(i) + " has wrong length");
    require(!is_zero(r), ErrCode::NonPrimitiveRay, "ray " + std::to_string(i) + " is zero");
    require(gcd_all(r) == 1, ErrCode::NonPrimitiveRay,
            "ray " + std::to_string(i) + " is not primitive");
    for (size_t j = 0; j < i; ++j)
      require(f.rays_[j] != r, ErrCode::NotAFan,
              "rays " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
  }

  // Normalize and validate the generating cones.
  std::vector<std::vector<int>> maxc;
  for (auto c : max_cones) {
    std::sort(c.begin(), c.end());
    require(std::adjacent_find(c.begin(), c.end()) == c.end(), ErrCode::NotAFan,
            "max cone repeats a ray");
    for (int idx : c)
      require(idx >= 0 && idx < f.num_rays(), ErrCode::NotAFan, "max cone references unknown ray");
    require(static_cast<int>(c.size()) <= rank, ErrCode::NotAFan, "cone dimension exceeds rank");
    maxc.push_back(std::move(c));
  }
  for (size_t i = 0; i < maxc.size(); ++i)
    for (size_t j = 0; j < maxc.size(); ++j) {
      if (i == j) continue;
      require(!std::includes(maxc[j].begin(), maxc[j].end(), maxc[i].begin(), maxc[i].end()),
              ErrCode::NotAFan, "max_cones contains nested or duplicate cones");
    }
  if (maxc.empty()) maxc.push_back({});

  // Smoothness: each generating cone's rays must extend to a Z-basis.
  for (const auto& c : maxc) {
    if (c.empty()) continue;
    std::vector<LVec> rows;
    for (int idx : c) rows.push_back(f.rays_[idx]);
    SmithResult snf = smith_normal_form(rows, rank);
    require(snf.factors.size() == c.size(), ErrCode::NonSmoothCone,
            "cone rays are linearly dependent");
    for (const Int& d : snf.factors)
      require(d == 1, ErrCode::NonSmoothCone,
              "cone is not smooth (invariant factor " + d.str() + ")");
  }

  // Close up under faces.
  std::set<std::vector<int>> face_set;
  for (const auto& c : maxc) {
    int d = static_cast<int>(c.size());
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      std::vector<int> face;
      for (int b = 0; b < d; ++b)
        if (mask & (1u << b)) face.push_back(c[b]);
      face_set.insert(face);
    }
  }
  std::vector<std::vector<int>> all(face_set.begin(), face_set.end());
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (const auto& c : all) {
    f.index_[c] = static_cast<int>(f.cones_.size());
    f.cones_.push_back(Cone{c, 1});
  }
  for (const auto& c : maxc) f.max_cones_.push_back(f.index_.at(c));
  std::sort(f.max_cones_.begin(), f.max_cones_.end());
  f.completion_cache_.resize(f.cones_.size());

  // Fan condition: two generating cones intersect in the cone on their shared
  // rays. A generating set of the actual intersection is computed by cutting
  // one cone with the other's defining halfspaces.
  for (size_t i = 0; i < f.max_cones_.size(); ++i)
    for (size_t j = i + 1; j < f.max_cones_.size(); ++j) {
      int a = f.max_cones_[i], b = f.max_cones_[j];
      const auto& ca = f.cone(a).rays;
      const auto& cb = f.cone(b).rays;
      std::vector<int> shared;
      std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(),
                            std::back_inserter(shared));
      int shared_id = f.cone_id(shared);

      std::vector<std::vector<Int>> gens;
      for (int idx : ca) {
        std::vector<Int> g(rank);
        for (int k = 0; k < rank; ++k) g[k] = f.rays_[idx][k];
        gens.push_back(std::move(g));
      }
      const BasisCompletion& comp = f.completion(b);
      std::vector<LVec> constraints;
      for (int k = 0; k < rank; ++k) {
        constraints.push_back(comp.dual[k]);
        if (k >= f.dim(b)) constraints.push_back(neg(comp.dual[k]));
      }
      for (const LVec& h : constraints) {
        std::vector<std::vector<Int>> keep, pos, negs;
        for (auto& g : gens) {
          Int v = int_dot(g, h);
          if (v == 0) keep.push_back(g);
          else if (v > 0) pos.push_back(g);
          else negs.push_back(g);
        }
        for (const auto& p : pos) keep.push_back(p);
        for (const auto& p : pos)
          for (const auto& q : negs) {
            Int vp = int_dot(p, h), vq = int_dot(q, h);
            std::vector<Int> comb(rank);
            for (int k = 0; k < rank; ++k) comb[k] = vp * q[k] - vq * p[k];
            comb = normalize_gen(std::move(comb));
            bool zero = std::all_of(comb.begin(), comb.end(), [](const Int& x) { return x == 0; });
            if (!zero) keep.push_back(std::move(comb));
          }
        gens = std::move(keep);
      }
      const BasisCompletion& scomp = f.completion(shared_id);
      for (const auto& g : gens) {
        bool inside = true;
        for (int k = 0; k < rank && inside; ++k) {
          Int v = int_dot(g, scomp.dual[k]);
          if (k < static_cast<int>(shared.size())) inside = v >= 0;
          else inside = v == 0;
        }
        require(inside, ErrCode::NotAFan,
                "cones " + std::to_string(a) + " and " + std::to_string(b) +
                    " do not meet in a common face");
      }
    }

  // Completeness: pure top dimension, every wall between exactly two chambers,
  // chambers connected through walls.
  if (rank == 0) {
    f.complete_ = true;
  } else {
    bool pure = !f.max_cones_.empty();
    for (int mc : f.max_cones_)
      if (f.dim(mc) != rank) pure = false;
    if (pure) {
      bool two_sided = true;
      std::vector<int> walls = f.cones_of_dim(rank - 1);
      std::map<int, std::vector<int>> wall_chambers;
      for (int w : walls) wall_chambers[w] = f.cofacets(w);
      for (int w : walls)
        if (wall_chambers[w].size() != 2) two_sided = false;
      if (two_sided) {
        std::vector<int> tops = f.cones_of_dim(rank);
        std::map<int, int> comp;
        std::vector<int> stack{tops[0]};
        comp[tops[0]] = 1;
        while (!stack.empty()) {
          int c = stack.back();
          stack.pop_back();
          for (int w : f.facets(c))
            for (int other : wall_chambers[w])
              if (!comp.count(other)) {
                comp[other] = 1;
                stack.push_back(other);
              }
        }
        f.complete_ = comp.size() == tops.size();
      }
    }
  }

  // Top cones of complete fans are oriented by the global orientation of N.
  if (f.complete_ && rank >= 1) {
    for (auto& c : f.cones_) {
      if (c.dim() != rank) continue;
      std::vector<LVec> rows;
      for (int idx : c.rays) rows.push_back(f.rays_[idx]);
      Int d = int_det(rows);
      c.flip = (d > 0 ? 1 : -1) * orientation;
    }
  }
  return f;
}

int Fan::cone_id(const std::vector<int>& rays) const {
  auto it = index_.find(rays);
  return it == index_.end() ? -1 : it->second;
}

bool Fan::is_face(int tau, int sigma) const {
  const auto& a = cones_[tau].rays;
  const auto& b = cones_[sigma].rays;
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

int Fan::meet(int a, int b) const {
  std::vector<int> shared;
  std::set_intersection(cones_[a].rays.begin(), cones_[a].rays.end(), cones_[b].rays.begin(),
                        cones_[b].rays.end(), std::back_inserter(shared));
  int id = cone_id(shared);
  require(id >= 0, ErrCode::Internal, "meet of cones is not a cone");
  return id;
}

std::vector<int> Fan::facets(int sigma) const {
  std::vector<int> out;
  const auto& r = cones_[sigma].rays;
  for (size_t k = 0; k < r.size(); ++k) {
    std::vector<int> face = r;
    face.erase(face.begin() + static_cast<long>(k));
    out.push_back(index_.at(face));
  }
  return out;
}

std::vector<int> Fan::cofacets(int tau) const {
  std::vector<int> out;
  for (int id = 0; id < num_cones(); ++id)
    if (dim(id) == dim(tau) + 1 && is_face(tau, id)) out.push_back(id);
  return out;
}

std::vector<int> Fan::star(int tau) const {
  std::vector<int> out;
  for (int id = 0; id < num_cones(); ++id)
    if (is_face(tau, id)) out.push_back(id);
  return out;
}

std::vector<int> Fan::cones_of_dim(int d) const {
  std::vector<int> out;
  for (int id = 0; id < num_cones(); ++id)
    if (dim(id) == d) out.push_back(id);
  return out;
}

int Fan::first_max_containing(int tau) const {
  for (int mc : max_cones_)
    if (is_face(tau, mc)) return mc;
  fail(ErrCode::Internal, "cone not contained in any maximal cone");
}

LVec Fan::b_degree(int sigma, const LVec& m) const {
  require(static_cast<int>(m.size()) == rank_, ErrCode::LengthMismatch, "b_degree: bad degree length");
  LVec out;
  for (int idx : cones_[sigma].rays) out.push_back(dot(m, rays_[idx]));
  return out;
}

bool Fan::dual_member(int sigma, const LVec& m) const { return geq_zero(b_degree(sigma, m)); }

bool Fan::strictly_negative(int sigma, const LVec& m) const {
  for (int idx : cones_[sigma].rays)
    if (dot(m, rays_[idx]) >= 0) return false;
  return true;
}

LVec Fan::lift_b_degree(int sigma, const LVec& bdeg) const {
  require(static_cast<int>(bdeg.size()) == dim(sigma), ErrCode::LengthMismatch,
          "lift_b_degree: bad length");
  const BasisCompletion& comp = completion(sigma);
  LVec m = zero_vec(rank_);
  for (int i = 0; i < dim(sigma); ++i) m = add(m, scale(bdeg[i], comp.dual[i]));
  return m;
}

LVec Fan::project_b(int sigma, int tau, const LVec& bdeg) const {
  require(is_face(tau, sigma), ErrCode::NotAFacet, "project_b: not a face pair");
  require(static_cast<int>(bdeg.size()) == dim(sigma), ErrCode::LengthMismatch,
          "project_b: bad length");
  const auto& rs = cones_[sigma].rays;
  LVec out;
  for (int idx : cones_[tau].rays) {
    auto it = std::lower_bound(rs.begin(), rs.end(), idx);
    out.push_back(bdeg[static_cast<size_t>(it - rs.begin())]);
  }
  return out;
}

const BasisCompletion& Fan::completion(int sigma) const {
  if (!completion_cache_[sigma]) {
    std::vector<LVec> rows;
    for (int idx : cones_[sigma].rays) rows.push_back(rays_[idx]);
    completion_cache_[sigma] = complete_to_basis(rows, rank_);
  }
  return *completion_cache_[sigma];
}

bool Fan::contains_vector(int sigma, const LVec& x) const {
  const BasisCompletion& comp = completion(sigma);
  for (int k = 0; k < rank_; ++k) {
    long long v = dot(comp.dual[k], x);
    if (k < dim(sigma) ? v < 0 : v != 0) return false;
  }
  return true;
}

int SignTable::sign(int sigma, int tau) const {
  auto it = entries.find({sigma, tau});
  require(it != entries.end(), ErrCode::NotAFacet, "no incidence sign for this pair");
  return it->second;
}

void SignTable::flip(int sigma, int tau) {
  auto it = entries.find({sigma, tau});
  require(it != entries.end(), ErrCode::NotAFacet, "no incidence sign for this pair");
  it->second = -it->second;
}

SignTable incidence_signs(const Fan& fan) {
  SignTable t;
  for (int sigma = 0; sigma < fan.num_cones(); ++sigma) {
    const auto& rays = fan.cone(sigma).rays;
    for (size_t k = 0; k < rays.size(); ++k) {
      std::vector<int> face = rays;
      face.erase(face.begin() + static_cast<long>(k));
      int tau = fan.cone_id(face);
      int s = (k % 2 == 0 ? 1 : -1) * fan.cone(sigma).flip * fan.cone(tau).flip;
      t.entries[{sigma, tau}] = s;
    }
  }
  return t;
}

LVec FanMorphism::apply(const LVec& x) const {
  LVec out;
  for (const LVec& row : lattice_map) out.push_back(dot(row, x));
  return out;
}

LVec FanMorphism::char_pullback(const LVec& m) const {
  require(m.size() == lattice_map.size(), ErrCode::LengthMismatch, "char_pullback: bad length");
  LVec out = zero_vec(src->rank());
  for (size_t i = 0; i < lattice_map.size(); ++i)
    for (int j = 0; j < src->rank(); ++j) out[j] += m[i] * lattice_map[i][j];
  return out;
}

FanMorphism build_fan_morphism(const Fan& src, const Fan& tgt, const std::vector<LVec>& lattice_map) {
  require(static_cast<int>(lattice_map.size()) == tgt.rank(), ErrCode::RankMismatch,
          "lattice map must have one row per target coordinate");
  for (const LVec& row : lattice_map)
    require(static_cast<int>(row.size()) == src.rank(), ErrCode::RankMismatch,
            "lattice map row has wrong length");
  FanMorphism f;
  f.src = &src;
  f.tgt = &tgt;
  f.lattice_map = lattice_map;
  for (int c = 0; c < src.num_cones(); ++c) {
    std::vector<LVec> images;
    for (int idx : src.cone(c).rays) images.push_back(f.apply(src.ray(idx)));
    int found = -1;
    for (int tc = 0; tc < tgt.num_cones() && found < 0; ++tc) {
      bool ok = true;
      for (const LVec& v : images)
        if (!tgt.contains_vector(tc, v)) { ok = false; break; }
      if (ok) found = tc;  // cones are sorted by dimension: first hit is minimal
    }
    require(found >= 0, ErrCode::NoContainingCone,
            "image of cone " + std::to_string(c) + " lies in no target cone");
    f.image_cone.push_back(found);
  }
  return f;
}

}  // namespace torkos
