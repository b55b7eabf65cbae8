#include "module.hpp"

#include <algorithm>
#include <set>

namespace torkos {

const ScaledChar* HomMat::entry(int i, int j) const {
  auto it = entries.find({i, j});
  return it == entries.end() ? nullptr : &it->second;
}

void HomMat::set(int i, int j, Rat coeff, LVec deg) {
  if (coeff == 0) {
    entries.erase({i, j});
    return;
  }
  entries[{i, j}] = ScaledChar{std::move(coeff), std::move(deg)};
}

int Module::deg_len() const {
  return flavor == Flavor::A ? fan->rank() : fan->dim(cone);
}

bool Module::member(const LVec& d) const {
  return flavor == Flavor::A ? fan->dual_member(cone, d) : geq_zero(d);
}

LVec Module::local_of_M(const LVec& m) const {
  return flavor == Flavor::A ? m : fan->b_degree(cone, m);
}

namespace {

bool hommat_equal(const HomMat& a, const HomMat& b) {
  if (a.row_deg != b.row_deg || a.col_deg != b.col_deg) return false;
  if (a.entries.size() != b.entries.size()) return false;
  for (const auto& [key, e] : a.entries) {
    const ScaledChar* o = b.entry(key.first, key.second);
    if (!o || o->coeff != e.coeff || o->deg != e.deg) return false;
  }
  return true;
}

}  // namespace

bool module_equal(const Module& a, const Module& b) {
  return a.fan == b.fan && a.cone == b.cone && a.flavor == b.flavor && a.gens == b.gens &&
         hommat_equal(a.rels, b.rels);
}

namespace {

// Degree conversion along a cone inclusion tau ⊆ sigma (identity for flavor A
// or equal cones).
LVec convert_deg(const Fan* fan, Flavor flavor, int from_cone, int to_cone, const LVec& d) {
  if (flavor == Flavor::A || from_cone == to_cone) return d;
  return fan->project_b(from_cone, to_cone, d);
}

}  // namespace

Module make_module(const Fan& fan, int cone, Flavor flavor, std::vector<LVec> gens, HomMat rels) {
  require(cone >= 0 && cone < fan.num_cones(), ErrCode::ConeMismatch, "make_module: bad cone id");
  Module m;
  m.fan = &fan;
  m.cone = cone;
  m.flavor = flavor;
  m.gens = std::move(gens);
  m.rels = std::move(rels);
  const int d = m.deg_len();
  for (const LVec& g : m.gens)
    require(static_cast<int>(g.size()) == d, ErrCode::LengthMismatch, "make_module: generator degree length");
  require(m.rels.row_deg == m.gens, ErrCode::LengthMismatch,
          "make_module: relation rows must match generator degrees");
  for (const LVec& c : m.rels.col_deg)
    require(static_cast<int>(c.size()) == d, ErrCode::LengthMismatch, "make_module: relation degree length");
  for (const auto& [key, e] : m.rels.entries) {
    auto [i, j] = key;
    require(i >= 0 && i < m.num_gens() && j >= 0 && j < m.rels.cols(), ErrCode::LengthMismatch,
            "make_module: relation entry out of range");
    require(e.coeff != 0, ErrCode::InvalidMorphism, "make_module: zero relation entry stored");
    require(e.deg == sub(m.rels.col_deg[j], m.gens[i]), ErrCode::InvalidMorphism,
            "make_module: relation entry degree law");
    require(m.member(e.deg), ErrCode::InvalidMorphism, "make_module: relation entry outside support");
  }
  return m;
}

Module free_module(const Fan& fan, int cone, Flavor flavor, std::vector<LVec> gens) {
  HomMat rels;
  rels.row_deg = gens;
  return make_module(fan, cone, flavor, std::move(gens), std::move(rels));
}

Module zero_module(const Fan& fan, int cone, Flavor flavor) {
  return free_module(fan, cone, flavor, {});
}

Module twisted(const Module& m, const LVec& t) {
  require(static_cast<int>(t.size()) == m.deg_len(), ErrCode::LengthMismatch, "twisted: shift length");
  Module out = m;
  for (LVec& g : out.gens) g = add(g, t);
  for (LVec& r : out.rels.row_deg) r = add(r, t);
  for (LVec& c : out.rels.col_deg) c = add(c, t);
  return out;
}

Module direct_sum(const std::vector<Module>& parts) {
  require(!parts.empty(), ErrCode::LengthMismatch, "direct_sum: no parts");
  Module out;
  out.fan = parts[0].fan;
  out.cone = parts[0].cone;
  out.flavor = parts[0].flavor;
  int row_off = 0, col_off = 0;
  for (const Module& p : parts) {
    require(p.fan == out.fan && p.cone == out.cone && p.flavor == out.flavor, ErrCode::ConeMismatch,
            "direct_sum: mixed cones or flavors");
    out.gens.insert(out.gens.end(), p.gens.begin(), p.gens.end());
    out.rels.row_deg.insert(out.rels.row_deg.end(), p.rels.row_deg.begin(), p.rels.row_deg.end());
    out.rels.col_deg.insert(out.rels.col_deg.end(), p.rels.col_deg.begin(), p.rels.col_deg.end());
    for (const auto& [key, e] : p.rels.entries)
      out.rels.entries[{key.first + row_off, key.second + col_off}] = e;
    row_off += p.num_gens();
    col_off += p.rels.cols();
  }
  return out;
}

Piece piece(const Module& m, const LVec& local_deg) {
  require(static_cast<int>(local_deg.size()) == m.deg_len(), ErrCode::LengthMismatch, "piece: degree length");
  const int g = m.num_gens();
  Piece p;
  std::vector<char> is_active(g, 0);
  for (int i = 0; i < g; ++i) {
    if (m.member(sub(local_deg, m.gens[i]))) {
      is_active[i] = 1;
      p.active.push_back(i);
    }
  }
  std::vector<int> active_cols;
  for (int j = 0; j < m.rels.cols(); ++j)
    if (m.member(sub(local_deg, m.rels.col_deg[j]))) active_cols.push_back(j);
  QMat v(g, static_cast<int>(active_cols.size()));
  for (int k = 0; k < static_cast<int>(active_cols.size()); ++k) {
    for (const auto& [key, e] : m.rels.entries) {
      if (key.second != active_cols[k]) continue;
      require(is_active[key.first], ErrCode::Internal, "piece: relation hits inactive generator");
      v.at(key.first, k) = e.coeff;
    }
  }
  std::vector<int> pivots;
  QMat ech = column_space_basis(v, &pivots);
  std::vector<char> is_pivot(g, 0);
  for (int r : pivots) is_pivot[r] = 1;
  std::vector<int> complement;
  for (int i : p.active)
    if (!is_pivot[i]) complement.push_back(i);
  const int dim = static_cast<int>(complement.size());
  p.basis = QMat(g, dim);
  p.proj = QMat(dim, g);
  for (int c = 0; c < dim; ++c) p.basis.at(complement[c], c) = 1;
  // Projection: reduce a generator coordinate vector by the echelon columns
  // (unit pivots, zero at the other pivot rows), then read off complement
  // coordinates. Column for a pivot row is minus that echelon column.
  for (int c = 0; c < dim; ++c) p.proj.at(c, complement[c]) = 1;
  for (int k = 0; k < static_cast<int>(pivots.size()); ++k)
    for (int c = 0; c < dim; ++c) p.proj.at(c, pivots[k]) = -ech.at(complement[c], k);
  return p;
}

int piece_dim(const Module& m, const LVec& local_deg) { return piece(m, local_deg).dim(); }

Piece piece_at_M(const Module& m, const LVec& M_deg) { return piece(m, m.local_of_M(M_deg)); }

int piece_dim_at_M(const Module& m, const LVec& M_deg) { return piece_at_M(m, M_deg).dim(); }

bool is_zero_module(const Module& m) {
  for (const LVec& g : m.gens)
    if (piece_dim(m, g) > 0) return false;
  return true;
}

LVec Morphism::tgt_deg(const LVec& src_local_deg) const {
  return add(convert_deg(src.fan, src.flavor, src.cone, tgt.cone, src_local_deg), shift);
}

namespace {

// Generator-level scalar matrix of f at a source degree: entries whose source
// generator is active contribute their coefficients.
QMat gen_matrix(const Morphism& f, const LVec& src_local_deg, const LVec& tgt_local_deg) {
  QMat phi(f.tgt.num_gens(), f.src.num_gens());
  for (const auto& [key, e] : f.mat.entries) {
    auto [i, j] = key;
    if (!f.src.member(sub(src_local_deg, f.src.gens[j]))) continue;
    require(f.tgt.member(sub(tgt_local_deg, f.tgt.gens[i])), ErrCode::Internal,
            "evaluate: image generator inactive");
    phi.at(i, j) = e.coeff;
  }
  return phi;
}

}  // namespace

Morphism make_morphism(Module src, Module tgt, HomMat mat, LVec shift) {
  require(src.fan == tgt.fan, ErrCode::ConeMismatch, "make_morphism: different fans");
  require(src.flavor == tgt.flavor, ErrCode::FlavorMismatch, "make_morphism: mixed flavors");
  require(tgt.cone == src.cone || src.fan->is_face(tgt.cone, src.cone), ErrCode::ConeMismatch,
          "make_morphism: target cone must be a face of the source cone");
  require(static_cast<int>(shift.size()) == tgt.deg_len(), ErrCode::LengthMismatch,
          "make_morphism: shift length");
  require(mat.row_deg == tgt.gens && mat.col_deg == src.gens, ErrCode::InvalidMorphism,
          "make_morphism: matrix degrees must match generator degrees");
  Morphism f;
  f.src = std::move(src);
  f.tgt = std::move(tgt);
  f.mat = std::move(mat);
  f.shift = std::move(shift);
  const Fan* fan = f.src.fan;
  for (const auto& [key, e] : f.mat.entries) {
    auto [i, j] = key;
    require(i >= 0 && i < f.tgt.num_gens() && j >= 0 && j < f.src.num_gens(), ErrCode::LengthMismatch,
            "make_morphism: entry out of range");
    require(e.coeff != 0, ErrCode::InvalidMorphism, "make_morphism: zero entry stored");
    LVec want = sub(add(convert_deg(fan, f.src.flavor, f.src.cone, f.tgt.cone, f.src.gens[j]), f.shift),
                    f.tgt.gens[i]);
    require(e.deg == want, ErrCode::InvalidMorphism, "make_morphism: entry degree law");
    require(f.tgt.member(e.deg), ErrCode::InvalidMorphism, "make_morphism: entry outside support");
  }
  // Relations of the source must land in relations of the target. Checking
  // the image class at each relation's own degree is exact: the degree-d
  // piece of the relation submodule is spanned by the active evaluated
  // columns, because every graded piece of the stalk algebra is a line.
  for (int j = 0; j < f.src.rels.cols(); ++j) {
    const LVec& d = f.src.rels.col_deg[j];
    std::vector<Rat> rel_vec(f.src.num_gens(), Rat(0));
    for (const auto& [key, e] : f.src.rels.entries)
      if (key.second == j) rel_vec[key.first] = e.coeff;
    LVec td = f.tgt_deg(d);
    QMat phi = gen_matrix(f, d, td);
    Piece pt = piece(f.tgt, td);
    for (int r = 0; r < pt.proj.rows(); ++r) {
      Rat acc = 0;
      for (int i = 0; i < phi.rows(); ++i) {
        Rat row = 0;
        for (int k = 0; k < phi.cols(); ++k)
          if (!(phi.at(i, k) == 0)) row += phi.at(i, k) * rel_vec[k];
        acc += pt.proj.at(r, i) * row;
      }
      require(acc == 0, ErrCode::InvalidMorphism, "make_morphism: a source relation does not map to zero");
    }
  }
  return f;
}

Morphism zero_morphism(Module src, Module tgt, LVec shift) {
  HomMat mat;
  mat.row_deg = tgt.gens;
  mat.col_deg = src.gens;
  return make_morphism(std::move(src), std::move(tgt), std::move(mat), std::move(shift));
}

Morphism identity_morphism(const Module& m) {
  HomMat mat;
  mat.row_deg = m.gens;
  mat.col_deg = m.gens;
  for (int i = 0; i < m.num_gens(); ++i) mat.set(i, i, 1, zero_vec(m.deg_len()));
  return make_morphism(m, m, std::move(mat), zero_vec(m.deg_len()));
}

Morphism mult_morphism(const Module& m, const ScaledChar& c) {
  require(m.member(c.deg), ErrCode::InvalidMorphism, "mult_morphism: character outside support");
  HomMat mat;
  mat.row_deg = m.gens;
  mat.col_deg = m.gens;
  for (int i = 0; i < m.num_gens(); ++i) mat.set(i, i, c.coeff, c.deg);
  return make_morphism(m, m, std::move(mat), c.deg);
}

Morphism twisted(const Morphism& f, const LVec& t) {
  LVec tt = convert_deg(f.src.fan, f.src.flavor, f.src.cone, f.tgt.cone, t);
  Module s = twisted(f.src, t);
  Module g = twisted(f.tgt, tt);
  HomMat mat = f.mat;
  mat.row_deg = g.gens;
  mat.col_deg = s.gens;
  return make_morphism(std::move(s), std::move(g), std::move(mat), f.shift);
}

Morphism compose(const Morphism& g, const Morphism& f) {
  require(module_equal(f.tgt, g.src), ErrCode::InvalidMorphism, "compose: middle modules differ");
  const Fan* fan = f.src.fan;
  const Flavor fl = f.src.flavor;
  HomMat mat;
  mat.row_deg = g.tgt.gens;
  mat.col_deg = f.src.gens;
  std::map<std::pair<int, int>, ScaledChar> acc;
  for (const auto& [gk, ge] : g.mat.entries) {
    for (const auto& [fk, fe] : f.mat.entries) {
      if (gk.second != fk.first) continue;
      LVec deg = add(convert_deg(fan, fl, g.src.cone, g.tgt.cone, fe.deg), ge.deg);
      auto key = std::make_pair(gk.first, fk.second);
      auto it = acc.find(key);
      if (it == acc.end()) {
        acc.emplace(key, ScaledChar{ge.coeff * fe.coeff, std::move(deg)});
      } else {
        require(it->second.deg == deg, ErrCode::Internal, "compose: inhomogeneous sum");
        it->second.coeff += ge.coeff * fe.coeff;
      }
    }
  }
  for (auto& [key, e] : acc)
    if (e.coeff != 0) mat.entries.emplace(key, std::move(e));
  LVec shift = add(convert_deg(fan, fl, g.src.cone, g.tgt.cone, f.shift), g.shift);
  return make_morphism(f.src, g.tgt, std::move(mat), std::move(shift));
}

Morphism direct_sum_morphism(const std::vector<std::vector<const Morphism*>>& blocks,
                             const std::vector<Module>& src_parts, const std::vector<Module>& tgt_parts,
                             LVec shift) {
  Module src = direct_sum(src_parts);
  Module tgt = direct_sum(tgt_parts);
  HomMat mat;
  mat.row_deg = tgt.gens;
  mat.col_deg = src.gens;
  require(blocks.size() == tgt_parts.size(), ErrCode::LengthMismatch, "direct_sum_morphism: block rows");
  std::vector<int> row_off(tgt_parts.size() + 1, 0), col_off(src_parts.size() + 1, 0);
  for (size_t i = 0; i < tgt_parts.size(); ++i) row_off[i + 1] = row_off[i] + tgt_parts[i].num_gens();
  for (size_t j = 0; j < src_parts.size(); ++j) col_off[j + 1] = col_off[j] + src_parts[j].num_gens();
  for (size_t bi = 0; bi < blocks.size(); ++bi) {
    require(blocks[bi].size() == src_parts.size(), ErrCode::LengthMismatch, "direct_sum_morphism: block cols");
    for (size_t bj = 0; bj < blocks[bi].size(); ++bj) {
      const Morphism* b = blocks[bi][bj];
      if (!b) continue;
      require(b->shift == shift, ErrCode::InvalidMorphism, "direct_sum_morphism: mixed shifts");
      for (const auto& [key, e] : b->mat.entries)
        mat.entries[{row_off[bi] + key.first, col_off[bj] + key.second}] = e;
    }
  }
  return make_morphism(std::move(src), std::move(tgt), std::move(mat), std::move(shift));
}

QMat evaluate(const Morphism& f, const LVec& src_local_deg) {
  LVec td = f.tgt_deg(src_local_deg);
  Piece ps = piece(f.src, src_local_deg);
  Piece pt = piece(f.tgt, td);
  return pt.proj.mul(gen_matrix(f, src_local_deg, td)).mul(ps.basis);
}

QMat evaluate_at_M(const Morphism& f, const LVec& m) { return evaluate(f, f.src.local_of_M(m)); }

Module delta_extension(const Module& m) {
  require(m.flavor == Flavor::A, ErrCode::FlavorMismatch, "delta_extension: flavor A input required");
  Module out;
  out.fan = m.fan;
  out.cone = m.cone;
  out.flavor = Flavor::B;
  for (const LVec& g : m.gens) out.gens.push_back(m.fan->b_degree(m.cone, g));
  out.rels.row_deg = out.gens;
  for (const LVec& c : m.rels.col_deg) out.rels.col_deg.push_back(m.fan->b_degree(m.cone, c));
  for (const auto& [key, e] : m.rels.entries)
    out.rels.entries[key] = ScaledChar{e.coeff, m.fan->b_degree(m.cone, e.deg)};
  return out;
}

Morphism delta_extension_morphism(const Morphism& f) {
  Module s = delta_extension(f.src);
  Module t = delta_extension(f.tgt);
  HomMat mat;
  mat.row_deg = t.gens;
  mat.col_deg = s.gens;
  for (const auto& [key, e] : f.mat.entries)
    mat.entries[key] = ScaledChar{e.coeff, f.src.fan->b_degree(f.tgt.cone, e.deg)};
  return make_morphism(std::move(s), std::move(t), std::move(mat),
                       f.src.fan->b_degree(f.tgt.cone, f.shift));
}

HomSystem module_hom_system(const Module& x, const Module& y, const LVec& shift) {
  require(x.fan == y.fan && x.flavor == y.flavor, ErrCode::FlavorMismatch, "module_hom_system: mixed setups");
  require(y.cone == x.cone || x.fan->is_face(y.cone, x.cone), ErrCode::ConeMismatch,
          "module_hom_system: target cone must be a face of the source cone");
  const Fan* fan = x.fan;
  auto conv = [&](const LVec& d) { return convert_deg(fan, x.flavor, x.cone, y.cone, d); };
  HomSystem sys;
  sys.col_off.push_back(0);
  // Unknowns: the image of each generator of x, one block per generator.
  for (const LVec& g : x.gens) {
    sys.gen_piece.push_back(piece(y, add(conv(g), shift)));
    sys.col_off.push_back(sys.col_off.back() + sys.gen_piece.back().dim());
  }
  const int unknowns = sys.col_off.back();
  // Constraints: every relation column of x must map to zero.
  std::vector<QMat> rows;
  int total_rows = 0;
  for (int j = 0; j < x.rels.cols(); ++j) {
    LVec td = add(conv(x.rels.col_deg[j]), shift);
    Piece pr = piece(y, td);
    QMat row(pr.dim(), unknowns);
    for (const auto& [key, e] : x.rels.entries) {
      if (key.second != j) continue;
      const int i = key.first;
      // Multiplication by the relation entry's character, evaluated between
      // the two pieces of y; complement-basis lifts multiply through directly.
      QMat mult = pr.proj.mul(sys.gen_piece[i].basis);
      for (int r = 0; r < mult.rows(); ++r)
        for (int c = 0; c < mult.cols(); ++c)
          row.at(r, sys.col_off[i] + c) += e.coeff * mult.at(r, c);
    }
    rows.push_back(std::move(row));
    total_rows += pr.dim();
  }
  sys.rows = QMat(total_rows, unknowns);
  int off = 0;
  for (const QMat& r : rows) {
    for (int i = 0; i < r.rows(); ++i)
      for (int c = 0; c < unknowns; ++c) sys.rows.at(off + i, c) = r.at(i, c);
    off += r.rows();
  }
  return sys;
}

int module_hom_dim(const Module& x, const Module& y, const LVec& shift) {
  HomSystem sys = module_hom_system(x, y, shift);
  return sys.col_off.back() - rank(sys.rows);
}

int dual_piece_dim(const DualModule& d, const LVec& local_deg) { return piece_dim(d.u, neg(local_deg)); }

int dual_piece_dim_at_M(const DualModule& d, const LVec& m) { return piece_dim_at_M(d.u, neg(m)); }

}  // namespace torkos
