#include "koszul.hpp"

#include <algorithm>
#include <string>

#include "error.hpp"

namespace torkos {

namespace {

// One dual summand of the assembled complex: generator `idx` of the input
// term `t` over `cone`, contributing (U_cone(twist))^v in degree t - dim.
struct TotalCell {
  int t;
  int cone;
  int idx;
  LVec twist;
};

bool free_stalks(const Sheaf& f) {
  for (const Module& s : f.stalks)
    if (!s.rels.entries.empty()) return false;
  return true;
}

bool symbolically_zero(const SheafMorphism& f) {
  for (const Morphism& c : f.comp)
    if (!c.mat.entries.empty()) return false;
  return true;
}

// Builds the terms and signed differentials from a cell layout and a
// coefficient rule, then verifies entrywise that the boundary squares to
// zero (sound because all stalks involved are free).
KoszulResult assemble(const Fan& fan, Flavor fl, const std::map<int, std::vector<TotalCell>>& layout,
                      const std::function<Rat(const TotalCell&, const TotalCell&)>& coeff_of) {
  KoszulResult out;
  std::map<int, Sheaf> under;
  for (const auto& [d, cells] : layout) {
    if (cells.empty()) continue;
    std::vector<Sheaf> parts;
    parts.reserve(cells.size());
    for (const TotalCell& cell : cells) {
      parts.push_back(standard_open(fan, fl, cell.cone, cell.twist));
      out.cells[d].emplace_back(cell.cone, cell.twist);
    }
    under.emplace(d, direct_sum_sheaf(parts));
    out.cx.terms.emplace(d, sheaf_dual(under.at(d)));
  }

  for (auto it = under.begin(); it != under.end(); ++it) {
    auto jt = std::next(it);
    if (jt == under.end()) break;
    if (jt->first != it->first + 1) continue;
    int d = it->first;
    const std::vector<TotalCell>& row_cells = layout.at(d);
    const std::vector<TotalCell>& col_cells = layout.at(d + 1);
    const Sheaf& tgt_u = it->second;
    const Sheaf& src_u = jt->second;
    std::vector<Morphism> comp;
    for (int c = 0; c < fan.num_cones(); ++c) {
      auto positions = [&](const std::vector<TotalCell>& cells) {
        std::vector<int> pos(cells.size(), -1);
        int k = 0;
        for (size_t q = 0; q < cells.size(); ++q)
          if (fan.is_face(c, cells[q].cone)) pos[q] = k++;
        return pos;
      };
      std::vector<int> rpos = positions(row_cells), cpos = positions(col_cells);
      HomMat mat;
      mat.row_deg = tgt_u.stalks[c].gens;
      mat.col_deg = src_u.stalks[c].gens;
      for (size_t q = 0; q < row_cells.size(); ++q) {
        if (rpos[q] < 0) continue;
        for (size_t p = 0; p < col_cells.size(); ++p) {
          if (cpos[p] < 0) continue;
          Rat coeff = coeff_of(row_cells[q], col_cells[p]);
          if (coeff != 0)
            mat.set(rpos[q], cpos[p], coeff, sub(mat.col_deg[cpos[p]], mat.row_deg[rpos[q]]));
        }
      }
      comp.push_back(make_morphism(src_u.stalks[c], tgt_u.stalks[c], std::move(mat),
                                   zero_vec(tgt_u.stalks[c].deg_len())));
    }
    SheafMorphism carrier =
        make_sheaf_morphism(src_u, tgt_u, std::move(comp), zero_vec(fan.rank()));
    out.cx.diffs.emplace(d, make_cosheaf_morphism(out.cx.terms.at(d), out.cx.terms.at(d + 1),
                                                  std::move(carrier), zero_vec(fan.rank())));
  }

  for (auto it = out.cx.diffs.begin(); it != out.cx.diffs.end(); ++it) {
    auto jt = out.cx.diffs.find(it->first + 1);
    if (jt == out.cx.diffs.end()) continue;
    SheafMorphism square = compose(it->second.carrier, jt->second.carrier);
    if (symbolically_zero(square)) continue;
    for (int c = 0; c < fan.num_cones(); ++c)
      require(square.comp[c].mat.entries.empty(), ErrCode::SignIncoherence,
              "signed boundary squares to a nonzero map at cone " + std::to_string(c) +
                  " between degrees " + std::to_string(it->first) + " and " +
                  std::to_string(it->first + 2));
  }
  return out;
}

LVec cell_twist(const Fan& fan, Flavor fl, int cone, const LVec& gen) {
  return fl == Flavor::A ? neg(gen) : fan.lift_b_degree(cone, neg(gen));
}

}  // namespace

EvaluatedComplex interval_cell_complex(const Fan& fan, int xi, int sigma) {
  require(fan.is_face(xi, sigma), ErrCode::ConeMismatch, "interval_cell_complex: not a face pair");
  SignTable signs = incidence_signs(fan);
  std::map<int, std::vector<int>> level;  // degree -> cones of that interval level
  for (int tau = 0; tau < fan.num_cones(); ++tau)
    if (fan.is_face(xi, tau) && fan.is_face(tau, sigma)) level[-fan.dim(tau)].push_back(tau);
  EvaluatedComplex ec;
  ec.lo = -fan.dim(sigma);
  int hi = -fan.dim(xi);
  for (int d = ec.lo; d <= hi; ++d) ec.dims.push_back(static_cast<int>(level[d].size()));
  for (int d = ec.lo; d < hi; ++d) {
    QMat mat(ec.dims[d + 1 - ec.lo], ec.dims[d - ec.lo]);
    for (size_t col = 0; col < level[d].size(); ++col)
      for (size_t row = 0; row < level[d + 1].size(); ++row) {
        int tau = level[d][col], rho = level[d + 1][row];
        if (fan.is_face(rho, tau) && fan.dim(rho) + 1 == fan.dim(tau))
          mat.at(static_cast<int>(row), static_cast<int>(col)) = signs.sign(tau, rho);
      }
    ec.mats.push_back(std::move(mat));
  }
  return ec;
}

CoSheafComplex cellular_complex(const CellDiagram& d, const SignTable& signs) {
  require(d.fan != nullptr, ErrCode::Internal, "cellular_complex: missing fan");
  const Fan& fan = *d.fan;
  require(static_cast<int>(d.cells.size()) == fan.num_cones(), ErrCode::LengthMismatch,
          "cellular_complex: one twist list per cone required");
  for (const auto& [key, block] : d.blocks) {
    auto [sigma, tau] = key;
    require(fan.is_face(tau, sigma) && fan.dim(tau) + 1 == fan.dim(sigma), ErrCode::NotAFacet,
            "cellular_complex: block key is not a facet pair");
    require(block.rows() == static_cast<int>(d.cells[sigma].size()) &&
                block.cols() == static_cast<int>(d.cells[tau].size()),
            ErrCode::LengthMismatch, "cellular_complex: block shape mismatch");
  }
  std::map<int, std::vector<TotalCell>> layout;
  for (int c = 0; c < fan.num_cones(); ++c)
    for (size_t i = 0; i < d.cells[c].size(); ++i)
      layout[-fan.dim(c)].push_back({0, c, static_cast<int>(i), d.cells[c][i]});
  auto coeff_of = [&](const TotalCell& row, const TotalCell& col) -> Rat {
    if (!fan.is_face(col.cone, row.cone) || fan.dim(col.cone) + 1 != fan.dim(row.cone)) return 0;
    auto it = d.blocks.find({row.cone, col.cone});
    if (it == d.blocks.end()) return 0;
    const Rat& base = it->second.at(row.idx, col.idx);
    return base == 0 ? Rat(0) : Rat(signs.sign(row.cone, col.cone)) * base;
  };
  return assemble(fan, d.flavor, layout, coeff_of).cx;
}

CoSheafComplex cellular_complex(const CellDiagram& d) {
  require(d.fan != nullptr, ErrCode::Internal, "cellular_complex: missing fan");
  return cellular_complex(d, incidence_signs(*d.fan));
}

KoszulResult koszul_K(const SheafComplex& n, const SignTable& signs) {
  KoszulResult empty;
  if (n.terms.empty()) return empty;
  const Fan* fan = n.terms.begin()->second.fan;
  Flavor fl = n.terms.begin()->second.flavor;
  for (const auto& [t, sh] : n.terms) {
    require(sh.fan == fan && sh.flavor == fl, ErrCode::ConeMismatch,
            "koszul_K: terms live on different fans or flavors");
    require(free_stalks(sh), ErrCode::Unsupported,
            "koszul_K: complex terms must have free stalks");
  }
  for (const auto& [t, df] : n.diffs) {
    require(n.terms.count(t) && n.terms.count(t + 1), ErrCode::NotAComplex,
            "koszul_K: differential without both endpoints");
    require(is_zero(df.shift), ErrCode::NotAComplex, "koszul_K: differentials must have shift zero");
    for (int c = 0; c < fan->num_cones(); ++c) {
      require(module_equal(df.src.stalks[c], n.terms.at(t).stalks[c]) &&
                  module_equal(df.tgt.stalks[c], n.terms.at(t + 1).stalks[c]),
              ErrCode::NotAComplex, "koszul_K: differential endpoints disagree with the terms");
    }
    auto next = n.diffs.find(t + 1);
    if (next != n.diffs.end())
      require(symbolically_zero(compose(next->second, df)), ErrCode::NotAComplex,
              "koszul_K: input differentials do not compose to zero");
  }

  std::map<int, std::vector<TotalCell>> layout;
  for (const auto& [t, sh] : n.terms)
    for (int c = 0; c < fan->num_cones(); ++c) {
      const Module& st = sh.stalks[c];
      for (int i = 0; i < st.num_gens(); ++i)
        layout[t - fan->dim(c)].push_back({t, c, i, cell_twist(*fan, fl, c, st.gens[i])});
    }

  auto coeff_of = [&](const TotalCell& row, const TotalCell& col) -> Rat {
    if (col.t == row.t && fan->is_face(col.cone, row.cone) &&
        fan->dim(col.cone) + 1 == fan->dim(row.cone)) {
      Morphism res = n.terms.at(row.t).restriction(row.cone, col.cone);
      const ScaledChar* e = res.mat.entry(col.idx, row.idx);
      if (e == nullptr) return 0;
      return Rat(signs.sign(row.cone, col.cone)) * e->coeff;
    }
    if (col.t == row.t + 1 && col.cone == row.cone) {
      auto dit = n.diffs.find(row.t);
      if (dit == n.diffs.end()) return 0;
      const ScaledChar* e = dit->second.comp[row.cone].mat.entry(col.idx, row.idx);
      if (e == nullptr) return 0;
      return fan->dim(row.cone) % 2 ? -e->coeff : e->coeff;
    }
    return 0;
  };
  return assemble(*fan, fl, layout, coeff_of);
}

KoszulResult koszul_K(const SheafComplex& n) {
  if (n.terms.empty()) return {};
  return koszul_K(n, incidence_signs(*n.terms.begin()->second.fan));
}

KoszulResult koszul_K(const Sheaf& f, const SignTable& signs) {
  SheafComplex cx;
  if (free_stalks(f)) {
    cx.terms.emplace(0, f);
  } else {
    cx = projective_resolution(f).cx;
  }
  return koszul_K(cx, signs);
}

KoszulResult koszul_K(const Sheaf& f) { return koszul_K(f, incidence_signs(*f.fan)); }

AugmentedKoszul augmented_K_structure(const Fan& fan, Flavor flavor) {
  require(fan.complete(), ErrCode::FanNotComplete, "augmented_K_structure: fan is not complete");
  AugmentedKoszul out;
  out.k = koszul_K(structure_sheaf(fan, flavor));
  out.aug = sheaf_dual(structure_sheaf(fan, flavor));
  int n = fan.rank();
  const Sheaf& top_u = out.k.cx.terms.at(-n).under;
  std::vector<Morphism> comp;
  for (int c = 0; c < fan.num_cones(); ++c) {
    HomMat mat;
    mat.row_deg = out.aug.under.stalks[c].gens;
    mat.col_deg = top_u.stalks[c].gens;
    for (int j = 0; j < top_u.stalks[c].num_gens(); ++j)
      mat.set(0, j, 1, sub(mat.col_deg[j], mat.row_deg[0]));
    comp.push_back(make_morphism(top_u.stalks[c], out.aug.under.stalks[c], std::move(mat),
                                 zero_vec(out.aug.under.stalks[c].deg_len())));
  }
  SheafMorphism carrier =
      make_sheaf_morphism(top_u, out.aug.under, std::move(comp), zero_vec(fan.rank()));
  out.eps = make_cosheaf_morphism(out.aug, out.k.cx.terms.at(-n), std::move(carrier),
                                  zero_vec(fan.rank()));
  auto d0 = out.k.cx.diffs.find(-n);
  if (d0 != out.k.cx.diffs.end())
    require(symbolically_zero(compose(out.eps.carrier, d0->second.carrier)),
            ErrCode::SignIncoherence,
            "augmented_K_structure: augmentation does not annihilate the boundary");
  return out;
}

EvaluatedComplex evaluate_augmented(const AugmentedKoszul& a, int cone, const LVec& m) {
  EvaluatedComplex ec = evaluate_complex(a.k.cx, cone, m);
  ec.lo -= 1;
  ec.dims.insert(ec.dims.begin(), a.aug.costalk_dim(cone, m));
  ec.mats.insert(ec.mats.begin(), evaluate_at(a.eps, cone, m));
  return ec;
}

CoSheaf delta_cosheaf(const CoSheaf& c) { return CoSheaf{delta_sheaf(c.under)}; }

CoSheafComplex delta_cosheaf_complex(const CoSheafComplex& c) {
  CoSheafComplex out;
  for (const auto& [d, t] : c.terms) out.terms.emplace(d, delta_cosheaf(t));
  for (const auto& [d, f] : c.diffs)
    out.diffs.emplace(d, make_cosheaf_morphism(out.terms.at(d), out.terms.at(d + 1),
                                               delta_sheaf_morphism(f.carrier), f.shift));
  return out;
}

std::string commute_square_check(const SheafComplex& n, const std::vector<LVec>& window) {
  if (n.terms.empty()) return {};
  const Fan* fan = n.terms.begin()->second.fan;
  CoSheafComplex lhs = delta_cosheaf_complex(koszul_K(n).cx);
  CoSheafComplex rhs = koszul_K(delta_sheaf_complex(n)).cx;
  for (int c = 0; c < fan->num_cones(); ++c)
    for (const LVec& m : window) {
      EvaluatedComplex l = evaluate_complex(lhs, c, m);
      EvaluatedComplex r = evaluate_complex(rhs, c, m);
      std::string site = "cone " + std::to_string(c);
      if (l.dims != r.dims || (!l.dims.empty() && l.lo != r.lo))
        return "costalk dimensions differ at " + site;
      for (size_t i = 0; i < l.mats.size(); ++i)
        if (!(l.mats[i] == r.mats[i]))
          return "differentials differ at " + site + " leaving degree " +
                 std::to_string(l.lo + static_cast<int>(i));
    }
  return {};
}

std::string commute_square_check(const Sheaf& f, const std::vector<LVec>& window) {
  SheafComplex cx;
  if (free_stalks(f))
    cx.terms.emplace(0, f);
  else
    cx = projective_resolution(f).cx;
  return commute_square_check(cx, window);
}

}  // namespace torkos
