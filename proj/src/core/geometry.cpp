#include "geometry.hpp"

#include <algorithm>
#include <utility>

namespace torkos {

namespace {

std::string deg_str(const LVec& m) {
  std::string s = "(";
  for (size_t i = 0; i < m.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(m[i]);
  }
  return s + ")";
}

// The generator degree whose formal dual has the piece function of the top
// local cohomology of a free rank-one summand in degree w: pairings 1 -
// <w, r> over the cone's rays.
LVec reflected_gen(const Fan& fan, Flavor flavor, int cone, const LVec& w) {
  LVec b = flavor == Flavor::A ? fan.b_degree(cone, w) : w;
  for (auto& x : b) x = 1 - x;
  return flavor == Flavor::A ? fan.lift_b_degree(cone, b) : b;
}

// Entrywise scalar accumulation of the composite of two consecutive
// differentials; every composite must vanish identically. Only sound for
// free payloads, where a morphism is determined by its coefficient matrix.
void check_squares(const GeometricComplex& g, const std::string& who) {
  for (const auto& [t, ps] : g.terms)
    for (const GeoPiece& p : ps)
      if (!p.payload.rels.entries.empty()) return;
  if (g.terms.empty()) return;
  int lo = g.terms.begin()->first, hi = g.terms.rbegin()->first;
  for (int d = lo; d + 2 <= hi; ++d) {
    auto d0 = g.diffs.find(d), d1 = g.diffs.find(d + 1);
    if (d0 == g.diffs.end() || d1 == g.diffs.end()) continue;
    std::map<std::pair<int, int>, QMat> acc;
    for (const GeoEntry& e1 : d0->second)
      for (const GeoEntry& e2 : d1->second) {
        if (e2.col != e1.row) continue;
        Morphism comp = compose(e1.under, e2.under);
        QMat& a = acc.try_emplace(std::make_pair(e1.col, e2.row),
                                  QMat(comp.mat.rows(), comp.mat.cols()))
                      .first->second;
        for (const auto& [pos, sc] : comp.mat.entries)
          a.at(pos.first, pos.second) += e1.coeff * e2.coeff * sc.coeff;
      }
    for (const auto& [key, a] : acc)
      require(a.is_zero(), ErrCode::SignIncoherence,
              who + ": signed boundary squares to a nonzero map leaving degree " +
                  std::to_string(d));
  }
}

}  // namespace

EquivariantLineBundle line_bundle(const Fan& fan, const std::vector<long long>& coeffs) {
  require(static_cast<int>(coeffs.size()) == fan.num_rays(), ErrCode::LengthMismatch,
          "line_bundle: one coefficient per ray expected");
  EquivariantLineBundle l{&fan, coeffs, {}};
  l.character.reserve(fan.num_cones());
  for (int c = 0; c < fan.num_cones(); ++c) {
    const Cone& cone = fan.cone(c);
    LVec want(cone.rays.size());
    for (size_t i = 0; i < cone.rays.size(); ++i) want[i] = -coeffs[cone.rays[i]];
    LVec chi = fan.lift_b_degree(c, want);
    require(fan.b_degree(c, chi) == want, ErrCode::Internal,
            "line_bundle: no character matches the divisor on cone " + std::to_string(c));
    l.character.push_back(std::move(chi));
  }
  return l;
}

EquivariantLineBundle canonical_bundle(const Fan& fan) {
  return line_bundle(fan, std::vector<long long>(fan.num_rays(), -1));
}

EquivariantLineBundle tensor_bundle(const EquivariantLineBundle& a, const EquivariantLineBundle& b) {
  require(a.fan == b.fan, ErrCode::ConeMismatch, "tensor_bundle: bundles live on different fans");
  EquivariantLineBundle out{a.fan, a.coeffs, {}};
  for (int r = 0; r < a.fan->num_rays(); ++r) out.coeffs[r] += b.coeffs[r];
  out.character.reserve(a.fan->num_cones());
  for (int c = 0; c < a.fan->num_cones(); ++c)
    out.character.push_back(add(a.character[c], b.character[c]));
  return out;
}

EquivariantLineBundle twisted_bundle(const EquivariantLineBundle& l, const LVec& m) {
  require(static_cast<int>(m.size()) == l.fan->rank(), ErrCode::LengthMismatch,
          "twisted_bundle: character length");
  EquivariantLineBundle out{l.fan, l.coeffs, {}};
  for (int r = 0; r < l.fan->num_rays(); ++r) out.coeffs[r] -= dot(m, l.fan->ray(r));
  out.character.reserve(l.fan->num_cones());
  for (int c = 0; c < l.fan->num_cones(); ++c) out.character.push_back(add(l.character[c], m));
  return out;
}

Sheaf to_sheaf(const EquivariantLineBundle& l, Flavor flavor) {
  const Fan& fan = *l.fan;
  std::vector<Module> stalks;
  stalks.reserve(fan.num_cones());
  for (int c = 0; c < fan.num_cones(); ++c) {
    LVec gen = flavor == Flavor::A ? l.character[c] : fan.b_degree(c, l.character[c]);
    stalks.push_back(free_module(fan, c, flavor, {std::move(gen)}));
  }
  std::map<std::pair<int, int>, Morphism> facet;
  for (int s = 0; s < fan.num_cones(); ++s)
    for (int t : fan.facets(s)) {
      HomMat mat;
      mat.row_deg = stalks[t].gens;
      mat.col_deg = stalks[s].gens;
      LVec deg = flavor == Flavor::A ? sub(l.character[s], l.character[t])
                                     : zero_vec(stalks[t].deg_len());
      mat.set(0, 0, 1, std::move(deg));
      facet.emplace(std::make_pair(s, t),
                    make_morphism(stalks[s], stalks[t], std::move(mat), zero_vec(stalks[t].deg_len())));
    }
  return make_sheaf(fan, flavor, std::move(stalks), std::move(facet));
}

Sheaf coherent_sheaf(const Fan& fan, Flavor flavor, std::vector<Module> stalks,
                     std::map<std::pair<int, int>, Morphism> facet_res) {
  Sheaf f = make_sheaf(fan, flavor, std::move(stalks), std::move(facet_res));
  require(is_coherent(f), ErrCode::NotCoherent,
          "coherent_sheaf: chart data does not localize to a coherent sheaf");
  return f;
}

int global_sections_dim(const Sheaf& f, const LVec& m) {
  const Fan& fan = *f.fan;
  const std::vector<int>& tops = fan.max_cones();
  std::vector<int> off(tops.size() + 1, 0);
  for (size_t i = 0; i < tops.size(); ++i)
    off[i + 1] = off[i] + piece_dim_at_M(f.stalks[tops[i]], m);
  int total = off.back();
  if (total == 0) return 0;
  int nrows = 0;
  for (size_t i = 0; i < tops.size(); ++i)
    for (size_t j = i + 1; j < tops.size(); ++j)
      nrows += piece_dim_at_M(f.stalks[fan.meet(tops[i], tops[j])], m);
  QMat con(nrows, total);
  int r0 = 0;
  for (size_t i = 0; i < tops.size(); ++i)
    for (size_t j = i + 1; j < tops.size(); ++j) {
      int w = fan.meet(tops[i], tops[j]);
      int pd = piece_dim_at_M(f.stalks[w], m);
      if (pd == 0) continue;
      QMat ei = evaluate_at_M(f.restriction(tops[i], w), m);
      QMat ej = evaluate_at_M(f.restriction(tops[j], w), m);
      for (int r = 0; r < pd; ++r) {
        for (int c = 0; c < ei.cols(); ++c) con.at(r0 + r, off[i] + c) = ei.at(r, c);
        for (int c = 0; c < ej.cols(); ++c) con.at(r0 + r, off[j] + c) = -ej.at(r, c);
      }
      r0 += pd;
    }
  return total - rank(con);
}

int geo_piece_dim(const GeoPiece& p, const Fan& fan, int chart, const LVec& m) {
  if (p.dual) {
    if (!fan.is_face(p.tau, chart)) return 0;
    return piece_dim_at_M(p.payload, neg(m));
  }
  int w = fan.meet(p.tau, chart);
  return piece_dim_at_M(w == p.tau ? p.payload : rebase(p.payload, w), m);
}

int geo_term_dim(const GeometricComplex& g, int deg, int chart, const LVec& m) {
  auto it = g.terms.find(deg);
  if (it == g.terms.end()) return 0;
  int dim = 0;
  for (const GeoPiece& p : it->second) dim += geo_piece_dim(p, *g.fan, chart, m);
  return dim;
}

EvaluatedComplex evaluate_geometric(const GeometricComplex& g, int chart, const LVec& m) {
  require(!g.terms.empty(), ErrCode::NotAComplex, "evaluate_geometric: empty complex");
  const Fan& fan = *g.fan;
  require(chart >= 0 && chart < fan.num_cones(), ErrCode::ConeMismatch,
          "evaluate_geometric: unknown chart");
  int lo = g.terms.begin()->first, hi = g.terms.rbegin()->first;
  EvaluatedComplex ec;
  ec.lo = lo;
  std::map<int, std::vector<int>> offs;
  for (int d = lo; d <= hi; ++d) {
    std::vector<int> off{0};
    auto it = g.terms.find(d);
    if (it != g.terms.end())
      for (const GeoPiece& p : it->second) off.push_back(off.back() + geo_piece_dim(p, fan, chart, m));
    ec.dims.push_back(off.back());
    offs.emplace(d, std::move(off));
  }
  for (int d = lo; d < hi; ++d) {
    QMat mat(ec.dims[d - lo + 1], ec.dims[d - lo]);
    auto dit = g.diffs.find(d);
    if (dit != g.diffs.end()) {
      const std::vector<int>& soff = offs.at(d);
      const std::vector<int>& toff = offs.at(d + 1);
      const std::vector<GeoPiece>& sp = g.terms.at(d);
      const std::vector<GeoPiece>& tp = g.terms.at(d + 1);
      for (const GeoEntry& e : dit->second) {
        if (!fan.is_face(sp[e.col].tau, chart) || !fan.is_face(tp[e.row].tau, chart)) continue;
        require(sp[e.col].dual && tp[e.row].dual, ErrCode::Unsupported,
                "evaluate_geometric: differentials between plain payloads are not supported");
        // Runs from the target payload to the source payload; transposing
        // at the reflected degree gives the map of formal duals.
        QMat b = evaluate_at_M(e.under, neg(m));
        for (int r = 0; r < b.rows(); ++r)
          for (int c = 0; c < b.cols(); ++c)
            if (!(b.at(r, c) == 0)) mat.at(toff[e.row] + c, soff[e.col] + r) += e.coeff * b.at(r, c);
      }
    }
    ec.mats.push_back(std::move(mat));
  }
  return ec;
}

GeometricComplex direct_image_complex(const CoSheafComplex& c) {
  require(!c.terms.empty(), ErrCode::NotAComplex, "direct_image_complex: empty complex");
  const Sheaf& first = c.terms.begin()->second.under;
  const Fan& fan = *first.fan;
  GeometricComplex g;
  g.fan = &fan;
  g.flavor = first.flavor;
  int tlo = c.terms.begin()->first, thi = c.terms.rbegin()->first;
  for (int t = tlo; t <= thi; ++t)
    require(c.terms.count(t), ErrCode::NotAComplex,
            "direct_image_complex: missing term in degree " + std::to_string(t));
  for (const auto& [t, cs] : c.terms) {
    require(cs.under.fan == &fan, ErrCode::ConeMismatch,
            "direct_image_complex: terms live on different fans");
    require(cs.under.flavor == g.flavor, ErrCode::FlavorMismatch,
            "direct_image_complex: terms mix gradings");
  }
  for (const auto& [t, df] : c.diffs)
    require(is_zero(df.shift), ErrCode::Unsupported,
            "direct_image_complex: shifted differentials are not supported");

  std::map<std::pair<int, int>, int> idx;
  for (const auto& [t, cs] : c.terms)
    for (int tau = 0; tau < fan.num_cones(); ++tau) {
      const Module& payload = cs.under.stalks[tau];
      if (is_zero_module(payload)) continue;
      int d = t + fan.dim(tau);
      idx.emplace(std::make_pair(t, tau), static_cast<int>(g.terms[d].size()));
      g.terms[d].push_back(GeoPiece{tau, true, payload});
    }
  if (g.terms.empty()) {
    g.terms[0];
    return g;
  }
  int glo = g.terms.begin()->first, ghi = g.terms.rbegin()->first;
  for (int d = glo; d <= ghi; ++d) {
    g.terms[d];
    if (d < ghi) g.diffs[d];
  }

  SignTable signs = incidence_signs(fan);
  for (const auto& [key, col] : idx) {
    int t = key.first, tau = key.second;
    int d = t + fan.dim(tau);
    for (int up : fan.cofacets(tau)) {
      auto it = idx.find(std::make_pair(t, up));
      if (it == idx.end()) continue;
      g.diffs[d].push_back(
          GeoEntry{it->second, col, Rat(signs.sign(up, tau)), c.terms.at(t).under.restriction(up, tau)});
    }
    auto dit = c.diffs.find(t);
    if (dit != c.diffs.end()) {
      auto it = idx.find(std::make_pair(t + 1, tau));
      if (it != idx.end())
        g.diffs[d].push_back(GeoEntry{it->second, col, Rat(fan.dim(tau) % 2 == 0 ? 1 : -1),
                                      dit->second.carrier.comp[tau]});
    }
  }
  check_squares(g, "direct_image_complex");
  return g;
}

GeometricComplex direct_image_complex(const CoSheaf& c) {
  CoSheafComplex cx;
  cx.terms.emplace(0, c);
  return direct_image_complex(cx);
}

CousinComplex cousin_complex(const Sheaf& g) {
  const Fan& fan = *g.fan;
  for (int c = 0; c < fan.num_cones(); ++c)
    require(g.stalks[c].rels.entries.empty(), ErrCode::NotLocallyFree,
            "cousin_complex: stalk at cone " + std::to_string(c) + " is not free");
  for (const auto& [key, f] : g.res)
    for (const auto& [pos, sc] : f.mat.entries) {
      LVec b = g.flavor == Flavor::A ? fan.b_degree(key.second, sc.deg) : sc.deg;
      require(is_zero(b), ErrCode::Unsupported,
              "cousin_complex: transition entries must restrict to units along the common face");
    }

  CousinComplex out{g, {}};
  out.cx.fan = &fan;
  out.cx.flavor = g.flavor;
  int top = 0;
  for (int c = 0; c < fan.num_cones(); ++c) top = std::max(top, fan.dim(c));
  std::map<std::pair<int, int>, int> idx;  // (cone, generator) -> piece index
  for (int d = 0; d <= top; ++d) {
    std::vector<GeoPiece>& ps = out.cx.terms[d];
    if (d < top) out.cx.diffs[d];
    for (int tau : fan.cones_of_dim(d))
      for (int k = 0; k < g.stalks[tau].num_gens(); ++k) {
        idx.emplace(std::make_pair(tau, k), static_cast<int>(ps.size()));
        ps.push_back(GeoPiece{
            tau, true,
            free_module(fan, tau, g.flavor, {reflected_gen(fan, g.flavor, tau, g.stalks[tau].gens[k])})});
      }
  }
  SignTable signs = incidence_signs(fan);
  for (int tau = 0; tau < fan.num_cones(); ++tau) {
    int d = fan.dim(tau);
    for (int up : fan.cofacets(tau)) {
      const Morphism& res = g.restriction(up, tau);
      for (const auto& [pos, sc] : res.mat.entries) {
        const GeoPiece& src = out.cx.terms[d][idx.at(std::make_pair(tau, pos.first))];
        const GeoPiece& tgt = out.cx.terms[d + 1][idx.at(std::make_pair(up, pos.second))];
        HomMat mat;
        mat.row_deg = src.payload.gens;
        mat.col_deg = tgt.payload.gens;
        LVec deg = g.flavor == Flavor::A
                       ? sub(tgt.payload.gens[0], src.payload.gens[0])
                       : sub(fan.project_b(up, tau, tgt.payload.gens[0]), src.payload.gens[0]);
        mat.set(0, 0, sc.coeff, std::move(deg));
        out.cx.diffs[d].push_back(GeoEntry{
            idx.at(std::make_pair(up, pos.second)), idx.at(std::make_pair(tau, pos.first)),
            Rat(signs.sign(up, tau)),
            make_morphism(tgt.payload, src.payload, std::move(mat), zero_vec(src.payload.deg_len()))});
      }
    }
  }
  check_squares(out.cx, "cousin_complex");
  return out;
}

EvaluatedComplex evaluate_cousin(const CousinComplex& c, int chart, const LVec& m, bool augmented) {
  EvaluatedComplex ec = evaluate_geometric(c.cx, chart, m);
  if (!augmented) return ec;
  ec.lo -= 1;
  ec.dims.insert(ec.dims.begin(), piece_dim_at_M(c.g.stalks[chart], m));
  ec.mats.insert(ec.mats.begin(), evaluate_at_M(c.g.restriction(chart, 0), m));
  return ec;
}

bool SerreReport::passed() const {
  for (const CheckItem& c : checks)
    if (!c.passed) return false;
  return true;
}

SerreReport serre_duality_check(const EquivariantLineBundle& l, const std::vector<LVec>& window) {
  const Fan& fan = *l.fan;
  require(fan.complete(), ErrCode::FanNotComplete, "serre_duality_check: fan is not complete");
  const int n = fan.rank();
  SerreReport rep;
  rep.checks = {CheckItem{"concentration"}, CheckItem{"twist-compatibility"},
                CheckItem{"cousin-terms"}, CheckItem{"cousin-exactness"}};
  CheckItem& conc = rep.checks[0];
  CheckItem& twist = rep.checks[1];
  CheckItem& cterm = rep.checks[2];
  CheckItem& cex = rep.checks[3];

  KoszulResult kf = koszul_K(to_sheaf(l, Flavor::A));
  GeometricComplex gf = direct_image_complex(kf.cx);
  KoszulResult ko = koszul_K(to_sheaf(line_bundle(fan, std::vector<long long>(fan.num_rays(), 0)),
                                      Flavor::A));
  GeometricComplex go = direct_image_complex(ko.cx);
  Sheaf wf = to_sheaf(tensor_bundle(canonical_bundle(fan), l), Flavor::A);
  CousinComplex cous = cousin_complex(wf);

  // Cell layouts must agree up to the chart character of each source cell.
  for (const auto& [t, cells] : kf.cells) {
    auto bit = ko.cells.find(t);
    if (bit == ko.cells.end() || bit->second.size() != cells.size()) {
      twist.passed = false;
      twist.detail = "cell layout differs from the structure run in degree " + std::to_string(t);
      break;
    }
    for (size_t j = 0; j < cells.size() && twist.passed; ++j)
      if (cells[j].first != bit->second[j].first ||
          cells[j].second != sub(bit->second[j].second, l.character[cells[j].first])) {
        twist.passed = false;
        twist.detail = "cell layout differs from the twisted structure run in degree " +
                       std::to_string(t);
      }
  }

  auto record_site = [](CheckItem& c, int chart, const LVec& m) {
    c.passed = false;
    c.cone = chart;
    c.degree = m;
  };

  for (int chart : fan.max_cones())
    for (const LVec& m : window) {
      const std::string site = "chart " + std::to_string(chart) + ", degree " + deg_str(m);

      EvaluatedComplex ef = evaluate_geometric(gf, chart, m);
      std::vector<int> h = cohomology_dims(ef);
      int want = piece_dim_at_M(wf.stalks[chart], m);
      int hhi = ef.lo + static_cast<int>(h.size()) - 1;
      for (int spot = std::min(ef.lo, -n); spot <= std::max(hhi, -n) && conc.passed; ++spot) {
        int have = spot >= ef.lo && spot <= hhi ? h[spot - ef.lo] : 0;
        int expect = spot == -n ? want : 0;
        if (have != expect) {
          record_site(conc, chart, m);
          conc.detail = site + ": cohomology " + std::to_string(have) + " in degree " +
                        std::to_string(spot) + ", expected " + std::to_string(expect);
        }
      }

      if (twist.passed) {
        EvaluatedComplex eo = evaluate_geometric(go, chart, sub(m, l.character[chart]));
        if (ef.lo != eo.lo || ef.dims != eo.dims || !(ef.mats == eo.mats)) {
          record_site(twist, chart, m);
          twist.detail = site + ": differs from the structure run at the shifted degree";
        }
      }

      std::vector<int> by_dim(n + 1, 0);
      for (int tau = 0; tau < fan.num_cones(); ++tau) {
        if (!fan.is_face(tau, chart)) continue;
        EvaluatedComplex ct = evaluate_complex(kf.cx, tau, m);
        std::vector<int> hh = cohomology_dims(ct);
        for (size_t i = 0; i < hh.size(); ++i) {
          int spot = ct.lo + static_cast<int>(i);
          if (spot == -n)
            by_dim[fan.dim(tau)] += hh[i];
          else if (hh[i] != 0 && cterm.passed) {
            record_site(cterm, chart, m);
            cterm.detail = site + ": costalk cohomology at cone " + std::to_string(tau) +
                           " spills into degree " + std::to_string(spot);
          }
        }
      }
      for (int i = 0; i <= n && cterm.passed; ++i) {
        int cdim = geo_term_dim(cous.cx, i, chart, m);
        if (cdim != by_dim[i]) {
          record_site(cterm, chart, m);
          cterm.detail = site + ": Cousin term " + std::to_string(i) + " has dimension " +
                         std::to_string(cdim) + ", costalk cohomology gives " +
                         std::to_string(by_dim[i]);
        }
      }

      if (cex.passed && !is_exact(evaluate_cousin(cous, chart, m, true))) {
        record_site(cex, chart, m);
        cex.detail = site + ": augmented Cousin complex is not exact";
      }
    }
  return rep;
}

}  // namespace torkos
