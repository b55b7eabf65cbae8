#include "sheaf.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "syzygy.hpp"

namespace torkos {

namespace {

// Local degree of an M-twist at a cone: identity for flavor A, ray pairings
// for flavor B.
LVec local_shift(const Fan& fan, Flavor flavor, int cone, const LVec& m) {
  return flavor == Flavor::A ? m : fan.b_degree(cone, m);
}

// Degree conversion along a cone inclusion, matching the morphism degree law.
LVec conv_deg(const Fan& fan, Flavor flavor, int from_cone, int to_cone, const LVec& d) {
  if (flavor == Flavor::A || from_cone == to_cone) return d;
  return fan.project_b(from_cone, to_cone, d);
}

// Morphisms out of a finitely generated module are determined by the images
// of its generator classes, so evaluation at the generator degrees decides
// equality.
bool morphism_agree(const Morphism& a, const Morphism& b) {
  if (!module_equal(a.src, b.src) || !module_equal(a.tgt, b.tgt) || a.shift != b.shift) return false;
  for (const LVec& g : a.src.gens)
    if (!(evaluate(a, g) == evaluate(b, g))) return false;
  return true;
}

bool stalks_equal(const Sheaf& a, const Sheaf& b) {
  if (a.fan != b.fan || a.flavor != b.flavor || a.stalks.size() != b.stalks.size()) return false;
  for (size_t c = 0; c < a.stalks.size(); ++c)
    if (!module_equal(a.stalks[c], b.stalks[c])) return false;
  return true;
}

}  // namespace

Morphism Sheaf::restriction(int sigma, int tau) const {
  if (sigma == tau) return identity_morphism(stalks[sigma]);
  auto it = res.find({sigma, tau});
  require(it != res.end(), ErrCode::ConeMismatch, "restriction: not a face pair");
  return it->second;
}

Sheaf make_sheaf(const Fan& fan, Flavor flavor, std::vector<Module> stalks,
                 std::map<std::pair<int, int>, Morphism> facet_res) {
  require(static_cast<int>(stalks.size()) == fan.num_cones(), ErrCode::LengthMismatch,
          "make_sheaf: one stalk per cone");
  for (int c = 0; c < fan.num_cones(); ++c)
    require(stalks[c].fan == &fan && stalks[c].cone == c && stalks[c].flavor == flavor,
            ErrCode::ConeMismatch, "make_sheaf: stalk does not match its cone");
  for (const auto& [key, mor] : facet_res) {
    auto [sigma, tau] = key;
    require(sigma >= 0 && sigma < fan.num_cones() && fan.is_face(tau, sigma) &&
                fan.dim(sigma) == fan.dim(tau) + 1,
            ErrCode::NotAFacet, "make_sheaf: key is not a facet pair");
    require(module_equal(mor.src, stalks[sigma]) && module_equal(mor.tgt, stalks[tau]),
            ErrCode::InvalidMorphism, "make_sheaf: restriction endpoints mismatch");
    require(is_zero(mor.shift), ErrCode::InvalidMorphism, "make_sheaf: restrictions must have degree zero");
  }

  Sheaf out;
  out.fan = &fan;
  out.flavor = flavor;
  out.stalks = std::move(stalks);
  for (int sigma = 0; sigma < fan.num_cones(); ++sigma)
    for (int tau : fan.facets(sigma)) {
      auto it = facet_res.find({sigma, tau});
      if (it != facet_res.end())
        out.res.emplace(std::make_pair(sigma, tau), std::move(it->second));
      else
        out.res.emplace(std::make_pair(sigma, tau),
                        zero_morphism(out.stalks[sigma], out.stalks[tau],
                                      zero_vec(out.stalks[tau].deg_len())));
    }

  // Longer face pairs compose along the canonical chain that removes the
  // largest missing ray first.
  for (int diff = 2; diff <= fan.rank(); ++diff)
    for (int sigma = 0; sigma < fan.num_cones(); ++sigma)
      for (int tau = 0; tau < fan.num_cones(); ++tau) {
        if (fan.dim(sigma) - fan.dim(tau) != diff || !fan.is_face(tau, sigma)) continue;
        std::vector<int> missing;
        const auto& sr = fan.cone(sigma).rays;
        const auto& tr = fan.cone(tau).rays;
        std::set_difference(sr.begin(), sr.end(), tr.begin(), tr.end(), std::back_inserter(missing));
        std::vector<int> next_rays = sr;
        next_rays.erase(std::find(next_rays.begin(), next_rays.end(), missing.back()));
        int next = fan.cone_id(next_rays);
        out.res.emplace(std::make_pair(sigma, tau),
                        compose(out.res.at({next, tau}), out.res.at({sigma, next})));
      }

  // Coherence: in a simplicial fan every height-two interval is a diamond,
  // and agreement on all diamonds makes every facet chain compose equally.
  for (int sigma = 0; sigma < fan.num_cones(); ++sigma) {
    const auto& sr = fan.cone(sigma).rays;
    for (size_t a = 0; a < sr.size(); ++a)
      for (size_t b = a + 1; b < sr.size(); ++b) {
        std::vector<int> r1 = sr, r2 = sr, both = sr;
        r1.erase(std::find(r1.begin(), r1.end(), sr[a]));
        r2.erase(std::find(r2.begin(), r2.end(), sr[b]));
        both.erase(std::find(both.begin(), both.end(), sr[a]));
        both.erase(std::find(both.begin(), both.end(), sr[b]));
        int rho1 = fan.cone_id(r1), rho2 = fan.cone_id(r2), tau = fan.cone_id(both);
        Morphism f1 = compose(out.res.at({rho1, tau}), out.res.at({sigma, rho1}));
        Morphism f2 = compose(out.res.at({rho2, tau}), out.res.at({sigma, rho2}));
        require(morphism_agree(f1, f2), ErrCode::InvalidMorphism,
                "make_sheaf: restrictions do not compose coherently");
      }
  }
  return out;
}

Sheaf zero_sheaf(const Fan& fan, Flavor flavor) {
  std::vector<Module> stalks;
  for (int c = 0; c < fan.num_cones(); ++c) stalks.push_back(zero_module(fan, c, flavor));
  return make_sheaf(fan, flavor, std::move(stalks), {});
}

bool is_zero_sheaf(const Sheaf& f) {
  for (const Module& s : f.stalks)
    if (!is_zero_module(s)) return false;
  return true;
}

Sheaf standard_open(const Fan& fan, Flavor flavor, int sigma, const LVec& m) {
  require(sigma >= 0 && sigma < fan.num_cones(), ErrCode::ConeMismatch, "standard_open: unknown cone");
  require(static_cast<int>(m.size()) == fan.rank(), ErrCode::LengthMismatch, "standard_open: twist length");
  std::vector<Module> stalks;
  for (int c = 0; c < fan.num_cones(); ++c) {
    if (fan.is_face(c, sigma))
      stalks.push_back(free_module(fan, c, flavor, {local_shift(fan, flavor, c, m)}));
    else
      stalks.push_back(zero_module(fan, c, flavor));
  }
  std::map<std::pair<int, int>, Morphism> facet;
  for (int s = 0; s < fan.num_cones(); ++s) {
    if (!fan.is_face(s, sigma)) continue;
    for (int t : fan.facets(s)) {
      HomMat mat;
      mat.row_deg = stalks[t].gens;
      mat.col_deg = stalks[s].gens;
      mat.set(0, 0, 1, zero_vec(stalks[t].deg_len()));
      facet.emplace(std::make_pair(s, t),
                    make_morphism(stalks[s], stalks[t], std::move(mat), zero_vec(stalks[t].deg_len())));
    }
  }
  return make_sheaf(fan, flavor, std::move(stalks), std::move(facet));
}

Sheaf standard_point(const Fan& fan, Flavor flavor, int sigma, const LVec& m) {
  require(sigma >= 0 && sigma < fan.num_cones(), ErrCode::ConeMismatch, "standard_point: unknown cone");
  require(static_cast<int>(m.size()) == fan.rank(), ErrCode::LengthMismatch, "standard_point: twist length");
  std::vector<Module> stalks;
  for (int c = 0; c < fan.num_cones(); ++c) {
    if (c == sigma)
      stalks.push_back(free_module(fan, c, flavor, {local_shift(fan, flavor, c, m)}));
    else
      stalks.push_back(zero_module(fan, c, flavor));
  }
  return make_sheaf(fan, flavor, std::move(stalks), {});
}

Sheaf structure_sheaf(const Fan& fan, Flavor flavor) {
  std::vector<Module> stalks;
  for (int c = 0; c < fan.num_cones(); ++c) {
    int len = flavor == Flavor::A ? fan.rank() : fan.dim(c);
    stalks.push_back(free_module(fan, c, flavor, {zero_vec(len)}));
  }
  std::map<std::pair<int, int>, Morphism> facet;
  for (int s = 0; s < fan.num_cones(); ++s)
    for (int t : fan.facets(s)) {
      HomMat mat;
      mat.row_deg = stalks[t].gens;
      mat.col_deg = stalks[s].gens;
      mat.set(0, 0, 1, zero_vec(stalks[t].deg_len()));
      facet.emplace(std::make_pair(s, t), make_morphism(stalks[s], stalks[t], std::move(mat),
                                                        zero_vec(stalks[t].deg_len())));
    }
  return make_sheaf(fan, flavor, std::move(stalks), std::move(facet));
}

Sheaf twist_sheaf(const Sheaf& f, const LVec& m) {
  require(static_cast<int>(m.size()) == f.fan->rank(), ErrCode::LengthMismatch, "twist_sheaf: twist length");
  Sheaf out;
  out.fan = f.fan;
  out.flavor = f.flavor;
  for (int c = 0; c < f.fan->num_cones(); ++c)
    out.stalks.push_back(twisted(f.stalks[c], local_shift(*f.fan, f.flavor, c, m)));
  for (const auto& [key, mor] : f.res)
    out.res.emplace(key, twisted(mor, local_shift(*f.fan, f.flavor, key.first, m)));
  return out;
}

Sheaf direct_sum_sheaf(const std::vector<Sheaf>& parts) {
  require(!parts.empty(), ErrCode::LengthMismatch, "direct_sum_sheaf: no parts");
  const Fan& fan = *parts[0].fan;
  const Flavor flavor = parts[0].flavor;
  for (const Sheaf& p : parts)
    require(p.fan == &fan && p.flavor == flavor, ErrCode::FlavorMismatch, "direct_sum_sheaf: mixed setups");
  Sheaf out;
  out.fan = &fan;
  out.flavor = flavor;
  for (int c = 0; c < fan.num_cones(); ++c) {
    std::vector<Module> ms;
    for (const Sheaf& p : parts) ms.push_back(p.stalks[c]);
    out.stalks.push_back(direct_sum(ms));
  }
  for (const auto& [key, mor] : parts[0].res) {
    std::vector<std::vector<const Morphism*>> blocks(
        parts.size(), std::vector<const Morphism*>(parts.size(), nullptr));
    std::vector<Module> src_parts, tgt_parts;
    for (size_t i = 0; i < parts.size(); ++i) {
      blocks[i][i] = &parts[i].res.at(key);
      src_parts.push_back(parts[i].stalks[key.first]);
      tgt_parts.push_back(parts[i].stalks[key.second]);
    }
    out.res.emplace(key, direct_sum_morphism(blocks, src_parts, tgt_parts,
                                             zero_vec(out.stalks[key.second].deg_len())));
    (void)mor;
  }
  return out;
}

Sheaf delta_sheaf(const Sheaf& f) {
  require(f.flavor == Flavor::A, ErrCode::FlavorMismatch, "delta_sheaf: flavor A input required");
  Sheaf out;
  out.fan = f.fan;
  out.flavor = Flavor::B;
  for (const Module& s : f.stalks) out.stalks.push_back(delta_extension(s));
  for (const auto& [key, mor] : f.res) out.res.emplace(key, delta_extension_morphism(mor));
  return out;
}

SheafMorphism delta_sheaf_morphism(const SheafMorphism& f) {
  std::vector<Morphism> comp;
  comp.reserve(f.comp.size());
  for (const Morphism& c : f.comp) comp.push_back(delta_extension_morphism(c));
  return make_sheaf_morphism(delta_sheaf(f.src), delta_sheaf(f.tgt), std::move(comp), f.shift);
}

SheafComplex delta_sheaf_complex(const SheafComplex& c) {
  SheafComplex out;
  for (const auto& [d, t] : c.terms) out.terms.emplace(d, delta_sheaf(t));
  for (const auto& [d, f] : c.diffs) out.diffs.emplace(d, delta_sheaf_morphism(f));
  return out;
}

int hom_pieces(const Sheaf& f, const Sheaf& g, const LVec& m) {
  require(f.fan == g.fan && f.flavor == g.flavor, ErrCode::FlavorMismatch, "hom_pieces: mixed setups");
  require(static_cast<int>(m.size()) == f.fan->rank(), ErrCode::LengthMismatch, "hom_pieces: degree length");
  const Fan& fan = *f.fan;
  const int nc = fan.num_cones();

  // One unknown block per cone and source generator: the image of that
  // generator in the target stalk, already cut by the stalk relations.
  std::vector<HomSystem> sys;
  std::vector<int> cone_off{0};
  for (int c = 0; c < nc; ++c) {
    sys.push_back(module_hom_system(f.stalks[c], g.stalks[c], local_shift(fan, f.flavor, c, m)));
    cone_off.push_back(cone_off.back() + sys[c].col_off.back());
  }
  const int unknowns = cone_off[nc];

  std::vector<QMat> blocks;
  int total_rows = 0;
  for (int c = 0; c < nc; ++c) {
    if (sys[c].rows.rows() == 0) continue;
    QMat row(sys[c].rows.rows(), unknowns);
    for (int i = 0; i < row.rows(); ++i)
      for (int j = 0; j < sys[c].rows.cols(); ++j) row.at(i, cone_off[c] + j) = sys[c].rows.at(i, j);
    total_rows += row.rows();
    blocks.push_back(std::move(row));
  }

  // Compatibility over each facet pair, checked on every source generator:
  // restricting the image equals mapping the restricted generator.
  for (int sigma = 0; sigma < nc; ++sigma) {
    const Module& fs = f.stalks[sigma];
    for (int tau : fan.facets(sigma)) {
      Morphism rf = f.restriction(sigma, tau);
      Morphism rg = g.restriction(sigma, tau);
      for (int i = 0; i < fs.num_gens(); ++i) {
        LVec sdeg = add(fs.gens[i], local_shift(fan, f.flavor, sigma, m));
        LVec rowdeg = add(conv_deg(fan, f.flavor, sigma, tau, fs.gens[i]),
                          local_shift(fan, f.flavor, tau, m));
        Piece pr = piece(g.stalks[tau], rowdeg);
        if (pr.dim() == 0) continue;
        QMat row(pr.dim(), unknowns);
        QMat lhs = evaluate(rg, sdeg);
        for (int r = 0; r < lhs.rows(); ++r)
          for (int c2 = 0; c2 < lhs.cols(); ++c2)
            row.at(r, cone_off[sigma] + sys[sigma].col_off[i] + c2) = lhs.at(r, c2);
        for (const auto& [key, e] : rf.mat.entries) {
          if (key.second != i) continue;
          const int j = key.first;
          QMat term = pr.proj.mul(sys[tau].gen_piece[j].basis);
          for (int r = 0; r < term.rows(); ++r)
            for (int c2 = 0; c2 < term.cols(); ++c2)
              row.at(r, cone_off[tau] + sys[tau].col_off[j] + c2) -= e.coeff * term.at(r, c2);
        }
        total_rows += row.rows();
        blocks.push_back(std::move(row));
      }
    }
  }

  QMat cmat(total_rows, unknowns);
  int off = 0;
  for (const QMat& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < unknowns; ++j) cmat.at(off + i, j) = b.at(i, j);
    off += b.rows();
  }
  return unknowns - rank(cmat);
}

std::vector<int> open_set(const Fan& fan, const std::vector<int>& tops) {
  std::vector<int> out;
  for (int c = 0; c < fan.num_cones(); ++c)
    for (int t : tops)
      if (fan.is_face(c, t)) {
        out.push_back(c);
        break;
      }
  return out;
}

Sheaf extension_by_zero(const Sheaf& f, const std::vector<int>& z) {
  const Fan& fan = *f.fan;
  std::set<int> in(z.begin(), z.end());
  for (int c : in)
    require(c >= 0 && c < fan.num_cones(), ErrCode::ConeMismatch, "extension_by_zero: unknown cone");
  // Locally closed = convex in the face order: anything between two members
  // is a member.
  for (int a : in)
    for (int c : in) {
      if (!fan.is_face(a, c)) continue;
      for (int rho = 0; rho < fan.num_cones(); ++rho)
        if (fan.is_face(a, rho) && fan.is_face(rho, c))
          require(in.count(rho) > 0, ErrCode::NotLocallyClosed,
                  "extension_by_zero: set is not locally closed");
    }
  std::vector<Module> stalks;
  for (int c = 0; c < fan.num_cones(); ++c)
    stalks.push_back(in.count(c) ? f.stalks[c] : zero_module(fan, c, f.flavor));
  std::map<std::pair<int, int>, Morphism> facet;
  for (const auto& [key, mor] : f.res)
    if (fan.dim(key.first) == fan.dim(key.second) + 1 && in.count(key.first) && in.count(key.second))
      facet.emplace(key, mor);
  return make_sheaf(fan, f.flavor, std::move(stalks), std::move(facet));
}

SheafMorphism make_sheaf_morphism(Sheaf src, Sheaf tgt, std::vector<Morphism> comp, LVec shift) {
  require(src.fan == tgt.fan && src.flavor == tgt.flavor, ErrCode::FlavorMismatch,
          "make_sheaf_morphism: mixed setups");
  const Fan& fan = *src.fan;
  require(static_cast<int>(shift.size()) == fan.rank(), ErrCode::LengthMismatch,
          "make_sheaf_morphism: shift length");
  require(static_cast<int>(comp.size()) == fan.num_cones(), ErrCode::LengthMismatch,
          "make_sheaf_morphism: one component per cone");
  for (int c = 0; c < fan.num_cones(); ++c) {
    require(module_equal(comp[c].src, src.stalks[c]) && module_equal(comp[c].tgt, tgt.stalks[c]),
            ErrCode::InvalidMorphism, "make_sheaf_morphism: component endpoints mismatch");
    require(comp[c].shift == local_shift(fan, src.flavor, c, shift), ErrCode::InvalidMorphism,
            "make_sheaf_morphism: component shift mismatch");
  }
  for (int sigma = 0; sigma < fan.num_cones(); ++sigma)
    for (int tau : fan.facets(sigma)) {
      Morphism lhs = compose(tgt.restriction(sigma, tau), comp[sigma]);
      Morphism rhs = compose(comp[tau], src.restriction(sigma, tau));
      require(morphism_agree(lhs, rhs), ErrCode::InvalidMorphism,
              "make_sheaf_morphism: components do not commute with restrictions");
    }
  return SheafMorphism{std::move(src), std::move(tgt), std::move(comp), std::move(shift)};
}

SheafMorphism zero_sheaf_morphism(const Sheaf& src, const Sheaf& tgt, const LVec& shift) {
  std::vector<Morphism> comp;
  for (int c = 0; c < src.fan->num_cones(); ++c)
    comp.push_back(zero_morphism(src.stalks[c], tgt.stalks[c], local_shift(*src.fan, src.flavor, c, shift)));
  return make_sheaf_morphism(src, tgt, std::move(comp), shift);
}

QMat evaluate_at(const SheafMorphism& f, int cone, const LVec& m) {
  return evaluate_at_M(f.comp[cone], m);
}

SheafMorphism compose(const SheafMorphism& g, const SheafMorphism& f) {
  require(stalks_equal(f.tgt, g.src), ErrCode::InvalidMorphism, "compose: middle sheaves differ");
  std::vector<Morphism> comp;
  for (int c = 0; c < f.src.fan->num_cones(); ++c) comp.push_back(compose(g.comp[c], f.comp[c]));
  return make_sheaf_morphism(f.src, g.tgt, std::move(comp), add(f.shift, g.shift));
}

Module rebase(const Module& m, int face_cone) {
  const Fan& fan = *m.fan;
  require(face_cone == m.cone || fan.is_face(face_cone, m.cone), ErrCode::ConeMismatch,
          "rebase: not a face of the module's cone");
  if (face_cone == m.cone) return m;
  std::vector<LVec> gens = m.gens;
  HomMat rels = m.rels;
  if (m.flavor == Flavor::B) {
    for (LVec& g : gens) g = fan.project_b(m.cone, face_cone, g);
    for (LVec& r : rels.row_deg) r = fan.project_b(m.cone, face_cone, r);
    for (LVec& c : rels.col_deg) c = fan.project_b(m.cone, face_cone, c);
    for (auto& [key, e] : rels.entries) e.deg = fan.project_b(m.cone, face_cone, e.deg);
  }
  return make_module(fan, face_cone, m.flavor, std::move(gens), std::move(rels));
}

bool is_coherent(const Sheaf& f) {
  const Fan& fan = *f.fan;
  for (int sigma = 0; sigma < fan.num_cones(); ++sigma)
    for (int tau : fan.facets(sigma)) {
      // The structure map: the stalk over sigma, base-changed to the face
      // algebra, mapped by the restriction matrix.
      Module rb = rebase(f.stalks[sigma], tau);
      HomMat mat = f.res.at({sigma, tau}).mat;
      mat.col_deg = rb.gens;
      Morphism st =
          make_morphism(rb, f.stalks[tau], std::move(mat), zero_vec(f.stalks[tau].deg_len()));
      for (const LVec& t : f.stalks[tau].gens)
        if (rank(evaluate(st, t)) < piece_dim(f.stalks[tau], t)) return false;
      if (!is_zero_module(kernel_presentation(st).ker)) return false;
    }
  return true;
}

Sheaf pullback(const FanMorphism& fm, const Sheaf& f) {
  require(f.fan == fm.tgt, ErrCode::ConeMismatch, "pullback: sheaf must live on the target fan");
  const Fan& src = *fm.src;
  const Fan& tgt = *fm.tgt;
  // Transport of a stalk degree to a source cone's grading: pull the
  // character back, lifting through the image cone's section for flavor B.
  auto transport = [&](int scone, const LVec& d) {
    if (f.flavor == Flavor::A) return fm.char_pullback(d);
    return src.b_degree(scone, fm.char_pullback(tgt.lift_b_degree(fm.image_cone[scone], d)));
  };
  std::vector<Module> stalks;
  for (int c = 0; c < src.num_cones(); ++c) {
    const Module& s = f.stalks[fm.image_cone[c]];
    std::vector<LVec> gens;
    for (const LVec& g : s.gens) gens.push_back(transport(c, g));
    HomMat rels;
    rels.row_deg = gens;
    for (const LVec& d : s.rels.col_deg) rels.col_deg.push_back(transport(c, d));
    for (const auto& [key, e] : s.rels.entries)
      rels.entries[key] = ScaledChar{e.coeff, transport(c, e.deg)};
    stalks.push_back(make_module(src, c, f.flavor, std::move(gens), std::move(rels)));
  }
  std::map<std::pair<int, int>, Morphism> facet;
  for (int sigma = 0; sigma < src.num_cones(); ++sigma)
    for (int tau : src.facets(sigma)) {
      Morphism r = f.restriction(fm.image_cone[sigma], fm.image_cone[tau]);
      HomMat mat;
      mat.row_deg = stalks[tau].gens;
      mat.col_deg = stalks[sigma].gens;
      for (const auto& [key, e] : r.mat.entries)
        mat.entries[key] = ScaledChar{e.coeff, transport(tau, e.deg)};
      facet.emplace(std::make_pair(sigma, tau),
                    make_morphism(stalks[sigma], stalks[tau], std::move(mat),
                                  zero_vec(stalks[tau].deg_len())));
    }
  return make_sheaf(src, f.flavor, std::move(stalks), std::move(facet));
}

int PushforwardView::piece_dim(int tgt_cone, const LVec& src_m) const {
  const Fan& sfan = *fm->src;
  require(tgt_cone >= 0 && tgt_cone < fm->tgt->num_cones(), ErrCode::ConeMismatch,
          "pushforward: unknown target cone");
  // Preimage of the target open: source cones whose image cone is a face.
  std::vector<int> pos(sfan.num_cones(), -1);
  std::vector<int> members;
  for (int c = 0; c < sfan.num_cones(); ++c)
    if (fm->tgt->is_face(fm->image_cone[c], tgt_cone)) {
      pos[c] = static_cast<int>(members.size());
      members.push_back(c);
    }
  std::vector<Piece> pc;
  std::vector<int> off{0};
  for (int c : members) {
    pc.push_back(piece_at_M(f->stalks[c], src_m));
    off.push_back(off.back() + pc.back().dim());
  }
  const int unknowns = off.back();
  std::vector<QMat> blocks;
  int total_rows = 0;
  for (int sigma : members)
    for (int tau : sfan.facets(sigma)) {
      // The preimage poset is closed under faces, so every facet is present.
      QMat e = evaluate_at_M(f->restriction(sigma, tau), src_m);
      QMat row(e.rows(), unknowns);
      for (int r = 0; r < e.rows(); ++r) {
        for (int c2 = 0; c2 < e.cols(); ++c2) row.at(r, off[pos[sigma]] + c2) = e.at(r, c2);
        row.at(r, off[pos[tau]] + r) -= 1;
      }
      total_rows += row.rows();
      blocks.push_back(std::move(row));
    }
  QMat cmat(total_rows, unknowns);
  int roff = 0;
  for (const QMat& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < unknowns; ++j) cmat.at(roff + i, j) = b.at(i, j);
    roff += b.rows();
  }
  return unknowns - rank(cmat);
}

PushforwardView pushforward(const FanMorphism& fm, const Sheaf& f) {
  require(f.fan == fm.src, ErrCode::ConeMismatch, "pushforward: sheaf must live on the source fan");
  return PushforwardView{&fm, &f};
}

namespace {

// One summand of a projective cover together with its augmentation data: for
// every cone it covers, the local generator degree and the gen-level
// coefficients of its image in the target stalk.
struct CoverCol {
  LVec deg;
  std::vector<Rat> coeff;
};

struct Cover {
  Sheaf p;
  SheafMorphism eps;
};

// Greedy projective cover: walk the cones from largest to smallest and add a
// standard open summand for every target generator class not yet hit at its
// own degree. Since summand stalks are free of rank one, the active columns
// span the image piece exactly, so the test is complete.
Cover cover_sheaf(const Sheaf& t) {
  const Fan& fan = *t.fan;
  std::vector<std::pair<int, LVec>> summands;  // cone and M-twist
  std::vector<std::vector<CoverCol>> cols(fan.num_cones());
  for (int sigma = fan.num_cones() - 1; sigma >= 0; --sigma) {
    const Module& ts = t.stalks[sigma];
    for (int i = 0; i < ts.num_gens(); ++i) {
      const LVec& d = ts.gens[i];
      Piece p = piece(ts, d);
      QMat cls(p.dim(), 1);
      for (int r = 0; r < p.dim(); ++r) cls.at(r, 0) = p.proj.at(r, i);
      if (cls.is_zero()) continue;
      std::vector<int> active;
      for (size_t k = 0; k < cols[sigma].size(); ++k)
        if (ts.member(sub(d, cols[sigma][k].deg))) active.push_back(static_cast<int>(k));
      QMat v(p.dim(), static_cast<int>(active.size()));
      for (size_t k = 0; k < active.size(); ++k)
        for (int r = 0; r < p.dim(); ++r) {
          Rat acc = 0;
          for (int j = 0; j < ts.num_gens(); ++j) acc += p.proj.at(r, j) * cols[sigma][active[k]].coeff[j];
          v.at(r, static_cast<int>(k)) = acc;
        }
      if (spans(v, cls)) continue;
      LVec twist = t.flavor == Flavor::A ? d : fan.lift_b_degree(sigma, d);
      summands.emplace_back(sigma, twist);
      for (int c = 0; c < fan.num_cones(); ++c) {
        if (!fan.is_face(c, sigma)) continue;
        CoverCol col;
        col.deg = local_shift(fan, t.flavor, c, twist);
        col.coeff.assign(t.stalks[c].num_gens(), Rat(0));
        if (c == sigma) {
          col.coeff[i] = 1;
        } else {
          const Morphism& r = t.res.at({sigma, c});
          for (const auto& [key, e] : r.mat.entries)
            if (key.second == i) col.coeff[key.first] = e.coeff;
        }
        cols[c].push_back(std::move(col));
      }
    }
  }

  Cover out;
  if (summands.empty()) {
    out.p = zero_sheaf(fan, t.flavor);
    out.eps = zero_sheaf_morphism(out.p, t, zero_vec(fan.rank()));
    return out;
  }
  std::vector<Sheaf> parts;
  for (const auto& [cone, twist] : summands) parts.push_back(standard_open(fan, t.flavor, cone, twist));
  out.p = direct_sum_sheaf(parts);
  std::vector<Morphism> comp;
  for (int c = 0; c < fan.num_cones(); ++c) {
    HomMat mat;
    mat.row_deg = t.stalks[c].gens;
    mat.col_deg = out.p.stalks[c].gens;
    for (size_t k = 0; k < cols[c].size(); ++k)
      for (int j = 0; j < t.stalks[c].num_gens(); ++j)
        if (cols[c][k].coeff[j] != 0)
          mat.set(j, static_cast<int>(k), cols[c][k].coeff[j],
                  sub(cols[c][k].deg, t.stalks[c].gens[j]));
    comp.push_back(make_morphism(out.p.stalks[c], t.stalks[c], std::move(mat),
                                 zero_vec(t.stalks[c].deg_len())));
  }
  out.eps = make_sheaf_morphism(out.p, t, std::move(comp), zero_vec(fan.rank()));
  return out;
}

struct KernelSheaf {
  Sheaf k;
  SheafMorphism incl;
};

// Stalkwise kernels of a degree-zero sheaf morphism, glued by solving for the
// restriction of each kernel generator inside the face kernel degreewise.
KernelSheaf kernel_sheaf(const SheafMorphism& eps) {
  const Fan& fan = *eps.src.fan;
  std::vector<KernelResult> kr;
  for (int c = 0; c < fan.num_cones(); ++c) kr.push_back(kernel_presentation(eps.comp[c]));
  std::vector<Module> stalks;
  for (int c = 0; c < fan.num_cones(); ++c) stalks.push_back(kr[c].ker);
  std::map<std::pair<int, int>, Morphism> facet;
  for (int sigma = 0; sigma < fan.num_cones(); ++sigma)
    for (int tau : fan.facets(sigma)) {
      Morphism mid = compose(eps.src.res.at({sigma, tau}), kr[sigma].incl);
      const Module& kt = kr[tau].ker;
      const Module& pt = eps.src.stalks[tau];
      HomMat mat;
      mat.row_deg = kt.gens;
      mat.col_deg = kr[sigma].ker.gens;
      for (int s = 0; s < kr[sigma].ker.num_gens(); ++s) {
        LVec mu = conv_deg(fan, eps.src.flavor, sigma, tau, kr[sigma].ker.gens[s]);
        std::vector<Rat> w(pt.num_gens(), Rat(0));
        for (const auto& [key, e] : mid.mat.entries)
          if (key.second == s) w[key.first] = e.coeff;
        Piece pp = piece(pt, mu);
        std::vector<Rat> cls(pp.dim(), Rat(0));
        for (int r = 0; r < pp.dim(); ++r)
          for (int j = 0; j < pt.num_gens(); ++j) cls[r] += pp.proj.at(r, j) * w[j];
        QMat e = evaluate(kr[tau].incl, mu);
        std::vector<Rat> x;
        require(solve(e, cls, &x), ErrCode::Internal,
                "kernel_sheaf: restricted kernel element misses the face kernel");
        Piece pk = piece(kt, mu);
        for (int j = 0; j < kt.num_gens(); ++j) {
          Rat y = 0;
          for (int c2 = 0; c2 < pk.dim(); ++c2) y += pk.basis.at(j, c2) * x[c2];
          if (y != 0) mat.set(j, s, y, sub(mu, kt.gens[j]));
        }
      }
      facet.emplace(std::make_pair(sigma, tau),
                    make_morphism(kr[sigma].ker, kt, std::move(mat), zero_vec(kt.deg_len())));
    }
  KernelSheaf out;
  out.k = make_sheaf(fan, eps.src.flavor, std::move(stalks), std::move(facet));
  std::vector<Morphism> comp;
  for (int c = 0; c < fan.num_cones(); ++c) comp.push_back(kr[c].incl);
  out.incl = make_sheaf_morphism(out.k, eps.src, std::move(comp), zero_vec(fan.rank()));
  return out;
}

}  // namespace

ResolutionResult projective_resolution(const Sheaf& f, int max_length) {
  ResolutionResult out;
  Cover c0 = cover_sheaf(f);
  out.cx.terms.emplace(0, c0.p);
  out.aug = c0.eps;
  SheafMorphism eps = std::move(c0.eps);
  int k = 0;
  while (true) {
    KernelSheaf ks = kernel_sheaf(eps);
    if (is_zero_sheaf(ks.k)) break;
    require(k < max_length, ErrCode::ResolutionTooLong, "projective_resolution: exceeded maximum length");
    Cover ck = cover_sheaf(ks.k);
    ++k;
    out.cx.terms.emplace(-k, ck.p);
    out.cx.diffs.emplace(-k, compose(ks.incl, ck.eps));
    eps = std::move(ck.eps);
  }
  out.length = k;
  return out;
}

int CoSheaf::costalk_dim(int c, const LVec& m) const {
  return piece_dim_at_M(under.stalks[c], neg(m));
}

QMat CoSheaf::coevaluate(int sigma, int tau, const LVec& m) const {
  return evaluate_at_M(under.restriction(sigma, tau), neg(m)).transpose();
}

CoSheafMorphism make_cosheaf_morphism(CoSheaf src, CoSheaf tgt, SheafMorphism carrier, LVec shift) {
  require(src.under.fan == tgt.under.fan && src.under.flavor == tgt.under.flavor,
          ErrCode::FlavorMismatch, "make_cosheaf_morphism: mixed setups");
  require(carrier.shift == shift, ErrCode::InvalidMorphism, "make_cosheaf_morphism: carrier shift mismatch");
  require(stalks_equal(carrier.src, tgt.under) && stalks_equal(carrier.tgt, src.under),
          ErrCode::InvalidMorphism, "make_cosheaf_morphism: carrier endpoints mismatch");
  return CoSheafMorphism{std::move(src), std::move(tgt), std::move(carrier), std::move(shift)};
}

QMat evaluate_at(const CoSheafMorphism& f, int cone, const LVec& m) {
  return evaluate_at_M(f.carrier.comp[cone], neg(add(m, f.shift))).transpose();
}

}  // namespace torkos
