#include "syzygy.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace torkos {

namespace {

std::vector<LVec> join_closure(const std::vector<LVec>& degs) {
  std::set<LVec> out(degs.begin(), degs.end());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<LVec> cur(out.begin(), out.end());
    for (size_t a = 0; a < cur.size(); ++a)
      for (size_t b = a + 1; b < cur.size(); ++b)
        if (out.insert(join(cur[a], cur[b])).second) grew = true;
  }
  std::vector<LVec> res(out.begin(), out.end());
  // Ascending coordinate sum is a linear extension of the coordinatewise
  // order; lex breaks ties deterministically.
  std::stable_sort(res.begin(), res.end(), [](const LVec& a, const LVec& b) {
    long long sa = std::accumulate(a.begin(), a.end(), 0LL);
    long long sb = std::accumulate(b.begin(), b.end(), 0LL);
    if (sa != sb) return sa < sb;
    return a < b;
  });
  return res;
}

}  // namespace

std::vector<SyzygyGen> syzygy_basis(const HomMat& m) {
  std::vector<SyzygyGen> gens;
  if (m.cols() == 0) return gens;
  for (const LVec& x : join_closure(m.col_deg)) {
    std::vector<int> active;
    for (int j = 0; j < m.cols(); ++j)
      if (leq_all(m.col_deg[j], x)) active.push_back(j);
    QMat a(m.rows(), static_cast<int>(active.size()));
    for (int k = 0; k < static_cast<int>(active.size()); ++k)
      for (const auto& [key, e] : m.entries)
        if (key.second == active[k]) a.at(key.first, k) = e.coeff;
    QMat ker = kernel_basis(a);
    if (ker.cols() == 0) continue;
    // Span of the generators already valid at x, as full-length columns.
    QMat have(m.cols(), 0);
    for (const SyzygyGen& g : gens) {
      if (!leq_all(g.deg, x)) continue;
      QMat col(m.cols(), 1);
      for (int j = 0; j < m.cols(); ++j) col.at(j, 0) = g.coeffs[j];
      have = have.hcat(col);
    }
    int have_rank = rank(have);
    for (int c = 0; c < ker.cols(); ++c) {
      QMat col(m.cols(), 1);
      for (int k = 0; k < static_cast<int>(active.size()); ++k) col.at(active[k], 0) = ker.at(k, c);
      QMat trial = have.hcat(col);
      int r = rank(trial);
      if (r > have_rank) {
        have = std::move(trial);
        have_rank = r;
        SyzygyGen g;
        g.deg = x;
        g.coeffs.resize(m.cols());
        for (int j = 0; j < m.cols(); ++j) g.coeffs[j] = col.at(j, 0);
        gens.push_back(std::move(g));
      }
    }
  }
  return gens;
}

namespace {

// Kernel presentation in flavor B, same cone, zero shift. Stage 1 finds
// generators of ker(Free(src gens) -> tgt) as syzygies of [matrix | tgt
// relations] projected to the matrix block; images in src then generate
// ker(f). Stage 2 presents the relations among those images as syzygies of
// [stage-1 columns | src relations] projected to the first block.
KernelResult kernel_presentation_b(const Morphism& f) {
  const Module& x = f.src;
  const Module& y = f.tgt;
  const int nx = x.num_gens();

  HomMat stage1;
  stage1.row_deg = y.gens;
  stage1.col_deg = x.gens;
  stage1.col_deg.insert(stage1.col_deg.end(), y.rels.col_deg.begin(), y.rels.col_deg.end());
  for (const auto& [key, e] : f.mat.entries) stage1.entries[key] = e;
  for (const auto& [key, e] : y.rels.entries) stage1.entries[{key.first, key.second + nx}] = e;

  std::vector<LVec> ker_gens;
  std::vector<std::vector<Rat>> cols;  // inclusion columns, length nx
  for (const SyzygyGen& s : syzygy_basis(stage1)) {
    std::vector<Rat> head(s.coeffs.begin(), s.coeffs.begin() + nx);
    if (std::all_of(head.begin(), head.end(), [](const Rat& r) { return r == 0; })) continue;
    ker_gens.push_back(s.deg);
    cols.push_back(std::move(head));
  }
  const int nk = static_cast<int>(ker_gens.size());

  HomMat stage2;
  stage2.row_deg = x.gens;
  stage2.col_deg = ker_gens;
  stage2.col_deg.insert(stage2.col_deg.end(), x.rels.col_deg.begin(), x.rels.col_deg.end());
  for (int k = 0; k < nk; ++k)
    for (int i = 0; i < nx; ++i)
      if (cols[k][i] != 0) stage2.entries[{i, k}] = ScaledChar{cols[k][i], sub(ker_gens[k], x.gens[i])};
  for (const auto& [key, e] : x.rels.entries) stage2.entries[{key.first, key.second + nk}] = e;

  HomMat ker_rels;
  ker_rels.row_deg = ker_gens;
  for (const SyzygyGen& s : syzygy_basis(stage2)) {
    bool nonzero = false;
    for (int k = 0; k < nk; ++k)
      if (s.coeffs[k] != 0) nonzero = true;
    if (!nonzero) continue;
    int j = ker_rels.cols();
    ker_rels.col_deg.push_back(s.deg);
    for (int k = 0; k < nk; ++k)
      if (s.coeffs[k] != 0) ker_rels.entries[{k, j}] = ScaledChar{s.coeffs[k], sub(s.deg, ker_gens[k])};
  }

  KernelResult out;
  out.ker = make_module(*x.fan, x.cone, Flavor::B, ker_gens, std::move(ker_rels));
  HomMat incl;
  incl.row_deg = x.gens;
  incl.col_deg = ker_gens;
  for (int k = 0; k < nk; ++k)
    for (int i = 0; i < nx; ++i)
      if (cols[k][i] != 0) incl.entries[{i, k}] = ScaledChar{cols[k][i], sub(ker_gens[k], x.gens[i])};
  out.incl = make_morphism(out.ker, x, std::move(incl), zero_vec(x.deg_len()));
  return out;
}

}  // namespace

KernelResult kernel_presentation(const Morphism& f) {
  require(is_zero(f.shift), ErrCode::Unsupported, "kernel_presentation: nonzero shift");
  require(f.src.cone == f.tgt.cone, ErrCode::ConeMismatch, "kernel_presentation: cross-cone morphism");
  if (f.src.flavor == Flavor::B) return kernel_presentation_b(f);

  // Flavor A: regrade to the cone's own coordinates, compute there, and pull
  // the degrees back through the fixed linear section of M -> M_sigma. Any
  // preimage degree works because activity only depends on ray pairings;
  // the section keeps the choice canonical.
  KernelResult kb = kernel_presentation_b(delta_extension_morphism(f));
  const Fan* fan = f.src.fan;
  const int cone = f.src.cone;
  auto lift = [&](const LVec& d) { return fan->lift_b_degree(cone, d); };

  std::vector<LVec> gens;
  for (const LVec& g : kb.ker.gens) gens.push_back(lift(g));
  HomMat rels;
  rels.row_deg = gens;
  for (const LVec& c : kb.ker.rels.col_deg) rels.col_deg.push_back(lift(c));
  for (const auto& [key, e] : kb.ker.rels.entries)
    rels.entries[key] = ScaledChar{e.coeff, lift(e.deg)};

  KernelResult out;
  out.ker = make_module(*fan, cone, Flavor::A, gens, std::move(rels));
  HomMat incl;
  incl.row_deg = f.src.gens;
  incl.col_deg = gens;
  for (const auto& [key, e] : kb.incl.mat.entries)
    incl.entries[key] = ScaledChar{e.coeff, sub(gens[key.second], f.src.gens[key.first])};
  out.incl = make_morphism(out.ker, f.src, std::move(incl), zero_vec(fan->rank()));
  return out;
}

}  // namespace torkos
