#include "homology.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "error.hpp"

namespace torkos {

namespace {

template <typename Complex, typename Dim, typename Eval>
EvaluatedComplex evaluate_terms(const Complex& c, Dim dim_of, Eval eval_diff) {
  EvaluatedComplex ec;
  if (c.terms.empty()) return ec;
  int lo = c.terms.begin()->first;
  int hi = c.terms.rbegin()->first;
  ec.lo = lo;
  for (int d = lo; d <= hi; ++d) {
    auto it = c.terms.find(d);
    ec.dims.push_back(it == c.terms.end() ? 0 : dim_of(it->second));
  }
  for (int d = lo; d < hi; ++d) {
    auto it = c.diffs.find(d);
    if (it == c.diffs.end()) {
      ec.mats.push_back(QMat(ec.dims[d + 1 - lo], ec.dims[d - lo]));
    } else {
      ec.mats.push_back(eval_diff(it->second));
    }
  }
  return ec;
}

}  // namespace

EvaluatedComplex evaluate_complex(const SheafComplex& c, int cone, const LVec& m) {
  return evaluate_terms(
      c, [&](const Sheaf& f) { return f.piece_dim(cone, m); },
      [&](const SheafMorphism& d) { return evaluate_at(d, cone, m); });
}

EvaluatedComplex evaluate_complex(const CoSheafComplex& c, int cone, const LVec& m) {
  return evaluate_terms(
      c, [&](const CoSheaf& f) { return f.costalk_dim(cone, m); },
      [&](const CoSheafMorphism& d) { return evaluate_at(d, cone, m); });
}

std::vector<int> cohomology_dims(const EvaluatedComplex& ec) {
  int n = static_cast<int>(ec.dims.size());
  require(static_cast<int>(ec.mats.size()) == std::max(0, n - 1), ErrCode::NotAComplex,
          "cohomology_dims: expected one map per consecutive pair of terms");
  std::vector<int> ranks;
  for (int i = 0; i + 1 < n; ++i) {
    const QMat& d = ec.mats[i];
    require(d.rows() == ec.dims[i + 1] && d.cols() == ec.dims[i], ErrCode::NotAComplex,
            "cohomology_dims: map leaving degree " + std::to_string(ec.lo + i) +
                " has the wrong shape");
    if (i > 0)
      require(d.mul(ec.mats[i - 1]).is_zero(), ErrCode::NotAComplex,
              "cohomology_dims: maps leaving degrees " + std::to_string(ec.lo + i - 1) + " and " +
                  std::to_string(ec.lo + i) + " do not compose to zero");
    ranks.push_back(rank(d));
  }
  std::vector<int> h(n, 0);
  for (int i = 0; i < n; ++i) {
    int r_out = i < static_cast<int>(ranks.size()) ? ranks[i] : 0;
    int r_in = i > 0 ? ranks[i - 1] : 0;
    h[i] = ec.dims[i] - r_out - r_in;
  }
  return h;
}

bool is_exact(const EvaluatedComplex& ec) {
  for (int d : cohomology_dims(ec))
    if (d != 0) return false;
  return true;
}

std::vector<LVec> degree_window(const std::vector<LVec>& degrees, int rank, int radius) {
  for (const LVec& d : degrees)
    require(static_cast<int>(d.size()) == rank, ErrCode::RankMismatch,
            "degree_window: degree of wrong length");
  LVec lo(rank, 0), hi(rank, 0);
  if (!degrees.empty()) {
    lo = degrees.front();
    hi = degrees.front();
    for (const LVec& d : degrees)
      for (int i = 0; i < rank; ++i) {
        lo[i] = std::min(lo[i], d[i]);
        hi[i] = std::max(hi[i], d[i]);
      }
  }
  for (int i = 0; i < rank; ++i) {
    lo[i] -= radius;
    hi[i] += radius;
  }
  std::vector<LVec> out;
  LVec cur = lo;
  while (true) {
    out.push_back(cur);
    int i = rank - 1;
    while (i >= 0 && cur[i] == hi[i]) {
      cur[i] = lo[i];
      --i;
    }
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

std::vector<LVec> chamber_representatives(const Fan& fan, const std::vector<LVec>& refs,
                                          int radius) {
  std::vector<LVec> base = refs.empty() ? std::vector<LVec>{LVec(fan.rank(), 0)} : refs;
  // Thresholds per ray, deduplicated; the pattern of a point is the list of
  // signs of <m, r> - c over all (ray, threshold) pairs.
  std::vector<std::pair<int, long long>> walls;
  for (int r = 0; r < fan.num_rays(); ++r) {
    std::set<long long> cs;
    cs.insert(0);
    for (const LVec& t : base) cs.insert(dot(t, fan.ray(r)));
    for (long long c : cs) walls.emplace_back(r, c);
  }
  std::vector<LVec> scan = base;
  scan.push_back(LVec(fan.rank(), 0));
  std::vector<LVec> out;
  std::set<std::vector<int>> seen;
  for (const LVec& m : degree_window(scan, fan.rank(), radius)) {
    std::vector<int> pat;
    pat.reserve(walls.size());
    for (const auto& [r, c] : walls) {
      long long v = dot(m, fan.ray(r)) - c;
      pat.push_back(v > 0 ? 1 : (v < 0 ? -1 : 0));
    }
    if (seen.insert(pat).second) out.push_back(m);
  }
  return out;
}

}  // namespace torkos
