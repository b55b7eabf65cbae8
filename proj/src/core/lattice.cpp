#include "lattice.hpp"

#include <algorithm>
#include <numeric>

namespace torkos {

long long dot(const LVec& a, const LVec& b) {
  require(a.size() == b.size(), ErrCode::LengthMismatch, "dot: length mismatch");
  long long s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

LVec add(const LVec& a, const LVec& b) {
  require(a.size() == b.size(), ErrCode::LengthMismatch, "add: length mismatch");
  LVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

LVec sub(const LVec& a, const LVec& b) {
  require(a.size() == b.size(), ErrCode::LengthMismatch, "sub: length mismatch");
  LVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

LVec neg(const LVec& a) {
  LVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

LVec scale(long long c, const LVec& a) {
  LVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

bool is_zero(const LVec& a) {
  return std::all_of(a.begin(), a.end(), [](long long x) { return x == 0; });
}

LVec zero_vec(int n) { return LVec(static_cast<size_t>(n), 0); }

long long gcd_all(const LVec& a) {
  long long g = 0;
  for (long long x : a) g = std::gcd(g, x < 0 ? -x : x);
  return g;
}

LVec join(const LVec& a, const LVec& b) {
  require(a.size() == b.size(), ErrCode::LengthMismatch, "join: length mismatch");
  LVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

bool leq_all(const LVec& a, const LVec& b) {
  require(a.size() == b.size(), ErrCode::LengthMismatch, "leq_all: length mismatch");
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

bool geq_zero(const LVec& a) {
  return std::all_of(a.begin(), a.end(), [](long long x) { return x >= 0; });
}

namespace {

using IMat = std::vector<std::vector<Int>>;

IMat identity_imat(int n) {
  IMat m(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

struct SnfState {
  IMat a;
  IMat u, u_inv;  // row transforms
  IMat v, v_inv;  // column transforms
  int nr, nc;

  void swap_rows(int i, int j) {
    if (i == j) return;
    std::swap(a[i], a[j]);
    std::swap(u[i], u[j]);
    for (int k = 0; k < nr; ++k) std::swap(u_inv[k][i], u_inv[k][j]);
  }
  void swap_cols(int i, int j) {
    if (i == j) return;
    for (int k = 0; k < nr; ++k) std::swap(a[k][i], a[k][j]);
    for (int k = 0; k < nc; ++k) std::swap(v[k][i], v[k][j]);
    std::swap(v_inv[i], v_inv[j]);
  }
  // row i -= q * row j
  void add_row(int i, int j, const Int& q) {
    if (q == 0) return;
    for (int k = 0; k < nc; ++k) a[i][k] -= q * a[j][k];
    for (int k = 0; k < nr; ++k) u[i][k] -= q * u[j][k];
    for (int k = 0; k < nr; ++k) u_inv[k][j] += q * u_inv[k][i];
  }
  // col i -= q * col j
  void add_col(int i, int j, const Int& q) {
    if (q == 0) return;
    for (int k = 0; k < nr; ++k) a[k][i] -= q * a[k][j];
    for (int k = 0; k < nc; ++k) v[k][i] -= q * v[k][j];
    for (int k = 0; k < nc; ++k) v_inv[j][k] += q * v_inv[i][k];
  }
  void negate_row(int i) {
    for (int k = 0; k < nc; ++k) a[i][k] = -a[i][k];
    for (int k = 0; k < nr; ++k) u[i][k] = -u[i][k];
    for (int k = 0; k < nr; ++k) u_inv[k][i] = -u_inv[k][i];
  }
};

}  // namespace

SmithResult smith_normal_form(const std::vector<LVec>& m, int ncols) {
  int nr = static_cast<int>(m.size());
  int nc = ncols;
  SnfState s;
  s.nr = nr;
  s.nc = nc;
  s.a.assign(nr, std::vector<Int>(nc, 0));
  for (int i = 0; i < nr; ++i) {
    require(static_cast<int>(m[i].size()) == nc, ErrCode::LengthMismatch, "smith: ragged input");
    for (int j = 0; j < nc; ++j) s.a[i][j] = m[i][j];
  }
  s.u = identity_imat(nr);
  s.u_inv = identity_imat(nr);
  s.v = identity_imat(nc);
  s.v_inv = identity_imat(nc);

  int t = 0;
  while (t < nr && t < nc) {
    // Smallest nonzero entry in the remaining block as pivot.
    int pi = -1, pj = -1;
    for (int i = t; i < nr; ++i)
      for (int j = t; j < nc; ++j) {
        if (s.a[i][j] == 0) continue;
        if (pi < 0 || abs(s.a[i][j]) < abs(s.a[pi][pj])) { pi = i; pj = j; }
      }
    if (pi < 0) break;
    s.swap_rows(t, pi);
    s.swap_cols(t, pj);

    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (int i = t + 1; i < nr; ++i) {
        if (s.a[i][t] == 0) continue;
        Int q = s.a[i][t] / s.a[t][t];
        s.add_row(i, t, q);
        if (s.a[i][t] != 0) {  // remainder became the smaller pivot
          s.swap_rows(t, i);
          dirty = true;
        }
      }
      for (int j = t + 1; j < nc; ++j) {
        if (s.a[t][j] == 0) continue;
        Int q = s.a[t][j] / s.a[t][t];
        s.add_col(j, t, q);
        if (s.a[t][j] != 0) {
          s.swap_cols(t, j);
          dirty = true;
        }
      }
      if (dirty) continue;
      // Pivot must divide everything that remains.
      for (int i = t + 1; i < nr && !dirty; ++i)
        for (int j = t + 1; j < nc && !dirty; ++j)
          if (s.a[i][j] % s.a[t][t] != 0) {
            s.add_row(t, i, Int(-1));  // fold row i into the pivot row
            dirty = true;
          }
    }
    if (s.a[t][t] < 0) s.negate_row(t);
    ++t;
  }

  SmithResult r;
  for (int i = 0; i < t; ++i) r.factors.push_back(s.a[i][i]);
  r.u = s.u;
  r.v = s.v;
  return r;
}

BasisCompletion complete_to_basis(const std::vector<LVec>& rows, int n) {
  int d = static_cast<int>(rows.size());
  require(d <= n, ErrCode::RankMismatch, "complete_to_basis: too many rows");

  // Redo SNF keeping the inverse transforms (smith_normal_form discards them).
  SnfState s;
  s.nr = d;
  s.nc = n;
  s.a.assign(d, std::vector<Int>(n, 0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j) s.a[i][j] = rows[i][j];
  s.u = identity_imat(d);
  s.u_inv = identity_imat(d);
  s.v = identity_imat(n);
  s.v_inv = identity_imat(n);
  int t = 0;
  while (t < d && t < n) {
    int pi = -1, pj = -1;
    for (int i = t; i < d; ++i)
      for (int j = t; j < n; ++j) {
        if (s.a[i][j] == 0) continue;
        if (pi < 0 || abs(s.a[i][j]) < abs(s.a[pi][pj])) { pi = i; pj = j; }
      }
    require(pi >= 0, ErrCode::RankMismatch, "complete_to_basis: rows not independent");
    s.swap_rows(t, pi);
    s.swap_cols(t, pj);
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (int i = t + 1; i < d; ++i) {
        if (s.a[i][t] == 0) continue;
        Int q = s.a[i][t] / s.a[t][t];
        s.add_row(i, t, q);
        if (s.a[i][t] != 0) { s.swap_rows(t, i); dirty = true; }
      }
      for (int j = t + 1; j < n; ++j) {
        if (s.a[t][j] == 0) continue;
        Int q = s.a[t][j] / s.a[t][t];
        s.add_col(j, t, q);
        if (s.a[t][j] != 0) { s.swap_cols(t, j); dirty = true; }
      }
      if (dirty) continue;
      for (int i = t + 1; i < d && !dirty; ++i)
        for (int j = t + 1; j < n && !dirty; ++j)
          if (s.a[i][j] % s.a[t][t] != 0) { s.add_row(t, i, Int(-1)); dirty = true; }
    }
    if (s.a[t][t] < 0) s.negate_row(t);
    require(s.a[t][t] == 1, ErrCode::RankMismatch, "complete_to_basis: rows are not part of a basis");
    ++t;
  }
  require(t == d, ErrCode::RankMismatch, "complete_to_basis: rows not independent");

  // With u a v = [I 0]: basis rows = [[u^-1,0],[0,I]] v^-1, dual cols = v [[u,0],[0,I]].
  BasisCompletion out;
  out.basis.assign(n, zero_vec(n));
  out.dual.assign(n, zero_vec(n));
  for (int k = 0; k < n; ++k) {
    std::vector<Int> row(n, 0), col(n, 0);
    if (k < d) {
      for (int j = 0; j < d; ++j) {
        if (s.u_inv[k][j] == 0) continue;
        for (int c = 0; c < n; ++c) row[c] += s.u_inv[k][j] * s.v_inv[j][c];
      }
      for (int j = 0; j < d; ++j) {
        if (s.u[j][k] == 0) continue;
        for (int c = 0; c < n; ++c) col[c] += s.v[c][j] * s.u[j][k];
      }
    } else {
      for (int c = 0; c < n; ++c) row[c] = s.v_inv[k][c];
      for (int c = 0; c < n; ++c) col[c] = s.v[c][k];
    }
    for (int c = 0; c < n; ++c) {
      out.basis[k][c] = static_cast<long long>(row[c]);
      out.dual[k][c] = static_cast<long long>(col[c]);
    }
  }
  for (int i = 0; i < d; ++i)
    require(out.basis[i] == rows[i], ErrCode::Internal, "complete_to_basis: completion lost input rows");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      require(dot(out.dual[i], out.basis[j]) == (i == j ? 1 : 0), ErrCode::Internal,
              "complete_to_basis: dual basis check failed");
  return out;
}

}  // namespace torkos
