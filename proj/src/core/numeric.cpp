#include "numeric.hpp"

#include <algorithm>

namespace torkos {

std::string rat_to_string(const Rat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    require(den != 0, ErrCode::Parse, "rational with zero denominator: " + s);
    return Rat(num, den);
  } catch (const std::exception& e) {
    fail(ErrCode::Parse, "bad rational '" + s + "': " + e.what());
  }
}

QMat QMat::identity(int n) {
  QMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

bool QMat::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const Rat& x) { return x == 0; });
}

QMat QMat::transpose() const {
  QMat t(nc_, nr_);
  for (int i = 0; i < nr_; ++i)
    for (int j = 0; j < nc_; ++j) t.at(j, i) = at(i, j);
  return t;
}

QMat QMat::mul(const QMat& other) const {
  require(nc_ == other.nr_, ErrCode::Internal, "QMat::mul shape mismatch");
  QMat r(nr_, other.nc_);
  for (int i = 0; i < nr_; ++i)
    for (int k = 0; k < nc_; ++k) {
      const Rat& x = at(i, k);
      if (x == 0) continue;
      for (int j = 0; j < other.nc_; ++j) {
        const Rat& y = other.at(k, j);
        if (y != 0) r.at(i, j) += x * y;
      }
    }
  return r;
}

QMat QMat::hcat(const QMat& other) const {
  require(nr_ == other.nr_, ErrCode::Internal, "QMat::hcat shape mismatch");
  QMat r(nr_, nc_ + other.nc_);
  for (int i = 0; i < nr_; ++i) {
    for (int j = 0; j < nc_; ++j) r.at(i, j) = at(i, j);
    for (int j = 0; j < other.nc_; ++j) r.at(i, nc_ + j) = other.at(i, j);
  }
  return r;
}

QMat QMat::select_cols(const std::vector<int>& idx) const {
  QMat r(nr_, static_cast<int>(idx.size()));
  for (int i = 0; i < nr_; ++i)
    for (size_t j = 0; j < idx.size(); ++j) r.at(i, static_cast<int>(j)) = at(i, idx[j]);
  return r;
}

QMat QMat::select_rows(const std::vector<int>& idx) const {
  QMat r(static_cast<int>(idx.size()), nc_);
  for (size_t i = 0; i < idx.size(); ++i)
    for (int j = 0; j < nc_; ++j) r.at(static_cast<int>(i), j) = at(idx[i], j);
  return r;
}

int rank(const QMat& m) {
  int nr = m.rows(), nc = m.cols();
  if (nr == 0 || nc == 0) return 0;
  // Clear denominators row by row; row scaling preserves rank.
  std::vector<std::vector<Int>> a(nr, std::vector<Int>(nc));
  for (int i = 0; i < nr; ++i) {
    Int l = 1;
    for (int j = 0; j < nc; ++j) l = lcm(l, denominator(m.at(i, j)));
    for (int j = 0; j < nc; ++j) {
      Rat v = m.at(i, j) * l;
      a[i][j] = numerator(v);
    }
  }
  // Bareiss: all divisions are exact.
  Int prev = 1;
  int r = 0;
  for (int c = 0; c < nc && r < nr; ++c) {
    int p = -1;
    for (int i = r; i < nr; ++i)
      if (a[i][c] != 0) { p = i; break; }
    if (p < 0) continue;
    if (p != r) std::swap(a[p], a[r]);
    for (int i = r + 1; i < nr; ++i) {
      for (int j = c + 1; j < nc; ++j) a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return r;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref_inplace(QMat& m) {
  std::vector<int> pivots;
  int nr = m.rows(), nc = m.cols();
  int r = 0;
  for (int c = 0; c < nc && r < nr; ++c) {
    int p = -1;
    for (int i = r; i < nr; ++i)
      if (m.at(i, c) != 0) { p = i; break; }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < nc; ++j) std::swap(m.at(p, j), m.at(r, j));
    Rat inv = m.at(r, c);
    for (int j = c; j < nc; ++j) m.at(r, j) /= inv;
    for (int i = 0; i < nr; ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      Rat f = m.at(i, c);
      for (int j = c; j < nc; ++j) m.at(i, j) -= f * m.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

QMat column_space_basis(const QMat& m, std::vector<int>* pivot_rows) {
  QMat t = m.transpose();
  std::vector<int> piv = rref_inplace(t);
  // Row-echelon rows of t = echelon columns of the column space.
  QMat basis(m.rows(), static_cast<int>(piv.size()));
  for (size_t k = 0; k < piv.size(); ++k)
    for (int i = 0; i < m.rows(); ++i) basis.at(i, static_cast<int>(k)) = t.at(static_cast<int>(k), i);
  if (pivot_rows) *pivot_rows = piv;
  return basis;
}

QMat kernel_basis(const QMat& m) {
  QMat w = m;
  std::vector<int> piv = rref_inplace(w);
  std::vector<bool> is_piv(m.cols(), false);
  for (int c : piv) is_piv[c] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < m.cols(); ++c)
    if (!is_piv[c]) free_cols.push_back(c);
  QMat k(m.cols(), static_cast<int>(free_cols.size()));
  for (size_t j = 0; j < free_cols.size(); ++j) {
    int fc = free_cols[j];
    k.at(fc, static_cast<int>(j)) = 1;
    for (size_t r = 0; r < piv.size(); ++r) k.at(piv[r], static_cast<int>(j)) = -w.at(static_cast<int>(r), fc);
  }
  return k;
}

bool solve(const QMat& m, const std::vector<Rat>& b, std::vector<Rat>* out) {
  require(static_cast<int>(b.size()) == m.rows(), ErrCode::Internal, "solve shape mismatch");
  QMat aug(m.rows(), m.cols() + 1);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols()) = b[i];
  }
  std::vector<int> piv = rref_inplace(aug);
  if (!piv.empty() && piv.back() == m.cols()) return false;  // inconsistent
  if (out) {
    out->assign(m.cols(), Rat(0));
    for (size_t r = 0; r < piv.size(); ++r) (*out)[piv[r]] = aug.at(static_cast<int>(r), m.cols());
  }
  return true;
}

bool spans(const QMat& m, const QMat& sub) {
  require(m.rows() == sub.rows(), ErrCode::Internal, "spans shape mismatch");
  int base = rank(m);
  return rank(m.hcat(sub)) == base;
}

}  // namespace torkos
