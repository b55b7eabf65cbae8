#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "error.hpp"

namespace torkos {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

std::string rat_to_string(const Rat& r);
Rat rat_from_string(const std::string& s);

// Small dense matrix over Q. All elimination is exact; pivot choice is
// deterministic (first nonzero scanning rows in order) so every run of the
// same computation produces identical output.
class QMat {
public:
  QMat() : nr_(0), nc_(0) {}
  QMat(int nr, int nc) : nr_(nr), nc_(nc), a_(static_cast<size_t>(nr) * nc) {}

  static QMat identity(int n);

  int rows() const { return nr_; }
  int cols() const { return nc_; }

  Rat& at(int i, int j) { return a_[static_cast<size_t>(i) * nc_ + j]; }
  const Rat& at(int i, int j) const { return a_[static_cast<size_t>(i) * nc_ + j]; }

  bool is_zero() const;
  QMat transpose() const;
  QMat mul(const QMat& other) const;
  QMat hcat(const QMat& other) const;
  // Rows/cols selected by index list.
  QMat select_cols(const std::vector<int>& idx) const;
  QMat select_rows(const std::vector<int>& idx) const;

  bool operator==(const QMat& o) const { return nr_ == o.nr_ && nc_ == o.nc_ && a_ == o.a_; }

private:
  int nr_, nc_;
  std::vector<Rat> a_;
};

// Rank by fraction-free (Bareiss) elimination on a denominator-cleared copy.
int rank(const QMat& m);

// Column-space basis of m as a matrix whose columns are in echelon form;
// pivot_rows[k] is the pivot row of column k, strictly increasing.
QMat column_space_basis(const QMat& m, std::vector<int>* pivot_rows = nullptr);

// Basis of { x : m x = 0 }, one kernel vector per column.
QMat kernel_basis(const QMat& m);

// One solution of m x = b, if any.
bool solve(const QMat& m, const std::vector<Rat>& b, std::vector<Rat>* out);

// True iff every column of sub lies in the column span of m.
bool spans(const QMat& m, const QMat& sub);

}  // namespace torkos
