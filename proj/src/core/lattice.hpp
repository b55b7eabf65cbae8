#pragma once

#include <cstdint>
#include <vector>

#include "numeric.hpp"

namespace torkos {

// Lattice vectors (points of N or M, and multidegrees). Coordinates stay
// small in practice; algorithms that could overflow work in cpp_int.
using LVec = std::vector<long long>;

long long dot(const LVec& a, const LVec& b);
LVec add(const LVec& a, const LVec& b);
LVec sub(const LVec& a, const LVec& b);
LVec neg(const LVec& a);
LVec scale(long long c, const LVec& a);
bool is_zero(const LVec& a);
LVec zero_vec(int n);
long long gcd_all(const LVec& a);
// Coordinatewise max (join in the divisibility order of monomials).
LVec join(const LVec& a, const LVec& b);
bool leq_all(const LVec& a, const LVec& b);   // a <= b coordinatewise
bool geq_zero(const LVec& a);

// Smith normal form of an integer matrix: u * m * v = d with u, v unimodular
// and d diagonal up to the rank. Returns the diagonal invariant factors.
struct SmithResult {
  std::vector<Int> factors;                 // nonzero invariant factors
  std::vector<std::vector<Int>> u, v;       // transforms, square
};
SmithResult smith_normal_form(const std::vector<LVec>& m, int ncols);

// Given d independent rows forming part of a Z-basis (all invariant factors
// 1), produce a full basis of Z^n whose first d rows are the input, plus the
// dual basis of M: dual[i] pairs to 1 with basis row i and to 0 with others.
struct BasisCompletion {
  std::vector<LVec> basis;  // n rows, first d = input rows
  std::vector<LVec> dual;   // n rows of M
};
BasisCompletion complete_to_basis(const std::vector<LVec>& rows, int n);

}  // namespace torkos
