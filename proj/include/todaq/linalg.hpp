#pragma once

// Small dense exact linear algebra over Q and GF(2).

#include <vector>

#include "todaq/expalg.hpp"

namespace todaq::linalg {

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>;

struct QSolution {
  bool consistent = false;
  QVec x;                  // particular solution, free variables set to 0
  std::vector<int> free;   // free column indices
  QVec certificate;        // when inconsistent: y with y^T A = 0, y^T b != 0
};

QSolution solve(const QMat& a, const QVec& b, std::size_t cols);
std::vector<QVec> nullspace(const QMat& a, std::size_t cols);
std::size_t rank(const QMat& a, std::size_t cols);

using BitVec = std::vector<int>;
using BitMat = std::vector<BitVec>;

struct F2Solution {
  bool consistent = false;
  BitVec x;
  std::vector<int> free;
  BitVec certificate;  // rows summing to 0 = 1 when inconsistent
};

F2Solution solve_gf2(const BitMat& a, const BitVec& b, std::size_t cols);

}  // namespace todaq::linalg
