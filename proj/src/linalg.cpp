#include "todaq/linalg.hpp"

namespace todaq::linalg {

namespace {

// Row reduction of [A | b | I], tracking the row combinations.
template <typename T, typename IsZero, typename Sub, typename Div>
void reduce(std::vector<std::vector<T>>& m, std::size_t cols, std::vector<int>& pivots,
            IsZero is_zero, Sub sub_scaled, Div normalize) {
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t p = row;
    while (p < m.size() && is_zero(m[p][c])) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    normalize(m[row], c);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r != row && !is_zero(m[r][c])) sub_scaled(m[r], m[row], c);
    }
    pivots.push_back(static_cast<int>(c));
    ++row;
  }
}

}  // namespace

QSolution solve(const QMat& a, const QVec& b, std::size_t cols) {
  std::size_t rows = a.size();
  QMat m(rows, QVec(cols + 1 + rows, Rational(0)));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m[r][c] = a[r][c];
    m[r][cols] = b[r];
    m[r][cols + 1 + r] = 1;
  }
  std::vector<int> pivots;
  reduce(
      m, cols, pivots, [](const Rational& q) { return q == 0; },
      [](QVec& target, const QVec& src, std::size_t c) {
        Rational f = target[c];
        for (std::size_t k = 0; k < target.size(); ++k) target[k] -= f * src[k];
      },
      [](QVec& r, std::size_t c) {
        Rational p = r[c];
        for (auto& q : r) q /= p;
      });
  QSolution s;
  s.consistent = true;
  for (std::size_t r = pivots.size(); r < rows; ++r) {
    if (m[r][cols] != 0) {
      s.consistent = false;
      s.certificate.assign(m[r].begin() + static_cast<long>(cols + 1), m[r].end());
      break;
    }
  }
  s.x.assign(cols, Rational(0));
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    is_pivot[pivots[r]] = true;
    s.x[pivots[r]] = m[r][cols];
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!is_pivot[c]) s.free.push_back(static_cast<int>(c));
  }
  return s;
}

std::vector<QVec> nullspace(const QMat& a, std::size_t cols) {
  QMat m = a;
  for (auto& r : m) r.resize(cols, Rational(0));
  std::vector<int> pivots;
  reduce(
      m, cols, pivots, [](const Rational& q) { return q == 0; },
      [](QVec& target, const QVec& src, std::size_t c) {
        Rational f = target[c];
        for (std::size_t k = 0; k < target.size(); ++k) target[k] -= f * src[k];
      },
      [](QVec& r, std::size_t c) {
        Rational p = r[c];
        for (auto& q : r) q /= p;
      });
  std::vector<bool> is_pivot(cols, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<QVec> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    QVec v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][f];
    basis.push_back(v);
  }
  return basis;
}

std::size_t rank(const QMat& a, std::size_t cols) { return cols - nullspace(a, cols).size(); }

F2Solution solve_gf2(const BitMat& a, const BitVec& b, std::size_t cols) {
  std::size_t rows = a.size();
  BitMat m(rows, BitVec(cols + 1 + rows, 0));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m[r][c] = a[r][c] & 1;
    m[r][cols] = b[r] & 1;
    m[r][cols + 1 + r] = 1;
  }
  std::vector<int> pivots;
  reduce(
      m, cols, pivots, [](int v) { return v == 0; },
      [](BitVec& target, const BitVec& src, std::size_t) {
        for (std::size_t k = 0; k < target.size(); ++k) target[k] ^= src[k];
      },
      [](BitVec&, std::size_t) {});
  F2Solution s;
  s.consistent = true;
  for (std::size_t r = pivots.size(); r < rows; ++r) {
    if (m[r][cols] != 0) {
      s.consistent = false;
      s.certificate.assign(m[r].begin() + static_cast<long>(cols + 1), m[r].end());
      break;
    }
  }
  s.x.assign(cols, 0);
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    is_pivot[pivots[r]] = true;
    s.x[pivots[r]] = m[r][cols];
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!is_pivot[c]) s.free.push_back(static_cast<int>(c));
  }
  return s;
}

}  // namespace todaq::linalg
