#pragma once

#include <optional>
#include <vector>

#include "hendo/error.hpp"

namespace hendo {

template <class E>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<E> data;

  Mat() = default;
  Mat(int r, int c, const E& fill) : rows(r), cols(c), data(r * c, fill) {}

  E& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  const E& at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  bool operator==(const Mat& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

template <class F>
Mat<typename F::Elem> mat_zero(const F& f, int r, int c) {
  return Mat<typename F::Elem>(r, c, f.zero());
}

template <class F>
Mat<typename F::Elem> mat_identity(const F& f, int n) {
  auto m = mat_zero(f, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = f.one();
  return m;
}

template <class F>
Mat<typename F::Elem> mat_mul(const F& f, const Mat<typename F::Elem>& a,
                              const Mat<typename F::Elem>& b) {
  require(a.cols == b.rows, "shape-mismatch", "matrix product shapes");
  auto r = mat_zero(f, a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const auto& aik = a.at(i, k);
      if (f.is_zero(aik)) continue;
      for (int j = 0; j < b.cols; ++j)
        r.at(i, j) = f.add(r.at(i, j), f.mul(aik, b.at(k, j)));
    }
  return r;
}

template <class F>
Mat<typename F::Elem> mat_add(const F& f, const Mat<typename F::Elem>& a,
                              const Mat<typename F::Elem>& b) {
  require(a.rows == b.rows && a.cols == b.cols, "shape-mismatch", "matrix sum");
  auto r = a;
  for (size_t i = 0; i < r.data.size(); ++i) r.data[i] = f.add(r.data[i], b.data[i]);
  return r;
}

template <class F>
Mat<typename F::Elem> mat_sub(const F& f, const Mat<typename F::Elem>& a,
                              const Mat<typename F::Elem>& b) {
  require(a.rows == b.rows && a.cols == b.cols, "shape-mismatch", "matrix difference");
  auto r = a;
  for (size_t i = 0; i < r.data.size(); ++i) r.data[i] = f.sub(r.data[i], b.data[i]);
  return r;
}

template <class F>
Mat<typename F::Elem> mat_scale(const F& f, const typename F::Elem& c,
                                const Mat<typename F::Elem>& a) {
  auto r = a;
  for (auto& v : r.data) v = f.mul(c, v);
  return r;
}

template <class E>
Mat<E> mat_transpose(const Mat<E>& a) {
  Mat<E> r;
  r.rows = a.cols;
  r.cols = a.rows;
  r.data.resize(a.data.size(), a.rows && a.cols ? a.at(0, 0) : E());
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r.at(j, i) = a.at(i, j);
  return r;
}

// In-place reduced row echelon form. Returns the pivot columns.
template <class F>
std::vector<int> rref(const F& f, Mat<typename F::Elem>& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int sel = -1;
    for (int i = row; i < m.rows; ++i)
      if (!f.is_zero(m.at(i, col))) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != row)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(sel, j), m.at(row, j));
    auto piv_inv = f.inv(m.at(row, col));
    for (int j = col; j < m.cols; ++j) m.at(row, j) = f.mul(piv_inv, m.at(row, j));
    for (int i = 0; i < m.rows; ++i) {
      if (i == row || f.is_zero(m.at(i, col))) continue;
      auto c = m.at(i, col);
      for (int j = col; j < m.cols; ++j)
        m.at(i, j) = f.sub(m.at(i, j), f.mul(c, m.at(row, j)));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class F>
int mat_rank(const F& f, Mat<typename F::Elem> m) {
  return static_cast<int>(rref(f, m).size());
}

// Basis of the right kernel, one vector per column of the result.
template <class F>
Mat<typename F::Elem> mat_kernel(const F& f, Mat<typename F::Elem> m) {
  int n = m.cols;
  std::vector<int> pivots = rref(f, m);
  std::vector<bool> is_pivot(n, false);
  for (int c : pivots) is_pivot[c] = true;
  int k = n - static_cast<int>(pivots.size());
  auto ker = mat_zero(f, n, k);
  int out = 0;
  for (int free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    ker.at(free, out) = f.one();
    for (size_t r = 0; r < pivots.size(); ++r)
      ker.at(pivots[r], out) = f.neg(m.at(static_cast<int>(r), free));
    ++out;
  }
  return ker;
}

// One solution of M x = b, if any.
template <class F>
std::optional<std::vector<typename F::Elem>> mat_solve(
    const F& f, const Mat<typename F::Elem>& m,
    const std::vector<typename F::Elem>& b) {
  require(static_cast<int>(b.size()) == m.rows, "shape-mismatch", "solve rhs");
  Mat<typename F::Elem> aug = mat_zero(f, m.rows, m.cols + 1);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols) = b[i];
  }
  std::vector<int> pivots = rref(f, aug);
  if (!pivots.empty() && pivots.back() == m.cols) return std::nullopt;
  std::vector<typename F::Elem> x(m.cols, f.zero());
  for (size_t r = 0; r < pivots.size(); ++r)
    x[pivots[r]] = aug.at(static_cast<int>(r), m.cols);
  return x;
}

template <class F>
std::optional<Mat<typename F::Elem>> mat_inverse(const F& f,
                                                 const Mat<typename F::Elem>& m) {
  require(m.rows == m.cols, "shape-mismatch", "inverse of nonsquare matrix");
  int n = m.rows;
  auto aug = mat_zero(f, n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = f.one();
  }
  auto pivots = rref(f, aug);
  if (static_cast<int>(pivots.size()) < n || pivots[n - 1] != n - 1)
    return std::nullopt;
  auto inv = mat_zero(f, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
  return inv;
}

template <class F>
typename F::Elem mat_det(const F& f, Mat<typename F::Elem> m) {
  require(m.rows == m.cols, "shape-mismatch", "determinant of nonsquare matrix");
  int n = m.rows;
  auto det = f.one();
  for (int col = 0; col < n; ++col) {
    int sel = -1;
    for (int i = col; i < n; ++i)
      if (!f.is_zero(m.at(i, col))) {
        sel = i;
        break;
      }
    if (sel < 0) return f.zero();
    if (sel != col) {
      for (int j = 0; j < n; ++j) std::swap(m.at(sel, j), m.at(col, j));
      det = f.neg(det);
    }
    det = f.mul(det, m.at(col, col));
    auto piv_inv = f.inv(m.at(col, col));
    for (int i = col + 1; i < n; ++i) {
      if (f.is_zero(m.at(i, col))) continue;
      auto c = f.mul(piv_inv, m.at(i, col));
      for (int j = col; j < n; ++j)
        m.at(i, j) = f.sub(m.at(i, j), f.mul(c, m.at(col, j)));
    }
  }
  return det;
}

// Characteristic polynomial coefficients (ascending, monic of degree n) by
// Hessenberg reduction; works over any field.
template <class F>
std::vector<typename F::Elem> charpoly(const F& f, Mat<typename F::Elem> m) {
  require(m.rows == m.cols, "shape-mismatch", "charpoly of nonsquare matrix");
  int n = m.rows;
  using E = typename F::Elem;
  // reduce to upper Hessenberg by similarity transforms
  for (int col = 0; col < n - 2; ++col) {
    int sel = -1;
    for (int i = col + 1; i < n; ++i)
      if (!f.is_zero(m.at(i, col))) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != col + 1) {
      for (int j = 0; j < n; ++j) std::swap(m.at(sel, j), m.at(col + 1, j));
      for (int i = 0; i < n; ++i) std::swap(m.at(i, sel), m.at(i, col + 1));
    }
    auto piv_inv = f.inv(m.at(col + 1, col));
    for (int i = col + 2; i < n; ++i) {
      if (f.is_zero(m.at(i, col))) continue;
      auto c = f.mul(piv_inv, m.at(i, col));
      for (int j = 0; j < n; ++j) m.at(i, j) = f.sub(m.at(i, j), f.mul(c, m.at(col + 1, j)));
      for (int j = 0; j < n; ++j) m.at(j, col + 1) = f.add(m.at(j, col + 1), f.mul(c, m.at(j, i)));
    }
  }
  // p_k = charpoly of leading k x k block, built by the Hessenberg recurrence
  std::vector<std::vector<E>> p(n + 1);
  p[0] = {f.one()};
  for (int k = 1; k <= n; ++k) {
    // p_k(x) = (x - m[k-1][k-1]) p_{k-1}(x) - sum_{i<k-1} m[i][k-1] (prod subdiag) p_i(x)
    std::vector<E> pk(k + 1, f.zero());
    for (int i = 0; i < k; ++i) pk[i + 1] = f.add(pk[i + 1], p[k - 1][i]);
    for (int i = 0; i < k; ++i)
      pk[i] = f.sub(pk[i], f.mul(m.at(k - 1, k - 1), p[k - 1][i]));
    E run = f.one();
    for (int i = k - 2; i >= 0; --i) {
      run = f.mul(run, m.at(i + 1, i));
      E c = f.mul(m.at(i, k - 1), run);
      for (size_t j = 0; j < p[i].size(); ++j) pk[j] = f.sub(pk[j], f.mul(c, p[i][j]));
    }
    p[k] = std::move(pk);
  }
  return p[n];
}

}  // namespace hendo
