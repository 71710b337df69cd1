#pragma once

#include <gmpxx.h>

#include <vector>

#include "hendo/fields.hpp"
#include "hendo/matrix.hpp"
#include "hendo/poly.hpp"

namespace hendo {

// Fraction-free Gaussian elimination (Bareiss). Each elimination step divides
// by the previous pivot, keeping entries polynomial instead of rational.
// Returns the rank; when det is non-null and the matrix is square, stores the
// determinant.
inline int bareiss(Mat<Laurent> m, Laurent* det = nullptr) {
  int n = m.rows, c = m.cols;
  RingTag ring = m.data.empty() ? RingTag::Z : m.data[0].ring();
  Laurent prev(1, ring);
  Laurent sign(1, ring);
  int row = 0;
  for (int col = 0; col < c && row < n; ++col) {
    int sel = -1;
    for (int i = row; i < n; ++i)
      if (!m.at(i, col).is_zero()) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != row) {
      for (int j = 0; j < c; ++j) std::swap(m.at(sel, j), m.at(row, j));
      sign = -sign;
    }
    const Laurent piv = m.at(row, col);
    for (int i = row + 1; i < n; ++i) {
      for (int j = col + 1; j < c; ++j) {
        Laurent v = m.at(i, j) * piv - m.at(i, col) * m.at(row, j);
        m.at(i, j) = laurent_div_exact(v, prev);
      }
      m.at(i, col) = Laurent(m.at(i, col).ring());
    }
    prev = piv;
    ++row;
  }
  if (det != nullptr) {
    require(n == c, "shape-mismatch", "determinant of nonsquare matrix");
    *det = row == n ? sign * prev : Laurent(ring);
  }
  return row;
}

inline int laurent_rank(const Mat<Laurent>& m) { return bareiss(m); }

inline Laurent laurent_det(const Mat<Laurent>& m) {
  Laurent d;
  bareiss(m, &d);
  return d;
}

// Clear denominators and strip content so a rational vector becomes a
// primitive Laurent vector spanning the same line.
inline std::vector<Laurent> saturate_vector(const std::vector<RatFun>& v,
                                            RingTag ring) {
  Laurent lcm(1, ring);
  for (const auto& x : v) {
    if (x.is_zero()) continue;
    Laurent g = laurent_gcd(lcm, x.den());
    lcm = laurent_div_exact(lcm * x.den(), g);
  }
  std::vector<Laurent> out;
  out.reserve(v.size());
  for (const auto& x : v)
    out.push_back(x.is_zero() ? Laurent(ring)
                              : x.num() * laurent_div_exact(lcm, x.den()));
  // divide out the coefficient content and center exponents at zero
  Coeff g;
  long lo = 0;
  bool first = true;
  for (const auto& x : out) {
    if (x.is_zero()) continue;
    g = coeff_gcd(g, x.content());
    lo = first ? x.low_exp() : std::min(lo, x.low_exp());
    first = false;
  }
  if (first) return out;  // zero vector
  for (auto& x : out) {
    if (x.is_zero()) continue;
    x = x.div_coeff(g).shifted(-lo);
  }
  return out;
}

inline std::vector<Laurent> saturate_vector(const std::vector<RatFun>& v) {
  RingTag ring = RingTag::Z;
  for (const auto& x : v)
    if (x.ring() == RingTag::Zsqrt2) ring = RingTag::Zsqrt2;
  return saturate_vector(v, ring);
}

// Kernel of a Laurent matrix as primitive Laurent columns (computed over the
// fraction field, then saturated entrywise).
inline std::vector<std::vector<Laurent>> laurent_kernel(const Mat<Laurent>& m) {
  RingTag ring = RingTag::Z;
  for (const auto& v : m.data)
    if (v.ring() == RingTag::Zsqrt2) ring = RingTag::Zsqrt2;
  FracField f{ring};
  Mat<RatFun> mq(m.rows, m.cols, f.zero());
  for (size_t i = 0; i < m.data.size(); ++i) mq.data[i] = RatFun(m.data[i]);
  Mat<RatFun> ker = mat_kernel(f, mq);
  std::vector<std::vector<Laurent>> out;
  for (int j = 0; j < ker.cols; ++j) {
    std::vector<RatFun> col;
    col.reserve(ker.rows);
    for (int i = 0; i < ker.rows; ++i) col.push_back(ker.at(i, j));
    out.push_back(saturate_vector(col, ring));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smith normal form over Z with unimodular transforms, U * A * V = D.

struct SmithResult {
  Mat<mpz_class> d, u, v;
  std::vector<mpz_class> diagonal() const {
    std::vector<mpz_class> out;
    int n = std::min(d.rows, d.cols);
    for (int i = 0; i < n; ++i) out.push_back(d.at(i, i));
    return out;
  }
};

inline SmithResult smith_normal_form(Mat<mpz_class> a) {
  int n = a.rows, m = a.cols;
  Mat<mpz_class> u(n, n, 0), v(m, m, 0);
  for (int i = 0; i < n; ++i) u.at(i, i) = 1;
  for (int j = 0; j < m; ++j) v.at(j, j) = 1;

  auto row_op = [&](int r1, int r2, const mpz_class& q) {
    // r2 -= q * r1, tracked in u
    for (int j = 0; j < m; ++j) a.at(r2, j) -= q * a.at(r1, j);
    for (int j = 0; j < n; ++j) u.at(r2, j) -= q * u.at(r1, j);
  };
  auto col_op = [&](int c1, int c2, const mpz_class& q) {
    for (int i = 0; i < n; ++i) a.at(i, c2) -= q * a.at(i, c1);
    for (int i = 0; i < m; ++i) v.at(i, c2) -= q * v.at(i, c1);
  };
  auto row_swap = [&](int r1, int r2) {
    if (r1 == r2) return;
    for (int j = 0; j < m; ++j) std::swap(a.at(r1, j), a.at(r2, j));
    for (int j = 0; j < n; ++j) std::swap(u.at(r1, j), u.at(r2, j));
  };
  auto col_swap = [&](int c1, int c2) {
    if (c1 == c2) return;
    for (int i = 0; i < n; ++i) std::swap(a.at(i, c1), a.at(i, c2));
    for (int i = 0; i < m; ++i) std::swap(v.at(i, c1), v.at(i, c2));
  };

  int t = 0;
  while (t < n && t < m) {
    // find a nonzero entry of minimal absolute value in the trailing block
    int bi = -1, bj = -1;
    mpz_class best = 0;
    for (int i = t; i < n; ++i)
      for (int j = t; j < m; ++j) {
        if (a.at(i, j) == 0) continue;
        mpz_class av = abs(a.at(i, j));
        if (bi < 0 || av < best) {
          best = av;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;
    row_swap(t, bi);
    col_swap(t, bj);
    bool clean = true;
    for (int i = t + 1; i < n; ++i) {
      if (a.at(i, t) == 0) continue;
      mpz_class q = round_div(a.at(i, t), a.at(t, t));
      row_op(t, i, q);
      if (a.at(i, t) != 0) clean = false;
    }
    for (int j = t + 1; j < m; ++j) {
      if (a.at(t, j) == 0) continue;
      mpz_class q = round_div(a.at(t, j), a.at(t, t));
      col_op(t, j, q);
      if (a.at(t, j) != 0) clean = false;
    }
    if (!clean) continue;  // smaller remainders appeared, pick a new pivot
    // pivot must divide every remaining entry; if not, mix that row in
    bool fixed = false;
    for (int i = t + 1; i < n && !fixed; ++i)
      for (int j = t + 1; j < m && !fixed; ++j)
        if (a.at(i, j) % a.at(t, t) != 0) {
          row_op(i, t, mpz_class(-1));  // row t += row i
          fixed = true;
        }
    if (fixed) continue;
    if (a.at(t, t) < 0) {
      for (int j = 0; j < m; ++j) a.at(t, j) = -a.at(t, j);
      for (int j = 0; j < n; ++j) u.at(t, j) = -u.at(t, j);
    }
    ++t;
  }
  return SmithResult{a, u, v};
}

// Saturated integer kernel of an integer matrix: the columns of V matching
// zero diagonal entries of the Smith form.
inline std::vector<std::vector<mpz_class>> integer_kernel(const Mat<mpz_class>& a) {
  SmithResult s = smith_normal_form(a);
  std::vector<std::vector<mpz_class>> out;
  for (int j = 0; j < a.cols; ++j) {
    bool zero_col = j >= a.rows || s.d.at(j, j) == 0;
    if (!zero_col) continue;
    std::vector<mpz_class> col;
    col.reserve(a.cols);
    for (int i = 0; i < a.cols; ++i) col.push_back(s.v.at(i, j));
    out.push_back(std::move(col));
  }
  return out;
}

}  // namespace hendo
