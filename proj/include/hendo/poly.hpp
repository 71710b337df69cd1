#pragma once

#include <vector>

#include "hendo/laurent.hpp"

namespace hendo {

// Dense ordinary polynomials over Z or Z[sqrt(2)], ascending coefficients,
// used only as scratch space for gcd and exact division of Laurent
// polynomials. Invariant: no trailing zero coefficient.
using Poly = std::vector<Coeff>;

inline void poly_trim(Poly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}
inline int poly_deg(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline Poly poly_from_laurent(const Laurent& x, long* shift = nullptr) {
  Poly p;
  if (x.is_zero()) {
    if (shift) *shift = 0;
    return p;
  }
  long lo = x.low_exp();
  if (shift) *shift = lo;
  p.assign(x.high_exp() - lo + 1, Coeff());
  for (auto& [n, v] : x.coeffs()) p[n - lo] = v;
  return p;
}

inline Laurent laurent_from_poly(const Poly& p, long shift, RingTag ring) {
  Laurent x(ring);
  for (size_t i = 0; i < p.size(); ++i) x.set(shift + static_cast<long>(i), p[i]);
  return x;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Coeff());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  poly_trim(r);
  return r;
}

inline Coeff poly_content(const Poly& p) {
  Coeff g;
  for (auto& v : p) g = coeff_gcd(g, v);
  return g;
}

inline Poly poly_div_content(const Poly& p, const Coeff& g) {
  Poly r = p;
  for (auto& v : r) {
    Coeff q;
    require(div_exact(v, g, q), "inexact-division", "content does not divide");
    v = q;
  }
  return r;
}

inline Poly poly_primitive(const Poly& p) {
  if (p.empty()) return p;
  return poly_div_content(p, poly_content(p));
}

// Pseudo-remainder: lc(b)^{deg a - deg b + 1} * a mod b, the standard
// fraction-free remainder.
inline Poly poly_prem(Poly a, const Poly& b) {
  poly_trim(a);
  int db = poly_deg(b);
  require(db >= 0, "division-by-zero", "pseudo-remainder by zero");
  const Coeff lc = b.back();
  while (poly_deg(a) >= db) {
    int da = poly_deg(a);
    Coeff top = a.back();
    for (auto& v : a) v = v * lc;
    for (int i = 0; i <= db; ++i)
      a[da - db + i] = a[da - db + i] - top * b[i];
    poly_trim(a);
  }
  return a;
}

// Primitive polynomial remainder sequence. Quadratic coefficient growth is
// acceptable at the degrees this library sees.
inline Poly poly_unit_normalize(Poly p) {
  poly_trim(p);
  if (p.empty()) return p;
  Coeff lead = canonical_associate(p.back());
  Coeff u;
  require(div_exact(lead, p.back(), u), "inexact-division", "unit extraction");
  for (auto& v : p) v = v * u;
  return p;
}

inline Poly poly_gcd(Poly a, Poly b) {
  poly_trim(a);
  poly_trim(b);
  if (a.empty()) return poly_unit_normalize(b);
  if (b.empty()) return poly_unit_normalize(a);
  Coeff ca = poly_content(a), cb = poly_content(b);
  a = poly_div_content(a, ca);
  b = poly_div_content(b, cb);
  if (poly_deg(a) < poly_deg(b)) std::swap(a, b);
  while (!b.empty()) {
    Poly r = poly_prem(a, b);
    a = std::move(b);
    b = r.empty() ? r : poly_primitive(r);
  }
  Coeff g = coeff_gcd(ca, cb);
  Poly res;
  for (auto& v : a) res.push_back(v * g);
  return poly_unit_normalize(res);
}

// Exact division of dense polynomials; fails if the division leaves a
// remainder.
inline Poly poly_div_exact(Poly a, const Poly& b) {
  poly_trim(a);
  int db = poly_deg(b);
  require(db >= 0, "division-by-zero", "polynomial division by zero");
  if (a.empty()) return {};
  int da = poly_deg(a);
  require(da >= db, "inexact-division", "degree too small");
  Poly q(da - db + 1, Coeff());
  while (poly_deg(a) >= db) {
    int d = poly_deg(a);
    Coeff qc;
    require(div_exact(a.back(), b.back(), qc), "inexact-division",
            "leading coefficient does not divide");
    q[d - db] = qc;
    for (int i = 0; i <= db; ++i) a[d - db + i] = a[d - db + i] - qc * b[i];
    poly_trim(a);
  }
  require(a.empty(), "inexact-division", "nonzero remainder");
  return q;
}

// Exact division in the Laurent ring (quotient must again be Laurent).
inline Laurent laurent_div_exact(const Laurent& a, const Laurent& b) {
  require(!b.is_zero(), "division-by-zero", "Laurent division by zero");
  if (a.is_zero()) return Laurent(a.ring());
  long sa, sb;
  Poly pa = poly_from_laurent(a, &sa);
  Poly pb = poly_from_laurent(b, &sb);
  Poly q = poly_div_exact(pa, pb);
  return laurent_from_poly(q, sa - sb, a.ring());
}

inline Laurent laurent_gcd(const Laurent& a, const Laurent& b) {
  if (a.is_zero() && b.is_zero()) return Laurent(a.ring());
  RingTag ring = a.ring() == RingTag::Zsqrt2 || b.ring() == RingTag::Zsqrt2
                     ? RingTag::Zsqrt2
                     : RingTag::Z;
  Poly g = poly_gcd(poly_from_laurent(a), poly_from_laurent(b));
  return laurent_from_poly(g, 0, ring);
}

}  // namespace hendo
