#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>

#include "hendo/error.hpp"

namespace hendo {

// Which coefficient ring a polynomial lives in. Plain integers, or the
// quadratic extension Z[sqrt(2)] needed by the dihedral group of order 16
// with its root system and splitting fields.
enum class RingTag { Z, Zsqrt2 };

inline std::string ring_name(RingTag r) {
  return r == RingTag::Z ? "Z" : "Zsqrt2";
}

// Element a + b*sqrt(2). Elements with b == 0 double as plain integers; the
// enclosing polynomial carries the RingTag that says which ring is intended.
struct Coeff {
  mpz_class a{0};
  mpz_class b{0};

  Coeff() = default;
  Coeff(long v) : a(v) {}  // NOLINT: implicit on purpose, mirrors integer literals
  explicit Coeff(mpz_class v) : a(std::move(v)) {}
  Coeff(mpz_class va, mpz_class vb) : a(std::move(va)), b(std::move(vb)) {}

  bool is_zero() const { return a == 0 && b == 0; }
  bool is_int() const { return b == 0; }

  Coeff conj() const { return Coeff(a, -b); }
  mpz_class norm() const { return a * a - 2 * b * b; }

  friend Coeff operator+(const Coeff& x, const Coeff& y) {
    return Coeff(x.a + y.a, x.b + y.b);
  }
  friend Coeff operator-(const Coeff& x, const Coeff& y) {
    return Coeff(x.a - y.a, x.b - y.b);
  }
  friend Coeff operator-(const Coeff& x) { return Coeff(-x.a, -x.b); }
  friend Coeff operator*(const Coeff& x, const Coeff& y) {
    return Coeff(x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a);
  }
  friend bool operator==(const Coeff& x, const Coeff& y) {
    return x.a == y.a && x.b == y.b;
  }
  friend bool operator!=(const Coeff& x, const Coeff& y) { return !(x == y); }

  std::string str() const {
    if (b == 0) return a.get_str();
    std::string s;
    if (a != 0) s += a.get_str();
    if (b > 0 && !s.empty()) s += "+";
    if (b == -1)
      s += "-";
    else if (b != 1)
      s += b.get_str() + "*";
    s += "r2";
    return s;
  }
};

// Sign of the real number a + b*sqrt(2).
inline int real_sign(const Coeff& x) {
  int sa = sgn(x.a), sb = sgn(x.b);
  if (sa == sb) return sa;
  if (sa == 0) return sb;
  if (sb == 0) return sa;
  // Opposite signs: compare a^2 against 2 b^2.
  mpz_class a2 = x.a * x.a, b2 = 2 * x.b * x.b;
  if (a2 > b2) return sa;
  if (a2 < b2) return sb;
  return 0;
}

// Compare the real embeddings of two elements.
inline int real_cmp(const Coeff& x, const Coeff& y) { return real_sign(x - y); }

// True when d divides x exactly in Z[sqrt(2)]; on success q holds x / d.
inline bool div_exact(const Coeff& x, const Coeff& d, Coeff& q) {
  if (d.is_zero()) return false;
  if (x.is_zero()) {
    q = Coeff();
    return true;
  }
  mpz_class n = d.norm();
  if (n == 0) return false;  // only for b*sqrt2 with a = +-b... cannot happen for nonzero d
  Coeff num = x * d.conj();
  if (!mpz_divisible_p(num.a.get_mpz_t(), n.get_mpz_t())) return false;
  if (!mpz_divisible_p(num.b.get_mpz_t(), n.get_mpz_t())) return false;
  q = Coeff(num.a / n, num.b / n);
  return true;
}

inline bool divides(const Coeff& d, const Coeff& x) {
  Coeff q;
  return div_exact(x, d, q);
}

// Nearest-integer division helper for the Euclidean step below.
inline mpz_class round_div(mpz_class n, mpz_class d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  if (2 * r > d) q += 1;
  return q;
}

// Canonical associate: among all unit multiples +-(1+sqrt2)^k of x, the one
// with positive real embedding s satisfying |N(x)| <= s^2 < |N(x)| * (1+sqrt2)^2.
// For plain integers this is the absolute value.
inline Coeff canonical_associate(const Coeff& x) {
  if (x.is_zero()) return x;
  if (x.is_int()) return Coeff(abs(x.a));
  Coeff y = x;
  if (real_sign(y) < 0) y = -y;
  mpz_class n = abs(y.norm());
  const Coeff eps(1, 1);            // fundamental unit 1 + sqrt2
  const Coeff eps_inv(-1, 1);       // its inverse sqrt2 - 1
  auto sq_cmp_norm = [&](const Coeff& v) {
    // compare (real embedding of v)^2 with |N(x)| exactly
    Coeff v2 = v * v;
    return real_cmp(v2, Coeff(n, 0));
  };
  while (sq_cmp_norm(y) < 0) y = y * eps;
  while (true) {
    Coeff y_down = y * eps_inv;
    if (sq_cmp_norm(y_down) >= 0)
      y = y_down;
    else
      break;
  }
  return y;
}

// Gcd in the norm-Euclidean ring Z[sqrt(2)], returned as a canonical
// associate so content computations are deterministic.
inline Coeff coeff_gcd(Coeff x, Coeff y) {
  while (!y.is_zero()) {
    // quotient rounded coordinatewise, remainder has smaller |norm|
    mpz_class n = y.norm();
    Coeff num = x * y.conj();
    Coeff q(round_div(num.a, n), round_div(num.b, n));
    Coeff r = x - q * y;
    x = y;
    y = r;
  }
  return canonical_associate(x);
}

}  // namespace hendo
