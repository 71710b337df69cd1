#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "hendo/ratfun.hpp"

namespace hendo {

// Field objects bundle the arithmetic of a coefficient field so linear
// algebra and module code can be written once. Every field provides:
//   using Elem = ...;
//   Elem zero(), one(), from_int(long), from_coeff(const Coeff&);
//   Elem add/sub/mul/div(a, b), neg(a), inv(a);
//   bool is_zero(a), eq(a, b);
//   std::string str(a);

struct QQField {
  using Elem = mpq_class;
  Elem zero() const { return Elem(0); }
  Elem one() const { return Elem(1); }
  Elem from_int(long v) const { return Elem(v); }
  Elem from_coeff(const Coeff& c) const {
    require(c.is_int(), "ring-mismatch", "sqrt2 coefficient over Q");
    return Elem(c.a);
  }
  Elem add(const Elem& x, const Elem& y) const { return x + y; }
  Elem sub(const Elem& x, const Elem& y) const { return x - y; }
  Elem mul(const Elem& x, const Elem& y) const { return x * y; }
  Elem neg(const Elem& x) const { return -x; }
  Elem inv(const Elem& x) const {
    require(x != 0, "division-by-zero", "inverse of zero in Q");
    return Elem(1) / x;
  }
  Elem div(const Elem& x, const Elem& y) const { return mul(x, inv(y)); }
  bool is_zero(const Elem& x) const { return x == 0; }
  bool eq(const Elem& x, const Elem& y) const { return x == y; }
  std::string str(const Elem& x) const { return x.get_str(); }
};

// Q(sqrt2) with elements a + b*sqrt2, a and b rational.
struct QSqrt2Field {
  struct Elem {
    mpq_class a, b;
    bool operator==(const Elem& o) const { return a == o.a && b == o.b; }
  };
  Elem zero() const { return {mpq_class(0), mpq_class(0)}; }
  Elem one() const { return {mpq_class(1), mpq_class(0)}; }
  Elem from_int(long v) const { return {mpq_class(v), mpq_class(0)}; }
  Elem from_coeff(const Coeff& c) const { return {mpq_class(c.a), mpq_class(c.b)}; }
  Elem sqrt2() const { return {mpq_class(0), mpq_class(1)}; }
  Elem add(const Elem& x, const Elem& y) const { return {x.a + y.a, x.b + y.b}; }
  Elem sub(const Elem& x, const Elem& y) const { return {x.a - y.a, x.b - y.b}; }
  Elem mul(const Elem& x, const Elem& y) const {
    return {x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  Elem neg(const Elem& x) const { return {-x.a, -x.b}; }
  Elem inv(const Elem& x) const {
    mpq_class n = x.a * x.a - 2 * x.b * x.b;
    require(n != 0, "division-by-zero", "inverse of zero in Q(sqrt2)");
    return {x.a / n, -x.b / n};
  }
  Elem div(const Elem& x, const Elem& y) const { return mul(x, inv(y)); }
  bool is_zero(const Elem& x) const { return x.a == 0 && x.b == 0; }
  bool eq(const Elem& x, const Elem& y) const { return x == y; }
  std::string str(const Elem& x) const {
    return x.b == 0 ? x.a.get_str() : x.a.get_str() + "+" + x.b.get_str() + "*r2";
  }
};

// GF(p^m) as F_p[x]/(f) for the lexicographically first monic irreducible f
// of degree m, so a given (p, m) always yields the same field tables.
// Elements are encoded as base-p digit strings packed into a uint64.
class GFField {
public:
  using Elem = std::uint64_t;

  GFField(long p, int m) : p_(p), m_(m) {
    require(p >= 2 && m >= 1 && m <= 6, "bad-field", "need small prime power");
    for (long d = 2; d * d <= p; ++d)
      require(p % d != 0, "bad-field", "characteristic must be prime");
    double sz = 1;
    for (int i = 0; i < m; ++i) sz *= static_cast<double>(p);
    require(sz <= 1e12, "bad-field", "field too large");
    if (m_ > 1) find_modulus();
  }

  long p() const { return p_; }
  int m() const { return m_; }
  long order_long() const {
    long s = 1;
    for (int i = 0; i < m_; ++i) s *= p_;
    return s;
  }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem from_int(long v) const {
    long r = v % p_;
    if (r < 0) r += p_;
    return static_cast<Elem>(r);
  }
  Elem from_coeff(const Coeff& c) const {
    mpz_class pa = c.a % p_, pb = c.b % p_;
    Elem ea = from_int(pa.get_si());
    if (c.b == 0) return ea;
    Elem s2 = sqrt2();
    return add(ea, mul(from_int(pb.get_si()), s2));
  }

  Elem add(Elem x, Elem y) const {
    Digits a = unpack(x), b = unpack(y);
    for (int i = 0; i < m_; ++i) a[i] = (a[i] + b[i]) % p_;
    return pack(a);
  }
  Elem sub(Elem x, Elem y) const {
    Digits a = unpack(x), b = unpack(y);
    for (int i = 0; i < m_; ++i) a[i] = (a[i] - b[i] % p_ + p_) % p_;
    return pack(a);
  }
  Elem neg(Elem x) const { return sub(0, x); }
  Elem mul(Elem x, Elem y) const {
    Digits a = unpack(x), b = unpack(y);
    std::vector<long> prod(2 * m_ - 1, 0);
    for (int i = 0; i < m_; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < m_; ++j)
        prod[i + j] = (prod[i + j] + a[i] * b[j]) % p_;
    }
    // reduce degrees >= m with the precomputed images of x^k
    for (int k = 2 * m_ - 2; k >= m_; --k) {
      long c = prod[k];
      if (c == 0) continue;
      prod[k] = 0;
      const Digits& rep = xpow_[k - m_];
      for (int i = 0; i < m_; ++i) prod[i] = (prod[i] + c * rep[i]) % p_;
    }
    Digits r{};
    for (int i = 0; i < m_; ++i) r[i] = prod[i];
    return pack(r);
  }
  Elem pow(Elem x, long e) const {
    Elem r = one();
    while (e > 0) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }
  Elem inv(Elem x) const {
    require(x != 0, "division-by-zero", "inverse of zero in GF");
    return pow(x, order_long() - 2);
  }
  Elem div(Elem x, Elem y) const { return mul(x, inv(y)); }
  bool is_zero(Elem x) const { return x == 0; }
  bool eq(Elem x, Elem y) const { return x == y; }

  // An element whose square is 2, if one exists.
  Elem sqrt2() const {
    long two = 2 % p_;
    long n = order_long();
    for (long v = 0; v < n; ++v) {
      Elem e = static_cast<Elem>(v);
      if (mul(e, e) == static_cast<Elem>(two)) return e;
    }
    fail("no-sqrt2", "2 has no square root in GF(" + std::to_string(p_) + "^" +
                         std::to_string(m_) + ")");
  }
  bool has_sqrt2() const {
    long two = 2 % p_;
    long n = order_long();
    for (long v = 0; v < n; ++v) {
      Elem e = static_cast<Elem>(v);
      if (mul(e, e) == static_cast<Elem>(two)) return true;
    }
    return false;
  }

  std::string str(Elem x) const {
    if (m_ == 1) return std::to_string(x);
    Digits d = unpack(x);
    std::string s = "[";
    for (int i = 0; i < m_; ++i) s += (i ? "," : "") + std::to_string(d[i]);
    return s + "]";
  }

  std::vector<long> modulus() const {
    std::vector<long> f(mod_.begin(), mod_.begin() + m_);
    f.push_back(1);
    return f;
  }

private:
  using Digits = std::array<long, 8>;

  Digits unpack(Elem x) const {
    Digits d{};
    for (int i = 0; i < m_; ++i) {
      d[i] = static_cast<long>(x % static_cast<Elem>(p_));
      x /= static_cast<Elem>(p_);
    }
    return d;
  }
  Elem pack(const Digits& d) const {
    Elem x = 0;
    for (int i = m_ - 1; i >= 0; --i) x = x * static_cast<Elem>(p_) + d[i];
    return x;
  }

  // Polynomial helpers over F_p for the irreducibility search. Dense,
  // ascending, trailing zeros trimmed.
  using FpPoly = std::vector<long>;
  static void fp_trim(FpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
  }
  FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& f) const {
    FpPoly r(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j)
        r[i + j] = (r[i + j] + a[i] * b[j]) % p_;
    fp_trim(r);
    // reduce modulo monic f
    int df = static_cast<int>(f.size()) - 1;
    while (static_cast<int>(r.size()) - 1 >= df) {
      long c = r.back();
      int shift = static_cast<int>(r.size()) - 1 - df;
      for (int i = 0; i <= df; ++i)
        r[shift + i] = ((r[shift + i] - c * f[i]) % p_ + p_) % p_;
      fp_trim(r);
    }
    return r;
  }
  FpPoly fp_powmod(FpPoly base, long e, const FpPoly& f) const {
    FpPoly r{1};
    while (e > 0) {
      if (e & 1) r = fp_mulmod(r, base, f);
      base = fp_mulmod(base, base, f);
      e >>= 1;
    }
    return r;
  }
  FpPoly fp_gcd(FpPoly a, FpPoly b) const {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
      // remainder of a by b via repeated leading-term elimination
      long lead_inv = 1;
      {  // inverse of b's leading coefficient mod p
        long l = b.back(), acc = 1, base = l, e = p_ - 2;
        while (e > 0) {
          if (e & 1) acc = acc * base % p_;
          base = base * base % p_;
          e >>= 1;
        }
        lead_inv = acc;
      }
      while (a.size() >= b.size() && !a.empty()) {
        long c = a.back() * lead_inv % p_;
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i)
          a[shift + i] = ((a[shift + i] - c * b[i]) % p_ + p_) % p_;
        fp_trim(a);
      }
      std::swap(a, b);
    }
    return a;
  }
  bool fp_irreducible(const FpPoly& f) const {
    int d = static_cast<int>(f.size()) - 1;
    // x^{p^d} must equal x mod f
    FpPoly x{0, 1};
    FpPoly acc = x;
    for (int i = 0; i < d; ++i) acc = fp_powmod(acc, p_, f);
    FpPoly diff = acc;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = ((diff[1] - 1) % p_ + p_) % p_;
    fp_trim(diff);
    if (!diff.empty()) return false;
    // and for every prime divisor q of d, gcd(x^{p^{d/q}} - x, f) = 1
    for (int q = 2; q <= d; ++q) {
      if (d % q != 0) continue;
      bool isprime = true;
      for (int r = 2; r * r <= q; ++r)
        if (q % r == 0) isprime = false;
      if (!isprime) continue;
      FpPoly acc2 = x;
      for (int i = 0; i < d / q; ++i) acc2 = fp_powmod(acc2, p_, f);
      FpPoly diff2 = acc2;
      if (diff2.size() < 2) diff2.resize(2, 0);
      diff2[1] = ((diff2[1] - 1) % p_ + p_) % p_;
      fp_trim(diff2);
      FpPoly g = fp_gcd(diff2.empty() ? f : diff2, f);
      if (g.size() != 1) return false;
    }
    return true;
  }

  void find_modulus() {
    // lexicographic scan over the low coefficients; leading coefficient 1
    std::vector<long> lows(m_, 0);
    while (true) {
      FpPoly f(lows.begin(), lows.end());
      f.push_back(1);
      if (f[0] != 0 && fp_irreducible(f)) {
        for (int i = 0; i < m_; ++i) mod_[i] = lows[i];
        // cache x^k mod f for k = m .. 2m-2
        xpow_.clear();
        FpPoly xm(m_ + 1, 0);
        xm[m_] = 1;
        FpPoly cur = fp_mulmod(xm, FpPoly{1}, f);
        for (int k = m_; k <= 2 * m_ - 2; ++k) {
          Digits d{};
          for (size_t i = 0; i < cur.size(); ++i) d[i] = cur[i];
          xpow_.push_back(d);
          cur = fp_mulmod(cur, FpPoly{0, 1}, f);
        }
        return;
      }
      int i = 0;
      for (; i < m_; ++i) {
        if (++lows[i] < p_) break;
        lows[i] = 0;
      }
      require(i < m_, "bad-field", "no irreducible modulus found");
    }
  }

  long p_;
  int m_;
  Digits mod_{};
  std::vector<Digits> xpow_;
};

// The Laurent ring itself, for matrix routines that never divide.
struct LaurentRing {
  RingTag ring = RingTag::Z;
  using Elem = Laurent;
  Elem zero() const { return Laurent(ring); }
  Elem one() const { return Laurent(1, ring); }
  Elem from_int(long v) const { return Laurent(v, ring); }
  Elem from_coeff(const Coeff& c) const { return Laurent::term(c, 0, ring); }
  Elem add(const Elem& x, const Elem& y) const { return x + y; }
  Elem sub(const Elem& x, const Elem& y) const { return x - y; }
  Elem mul(const Elem& x, const Elem& y) const { return x * y; }
  Elem neg(const Elem& x) const { return -x; }
  Elem inv(const Elem& x) const {
    (void)x;
    fail("division-by-zero", "the Laurent ring has no general inverses");
  }
  Elem div(const Elem& x, const Elem& y) const { return mul(x, inv(y)); }
  bool is_zero(const Elem& x) const { return x.is_zero(); }
  bool eq(const Elem& x, const Elem& y) const { return x == y; }
  std::string str(const Elem& x) const { return x.str(); }
};

// Fraction field of the Laurent ring, used for generic-fiber computations.
struct FracField {
  RingTag ring = RingTag::Z;
  using Elem = RatFun;
  Elem zero() const { return RatFun(ring); }
  Elem one() const { return RatFun(1, ring); }
  Elem from_int(long v) const { return RatFun(v, ring); }
  Elem from_coeff(const Coeff& c) const {
    return RatFun(Laurent::term(c, 0, ring));
  }
  Elem from_laurent(const Laurent& x) const { return RatFun(x); }
  Elem add(const Elem& x, const Elem& y) const { return x + y; }
  Elem sub(const Elem& x, const Elem& y) const { return x - y; }
  Elem mul(const Elem& x, const Elem& y) const { return x * y; }
  Elem neg(const Elem& x) const { return -x; }
  Elem inv(const Elem& x) const { return x.inv(); }
  Elem div(const Elem& x, const Elem& y) const { return x / y; }
  bool is_zero(const Elem& x) const { return x.is_zero(); }
  bool eq(const Elem& x, const Elem& y) const { return x == y; }
  std::string str(const Elem& x) const { return x.str(); }
};

}  // namespace hendo
