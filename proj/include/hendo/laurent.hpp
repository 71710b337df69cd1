#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hendo/error.hpp"
#include "hendo/zring.hpp"

namespace hendo {

// Sparse Laurent polynomial in one variable t with coefficients in Z or
// Z[sqrt(2)]. The map never stores zero coefficients. Mixing different
// coefficient rings in one operation raises "ring-mismatch".
class Laurent {
public:
  Laurent() : ring_(RingTag::Z) {}
  explicit Laurent(RingTag r) : ring_(r) {}
  Laurent(long constant, RingTag r = RingTag::Z) : ring_(r) {
    if (constant != 0) c_[0] = Coeff(constant);
  }

  static Laurent t_pow(long n, RingTag r = RingTag::Z) {
    Laurent p(r);
    p.c_[n] = Coeff(1);
    return p;
  }
  static Laurent term(const Coeff& v, long n, RingTag r = RingTag::Z) {
    Laurent p(r);
    if (!v.is_zero()) p.c_[n] = v;
    return p;
  }

  RingTag ring() const { return ring_; }
  bool is_zero() const { return c_.empty(); }
  const std::map<long, Coeff>& coeffs() const { return c_; }

  Coeff coeff(long n) const {
    auto it = c_.find(n);
    return it == c_.end() ? Coeff() : it->second;
  }
  long low_exp() const {
    require(!is_zero(), "empty-support", "low_exp of zero polynomial");
    return c_.begin()->first;
  }
  long high_exp() const {
    require(!is_zero(), "empty-support", "high_exp of zero polynomial");
    return c_.rbegin()->first;
  }

  void set(long n, const Coeff& v) {
    if (v.is_zero())
      c_.erase(n);
    else
      c_[n] = v;
  }
  void add_term(long n, const Coeff& v) { set(n, coeff(n) + v); }

  friend Laurent operator+(const Laurent& x, const Laurent& y) {
    Laurent r(merge_ring(x, y));
    r.c_ = x.c_;
    for (auto& [n, v] : y.c_) r.add_term(n, v);
    return r;
  }
  friend Laurent operator-(const Laurent& x, const Laurent& y) {
    Laurent r(merge_ring(x, y));
    r.c_ = x.c_;
    for (auto& [n, v] : y.c_) r.add_term(n, -v);
    return r;
  }
  friend Laurent operator-(const Laurent& x) {
    Laurent r(x.ring_);
    for (auto& [n, v] : x.c_) r.c_[n] = -v;
    return r;
  }
  friend Laurent operator*(const Laurent& x, const Laurent& y) {
    Laurent r(merge_ring(x, y));
    for (auto& [n, v] : x.c_)
      for (auto& [m, w] : y.c_) r.add_term(n + m, v * w);
    return r;
  }
  Laurent& operator+=(const Laurent& y) { return *this = *this + y; }
  Laurent& operator-=(const Laurent& y) { return *this = *this - y; }
  Laurent& operator*=(const Laurent& y) { return *this = *this * y; }

  friend bool operator==(const Laurent& x, const Laurent& y) {
    return x.c_ == y.c_;  // ring tags may differ when one side embeds in the other
  }
  friend bool operator!=(const Laurent& x, const Laurent& y) { return !(x == y); }

  Laurent shifted(long k) const {  // multiply by t^k
    Laurent r(ring_);
    for (auto& [n, v] : c_) r.c_[n + k] = v;
    return r;
  }

  // The involution t -> t^{-1}, applied to exponents only; coefficients in
  // Z[sqrt(2)] are fixed pointwise.
  Laurent bar() const {
    Laurent r(ring_);
    for (auto& [n, v] : c_) r.c_[-n] = v;
    return r;
  }
  bool is_bar_symmetric() const { return *this == bar(); }

  // True when every exponent is negative, i.e. the polynomial lies in
  // t^{-1} Z[t^{-1}].
  bool strictly_negative() const { return is_zero() || high_exp() < 0; }

  // The unique bar-symmetric polynomial whose coefficients in degrees >= 0
  // agree with this one: a_0 + sum_{n>0} a_n (t^n + t^{-n}).
  Laurent make_bar_invariant() const {
    Laurent r(ring_);
    for (auto& [n, v] : c_) {
      if (n < 0) continue;
      r.add_term(n, v);
      if (n > 0) r.add_term(-n, v);
    }
    return r;
  }

  // Gcd of all coefficients, canonically normalized. Zero for the zero
  // polynomial.
  Coeff content() const {
    Coeff g;
    for (auto& [n, v] : c_) g = coeff_gcd(g, v);
    return g;
  }

  // Divide every coefficient exactly by d.
  Laurent div_coeff(const Coeff& d) const {
    Laurent r(ring_);
    for (auto& [n, v] : c_) {
      Coeff q;
      require(div_exact(v, d, q), "inexact-division", "coefficient not divisible");
      r.c_[n] = q;
    }
    return r;
  }

  // Evaluate at a field element. F must provide zero/one/add/mul/inv/from_coeff.
  template <class F>
  typename F::Elem evaluate(const F& f, const typename F::Elem& timage) const {
    typename F::Elem acc = f.zero();
    if (is_zero()) return acc;
    long lo = low_exp(), hi = high_exp();
    // Horner from the top exponent down, then shift by timage^{lo}.
    for (long n = hi; n >= lo; --n) {
      acc = f.mul(acc, timage);
      auto it = c_.find(n);
      if (it != c_.end()) acc = f.add(acc, f.from_coeff(it->second));
    }
    if (lo != 0) {
      typename F::Elem shift = f.one();
      typename F::Elem base = lo > 0 ? timage : f.inv(timage);
      for (long i = 0; i < (lo > 0 ? lo : -lo); ++i) shift = f.mul(shift, base);
      acc = f.mul(acc, shift);
    }
    return acc;
  }

  nlohmann::json to_json() const {
    nlohmann::json coeffs = nlohmann::json::object();
    for (auto& [n, v] : c_) {
      nlohmann::json jv;
      if (ring_ == RingTag::Z)
        jv = int_json(v.a);
      else
        jv = nlohmann::json::array({int_json(v.a), int_json(v.b)});
      coeffs[std::to_string(n)] = jv;
    }
    return nlohmann::json{{"ring", ring_name(ring_)}, {"coeffs", coeffs}};
  }

  static Laurent from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("ring") && j.contains("coeffs"),
            "bad-json", "Laurent polynomial needs ring and coeffs fields");
    std::string rs = j.at("ring").get<std::string>();
    RingTag r;
    if (rs == "Z")
      r = RingTag::Z;
    else if (rs == "Zsqrt2")
      r = RingTag::Zsqrt2;
    else
      fail("bad-json", "unknown ring tag " + rs);
    Laurent p(r);
    for (auto& [key, jv] : j.at("coeffs").items()) {
      long n = 0;
      try {
        n = std::stol(key);
      } catch (const std::exception&) {
        fail("bad-json", "exponent key not an integer: " + key);
      }
      Coeff v;
      if (jv.is_array()) {
        require(r == RingTag::Zsqrt2, "ring-mismatch",
                "pair coefficient in a ring tagged Z");
        require(jv.size() == 2, "bad-json", "coefficient pair must have 2 entries");
        v = Coeff(json_int(jv[0]), json_int(jv[1]));
      } else {
        v = Coeff(json_int(jv));
      }
      require(!v.is_zero(), "bad-json", "explicit zero coefficient at t^" + key);
      require(p.c_.find(n) == p.c_.end(), "bad-json", "duplicate exponent " + key);
      p.set(n, v);
    }
    return p;
  }

  std::string str() const {
    if (is_zero()) return "0";
    std::string s;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      auto& [n, v] = *it;
      std::string cs = v.str();
      if (!s.empty() && cs[0] != '-') s += "+";
      if (n == 0) {
        s += cs;
        continue;
      }
      if (cs == "1")
        cs.clear();
      else if (cs == "-1")
        cs = "-";
      else
        cs += "*";
      s += cs + "t";
      if (n != 1) s += "^" + std::to_string(n);
    }
    return s;
  }

private:
  static RingTag merge_ring(const Laurent& x, const Laurent& y) {
    require(x.ring_ == y.ring_, "ring-mismatch",
            "cannot combine " + ring_name(x.ring_) + " with " + ring_name(y.ring_));
    return x.ring_;
  }

  static nlohmann::json int_json(const mpz_class& v) {
    if (v.fits_slong_p()) return nlohmann::json(v.get_si());
    return nlohmann::json(v.get_str());
  }
  static mpz_class json_int(const nlohmann::json& jv) {
    if (jv.is_number_integer()) return mpz_class(static_cast<long>(jv.get<long long>()));
    if (jv.is_string()) {
      try {
        return mpz_class(jv.get<std::string>());
      } catch (const std::exception&) {
        fail("bad-json", "bad bigint string " + jv.get<std::string>());
      }
    }
    fail("bad-json", "coefficient must be integer or decimal string");
  }

  RingTag ring_;
  std::map<long, Coeff> c_;
};

inline Laurent operator*(const Coeff& v, const Laurent& p) {
  Laurent r(p.ring());
  for (auto& [n, w] : p.coeffs()) r.set(n, v * w);
  return r;
}

}  // namespace hendo
