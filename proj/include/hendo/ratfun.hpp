#pragma once

#include <string>

#include "hendo/poly.hpp"

namespace hendo {

// Element of the fraction field of the Laurent ring, kept in a canonical
// reduced form: the denominator is an ordinary polynomial with nonzero
// constant term and canonically normalized leading coefficient, and shares
// no content or polynomial factor with the numerator. Any leftover monomial
// factor t^k lives in the numerator.
class RatFun {
public:
  RatFun() : num_(RingTag::Z), den_(1, RingTag::Z) {}
  explicit RatFun(RingTag r) : num_(r), den_(1, r) {}
  RatFun(const Laurent& n) : num_(n), den_(1, n.ring()) {}  // NOLINT
  RatFun(const Laurent& n, const Laurent& d) : num_(n), den_(d) {
    require(!d.is_zero(), "division-by-zero", "zero denominator");
    canonicalize();
  }
  RatFun(long c, RingTag r = RingTag::Z) : num_(c, r), den_(1, r) {}

  const Laurent& num() const { return num_; }
  const Laurent& den() const { return den_; }
  RingTag ring() const { return num_.ring(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_laurent() const { return den_ == Laurent(1); }

  friend RatFun operator+(const RatFun& x, const RatFun& y) {
    return RatFun(x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_);
  }
  friend RatFun operator-(const RatFun& x, const RatFun& y) {
    return RatFun(x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_);
  }
  friend RatFun operator-(const RatFun& x) {
    RatFun r = x;
    r.num_ = -r.num_;
    return r;
  }
  friend RatFun operator*(const RatFun& x, const RatFun& y) {
    return RatFun(x.num_ * y.num_, x.den_ * y.den_);
  }
  friend RatFun operator/(const RatFun& x, const RatFun& y) {
    require(!y.is_zero(), "division-by-zero", "dividing by zero rational function");
    return RatFun(x.num_ * y.den_, x.den_ * y.num_);
  }
  RatFun& operator+=(const RatFun& y) { return *this = *this + y; }
  RatFun& operator-=(const RatFun& y) { return *this = *this - y; }
  RatFun& operator*=(const RatFun& y) { return *this = *this * y; }
  RatFun& operator/=(const RatFun& y) { return *this = *this / y; }

  RatFun inv() const {
    require(!is_zero(), "division-by-zero", "inverse of zero");
    return RatFun(den_, num_);
  }

  friend bool operator==(const RatFun& x, const RatFun& y) {
    return x.num_ == y.num_ && x.den_ == y.den_;
  }
  friend bool operator!=(const RatFun& x, const RatFun& y) { return !(x == y); }

  std::string str() const {
    if (is_laurent()) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
  }

private:
  void canonicalize() {
    if (num_.is_zero()) {
      den_ = Laurent(1, den_.ring());
      return;
    }
    // strip the monomial factor of the denominator into the numerator
    long dlow = den_.low_exp();
    den_ = den_.shifted(-dlow);
    num_ = num_.shifted(-dlow);

    // cancel the polynomial gcd
    Laurent g = laurent_gcd(num_, den_);
    if (!(g == Laurent(1))) {
      num_ = laurent_div_exact(num_, g);
      den_ = laurent_div_exact(den_, g);
      long d2 = den_.low_exp();
      if (d2 != 0) {  // cancellation may expose another t power
        den_ = den_.shifted(-d2);
        num_ = num_.shifted(-d2);
      }
    }

    // cancel remaining coefficient content
    Coeff cg = coeff_gcd(num_.content(), den_.content());
    if (!(cg == Coeff(1))) {
      num_ = num_.div_coeff(cg);
      den_ = den_.div_coeff(cg);
    }

    // make the denominator's leading coefficient canonical
    Coeff lead = den_.coeff(den_.high_exp());
    Coeff canon = canonical_associate(lead);
    if (!(lead == canon)) {
      Coeff u;
      require(div_exact(canon, lead, u), "inexact-division", "unit extraction");
      num_ = u * num_;
      den_ = u * den_;
    }
  }

  Laurent num_;
  Laurent den_;
};

}  // namespace hendo
