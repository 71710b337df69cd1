#pragma once

#include <vector>

#include "hendo/error.hpp"
#include "hendo/fields.hpp"
#include "hendo/laurent.hpp"
#include "hendo/matrix.hpp"
#include "hendo/ratfun.hpp"

namespace hendo {

// Evaluation of Laurent-polynomial data at a fixed invertible field element.
// Coefficients route through F::from_coeff, so a nonzero sqrt2 part is only
// accepted by fields that can realize one.

template <class F>
typename F::Elem field_pow(const F& f, typename F::Elem x, long e) {
  auto r = f.one();
  while (e > 0) {
    if (e & 1) r = f.mul(r, x);
    x = f.mul(x, x);
    e >>= 1;
  }
  return r;
}

template <class F>
typename F::Elem eval_laurent(const F& f, const typename F::Elem& t,
                              const typename F::Elem& tinv, const Laurent& x) {
  auto r = f.zero();
  for (const auto& [n, c] : x.coeffs()) {
    auto term = f.from_coeff(c);
    if (n > 0)
      term = f.mul(term, field_pow(f, t, n));
    else if (n < 0)
      term = f.mul(term, field_pow(f, tinv, -n));
    r = f.add(r, term);
  }
  return r;
}

// Over the fraction field the variable stays put; skip the term loop.
inline RatFun eval_laurent(const FracField& f, const RatFun&, const RatFun&,
                           const Laurent& x) {
  return f.from_laurent(x);
}

template <class F>
Mat<typename F::Elem> specialize_matrix(const F& f, const typename F::Elem& t,
                                        const typename F::Elem& tinv,
                                        const Mat<Laurent>& m) {
  Mat<typename F::Elem> r(m.rows, m.cols, f.zero());
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r.at(i, j) = eval_laurent(f, t, tinv, m.at(i, j));
  return r;
}

}  // namespace hendo
