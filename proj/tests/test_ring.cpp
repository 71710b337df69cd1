#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hendo/fields.hpp"
#include "hendo/linalg.hpp"

using namespace hendo;

namespace {

Laurent parse_terms(std::initializer_list<std::pair<long, long>> terms,
                    RingTag ring = RingTag::Z) {
  Laurent p(ring);
  for (auto& [exp, c] : terms) p.add_term(exp, Coeff(c));
  return p;
}

Laurent random_laurent(std::mt19937& rng, RingTag ring = RingTag::Z) {
  std::uniform_int_distribution<int> nterms(0, 5), expd(-6, 6), coeffd(-9, 9);
  Laurent p(ring);
  int k = nterms(rng);
  for (int i = 0; i < k; ++i) p.add_term(expd(rng), Coeff(coeffd(rng)));
  return p;
}

}  // namespace

TEST_CASE("quadratic integer arithmetic and gcd") {
  Coeff x(3, 2), y(1, -1);  // 3+2r2, 1-r2
  CHECK((x * y) == Coeff(-1, -1));
  CHECK(x.norm() == 1);  // 9 - 8, x is a unit
  CHECK(real_sign(Coeff(-3, 2)) < 0);
  CHECK(real_sign(Coeff(-1, 1)) > 0);
  CHECK(real_sign(Coeff(2, -1)) > 0);

  Coeff q;
  CHECK(div_exact(Coeff(7, 5), Coeff(1, 1), q));
  CHECK(q * Coeff(1, 1) == Coeff(7, 5));
  CHECK_FALSE(div_exact(Coeff(1, 0), Coeff(0, 1), q));  // 1/sqrt2 is not integral

  // gcd of associates is the canonical associate
  Coeff g = coeff_gcd(Coeff(2, 0), Coeff(0, 1) * Coeff(2, 0));
  CHECK(g == canonical_associate(Coeff(2, 0)));
  CHECK(canonical_associate(Coeff(-5)) == Coeff(5));
  // units all normalize to 1
  CHECK(canonical_associate(Coeff(1, 1)) == Coeff(1));
  CHECK(canonical_associate(Coeff(-1, 1)) == Coeff(1));
  CHECK(canonical_associate(Coeff(3, 2)) == Coeff(1));
  // canonical associate is idempotent and an associate
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-20, 20);
  for (int i = 0; i < 200; ++i) {
    Coeff v(d(rng), d(rng));
    if (v.is_zero()) continue;
    Coeff c = canonical_associate(v);
    CHECK(canonical_associate(c) == c);
    Coeff u;
    CHECK(div_exact(c, v, u));
    CHECK(abs(u.norm()) == 1);
  }
}

TEST_CASE("laurent polynomial ring basics") {
  Laurent a = parse_terms({{1, 1}, {-1, 1}});  // t + t^-1
  Laurent sq = a * a;
  CHECK(sq == parse_terms({{2, 1}, {0, 2}, {-2, 1}}));

  CHECK(a.bar() == a);
  Laurent b = parse_terms({{2, 3}, {0, -1}, {-5, 4}});
  CHECK(b.bar() == parse_terms({{-2, 3}, {0, -1}, {5, 4}}));
  CHECK(b.bar().bar() == b);

  // unique bar-symmetric completion from the nonnegative part
  Laurent c = parse_terms({{3, 1}, {1, -2}, {0, 7}, {-5, 1}});
  CHECK(c.make_bar_invariant() ==
        parse_terms({{3, 1}, {-3, 1}, {1, -2}, {-1, -2}, {0, 7}}));

  CHECK(parse_terms({{-1, 5}, {-3, 2}}).strictly_negative());
  CHECK_FALSE(parse_terms({{0, 1}}).strictly_negative());

  CHECK_THROWS_WITH_AS(parse_terms({{0, 1}}) + parse_terms({{0, 1}}, RingTag::Zsqrt2),
                       doctest::Contains("ring-mismatch"), Error);
}

TEST_CASE("laurent ring axioms on random elements") {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    Laurent x = random_laurent(rng), y = random_laurent(rng), z = random_laurent(rng);
    CHECK((x + y) * z == x * z + y * z);
    CHECK(x * y == y * x);
    CHECK((x * y) * z == x * (y * z));
    CHECK((x * y).bar() == x.bar() * y.bar());
    CHECK(x.make_bar_invariant().is_bar_symmetric());
    if (!x.is_zero()) {
      Coeff ct = x.content();
      Laurent prim = x.div_coeff(ct);
      CHECK(prim.content() == Coeff(1));
    }
  }
}

TEST_CASE("laurent json round trip") {
  std::mt19937 rng(13);
  for (int i = 0; i < 50; ++i) {
    Laurent x = random_laurent(rng);
    CHECK(Laurent::from_json(x.to_json()) == x);
  }
  Laurent big = Laurent::term(Coeff(mpz_class("123456789012345678901234567890")), -4);
  auto j = big.to_json();
  CHECK(j["coeffs"]["-4"].is_string());
  CHECK(Laurent::from_json(j) == big);

  Laurent s2 = Laurent::term(Coeff(2, -3), 1, RingTag::Zsqrt2);
  auto j2 = s2.to_json();
  CHECK(j2["ring"] == "Zsqrt2");
  Laurent back = Laurent::from_json(j2);
  CHECK(back == s2);
  CHECK(back.ring() == RingTag::Zsqrt2);

  CHECK_THROWS_AS(Laurent::from_json(nlohmann::json{{"ring", "Q"}, {"coeffs", {}}}),
                  Error);
  nlohmann::json zero_coeff{{"ring", "Z"}, {"coeffs", {{"0", 0}}}};
  CHECK_THROWS_AS(Laurent::from_json(zero_coeff), Error);
  nlohmann::json pair_in_z{{"ring", "Z"},
                           {"coeffs", {{"1", nlohmann::json::array({1, 2})}}}};
  CHECK_THROWS_WITH_AS(Laurent::from_json(pair_in_z),
                       doctest::Contains("ring-mismatch"), Error);
}

TEST_CASE("rational function canonical form") {
  Laurent t = Laurent::t_pow(1);
  Laurent one(1, RingTag::Z);

  RatFun f(t * t - one, t - one);  // (t^2-1)/(t-1) = t+1
  CHECK(f.is_laurent());
  CHECK(f.num() == t + one);

  // denominator normalization: lowest exponent 0, positive leading coefficient
  RatFun g(one, Laurent::term(Coeff(-2), -3) + Laurent::term(Coeff(2), -1));
  CHECK(g.den().low_exp() == 0);
  CHECK(real_sign(g.den().coeff(g.den().high_exp())) > 0);
  CHECK(g * RatFun(g.den()) == RatFun(g.num()));

  std::mt19937 rng(17);
  for (int i = 0; i < 60; ++i) {
    Laurent a = random_laurent(rng), b = random_laurent(rng);
    Laurent c = random_laurent(rng), d = random_laurent(rng);
    if (b.is_zero() || d.is_zero()) continue;
    RatFun x(a, b), y(c, d);
    // field axioms and canonical equality
    CHECK(x + y == y + x);
    CHECK(x * y == y * x);
    CHECK((x + y) - y == x);
    if (!y.is_zero()) CHECK((x / y) * y == x);
    // cross multiplication agrees with canonical equality
    RatFun scaled(a * d, b * d);
    CHECK(scaled == x);
  }
}

TEST_CASE("field evaluation of laurent polynomials") {
  // t^2 - 1 at t = 2 over F_3 is zero
  Laurent p = parse_terms({{2, 1}, {0, -1}});
  GFField f3(3, 1);
  CHECK(f3.is_zero(p.evaluate(f3, f3.from_int(2))));

  // negative exponents use the inverse: (t + t^-1) at t = 2 over F_5 is 2 + 3 = 0
  Laurent a = parse_terms({{1, 1}, {-1, 1}});
  GFField f5(5, 1);
  CHECK(f5.is_zero(a.evaluate(f5, f5.from_int(2))));

  QQField qq;
  CHECK(a.evaluate(qq, mpq_class(2)) == mpq_class(5, 2));

  // sqrt2 coefficients over GF(9)
  GFField f9(3, 2);
  CHECK(f9.has_sqrt2());
  auto r2 = f9.sqrt2();
  CHECK(f9.eq(f9.mul(r2, r2), f9.from_int(2)));
  Laurent s = Laurent::term(Coeff(0, 1), 0, RingTag::Zsqrt2);
  CHECK(f9.eq(s.evaluate(f9, f9.one()), r2));

  QSqrt2Field qs;
  auto v = s.evaluate(qs, qs.one());
  CHECK(qs.eq(qs.mul(v, v), qs.from_int(2)));
}

TEST_CASE("finite field arithmetic") {
  for (auto [p, m] : {std::pair<long, int>{2, 1}, {3, 2}, {5, 2}, {7, 1}, {3, 3}}) {
    GFField f(p, m);
    long n = f.order_long();
    // every nonzero element has an inverse; Frobenius fixes prime field
    for (long v = 1; v < n; ++v) {
      auto e = static_cast<GFField::Elem>(v);
      CHECK(f.eq(f.mul(e, f.inv(e)), f.one()));
    }
    for (long v = 0; v < std::min<long>(n, 20); ++v) {
      auto e = static_cast<GFField::Elem>(v);
      CHECK(f.eq(f.pow(e, n), e));  // x^{p^m} = x
    }
  }
  CHECK_THROWS_AS(GFField(4, 1), Error);
  CHECK_THROWS_AS(GFField(3, 1).sqrt2(), Error);  // 2 is not a square mod 3
}

TEST_CASE("exact linear algebra over the fraction field") {
  FracField f{RingTag::Z};
  Laurent t = Laurent::t_pow(1);

  // [[t, 1], [t^2, t]] has rank 1
  Mat<RatFun> m(2, 2, f.zero());
  m.at(0, 0) = RatFun(t);
  m.at(0, 1) = f.one();
  m.at(1, 0) = RatFun(t * t);
  m.at(1, 1) = RatFun(t);
  CHECK(mat_rank(f, m) == 1);

  Mat<Laurent> ml(2, 2, Laurent(RingTag::Z));
  ml.at(0, 0) = t;
  ml.at(0, 1) = Laurent(1, RingTag::Z);
  ml.at(1, 0) = t * t;
  ml.at(1, 1) = t;
  CHECK(laurent_rank(ml) == 1);
  CHECK(laurent_det(ml).is_zero());

  // kernel of [t-1, 1-t] is spanned by (1, 1)
  Mat<Laurent> k(1, 2, Laurent(RingTag::Z));
  k.at(0, 0) = t - Laurent(1, RingTag::Z);
  k.at(0, 1) = Laurent(1, RingTag::Z) - t;
  auto ker = laurent_kernel(k);
  REQUIRE(ker.size() == 1);
  CHECK(ker[0][0] == Laurent(1, RingTag::Z));
  CHECK(ker[0][1] == Laurent(1, RingTag::Z));

  // random invertibility round trip
  std::mt19937 rng(19);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 3;
    Mat<RatFun> a(n, n, f.zero());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        a.at(i, j) = RatFun(Laurent(d(rng), RingTag::Z) +
                            Laurent::term(Coeff(d(rng)), 1));
    auto inv = mat_inverse(f, a);
    if (!inv) continue;
    CHECK(mat_mul(f, a, *inv) == mat_identity(f, n));
  }
}

TEST_CASE("bareiss determinant matches cofactor expansion") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> d(-2, 2);
  for (int trial = 0; trial < 8; ++trial) {
    Mat<Laurent> a(3, 3, Laurent(RingTag::Z));
    for (auto& v : a.data) {
      v = Laurent(d(rng), RingTag::Z) + Laurent::term(Coeff(d(rng)), 1) +
          Laurent::term(Coeff(d(rng)), -1);
    }
    // cofactor expansion along the first row
    auto minor_det = [&](int skip) {
      Laurent r[2][2];
      int ii = 0;
      for (int i = 1; i < 3; ++i) {
        int jj = 0;
        for (int j = 0; j < 3; ++j) {
          if (j == skip) continue;
          r[ii][jj++] = a.at(i, j);
        }
        ++ii;
      }
      return r[0][0] * r[1][1] - r[0][1] * r[1][0];
    };
    Laurent want = a.at(0, 0) * minor_det(0) - a.at(0, 1) * minor_det(1) +
                   a.at(0, 2) * minor_det(2);
    CHECK(laurent_det(a) == want);
  }
}

TEST_CASE("smith normal form and integer kernels") {
  Mat<mpz_class> a(2, 2, 0);
  a.at(0, 0) = 2;
  a.at(0, 1) = 4;
  a.at(1, 0) = -2;
  a.at(1, 1) = 6;
  SmithResult s = smith_normal_form(a);
  auto diag = s.diagonal();
  REQUIRE(diag.size() == 2);
  CHECK(diag[0] == 2);
  CHECK(diag[1] == 10);

  // transform identity U A V = D
  std::mt19937 rng(29);
  std::uniform_int_distribution<int> d(-5, 5);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3, m = 4;
    Mat<mpz_class> x(n, m, 0);
    for (auto& v : x.data) v = d(rng);
    SmithResult r = smith_normal_form(x);
    // check U x V = D entrywise
    Mat<mpz_class> ux(n, m, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < n; ++k) ux.at(i, j) += r.u.at(i, k) * x.at(k, j);
    Mat<mpz_class> uxv(n, m, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) uxv.at(i, j) += ux.at(i, k) * r.v.at(k, j);
    CHECK(uxv == r.d);
    // divisibility chain
    auto diag2 = r.diagonal();
    for (size_t i = 0; i + 1 < diag2.size(); ++i) {
      if (diag2[i] == 0) CHECK(diag2[i + 1] == 0);
      if (diag2[i] != 0 && diag2[i + 1] != 0)
        CHECK(diag2[i + 1] % diag2[i] == 0);
    }
    // kernel columns really lie in the kernel
    for (auto& col : integer_kernel(x)) {
      for (int i = 0; i < n; ++i) {
        mpz_class acc = 0;
        for (int j = 0; j < m; ++j) acc += x.at(i, j) * col[j];
        CHECK(acc == 0);
      }
    }
  }
}
