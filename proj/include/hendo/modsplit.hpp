#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "hendo/error.hpp"
#include "hendo/fields.hpp"
#include "hendo/matrix.hpp"

namespace hendo {

// Univariate polynomial arithmetic over GF(p^m) and a Las Vegas splitter for
// modules given by their action matrices. Splitting is randomized but every
// outcome is certified: submodules are re-checked for stability and
// irreducibility claims come with a spin certificate on both the module and
// its transpose. A run that exhausts its attempt budget raises
// "chop-budget" rather than guessing.

using GFElem = GFField::Elem;
using GFPoly = std::vector<GFElem>;  // ascending coefficients, no trailing zeros

inline void gp_trim(GFPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int gp_deg(const GFPoly& a) { return static_cast<int>(a.size()) - 1; }

inline GFPoly gp_mul(const GFField& f, const GFPoly& a, const GFPoly& b) {
  if (a.empty() || b.empty()) return {};
  GFPoly r(a.size() + b.size() - 1, f.zero());
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
  }
  gp_trim(r);
  return r;
}

inline GFPoly gp_monic(const GFField& f, GFPoly a) {
  gp_trim(a);
  if (a.empty()) return a;
  auto c = f.inv(a.back());
  for (auto& v : a) v = f.mul(v, c);
  return a;
}

// Remainder of a by b; quotient is discarded.
inline GFPoly gp_rem(const GFField& f, GFPoly a, const GFPoly& b) {
  require(!b.empty(), "division-by-zero", "polynomial remainder by zero");
  auto lead_inv = f.inv(b.back());
  while (gp_deg(a) >= gp_deg(b)) {
    auto c = f.mul(a.back(), lead_inv);
    int shift = gp_deg(a) - gp_deg(b);
    for (size_t i = 0; i < b.size(); ++i)
      a[i + shift] = f.sub(a[i + shift], f.mul(c, b[i]));
    gp_trim(a);
    if (a.empty()) break;
  }
  return a;
}

inline GFPoly gp_div_exact(const GFField& f, GFPoly a, const GFPoly& b) {
  require(!b.empty(), "division-by-zero", "polynomial division by zero");
  GFPoly q(std::max<size_t>(a.size(), b.size()), f.zero());
  auto lead_inv = f.inv(b.back());
  while (gp_deg(a) >= gp_deg(b)) {
    auto c = f.mul(a.back(), lead_inv);
    int shift = gp_deg(a) - gp_deg(b);
    q[shift] = c;
    for (size_t i = 0; i < b.size(); ++i)
      a[i + shift] = f.sub(a[i + shift], f.mul(c, b[i]));
    gp_trim(a);
    if (a.empty()) break;
  }
  require(a.empty(), "inexact-division", "polynomial division left a remainder");
  gp_trim(q);
  return q;
}

inline GFPoly gp_gcd(const GFField& f, GFPoly a, GFPoly b) {
  gp_trim(a);
  gp_trim(b);
  while (!b.empty()) {
    auto r = gp_rem(f, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return gp_monic(f, a);
}

inline GFPoly gp_powmod(const GFField& f, GFPoly base, mpz_class e, const GFPoly& mod) {
  GFPoly r{f.one()};
  base = gp_rem(f, std::move(base), mod);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = gp_rem(f, gp_mul(f, r, base), mod);
    base = gp_rem(f, gp_mul(f, base, base), mod);
    e >>= 1;
  }
  return r;
}

inline GFPoly gp_random(const GFField& f, int deg, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> pick(0, f.order_long() - 1);
  GFPoly a(deg + 1, f.zero());
  for (auto& v : a) v = static_cast<GFElem>(pick(rng));
  gp_trim(a);
  return a;
}

// Splits a squarefree product of irreducibles of equal degree d.
inline void gp_equal_degree(const GFField& f, const GFPoly& h, int d,
                            std::mt19937_64& rng, std::vector<GFPoly>& out) {
  if (gp_deg(h) == d) {
    out.push_back(gp_monic(f, h));
    return;
  }
  mpz_class q = f.order_long();
  for (int attempt = 0; attempt < 200; ++attempt) {
    GFPoly a = gp_random(f, gp_deg(h) - 1, rng);
    if (gp_deg(a) < 1) continue;
    GFPoly u;
    if (f.p() != 2) {
      mpz_class e = 1;
      for (int i = 0; i < d; ++i) e *= q;
      e = (e - 1) / 2;
      GFPoly b = gp_powmod(f, a, e, h);
      if (b.empty()) continue;
      b[0] = f.sub(b.empty() ? f.zero() : b[0], f.one());
      gp_trim(b);
      u = gp_gcd(f, b, h);
    } else {
      // characteristic 2: additive trace map replaces the power map
      GFPoly tr = a, sq = a;
      long k = static_cast<long>(f.m()) * d;
      for (long i = 1; i < k; ++i) {
        sq = gp_rem(f, gp_mul(f, sq, sq), h);
        GFPoly next(std::max(tr.size(), sq.size()), f.zero());
        for (size_t j = 0; j < next.size(); ++j) {
          GFElem x = j < tr.size() ? tr[j] : f.zero();
          GFElem y = j < sq.size() ? sq[j] : f.zero();
          next[j] = f.add(x, y);
        }
        gp_trim(next);
        tr = std::move(next);
      }
      u = gp_gcd(f, tr, h);
    }
    if (gp_deg(u) > 0 && gp_deg(u) < gp_deg(h)) {
      gp_equal_degree(f, u, d, rng, out);
      gp_equal_degree(f, gp_div_exact(f, h, u), d, rng, out);
      return;
    }
  }
  fail("factor-budget", "equal-degree split did not converge");
}

// Distinct monic irreducible factors of a (multiplicities dropped).
inline std::vector<GFPoly> gp_distinct_factors(const GFField& f, GFPoly a,
                                               std::mt19937_64& rng) {
  a = gp_monic(f, a);
  std::vector<GFPoly> out;
  if (gp_deg(a) < 1) return out;
  mpz_class q = f.order_long();
  mpz_class qd = 1;
  for (int d = 1; 2 * d <= gp_deg(a); ++d) {
    qd *= q;
    // gcd with x^{q^d} - x picks up each irreducible of degree d exactly once
    GFPoly x{f.zero(), f.one()};
    GFPoly frob = gp_powmod(f, x, qd, a);
    GFPoly diff(std::max<size_t>(frob.size(), 2), f.zero());
    for (size_t i = 0; i < frob.size(); ++i) diff[i] = frob[i];
    diff[1] = f.sub(diff[1], f.one());
    gp_trim(diff);
    GFPoly h = gp_gcd(f, diff, a);
    if (gp_deg(h) > 0) {
      std::vector<GFPoly> part;
      gp_equal_degree(f, h, d, rng, part);
      for (auto& u : part) {
        out.push_back(u);
        while (true) {
          GFPoly r = gp_rem(f, a, u);
          if (!r.empty()) break;
          a = gp_div_exact(f, a, u);
        }
      }
    }
    if (gp_deg(a) < 1) break;
  }
  if (gp_deg(a) > 0) out.push_back(gp_monic(f, a));
  std::sort(out.begin(), out.end(), [](const GFPoly& x, const GFPoly& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    for (size_t i = x.size(); i-- > 0;)
      if (x[i] != y[i]) return x[i] < y[i];
    return false;
  });
  return out;
}

// A module over whatever algebra the caller has in mind, presented by the
// matrices of a generating family acting on column vectors.
struct GFModule {
  std::vector<Mat<GFElem>> act;
  int dim = 0;
};

namespace detail {

// Row space in echelon form with unit pivots, grown one vector at a time.
struct GFEchelon {
  const GFField* f = nullptr;
  int n = 0;
  std::vector<std::vector<GFElem>> rows;
  std::vector<int> pivots;

  GFEchelon(const GFField& field, int width) : f(&field), n(width) {}

  void reduce(std::vector<GFElem>& v) const {
    for (size_t r = 0; r < rows.size(); ++r) {
      GFElem c = v[pivots[r]];
      if (c == 0) continue;
      for (int j = 0; j < n; ++j) v[j] = f->sub(v[j], f->mul(c, rows[r][j]));
    }
  }

  bool add(std::vector<GFElem> v) {
    reduce(v);
    int p = -1;
    for (int j = 0; j < n; ++j)
      if (v[j] != 0) {
        p = j;
        break;
      }
    if (p < 0) return false;
    GFElem inv = f->inv(v[p]);
    for (auto& x : v) x = f->mul(x, inv);
    for (size_t r = 0; r < rows.size(); ++r) {
      GFElem c = rows[r][p];
      if (c == 0) continue;
      for (int j = 0; j < n; ++j) rows[r][j] = f->sub(rows[r][j], f->mul(c, v[j]));
    }
    rows.push_back(std::move(v));
    pivots.push_back(p);
    // keep rows sorted by pivot so coordinate extraction stays stable
    for (size_t r = rows.size(); r-- > 1;)
      if (pivots[r] < pivots[r - 1]) {
        std::swap(pivots[r], pivots[r - 1]);
        std::swap(rows[r], rows[r - 1]);
      }
    return true;
  }

  int dim() const { return static_cast<int>(rows.size()); }
};

inline std::vector<GFElem> gf_apply(const GFField& f, const Mat<GFElem>& m,
                                    const std::vector<GFElem>& v) {
  std::vector<GFElem> r(m.rows, f.zero());
  for (int i = 0; i < m.rows; ++i) {
    GFElem s = f.zero();
    for (int j = 0; j < m.cols; ++j)
      if (m.at(i, j) != 0 && v[j] != 0) s = f.add(s, f.mul(m.at(i, j), v[j]));
    r[i] = s;
  }
  return r;
}

// Closure of the given vectors under the action, as an echelon row space.
inline GFEchelon gf_spin(const GFField& f, const GFModule& m,
                         const std::vector<std::vector<GFElem>>& seeds) {
  GFEchelon e(f, m.dim);
  std::vector<std::vector<GFElem>> work;
  for (const auto& s : seeds)
    if (e.add(s)) work.push_back(e.rows.back());
  size_t head = 0;
  while (head < work.size()) {
    auto v = work[head++];
    for (const auto& a : m.act) {
      auto w = gf_apply(f, a, v);
      if (e.add(w)) work.push_back(e.rows.back());
    }
  }
  return e;
}

}  // namespace detail

// Restriction of the action to an invariant row space; raises
// "not-invariant" if the space fails to be stable.
inline GFModule gf_submodule(const GFField& f, const GFModule& m,
                             const detail::GFEchelon& basis) {
  int k = basis.dim();
  GFModule sub;
  sub.dim = k;
  for (const auto& a : m.act) {
    Mat<GFElem> r = mat_zero(f, k, k);
    for (int j = 0; j < k; ++j) {
      auto img = detail::gf_apply(f, a, basis.rows[j]);
      // coordinates against unit pivots, then the remainder must vanish
      for (int i = 0; i < k; ++i) {
        GFElem c = img[basis.pivots[i]];
        r.at(i, j) = c;
        if (c == 0) continue;
        for (int t = 0; t < basis.n; ++t)
          img[t] = f.sub(img[t], f.mul(c, basis.rows[i][t]));
      }
      for (int t = 0; t < basis.n; ++t)
        require(img[t] == 0, "not-invariant", "submodule basis is not stable");
    }
    sub.act.push_back(std::move(r));
  }
  return sub;
}

// Action induced on the quotient by an invariant row space, in the
// coordinates of the non-pivot positions.
inline GFModule gf_quotient(const GFField& f, const GFModule& m,
                            const detail::GFEchelon& basis) {
  std::vector<int> freepos;
  std::vector<char> ispivot(m.dim, 0);
  for (int p : basis.pivots) ispivot[p] = 1;
  for (int j = 0; j < m.dim; ++j)
    if (!ispivot[j]) freepos.push_back(j);
  int k = static_cast<int>(freepos.size());
  GFModule quo;
  quo.dim = k;
  for (const auto& a : m.act) {
    Mat<GFElem> r = mat_zero(f, k, k);
    for (int j = 0; j < k; ++j) {
      std::vector<GFElem> v(m.dim, f.zero());
      v[freepos[j]] = f.one();
      auto img = detail::gf_apply(f, a, v);
      basis.reduce(img);
      for (int i = 0; i < k; ++i) r.at(i, j) = img[freepos[i]];
    }
    quo.act.push_back(std::move(r));
  }
  return quo;
}

namespace detail {

inline Mat<GFElem> gf_poly_at(const GFField& f, const GFPoly& g, const Mat<GFElem>& m) {
  auto r = mat_zero(f, m.rows, m.cols);
  for (size_t i = g.size(); i-- > 0;) {
    r = mat_mul(f, r, m);
    for (int d = 0; d < m.rows; ++d) r.at(d, d) = f.add(r.at(d, d), g[i]);
  }
  return r;
}

inline Mat<GFElem> gf_random_element(const GFField& f, const GFModule& m,
                                     std::mt19937_64& rng) {
  std::uniform_int_distribution<long> coef(0, f.order_long() - 1);
  std::uniform_int_distribution<size_t> pick(0, m.act.empty() ? 0 : m.act.size() - 1);
  std::uniform_int_distribution<int> len(1, 3);
  auto r = mat_zero(f, m.dim, m.dim);
  // scalar shift only: a scalar preserves every invariant subspace, an
  // arbitrary diagonal does not and would break the spin certificates
  GFElem shift = static_cast<GFElem>(coef(rng));
  for (int d = 0; d < m.dim; ++d) r.at(d, d) = shift;
  int words = 2 + static_cast<int>(rng() % 3);
  for (int w = 0; w < words; ++w) {
    auto term = m.act[pick(rng)];
    int l = len(rng);
    for (int i = 1; i < l; ++i) term = mat_mul(f, term, m.act[pick(rng)]);
    GFElem c = static_cast<GFElem>(coef(rng));
    if (c == 0) c = f.one();
    for (size_t i = 0; i < term.data.size(); ++i)
      r.data[i] = f.add(r.data[i], f.mul(c, term.data[i]));
  }
  return r;
}

}  // namespace detail

// One split attempt loop. Returns the two pieces of a proper invariant
// subspace, or nothing when the module is certified irreducible.
inline std::optional<std::pair<GFModule, GFModule>> gf_chop_once(
    const GFField& f, const GFModule& m, std::mt19937_64& rng, int budget) {
  require(m.dim > 0, "empty-module", "chop of a zero module");
  if (m.dim == 1) return std::nullopt;
  GFModule mt;
  mt.dim = m.dim;
  for (const auto& a : m.act) mt.act.push_back(mat_transpose(a));
  for (int attempt = 0; attempt < budget; ++attempt) {
    auto theta = detail::gf_random_element(f, m, rng);
    auto cp = charpoly(f, theta);
    auto factors = gp_distinct_factors(f, cp, rng);
    for (const auto& g : factors) {
      auto ng = detail::gf_poly_at(f, g, theta);
      auto ker = mat_kernel(f, ng);
      if (ker.cols == 0) continue;
      for (int c = 0; c < ker.cols; ++c) {
        std::vector<GFElem> v(m.dim);
        for (int i = 0; i < m.dim; ++i) v[i] = ker.at(i, c);
        auto span = detail::gf_spin(f, m, {v});
        if (span.dim() < m.dim)
          return std::make_pair(gf_submodule(f, m, span), gf_quotient(f, m, span));
      }
      if (ker.cols == gp_deg(g)) {
        // minimal nullity: one spin on the transpose settles irreducibility
        auto kert = mat_kernel(f, mat_transpose(ng));
        require(kert.cols > 0, "certificate", "transpose kernel vanished");
        std::vector<GFElem> w(m.dim);
        for (int i = 0; i < m.dim; ++i) w[i] = kert.at(i, 0);
        auto spant = detail::gf_spin(f, mt, {w});
        if (spant.dim() == m.dim) return std::nullopt;
        // annihilator of a proper transposed submodule is a proper submodule
        Mat<GFElem> rowsmat(spant.dim(), m.dim, f.zero());
        for (int i = 0; i < spant.dim(); ++i)
          for (int j = 0; j < m.dim; ++j) rowsmat.at(i, j) = spant.rows[i][j];
        auto ann = mat_kernel(f, rowsmat);
        require(ann.cols > 0 && ann.cols < m.dim, "certificate",
                "annihilator has the wrong dimension");
        std::vector<std::vector<GFElem>> seeds;
        for (int c = 0; c < ann.cols; ++c) {
          std::vector<GFElem> v(m.dim);
          for (int i = 0; i < m.dim; ++i) v[i] = ann.at(i, c);
          seeds.push_back(std::move(v));
        }
        auto span = detail::gf_spin(f, m, seeds);
        require(span.dim() < m.dim, "certificate", "annihilator spun up");
        return std::make_pair(gf_submodule(f, m, span), gf_quotient(f, m, span));
      }
    }
  }
  fail("chop-budget", "module split did not converge within the attempt budget");
}

// Schur test: between irreducibles, any nonzero intertwiner is invertible,
// so existence is a rank computation rather than a random search.
inline bool gf_irreducible_isomorphic(const GFField& f, const GFModule& a,
                                      const GFModule& b) {
  if (a.dim != b.dim || a.act.size() != b.act.size()) return false;
  int n = a.dim;
  int rows = static_cast<int>(a.act.size()) * n * n;
  Mat<GFElem> sys(rows, n * n, f.zero());
  int r = 0;
  for (size_t s = 0; s < a.act.size(); ++s) {
    // U a_s - b_s U = 0, unknowns U[p][q] flattened row-major
    for (int p = 0; p < n; ++p)
      for (int c = 0; c < n; ++c) {
        for (int q = 0; q < n; ++q) {
          sys.at(r, p * n + q) = f.add(sys.at(r, p * n + q), a.act[s].at(q, c));
          sys.at(r, q * n + c) = f.sub(sys.at(r, q * n + c), b.act[s].at(p, q));
        }
        ++r;
      }
  }
  return mat_kernel(f, sys).cols > 0;
}

struct GFFactor {
  GFModule rep;
  int mult = 0;
  std::string fingerprint;
};

// Trace fingerprint along a seeded word list; a cheap label that is equal for
// isomorphic modules of the same algebra and usually distinguishes the rest.
inline std::string gf_module_fingerprint(const GFField& f, const GFModule& m,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x66696e67ULL);
  std::string out = "d" + std::to_string(m.dim);
  for (int w = 0; w < 16; ++w) {
    int l = 1 + static_cast<int>(rng() % 3);
    auto prod = mat_identity(f, m.dim);
    for (int i = 0; i < l; ++i) prod = mat_mul(f, prod, m.act[rng() % m.act.size()]);
    GFElem tr = f.zero();
    for (int i = 0; i < m.dim; ++i) tr = f.add(tr, prod.at(i, i));
    out += ":" + std::to_string(tr);
  }
  return out;
}

// Full composition series leaves, grouped up to isomorphism.
inline std::vector<GFFactor> gf_composition_factors(const GFField& f, const GFModule& m,
                                                    std::uint64_t seed, int budget = 200) {
  std::vector<GFModule> queue{m}, leaves;
  std::mt19937_64 rng(seed);
  while (!queue.empty()) {
    GFModule cur = std::move(queue.back());
    queue.pop_back();
    if (cur.dim == 0) continue;
    auto split = gf_chop_once(f, cur, rng, budget);
    if (!split) {
      leaves.push_back(std::move(cur));
      continue;
    }
    queue.push_back(std::move(split->first));
    queue.push_back(std::move(split->second));
  }
  std::vector<GFFactor> out;
  for (auto& leaf : leaves) {
    std::string fp = gf_module_fingerprint(f, leaf, seed);
    bool merged = false;
    for (auto& fac : out) {
      if (fac.fingerprint != fp) continue;
      if (gf_irreducible_isomorphic(f, fac.rep, leaf)) {
        ++fac.mult;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({std::move(leaf), 1, fp});
  }
  std::sort(out.begin(), out.end(), [](const GFFactor& x, const GFFactor& y) {
    if (x.rep.dim != y.rep.dim) return x.rep.dim < y.rep.dim;
    return x.fingerprint < y.fingerprint;
  });
  return out;
}

}  // namespace hendo
