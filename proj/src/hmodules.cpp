#include "hendo/hmodules.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hendo {

namespace {

RingTag module_ring(const BasedModule& m) {
  for (const auto& mat : m.c_action)
    for (const auto& v : mat.data)
      if (v.ring() == RingTag::Zsqrt2) return RingTag::Zsqrt2;
  return RingTag::Z;
}

Mat<Laurent> left_oriented(const BasedModule& m, int s) {
  return m.side == BasedModule::Side::Left ? m.c_action[s]
                                           : mat_transpose(m.c_action[s]);
}

// sorted positions of one cell inside the label list, by ascending label
std::vector<int> cell_positions(const BasedModule& m, const std::vector<int>& cell) {
  std::vector<int> pos;
  pos.reserve(cell.size());
  for (int x : cell) pos.push_back(m.position_of(x));
  std::sort(pos.begin(), pos.end());
  return pos;
}

// stacked (c_s - (t_s + t_s^{-1})) blocks for s in J; fixed vectors are its kernel
Mat<Laurent> stacked_eigen_system(const HeckeAlgebra& h,
                                  const std::vector<Mat<Laurent>>& act,
                                  unsigned jmask, int n) {
  LaurentRing r{RingTag::Z};
  std::vector<int> gens;
  for (int s = 0; s < h.group().rank(); ++s)
    if (jmask & (1u << s)) gens.push_back(s);
  Mat<Laurent> stacked = mat_zero(r, n * static_cast<int>(gens.size()), n);
  for (size_t g = 0; g < gens.size(); ++g) {
    int s = gens[g];
    Laurent eig = h.cs_eigenvalue(s);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Laurent v = act[s].at(i, j);
        if (i == j) v = v - eig;
        stacked.at(static_cast<int>(g) * n + i, j) = v;
      }
  }
  return stacked;
}

// integer matrix from a Laurent matrix specialized at t = q, rows rescaled
Mat<mpz_class> specialize_matrix(const Mat<Laurent>& m, long q) {
  QQField f;
  Mat<mpq_class> rat(m.rows, m.cols, f.zero());
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      rat.at(i, j) = m.at(i, j).evaluate(f, mpq_class(q));
  Mat<mpz_class> out(m.rows, m.cols, 0);
  for (int i = 0; i < m.rows; ++i) {
    mpz_class lcm = 1;
    for (int j = 0; j < m.cols; ++j) {
      mpz_class den = rat.at(i, j).get_den();
      lcm = lcm / gcd(lcm, den) * den;
    }
    for (int j = 0; j < m.cols; ++j) {
      mpq_class v = rat.at(i, j) * mpq_class(lcm);
      v.canonicalize();
      out.at(i, j) = v.get_num();
    }
  }
  return out;
}

}  // namespace

int BasedModule::position_of(int label) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), label);
  require(it != labels.end() && *it == label, "element-out-of-range",
          "label " + std::to_string(label) + " not in module basis");
  return static_cast<int>(it - labels.begin());
}

Mat<Laurent> BasedModule::t_action(int s) const {
  LaurentRing r{module_ring(*this)};
  Mat<Laurent> m = mat_scale(r, Laurent::t_pow(system->gen_weight(s), r.ring),
                             c_action[s]);
  for (int i = 0; i < m.rows; ++i)
    m.at(i, i) = m.at(i, i) - r.one();
  return m;
}

void verify_hecke_relations(const BasedModule& m) {
  const CoxeterSystem& w = *m.system;
  LaurentRing r{module_ring(m)};
  int n = m.rank();
  Mat<Laurent> id = mat_identity(r, n);
  std::vector<Mat<Laurent>> t;
  t.reserve(w.rank());
  for (int s = 0; s < w.rank(); ++s) t.push_back(m.t_action(s));

  for (int s = 0; s < w.rank(); ++s) {
    Laurent ts2 = Laurent::t_pow(2 * w.gen_weight(s), r.ring);
    Mat<Laurent> quad = mat_mul(r, mat_sub(r, t[s], mat_scale(r, ts2, id)),
                                mat_add(r, t[s], id));
    require(quad == mat_zero(r, n, n), "bad-module",
            "quadratic relation fails for generator " + std::to_string(s + 1));
  }
  for (int s = 0; s < w.rank(); ++s)
    for (int u = s + 1; u < w.rank(); ++u) {
      int order = w.coxeter_m(s, u);
      Mat<Laurent> a = id, b = id;
      for (int k = 0; k < order; ++k) {
        a = mat_mul(r, a, t[k % 2 == 0 ? s : u]);
        b = mat_mul(r, b, t[k % 2 == 0 ? u : s]);
      }
      require(a == b, "bad-module",
              "braid relation fails for generators " + std::to_string(s + 1) +
                  "," + std::to_string(u + 1));
    }
}

BasedModule cell_module(const HeckeAlgebra& h, const CellDecomposition& cells,
                        int cell) {
  require(cell >= 0 && cell < static_cast<int>(cells.left_cells.size()),
          "element-out-of-range", "left cell id " + std::to_string(cell));
  const CoxeterSystem& w = h.group();
  BasedModule m;
  m.system = h.system();
  m.side = BasedModule::Side::Left;
  m.labels = cells.left_cells[cell];
  std::sort(m.labels.begin(), m.labels.end());
  m.origin = "cell-module " + std::to_string(cell);
  int n = m.rank();
  LaurentRing r{RingTag::Z};
  for (int s = 0; s < w.rank(); ++s) {
    Mat<Laurent> a = mat_zero(r, n, n);
    int s_el = w.element_from_word({s});
    for (int j = 0; j < n; ++j)
      for (const auto& [z, c] : h.h_row(s_el, m.labels[j])) {
        if (cells.left_of[z] != cell) continue;
        a.at(m.position_of(z), j) = c;
      }
    m.c_action.push_back(std::move(a));
  }
  return m;
}

BasedModule dual_module(const BasedModule& m) {
  BasedModule d;
  d.system = m.system;
  d.side = m.side == BasedModule::Side::Left ? BasedModule::Side::Right
                                             : BasedModule::Side::Left;
  d.labels = m.labels;
  d.origin = "dual(" + m.origin + ")";
  for (const auto& a : m.c_action) d.c_action.push_back(mat_transpose(a));
  return d;
}

BasedModule dual_cell_module(const HeckeAlgebra& h, const CellDecomposition& cells,
                             int cell) {
  return dual_module(cell_module(h, cells, cell));
}

BasedModule q_perm_module(const HeckeAlgebra& h, const CellDecomposition& cells,
                          unsigned jmask, BasedModule::Side side) {
  const CoxeterSystem& w = h.group();
  int w0J = w.parabolic(jmask).w0J;
  BasedModule m;
  m.system = h.system();
  m.side = BasedModule::Side::Left;
  for (int v = 0; v < w.size(); ++v)
    if (cells.left_leq(v, w0J)) m.labels.push_back(v);
  m.origin = "qperm-left J=" + std::to_string(jmask);
  int n = m.rank();
  LaurentRing r{RingTag::Z};
  for (int s = 0; s < w.rank(); ++s) {
    Mat<Laurent> a = mat_zero(r, n, n);
    int s_el = w.element_from_word({s});
    for (int j = 0; j < n; ++j)
      for (const auto& [z, c] : h.h_row(s_el, m.labels[j]))
        a.at(m.position_of(z), j) = c;
    m.c_action.push_back(std::move(a));
  }
  if (side == BasedModule::Side::Left) return m;
  BasedModule d = dual_module(m);
  d.origin = "qperm-right J=" + std::to_string(jmask);
  return d;
}

std::vector<int> set_equality_w0J(const HeckeAlgebra& h,
                                  const CellDecomposition& cells, unsigned jmask) {
  const CoxeterSystem& w = h.group();
  int w0J = w.parabolic(jmask).w0J;
  std::vector<int> by_descent, by_length, by_order;
  std::set<int> additive;
  for (int v = 0; v < w.size(); ++v) {
    if ((w.right_descents(v) & jmask) == jmask) by_descent.push_back(v);
    int p = w.multiply(v, w0J);
    if (w.length(p) == w.length(v) + w.length(w0J)) additive.insert(p);
    if (cells.left_leq(v, w0J)) by_order.push_back(v);
  }
  by_length.assign(additive.begin(), additive.end());
  require(by_descent == by_length && by_length == by_order, "internal",
          "the three descriptions of the w0J ideal disagree at J=" +
              std::to_string(jmask));
  return by_order;
}

Filtration height_filtration(const HeckeAlgebra& h, const CellDecomposition& cells,
                             const BasedModule& m, const std::vector<long>& height) {
  require(height.size() == cells.left_cells.size(), "ground-set-mismatch",
          "one height per left cell expected");
  const CoxeterSystem& w = h.group();
  int n = m.rank();

  // positions grouped by cell; every touched cell must be fully present
  std::map<int, std::vector<int>> by_cell;
  for (int i = 0; i < n; ++i) by_cell[cells.left_of[m.labels[i]]].push_back(i);
  for (const auto& [c, pos] : by_cell)
    require(pos.size() == cells.left_cells[c].size(), "section-mismatch",
            "cell " + std::to_string(c) + " only partially present");

  std::vector<long> pos_height(n);
  for (int i = 0; i < n; ++i)
    pos_height[i] = height[cells.left_of[m.labels[i]]];
  std::vector<long> values;
  for (const auto& [c, pos] : by_cell) {
    (void)pos;
    values.push_back(height[c]);
  }
  std::sort(values.begin(), values.end(), std::greater<long>());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  // orient all checks as for a left module
  std::vector<Mat<Laurent>> act;
  act.reserve(w.rank());
  for (int s = 0; s < w.rank(); ++s) act.push_back(left_oriented(m, s));

  std::map<int, BasedModule> summand;
  for (const auto& [c, pos] : by_cell) {
    (void)pos;
    summand.emplace(c, cell_module(h, cells, c));
  }

  for (int s = 0; s < w.rank(); ++s)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Laurent& e = act[s].at(i, j);
        if (e.is_zero()) continue;
        require(pos_height[i] <= pos_height[j], "section-mismatch",
                "entry climbs from " + w.word_str(m.labels[j]) + " to " +
                    w.word_str(m.labels[i]));
        if (pos_height[i] != pos_height[j]) continue;
        require(cells.left_of[m.labels[i]] == cells.left_of[m.labels[j]],
                "section-mismatch",
                "cross-cell entry inside one section at " +
                    w.word_str(m.labels[j]));
      }
  // blocks on each fully present cell equal the cell module matrices
  for (const auto& [c, pos] : by_cell) {
    (void)pos;
    const BasedModule& cm = summand.at(c);
    std::vector<int> p = cell_positions(m, cm.labels);
    for (int s = 0; s < w.rank(); ++s)
      for (size_t a = 0; a < p.size(); ++a)
        for (size_t b = 0; b < p.size(); ++b)
          require(act[s].at(p[a], p[b]) ==
                      cm.c_action[s].at(static_cast<int>(a), static_cast<int>(b)),
                  "section-mismatch",
                  "section block differs from the cell module on cell " +
                      std::to_string(c));
  }

  Filtration f;
  f.side = m.side;
  for (long v : values) {
    FiltrationSection sec;
    sec.height = v;
    for (const auto& [c, pos] : by_cell) {
      if (height[c] != v) continue;
      sec.cells.push_back(c);
      sec.positions.insert(sec.positions.end(), pos.begin(), pos.end());
    }
    std::sort(sec.positions.begin(), sec.positions.end());
    f.sections.push_back(std::move(sec));
  }
  if (m.side == BasedModule::Side::Left) {
    std::vector<int> cur = m.labels;
    std::sort(cur.begin(), cur.end());
    f.chain.push_back(cur);
    for (const auto& sec : f.sections) {
      std::vector<int> drop;
      for (int p : sec.positions) drop.push_back(m.labels[p]);
      std::sort(drop.begin(), drop.end());
      std::vector<int> next;
      std::set_difference(cur.begin(), cur.end(), drop.begin(), drop.end(),
                          std::back_inserter(next));
      f.chain.push_back(next);
      cur = std::move(next);
    }
  } else {
    std::vector<int> cur;
    f.chain.push_back(cur);
    for (const auto& sec : f.sections) {
      for (int p : sec.positions) cur.push_back(m.labels[p]);
      std::sort(cur.begin(), cur.end());
      f.chain.push_back(cur);
    }
  }
  return f;
}

std::vector<std::vector<Laurent>> fixed_points(const HeckeAlgebra& h,
                                               const BasedModule& m, unsigned jmask) {
  require(m.side == BasedModule::Side::Left, "bad-module",
          "fixed points act on left modules");
  return laurent_kernel(stacked_eigen_system(h, m.c_action, jmask, m.rank()));
}

nlohmann::json onto_check(const HeckeAlgebra& h, const CellDecomposition& cells,
                          const std::vector<int>& K, const std::vector<int>& I,
                          unsigned jmask, const std::vector<long>& t_values) {
  const CoxeterSystem& w = h.group();
  std::vector<int> ks = K, is = I;
  std::sort(ks.begin(), ks.end());
  std::sort(is.begin(), is.end());
  require(std::includes(ks.begin(), ks.end(), is.begin(), is.end()),
          "not-an-ideal", "I must be contained in K");
  for (const std::vector<int>* set : {&ks, &is}) {
    std::set<int> members(set->begin(), set->end());
    for (int v : *set)
      for (int u = 0; u < w.size(); ++u)
        require(!cells.left_leq(u, v) || members.count(u), "not-an-ideal",
                "label set not closed downward at " + w.word_str(v));
  }

  int nk = static_cast<int>(ks.size());
  LaurentRing r{RingTag::Z};
  std::vector<Mat<Laurent>> act_k;
  auto pos_k = [&](int label) {
    return static_cast<int>(std::lower_bound(ks.begin(), ks.end(), label) -
                            ks.begin());
  };
  for (int s = 0; s < w.rank(); ++s) {
    Mat<Laurent> a = mat_zero(r, nk, nk);
    int s_el = w.element_from_word({s});
    for (int j = 0; j < nk; ++j)
      for (const auto& [z, c] : h.h_row(s_el, ks[j])) a.at(pos_k(z), j) = c;
    act_k.push_back(std::move(a));
  }

  std::vector<int> qs;
  std::set_difference(ks.begin(), ks.end(), is.begin(), is.end(),
                      std::back_inserter(qs));
  int nq = static_cast<int>(qs.size());
  std::vector<int> q_of_k;  // K position -> quotient position or -1
  q_of_k.assign(nk, -1);
  for (int i = 0; i < nq; ++i)
    q_of_k[pos_k(qs[i])] = i;
  std::vector<Mat<Laurent>> act_q;
  for (int s = 0; s < w.rank(); ++s) {
    Mat<Laurent> a = mat_zero(r, nq, nq);
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nk; ++j)
        if (q_of_k[i] >= 0 && q_of_k[j] >= 0)
          a.at(q_of_k[i], q_of_k[j]) = act_k[s].at(i, j);
    act_q.push_back(std::move(a));
  }

  Mat<Laurent> sys_k = stacked_eigen_system(h, act_k, jmask, nk);
  Mat<Laurent> sys_q = stacked_eigen_system(h, act_q, jmask, nq);

  nlohmann::json report;
  std::vector<int> jgens;
  for (int s = 0; s < w.rank(); ++s)
    if (jmask & (1u << s)) jgens.push_back(s + 1);
  report["J"] = jgens;
  report["K_size"] = nk;
  report["I_size"] = static_cast<int>(is.size());

  auto ka = laurent_kernel(sys_k);
  auto kb = laurent_kernel(sys_q);
  Mat<Laurent> proj = mat_zero(r, nq, static_cast<int>(ka.size()));
  for (size_t c = 0; c < ka.size(); ++c)
    for (int i = 0; i < nk; ++i)
      if (q_of_k[i] >= 0) proj.at(q_of_k[i], static_cast<int>(c)) = ka[c][i];
  int image_rank = laurent_rank(proj);
  bool generic_ok = image_rank == static_cast<int>(kb.size());
  report["generic"] = {{"fixed_rank_total", ka.size()},
                       {"fixed_rank_quotient", kb.size()},
                       {"image_rank", image_rank},
                       {"surjective", generic_ok}};

  bool all_ok = generic_ok;
  report["specializations"] = nlohmann::json::array();
  for (long q : t_values) {
    Mat<mpz_class> mk = specialize_matrix(sys_k, q);
    Mat<mpz_class> mq = specialize_matrix(sys_q, q);
    auto lk = integer_kernel(mk);
    auto lq = integer_kernel(mq);
    // project the kernel lattice of K and express it in the quotient basis
    QQField f;
    Mat<mpq_class> lqmat = mat_zero(f, nq, static_cast<int>(lq.size()));
    for (size_t c = 0; c < lq.size(); ++c)
      for (int i = 0; i < nq; ++i) lqmat.at(i, static_cast<int>(c)) = lq[c][i];
    Mat<mpz_class> cmat(static_cast<int>(lq.size()), static_cast<int>(lk.size()),
                        0);
    for (size_t c = 0; c < lk.size(); ++c) {
      std::vector<mpq_class> b(nq, 0);
      for (int i = 0; i < nk; ++i)
        if (q_of_k[i] >= 0) b[q_of_k[i]] = mpq_class(lk[c][i]);
      auto sol = mat_solve(f, lqmat, b);
      require(sol.has_value(), "internal",
              "projected fixed vector escapes the quotient kernel lattice");
      for (size_t i = 0; i < sol->size(); ++i) {
        mpq_class v = (*sol)[i];
        v.canonicalize();
        require(v.get_den() == 1, "internal",
                "projected fixed vector has fractional coordinates");
        cmat.at(static_cast<int>(i), static_cast<int>(c)) = v.get_num();
      }
    }
    SmithResult snf = smith_normal_form(cmat);
    auto diag = snf.diagonal();
    bool ok = true;
    int bad = -1;
    for (int i = 0; i < static_cast<int>(lq.size()); ++i) {
      mpz_class d = i < static_cast<int>(diag.size()) ? diag[i] : mpz_class(0);
      if (d == 1) continue;
      ok = false;
      bad = i;
      break;
    }
    nlohmann::json entry = {{"t", q},
                            {"lattice_rank_total", lk.size()},
                            {"lattice_rank_quotient", lq.size()},
                            {"surjective", ok}};
    if (!ok) {
      // a quotient lattice vector missed by the image: pull the bad Smith
      // coordinate back through U
      auto uinv = mat_inverse(f, [&] {
        Mat<mpq_class> u(snf.u.rows, snf.u.cols, mpq_class(0));
        for (size_t i = 0; i < snf.u.data.size(); ++i)
          u.data[i] = mpq_class(snf.u.data[i]);
        return u;
      }());
      std::vector<mpq_class> wit(nq, 0);
      if (uinv.has_value())
        for (int i = 0; i < nq; ++i) {
          mpq_class acc = 0;
          for (size_t c = 0; c < lq.size(); ++c)
            acc += lqmat.at(i, static_cast<int>(c)) *
                   uinv->at(static_cast<int>(c), bad);
          wit[i] = acc;
        }
      nlohmann::json jwit = nlohmann::json::array();
      for (int i = 0; i < nq; ++i)
        jwit.push_back({{"label", w.word_str(qs[i])}, {"value", wit[i].get_str()}});
      entry["witness"] = jwit;
    }
    report["specializations"].push_back(entry);
    all_ok = all_ok && ok;
  }
  report["surjective"] = all_ok;
  return report;
}

}  // namespace hendo
