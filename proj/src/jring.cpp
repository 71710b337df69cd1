#include "hendo/jring.hpp"

#include <gmpxx.h>

#include <random>
#include <utility>

#include "hendo/fields.hpp"
#include "hendo/hmodules.hpp"
#include "hendo/linalg.hpp"

namespace hendo {

namespace {

Mat<long> imat_mul(const Mat<long>& a, const Mat<long>& b) {
  Mat<long> out(a.rows, b.cols, 0);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      long v = a.at(i, k);
      if (v == 0) continue;
      for (int j = 0; j < b.cols; ++j) out.at(i, j) += v * b.at(k, j);
    }
  return out;
}

void add_scaled(Mat<Laurent>& acc, const Laurent& c, const Mat<long>& m) {
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      long g = m.at(i, j);
      if (g == 0) continue;
      if (g == 1)
        acc.at(i, j) += c;
      else if (g == -1)
        acc.at(i, j) += -c;
      else
        acc.at(i, j) += c * Laurent(g, c.ring());
    }
}

}  // namespace

std::string JElement::str(const CoxeterSystem& sys) const {
  if (coeffs.empty()) return "0";
  std::string out;
  for (const auto& [x, c] : coeffs) {
    if (!out.empty()) out += " + ";
    std::string cs = c.str();
    if (cs != "1") out += "(" + cs + ") ";
    out += "j[" + sys.word_str(x) + "]";
  }
  return out;
}

bool operator==(const JElement& a, const JElement& b) {
  return a.coeffs == b.coeffs;
}

JElement operator+(const JElement& a, const JElement& b) {
  JElement out = a;
  for (const auto& [x, c] : b.coeffs) out.add_term(x, c);
  return out;
}

JElement operator-(const JElement& a, const JElement& b) {
  JElement out = a;
  for (const auto& [x, c] : b.coeffs) out.add_term(x, -c);
  return out;
}

std::optional<Mat<Laurent>> find_intertwiner(const std::vector<Mat<Laurent>>& a,
                                             const std::vector<Mat<Laurent>>& b) {
  require(a.size() == b.size(), "shape-mismatch",
          "intertwiner needs matching action families");
  require(!a.empty(), "shape-mismatch", "intertwiner of an empty family");
  int k = a[0].rows;
  RingTag ring = RingTag::Z;
  for (const auto& fam : {a, b})
    for (const auto& m : fam) {
      require(m.rows == k && m.cols == k, "shape-mismatch",
              "intertwiner needs square matrices of one size");
      for (const auto& e : m.data)
        if (e.ring() == RingTag::Zsqrt2) ring = RingTag::Zsqrt2;
    }
  FracField f{ring};
  // unknowns u[p][q], equations (u a_i - b_i u)[r][c] = 0
  int vars = k * k;
  Mat<RatFun> sys = mat_zero(f, static_cast<int>(a.size()) * vars, vars);
  int row = 0;
  for (size_t i = 0; i < a.size(); ++i)
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c, ++row) {
        for (int q = 0; q < k; ++q)
          sys.at(row, r * k + q) = f.add(sys.at(row, r * k + q), RatFun(a[i].at(q, c)));
        for (int p = 0; p < k; ++p)
          sys.at(row, p * k + c) = f.sub(sys.at(row, p * k + c), RatFun(b[i].at(r, p)));
      }
  Mat<RatFun> ker = mat_kernel(f, sys);
  if (ker.cols == 0) return std::nullopt;

  auto try_candidate = [&](const std::vector<RatFun>& v) -> std::optional<Mat<Laurent>> {
    std::vector<Laurent> flat = saturate_vector(v, ring);
    Mat<Laurent> u(k, k, Laurent(ring));
    bool zero = true;
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q) {
        u.at(p, q) = flat[p * k + q];
        zero = zero && u.at(p, q).is_zero();
      }
    if (zero || laurent_det(u).is_zero()) return std::nullopt;
    LaurentRing lr{ring};
    for (size_t i = 0; i < a.size(); ++i)
      if (!(mat_mul(lr, u, a[i]) == mat_mul(lr, b[i], u))) return std::nullopt;
    return u;
  };

  for (int j = 0; j < ker.cols; ++j) {
    std::vector<RatFun> v;
    v.reserve(vars);
    for (int i = 0; i < vars; ++i) v.push_back(ker.at(i, j));
    if (auto u = try_candidate(v)) return u;
  }
  // random small combinations of the kernel basis; any invertible element of
  // the intertwiner space certifies the isomorphism
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> pick(-3, 3);
  for (int attempt = 0; attempt < 60; ++attempt) {
    std::vector<RatFun> v(vars, f.zero());
    for (int j = 0; j < ker.cols; ++j) {
      int c = pick(rng);
      if (c == 0) continue;
      for (int i = 0; i < vars; ++i)
        v[i] = f.add(v[i], f.mul(f.from_int(c), ker.at(i, j)));
    }
    if (auto u = try_candidate(v)) return u;
  }
  return std::nullopt;
}

JRing::JRing(const HeckeAlgebra& h, const CellDecomposition& cells,
             const AFunction& afun, const GammaData& gamma)
    : h_(&h), cells_(&cells), afun_(&afun), gamma_(&gamma), n_(h.group().size()) {
  for (const auto& [key, g] : gamma_->gamma) {
    auto [x, y, u] = key;
    by_xy_[{x, y}].emplace_back(u, g);
  }
}

long JRing::structure_constant(int x, int y, int z) const {
  auto it = gamma_->gamma.find({x, y, z});
  return it == gamma_->gamma.end() ? 0 : it->second;
}

JElement JRing::j_basis(int x) const {
  group().word_str(x);  // range check
  JElement out;
  out.add_term(x, Laurent(1, RingTag::Z));
  return out;
}

JElement JRing::j_mul(const JElement& a, const JElement& b) const {
  // the coefficient of j_z in j_x j_y is the top coefficient of h_{x,y,z}
  JElement out;
  for (const auto& [x, cx] : a.coeffs)
    for (const auto& [y, cy] : b.coeffs) {
      auto it = by_xy_.find({x, y});
      if (it == by_xy_.end()) continue;
      Laurent c = cx * cy;
      for (const auto& [z, g] : it->second) {
        if (g == 1)
          out.add_term(z, c);
        else if (g == -1)
          out.add_term(z, -c);
        else
          out.add_term(z, c * Laurent(g, c.ring()));
      }
    }
  return out;
}

const JElement& JRing::j_unit() const {
  if (unit_) return *unit_;
  // stack the coefficient equations of unit*j_x = j_x and j_x*unit = j_x
  QQField f;
  Mat<mpq_class> sys = mat_zero(f, 2 * n_ * n_, n_);
  std::vector<mpq_class> rhs(2 * n_ * n_, 0);
  for (const auto& [key, g] : gamma_->gamma) {
    auto [p, q, r] = key;
    // unknown coefficient at p of the unit, right multiplication by j_q
    sys.at(q * n_ + r, p) += g;
    // unknown coefficient at q, left multiplication view of j_p
    sys.at(n_ * n_ + p * n_ + r, q) += g;
  }
  for (int x = 0; x < n_; ++x) {
    rhs[x * n_ + x] = 1;
    rhs[n_ * n_ + x * n_ + x] = 1;
  }
  auto sol = mat_solve(f, sys, rhs);
  require(sol.has_value(), "P-failure", "the asymptotic ring has no two-sided unit");
  std::vector<mpq_class> expected(n_, 0);
  for (int d : gamma_->distinguished) expected[d] = gamma_->n.at(d);
  require(*sol == expected, "P-failure",
          "the solved unit is not the signed sum of the distinguished involutions");
  JElement u;
  for (int d : gamma_->distinguished)
    u.add_term(d, Laurent(gamma_->n.at(d), RingTag::Z));
  unit_ = std::move(u);
  return *unit_;
}

const Mat<Laurent>& JRing::phi_matrix() const {
  if (phi_) return *phi_;
  Mat<Laurent> p(n_, n_, Laurent(RingTag::Z));
  for (int w = 0; w < n_; ++w)
    for (int d : gamma_->distinguished) {
      long ad = afun_->a[d];
      for (const auto& [z, hv] : h_->h_row(w, d)) {
        if (afun_->a[z] != ad) continue;
        p.at(z, w) += gamma_->n_hat[z] == 1 ? hv : -hv;
      }
    }
  phi_ = std::move(p);
  return *phi_;
}

JElement JRing::varpi(const HeckeElement& a) const {
  require(a.system.get() == &group(), "system-mismatch",
          "element lives over a different Coxeter system");
  HeckeElement c = h_->convert(a, Basis::C);
  const auto& p = phi_matrix();
  JElement out;
  for (const auto& [w, cw] : c.coeffs)
    for (int z = 0; z < n_; ++z) {
      if (p.at(z, w).is_zero()) continue;
      out.add_term(z, cw * p.at(z, w));
    }
  return out;
}

const Mat<Laurent>& JRing::dagger_matrix() const {
  if (dagger_) return *dagger_;
  Mat<Laurent> d(n_, n_, Laurent(RingTag::Z));
  for (int w = 0; w < n_; ++w) {
    HeckeElement img = h_->dagger(h_->basis_element(Basis::C, w));
    for (const auto& [u, c] : img.coeffs) d.at(u, w) = c;
  }
  dagger_ = std::move(d);
  return *dagger_;
}

void JRing::verify_homomorphism() const {
  const auto& w = group();
  require(varpi(h_->basis_element(Basis::C, 0)) == j_unit(), "P-failure",
          "the column map is not unital");
  const auto& p = phi_matrix();
  for (int s = 0; s < w.rank(); ++s) {
    int se = w.element_from_word({s});
    JElement img_s;
    for (int x = 0; x < n_; ++x)
      if (!p.at(x, se).is_zero()) img_s.add_term(x, p.at(x, se));
    for (int v = 0; v < n_; ++v) {
      JElement img_v;
      for (int x = 0; x < n_; ++x)
        if (!p.at(x, v).is_zero()) img_v.add_term(x, p.at(x, v));
      JElement lhs = j_mul(img_s, img_v);
      JElement rhs;
      for (const auto& [z, hv] : h_->h_row(se, v))
        for (int x = 0; x < n_; ++x) {
          if (p.at(x, z).is_zero()) continue;
          rhs.add_term(x, hv * p.at(x, z));
        }
      require(lhs == rhs, "P-failure",
              "the column map fails multiplicativity at c_" + w.word_str(s) +
                  " times c_" + w.word_str(v));
    }
  }
  // the map factors through the dagger involution: applying dagger twice in
  // front changes nothing, as a matrix identity
  LaurentRing lr{RingTag::Z};
  const auto& d = dagger_matrix();
  Mat<Laurent> dd = mat_mul(lr, d, d);
  Mat<Laurent> eye(n_, n_, Laurent(RingTag::Z));
  for (int i = 0; i < n_; ++i) eye.at(i, i) = Laurent(1, RingTag::Z);
  require(dd == eye, "P-failure",
          "the dagger involution does not square to the identity");
  Mat<Laurent> on_dagger_basis = mat_mul(lr, p, d);
  require(mat_mul(lr, on_dagger_basis, d) == p, "P-failure",
          "the column map does not factor through the dagger involution");
}

void JRing::verify_invertible() const {
  require(laurent_rank(phi_matrix()) == n_, "P-failure",
          "the column map is singular over the fraction field");
}

std::vector<int> JRing::graded_piece(long a_value) const {
  std::vector<int> out;
  for (int x = 0; x < n_; ++x)
    if (afun_->a[x] == a_value) out.push_back(x);
  return out;
}

Mat<Laurent> JRing::boxdot_action(long a_value, const JElement& j) const {
  const auto& w = group();
  std::vector<int> labels = graded_piece(a_value);
  int k = static_cast<int>(labels.size());
  std::map<int, int> pos;
  for (int i = 0; i < k; ++i) pos.emplace(labels[i], i);
  Mat<Laurent> out(k, k, Laurent(RingTag::Z));
  for (const auto& [x, cx] : j.coeffs)
    for (int wi = 0; wi < k; ++wi) {
      auto it = by_xy_.find({x, labels[wi]});
      if (it == by_xy_.end()) continue;
      for (const auto& [z, g] : it->second) {
        auto zt = pos.find(z);
        require(zt != pos.end(), "P-failure",
                "the graded action moves " + w.word_str(labels[wi]) +
                    " outside its level");
        if (g == 1)
          out.at(zt->second, wi) += cx;
        else if (g == -1)
          out.at(zt->second, wi) += -cx;
        else
          out.at(zt->second, wi) += cx * Laurent(g, cx.ring());
      }
    }
  return out;
}

void JRing::verify_graded_action() const {
  const auto& w = group();
  // the structure table never crosses a-levels
  for (const auto& [key, g] : gamma_->gamma) {
    (void)g;
    auto [x, y, z] = key;
    (void)x;
    require(afun_->a[y] == afun_->a[z], "P-failure",
            "a structure constant moves " + w.word_str(y) + " across levels");
  }
  // left multiplication by c_s agrees with the image of c_s acting on the
  // level of w, and never drops below that level
  const auto& p = phi_matrix();
  for (int s = 0; s < w.rank(); ++s) {
    int se = w.element_from_word({s});
    std::map<int, Laurent> img;
    for (int x = 0; x < n_; ++x)
      if (!p.at(x, se).is_zero()) img.emplace(x, p.at(x, se));
    for (int v = 0; v < n_; ++v) {
      long av = afun_->a[v];
      std::map<int, Laurent> rhs;
      for (const auto& [x, cx] : img) {
        auto it = by_xy_.find({x, v});
        if (it == by_xy_.end()) continue;
        for (const auto& [z, g] : it->second) {
          Laurent add = g == 1 ? cx : (g == -1 ? -cx : cx * Laurent(g, cx.ring()));
          auto [jt, fresh] = rhs.emplace(z, add);
          if (!fresh) {
            jt->second += add;
            if (jt->second.is_zero()) rhs.erase(jt);
          }
        }
      }
      for (const auto& [z, hv] : h_->h_row(se, v)) {
        require(afun_->a[z] >= av, "P-failure",
                "the product c_" + w.word_str(s) + " c_" + w.word_str(v) +
                    " drops below its level");
        if (afun_->a[z] > av) continue;
        auto it = rhs.find(z);
        require(it != rhs.end() && it->second == hv, "P-failure",
                "graded action mismatch at c_" + w.word_str(s) + " c_" +
                    w.word_str(v) + " coefficient " + w.word_str(z));
        rhs.erase(it);
      }
      require(rhs.empty(), "P-failure",
              "graded action has extra support at c_" + w.word_str(s) + " c_" +
                  w.word_str(v));
    }
  }
}

JRing::CellLift JRing::lift_cell_module(int cell_index) const {
  require(cell_index >= 0 &&
              cell_index < static_cast<int>(cells_->left_cells.size()),
          "element-out-of-range",
          "no left cell " + std::to_string(cell_index));
  const auto& w = group();
  CellLift out;
  out.cell = cell_index;
  out.labels = cells_->left_cells[cell_index];
  int k = static_cast<int>(out.labels.size());
  std::map<int, int> pos;
  for (int i = 0; i < k; ++i) pos.emplace(out.labels[i], i);

  // action of each j_x on the span of the cell, from the structure table
  for (const auto& [key, g] : gamma_->gamma) {
    auto [x, y, z] = key;
    auto cy = pos.find(y);
    if (cy == pos.end()) continue;
    auto cz = pos.find(z);
    require(cz != pos.end(), "P-failure",
            "the asymptotic action leaves the cell at " + w.word_str(y));
    auto [it, fresh] = out.j_action.try_emplace(x, Mat<long>(k, k, 0));
    (void)fresh;
    it->second.at(cz->second, cy->second) += g;
  }
  for (auto it = out.j_action.begin(); it != out.j_action.end();) {
    bool zero = true;
    for (long v : it->second.data) zero = zero && v == 0;
    it = zero ? out.j_action.erase(it) : ++it;
  }

  // the unit acts as the identity
  Mat<long> uact(k, k, 0);
  for (int d : gamma_->distinguished) {
    auto it = out.j_action.find(d);
    if (it == out.j_action.end()) continue;
    int nd = gamma_->n.at(d);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) uact.at(i, j) += nd * it->second.at(i, j);
  }
  Mat<long> ieye(k, k, 0);
  for (int i = 0; i < k; ++i) ieye.at(i, i) = 1;
  if (!(uact.data == ieye.data)) {
    out.ok = false;
    out.note = "the unit does not act as the identity";
    return out;
  }

  // the action respects products of the asymptotic ring
  for (int x = 0; x < n_ && out.ok; ++x)
    for (int y = 0; y < n_ && out.ok; ++y) {
      auto ix = out.j_action.find(x);
      auto iy = out.j_action.find(y);
      Mat<long> lhs =
          (ix != out.j_action.end() && iy != out.j_action.end())
              ? imat_mul(ix->second, iy->second)
              : Mat<long>(k, k, 0);
      Mat<long> rhs(k, k, 0);
      auto it = by_xy_.find({x, y});
      if (it != by_xy_.end())
        for (const auto& [z, g] : it->second) {
          auto iz = out.j_action.find(z);
          if (iz == out.j_action.end()) continue;
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) rhs.at(i, j) += g * iz->second.at(i, j);
        }
      if (!(lhs.data == rhs.data)) {
        out.ok = false;
        out.note = "the restricted action is not multiplicative at j_" +
                   w.word_str(x) + " j_" + w.word_str(y);
      }
    }
  if (!out.ok) return out;

  // compare the restriction through the column map with the cell module
  BasedModule cm = cell_module(*h_, *cells_, cell_index);
  const auto& p = phi_matrix();
  std::vector<Mat<Laurent>> lifted;
  for (int s = 0; s < w.rank(); ++s) {
    int se = w.element_from_word({s});
    Mat<Laurent> m(k, k, Laurent(RingTag::Z));
    for (int x = 0; x < n_; ++x) {
      if (p.at(x, se).is_zero()) continue;
      auto it = out.j_action.find(x);
      if (it == out.j_action.end()) continue;
      add_scaled(m, p.at(x, se), it->second);
    }
    lifted.push_back(std::move(m));
  }
  out.identity_certificate = true;
  for (int s = 0; s < w.rank(); ++s)
    out.identity_certificate =
        out.identity_certificate && lifted[s] == cm.c_action[s];
  if (out.identity_certificate) {
    Mat<Laurent> eye(k, k, Laurent(RingTag::Z));
    for (int i = 0; i < k; ++i) eye.at(i, i) = Laurent(1, RingTag::Z);
    out.basis_change = std::move(eye);
    return out;
  }
  auto u = find_intertwiner(cm.c_action, lifted);
  if (!u) {
    out.ok = false;
    out.note = "no invertible intertwiner between the cell module and the lift";
    return out;
  }
  out.basis_change = std::move(*u);
  return out;
}

nlohmann::json JRing::report_json() const {
  const auto& w = group();
  nlohmann::json out;
  out["system"] = w.spec().tag.empty() ? "custom" : w.spec().tag;
  out["size"] = n_;
  nlohmann::json gm = nlohmann::json::array();
  for (const auto& [key, g] : gamma_->gamma) {
    auto [x, y, z] = key;
    gm.push_back({{"x", w.word_str(x)},
                  {"y", w.word_str(y)},
                  {"z", w.word_str(z)},
                  {"value", g}});
  }
  out["gamma"] = std::move(gm);
  nlohmann::json dist = nlohmann::json::array();
  for (int d : gamma_->distinguished)
    dist.push_back({{"element", w.word_str(d)}, {"sign", gamma_->n.at(d)}});
  out["distinguished"] = std::move(dist);
  out["unit"] = j_unit().str(w);
  try {
    verify_homomorphism();
    out["homomorphism"] = "verified";
  } catch (const Error& e) {
    out["homomorphism"] = e.what();
  }
  try {
    verify_graded_action();
    out["graded_action"] = "verified";
  } catch (const Error& e) {
    out["graded_action"] = e.what();
  }
  try {
    verify_invertible();
    out["invertible"] = true;
  } catch (const Error&) {
    out["invertible"] = false;
  }
  nlohmann::json lifts = nlohmann::json::array();
  for (int c = 0; c < static_cast<int>(cells_->left_cells.size()); ++c) {
    CellLift lift = lift_cell_module(c);
    nlohmann::json labels = nlohmann::json::array();
    for (int x : lift.labels) labels.push_back(w.word_str(x));
    lifts.push_back({{"cell", c},
                     {"labels", std::move(labels)},
                     {"ok", lift.ok},
                     {"identity", lift.identity_certificate},
                     {"note", lift.note}});
  }
  out["lifts"] = std::move(lifts);
  return out;
}

}  // namespace hendo
