#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "hendo/hmodules.hpp"
#include "hendo/jring.hpp"
#include "hendo/linalg.hpp"

using namespace hendo;

namespace {

std::shared_ptr<const CoxeterSystem> group(const std::string& name) {
  return CoxeterSystem::build(SystemSpec::from_catalog(name));
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

struct Setup {
  HeckeAlgebra h;
  CellDecomposition cells;
  AFunction afun;
  GammaData gamma;
  JRing jr;

  explicit Setup(const std::string& name)
      : h(group(name)),
        cells(cell_decomposition(h)),
        afun(a_function(h, cells)),
        gamma(gamma_table(h, cells, afun)),
        jr(h, cells, afun, gamma) {}
};

Laurent lterm(long c, long e) { return Laurent::term(Coeff(c), e, RingTag::Z); }

JElement make_j(std::map<int, long> terms) {
  JElement out;
  for (auto [x, c] : terms) out.add_term(x, Laurent(c, RingTag::Z));
  return out;
}

Mat<long> action_of(const JRing::CellLift& lift, int x) {
  auto it = lift.j_action.find(x);
  int k = static_cast<int>(lift.labels.size());
  return it == lift.j_action.end() ? Mat<long>(k, k, 0) : it->second;
}

}  // namespace

TEST_CASE("products of basis elements") {
  Setup a2("A2");
  // s1 has an idempotent image since the top coefficient of h_{s1,s1,s1} is 1
  CHECK(a2.jr.structure_constant(1, 1, 1) == 1);
  CHECK(a2.jr.j_mul(a2.jr.j_basis(1), a2.jr.j_basis(1)) == a2.jr.j_basis(1));
  // hand expansion of c_{s2 s1} c_{s1 s2} = (t + 1/t)(c_{w0} + c_{s2}) puts
  // j_{s2 s1} j_{s1 s2} = j_{s2}
  CHECK(a2.jr.j_mul(a2.jr.j_basis(4), a2.jr.j_basis(3)) == a2.jr.j_basis(2));

  for (const char* tag : {"A2", "B2"}) {
    Setup st(tag);
    int n = st.h.group().size();
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        JElement p = st.jr.j_mul(st.jr.j_basis(x), st.jr.j_basis(y));
        if (st.cells.two_sided_of[x] != st.cells.two_sided_of[y]) {
          CHECK(p.is_zero());
          continue;
        }
        // products stay inside the shared two-sided cell
        for (const auto& [z, c] : p.coeffs) {
          (void)c;
          CHECK(st.cells.two_sided_of[z] == st.cells.two_sided_of[x]);
        }
      }
  }
}

TEST_CASE("multiplication is associative") {
  for (const char* tag : {"A2", "B2"}) {
    Setup st(tag);
    int n = st.h.group().size();
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
          JElement jx = st.jr.j_basis(x), jy = st.jr.j_basis(y), jz = st.jr.j_basis(z);
          CHECK(st.jr.j_mul(st.jr.j_mul(jx, jy), jz) ==
                st.jr.j_mul(jx, st.jr.j_mul(jy, jz)));
        }
  }
  for (const char* tag : {"A1", "G2", "SU4", "SU5", "2F4"}) {
    Setup st(tag);
    int n = st.h.group().size();
    std::mt19937 rng(20260815);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int trial = 0; trial < 2000; ++trial) {
      JElement jx = st.jr.j_basis(pick(rng));
      JElement jy = st.jr.j_basis(pick(rng));
      JElement jz = st.jr.j_basis(pick(rng));
      CHECK(st.jr.j_mul(st.jr.j_mul(jx, jy), jz) ==
            st.jr.j_mul(jx, st.jr.j_mul(jy, jz)));
    }
  }
  // sparse elements with Laurent coefficients associate as well
  Setup a2("A2");
  std::mt19937 rng(97);
  std::uniform_int_distribution<int> pick(0, 5), exp(-2, 2), coef(-3, 3);
  auto sparse = [&]() {
    JElement out;
    for (int terms = 0; terms < 2; ++terms)
      out.add_term(pick(rng), lterm(coef(rng), exp(rng)));
    return out;
  };
  for (int trial = 0; trial < 300; ++trial) {
    JElement jx = sparse(), jy = sparse(), jz = sparse();
    CHECK(a2.jr.j_mul(a2.jr.j_mul(jx, jy), jz) ==
          a2.jr.j_mul(jx, a2.jr.j_mul(jy, jz)));
  }
}

TEST_CASE("the unit is the signed sum of distinguished involutions") {
  Setup a1("A1");
  CHECK(a1.jr.j_unit() == make_j({{0, 1}, {1, 1}}));
  Setup a2("A2");
  CHECK(a2.jr.j_unit() == make_j({{0, 1}, {1, 1}, {2, 1}, {5, 1}}));
  for (const char* tag : {"A1", "A2", "B2", "G2", "SU4", "SU5", "2F4"}) {
    Setup st(tag);
    const JElement& u = st.jr.j_unit();
    for (const auto& [d, c] : u.coeffs) {
      CHECK(st.h.group().multiply(d, d) == 0);
      CHECK((c == Laurent(1, RingTag::Z) || c == Laurent(-1, RingTag::Z)));
    }
    for (int x = 0; x < st.h.group().size(); ++x) {
      CHECK(st.jr.j_mul(u, st.jr.j_basis(x)) == st.jr.j_basis(x));
      CHECK(st.jr.j_mul(st.jr.j_basis(x), u) == st.jr.j_basis(x));
    }
  }
}

TEST_CASE("images of KL basis elements multiply like the algebra") {
  for (const char* tag : {"A1", "A2", "B2", "G2", "SU4", "SU5", "2F4", "A3"}) {
    Setup st(tag);
    CHECK_NOTHROW(st.jr.verify_homomorphism());
  }
  Setup a2("A2");
  // the image of c_{s1}, expanded by hand from the distinguished involutions
  JElement img1;
  img1.add_term(1, lterm(1, 1) + lterm(1, -1));
  img1.add_term(3, Laurent(1, RingTag::Z));
  img1.add_term(5, lterm(1, 1) + lterm(1, -1));
  CHECK(a2.jr.varpi(a2.h.basis_element(Basis::C, 1)) == img1);
  CHECK(a2.jr.varpi(a2.h.basis_element(Basis::C, 0)) == a2.jr.j_unit());
  // multiplicativity through the element interface on all pairs
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y) {
      HeckeElement cx = a2.h.basis_element(Basis::C, x);
      HeckeElement cy = a2.h.basis_element(Basis::C, y);
      CHECK(a2.jr.varpi(a2.h.mul(cx, cy)) ==
            a2.jr.j_mul(a2.jr.varpi(cx), a2.jr.varpi(cy)));
    }
}

TEST_CASE("the column map is nonsingular") {
  for (const char* tag : {"A1", "A2", "B2", "G2", "SU4", "SU5", "2F4", "A3"}) {
    Setup st(tag);
    const auto& p = st.jr.phi_matrix();
    CHECK(p.rows == st.h.group().size());
    CHECK(p.cols == st.h.group().size());
    CHECK_NOTHROW(st.jr.verify_invertible());
  }
}

TEST_CASE("the dagger involution squares to the identity") {
  for (const char* tag : {"A2", "B2"}) {
    Setup st(tag);
    int n = st.h.group().size();
    const auto& d = st.jr.dagger_matrix();
    LaurentRing lr{RingTag::Z};
    Mat<Laurent> eye(n, n, Laurent(RingTag::Z));
    for (int i = 0; i < n; ++i) eye.at(i, i) = Laurent(1, RingTag::Z);
    CHECK(mat_mul(lr, d, d) == eye);
    // dagger respects products, so the factored map inherits multiplicativity
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        HeckeElement cx = st.h.basis_element(Basis::C, x);
        HeckeElement cy = st.h.basis_element(Basis::C, y);
        CHECK(st.h.dagger(st.h.mul(cx, cy)) ==
              st.h.mul(st.h.dagger(cx), st.h.dagger(cy)));
      }
  }
}

TEST_CASE("graded pieces and the boxdot action") {
  Setup a2("A2");
  CHECK(a2.jr.graded_piece(0) == std::vector<int>{0});
  CHECK(a2.jr.graded_piece(1) == std::vector<int>{1, 2, 3, 4});
  CHECK(a2.jr.graded_piece(3) == std::vector<int>{5});
  CHECK(a2.jr.graded_piece(2).empty());
  // the bottom piece is one dimensional and only the identity acts on it
  for (int x = 0; x < 6; ++x) {
    Mat<Laurent> m = a2.jr.boxdot_action(0, a2.jr.j_basis(x));
    CHECK(m.rows == 1);
    CHECK(m.at(0, 0) == Laurent(x == 0 ? 1 : 0, RingTag::Z));
  }
  CHECK(a2.jr.boxdot_action(3, a2.jr.j_basis(5)).at(0, 0) == Laurent(1, RingTag::Z));
  for (const char* tag : {"A1", "A2", "B2", "G2", "SU4", "SU5", "2F4"}) {
    Setup st(tag);
    CHECK_NOTHROW(st.jr.verify_graded_action());
    // the unit acts as the identity on every graded piece
    std::set<long> levels(st.afun.a.begin(), st.afun.a.end());
    for (long a : levels) {
      Mat<Laurent> m = st.jr.boxdot_action(a, st.jr.j_unit());
      CHECK(m.rows == static_cast<int>(st.jr.graded_piece(a).size()));
      Mat<Laurent> eye(m.rows, m.rows, Laurent(RingTag::Z));
      for (int i = 0; i < m.rows; ++i) eye.at(i, i) = Laurent(1, RingTag::Z);
      CHECK(m == eye);
    }
  }
}

TEST_CASE("cell module lifts with identity certificates") {
  for (const char* tag : {"A2", "B2", "2F4"}) {
    Setup st(tag);
    for (int c = 0; c < static_cast<int>(st.cells.left_cells.size()); ++c) {
      JRing::CellLift lift = st.jr.lift_cell_module(c);
      CHECK(lift.ok);
      CHECK(lift.identity_certificate);
      CHECK(lift.labels == st.cells.left_cells[c]);
      int k = static_cast<int>(lift.labels.size());
      CHECK(lift.basis_change.rows == k);
      // only members of the matching two-sided cell act
      for (const auto& [x, m] : lift.j_action) {
        (void)m;
        CHECK(st.cells.two_sided_of[x] ==
              st.cells.two_sided_of[lift.labels.front()]);
      }
    }
  }
  Setup a2("A2");
  // the top cell is a sign-like line: only j_{w0} acts, by 1
  int top = a2.cells.left_of[5];
  JRing::CellLift tl = a2.jr.lift_cell_module(top);
  CHECK(tl.labels == std::vector<int>{5});
  CHECK(tl.j_action.size() == 1);
  CHECK(action_of(tl, 5).at(0, 0) == 1);
  // the middle cell carries the full 2x2 matrix units, worked out by hand
  int mid = a2.cells.left_of[2];
  JRing::CellLift ml = a2.jr.lift_cell_module(mid);
  CHECK(ml.labels == std::vector<int>{2, 3});
  CHECK(ml.j_action.size() == 4);
  CHECK(action_of(ml, 1).data == std::vector<long>{0, 0, 0, 1});
  CHECK(action_of(ml, 2).data == std::vector<long>{1, 0, 0, 0});
  CHECK(action_of(ml, 3).data == std::vector<long>{0, 0, 1, 0});
  CHECK(action_of(ml, 4).data == std::vector<long>{0, 1, 0, 0});
}

TEST_CASE("intertwiner search certifies twisted module copies") {
  Setup a2("A2");
  int mid = a2.cells.left_of[2];
  BasedModule cm = cell_module(a2.h, a2.cells, mid);
  // conjugate by a unimodular change of basis and recover a certificate
  LaurentRing lr{RingTag::Z};
  Mat<Laurent> v(2, 2, Laurent(RingTag::Z));
  v.at(0, 0) = v.at(0, 1) = v.at(1, 1) = Laurent(1, RingTag::Z);
  Mat<Laurent> vinv(2, 2, Laurent(RingTag::Z));
  vinv.at(0, 0) = vinv.at(1, 1) = Laurent(1, RingTag::Z);
  vinv.at(0, 1) = Laurent(-1, RingTag::Z);
  std::vector<Mat<Laurent>> twisted;
  for (const auto& m : cm.c_action)
    twisted.push_back(mat_mul(lr, mat_mul(lr, v, m), vinv));
  auto u = find_intertwiner(cm.c_action, twisted);
  REQUIRE(u.has_value());
  CHECK(!laurent_det(*u).is_zero());
  for (size_t s = 0; s < twisted.size(); ++s)
    CHECK(mat_mul(lr, *u, cm.c_action[s]) == mat_mul(lr, twisted[s], *u));
  // no intertwiner onto a scalar module of the same rank
  std::vector<Mat<Laurent>> scalar;
  for (int s = 0; s < 2; ++s) {
    Mat<Laurent> m(2, 2, Laurent(RingTag::Z));
    m.at(0, 0) = m.at(1, 1) = a2.h.cs_eigenvalue(s);
    scalar.push_back(std::move(m));
  }
  CHECK(!find_intertwiner(cm.c_action, scalar).has_value());
}

TEST_CASE("report serialization") {
  Setup a2("A2");
  nlohmann::json r = a2.jr.report_json();
  CHECK(r.at("system") == "A2");
  CHECK(r.at("size") == 6);
  CHECK(r.at("homomorphism") == "verified");
  CHECK(r.at("graded_action") == "verified");
  CHECK(r.at("invertible") == true);
  CHECK(r.at("unit").get<std::string>().find("j[e]") != std::string::npos);
  CHECK(r.at("distinguished").size() == 4);
  CHECK(r.at("lifts").size() == a2.cells.left_cells.size());
  for (const auto& lift : r.at("lifts")) {
    CHECK(lift.at("ok") == true);
    CHECK(lift.at("identity") == true);
  }
  CHECK(!r.at("gamma").empty());
}

TEST_CASE("misuse errors") {
  Setup a2("A2");
  CHECK(code_of([&] { a2.jr.lift_cell_module(-1); }) == "element-out-of-range");
  CHECK(code_of([&] { a2.jr.lift_cell_module(99); }) == "element-out-of-range");
  Setup b2("B2");
  CHECK(code_of([&] {
          a2.jr.varpi(b2.h.basis_element(Basis::C, 1));
        }) == "system-mismatch");
  CHECK(code_of([&] {
          find_intertwiner({}, {});
        }) == "shape-mismatch");
  Mat<Laurent> one(1, 1, Laurent(1, RingTag::Z));
  Mat<Laurent> two(2, 2, Laurent(1, RingTag::Z));
  CHECK(code_of([&] { find_intertwiner({one}, {two}); }) == "shape-mismatch");
}
