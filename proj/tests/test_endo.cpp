#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "hendo/cells.hpp"
#include "hendo/endo.hpp"
#include "hendo/error.hpp"

using namespace hendo;
using nlohmann::json;

namespace {

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

struct ESetup {
  HeckeAlgebra h;
  CellDecomposition cells;
  AFunction afun;
  EndoAlgebra alg;

  ESetup(const std::string& name, bool schur)
      : h(CoxeterSystem::build(SystemSpec::from_catalog(name))),
        cells(cell_decomposition(h)),
        afun(a_function(h, cells)) {
    ParabolicFamily fam =
        schur ? schur_family(h.group(), 2, 2, 'i') : all_subsets_family(h.group());
    alg = build_endo_algebra(h, cells, afun, fam);
  }
};

const ESetup& setup(const std::string& key) {
  static std::map<std::string, std::unique_ptr<ESetup>> cache;
  auto it = cache.find(key);
  if (it == cache.end()) {
    bool schur = key == "schur22";
    it = cache.emplace(key, std::make_unique<ESetup>(schur ? "B2" : key, schur)).first;
  }
  return *it->second;
}

using Row = std::map<int, Laurent>;

Row row_of(const std::vector<std::pair<int, Laurent>>& sparse) {
  Row r;
  for (const auto& [i, c] : sparse) r[i] = c;
  return r;
}

void accumulate(Row& acc, const Laurent& c, const std::vector<std::pair<int, Laurent>>& row) {
  for (const auto& [i, v] : row) {
    auto it = acc.find(i);
    if (it == acc.end())
      acc[i] = c * v;
    else
      it->second = it->second + c * v;
  }
}

void prune(Row& r) {
  for (auto it = r.begin(); it != r.end();)
    it = it->second.is_zero() ? r.erase(it) : std::next(it);
}

// multiset of (height, rank) pairs over the covered cells
std::multiset<std::pair<long, int>> height_rank(const EndoAlgebra& a) {
  std::multiset<std::pair<long, int>> out;
  for (size_t i = 0; i < a.omega.size(); ++i)
    out.insert({a.omega_height[i], a.omega_rank[i]});
  return out;
}

int class_count(const EndoAlgebra& a) {
  std::set<int> reps(a.omega_class.begin(), a.omega_class.end());
  return static_cast<int>(reps.size());
}

std::vector<int> sorted_ints(const json& arr) {
  auto v = arr.get<std::vector<int>>();
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("block dimensions follow double coset counts") {
  const auto& a1 = setup("A1").alg;
  CHECK(a1.dim() == 5);
  CHECK(a1.summands.size() == 2);
  std::vector<std::vector<int>> b1 = {{2, 1}, {1, 1}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(a1.block_dim(i, j) == b1[i][j]);

  const auto& a2 = setup("A2").alg;
  CHECK(a2.dim() == 33);
  std::vector<std::vector<int>> b2 = {
      {6, 3, 3, 1}, {3, 2, 2, 1}, {3, 2, 2, 1}, {1, 1, 1, 1}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(a2.block_dim(i, j) == b2[i][j]);

  const auto& bb = setup("B2").alg;
  CHECK(bb.dim() == 41);
  std::vector<std::vector<int>> b3 = {
      {8, 4, 4, 1}, {4, 3, 2, 1}, {4, 2, 3, 1}, {1, 1, 1, 1}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(bb.block_dim(i, j) == b3[i][j]);
}

TEST_CASE("weight space family of the rank two chain") {
  const auto& sc = setup("schur22").alg;
  CHECK(sc.family.name == "schur-i(2,2)");
  CHECK(sc.family.masks == std::vector<unsigned>{1u, 0u, 1u});
  CHECK(sc.dim() == 36);
  std::vector<std::vector<int>> bs = {{3, 4, 3}, {4, 8, 4}, {3, 4, 3}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(sc.block_dim(i, j) == bs[i][j]);

  const auto& sys = *setup("B2").alg.system;
  CHECK(code_of([&] { schur_family(sys, 2, 2, 'x'); }) == "bad-variant");
  CHECK(code_of([&] { schur_family(sys, 2, 3, 'i'); }) == "rank-mismatch");
  // the j-variant on the same chain: compositions of 2 into 3 parts, with
  // the final part never cutting
  auto fj = schur_family(sys, 2, 2, 'j');
  CHECK(fj.masks.size() == 6);
}

TEST_CASE("hom dimensions from the intertwining system") {
  for (const std::string name : {"A1", "A2", "B2"}) {
    const auto& st = setup(name);
    int nm = static_cast<int>(st.alg.family.masks.size());
    for (int i = 0; i < nm; ++i)
      for (int j = 0; j < nm; ++j) {
        int lhs = hom_dimension_generic(st.h, st.alg.family.masks[i],
                                        st.alg.family.masks[j]);
        CHECK(lhs == st.alg.block_dim(i, j));
      }
  }
}

TEST_CASE("unit law and associativity of the structure constants") {
  for (const std::string& key : {std::string("A2"), std::string("schur22")}) {
    const auto& a = setup(key).alg;
    int n = a.dim();
    for (int x = 0; x < n; ++x) {
      int el = a.unit[a.basis[x].tgt];
      int er = a.unit[a.basis[x].src];
      CHECK(row_of(a.mul[el][x]) == Row{{x, Laurent(1, RingTag::Z)}});
      CHECK(row_of(a.mul[x][er]) == Row{{x, Laurent(1, RingTag::Z)}});
    }
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (a.basis[x].src != a.basis[y].tgt) {
          CHECK(a.mul[x][y].empty());
          continue;
        }
        for (int z = 0; z < n; ++z) {
          if (a.basis[y].src != a.basis[z].tgt) continue;
          Row lhs, rhs;
          for (const auto& [i, c] : a.mul[x][y]) accumulate(lhs, c, a.mul[i][z]);
          for (const auto& [j, c] : a.mul[y][z]) accumulate(rhs, c, a.mul[x][j]);
          prune(lhs);
          prune(rhs);
          CHECK(lhs == rhs);
        }
      }
  }
}

TEST_CASE("covered cells with heights, generic ranks, and classes") {
  const auto& a1 = setup("A1").alg;
  CHECK(height_rank(a1) == std::multiset<std::pair<long, int>>{{1, 1}, {2, 2}});
  CHECK(class_count(a1) == 2);
  CHECK(a1.covered_ideal);

  const auto& a2 = setup("A2").alg;
  CHECK(height_rank(a2) ==
        std::multiset<std::pair<long, int>>{{1, 1}, {2, 4}, {2, 4}, {4, 4}});
  CHECK(class_count(a2) == 3);
  CHECK(a2.covered_ideal);

  const auto& bb = setup("B2").alg;
  CHECK(height_rank(bb) ==
        std::multiset<std::pair<long, int>>{{1, 1}, {2, 6}, {2, 6}, {5, 4}});
  CHECK(class_count(bb) == 4);
  CHECK(bb.covered_ideal);

  const auto& sc = setup("schur22").alg;
  CHECK(sc.omega.size() == 2);
  CHECK_FALSE(sc.covered_ideal);
  // the summand of the repeated mask is covered once, at the cell height 2
  std::multiset<long> sch;
  for (long h : sc.omega_height) sch.insert(h);
  CHECK(sch == std::multiset<long>{1, 2});
  for (size_t i = 0; i < sc.omega.size(); ++i)
    if (sc.omega_height[i] == 2) CHECK(sc.omega_rank[i] == 10);
}

TEST_CASE("top sections match the cells of the longest coset elements") {
  const auto& a2 = setup("A2");
  std::multiset<size_t> sizes;
  for (const auto& ts : a2.alg.tops) {
    sizes.insert(ts.zs.size());
    CHECK(ts.c_action.size() == 2);
    CHECK(ts.project.rows == static_cast<int>(ts.zs.size()));
  }
  CHECK(sizes == std::multiset<size_t>{1, 2, 2, 1});

  const auto& bb = setup("B2");
  std::multiset<size_t> bsizes;
  for (const auto& ts : bb.alg.tops) bsizes.insert(ts.zs.size());
  CHECK(bsizes == std::multiset<size_t>{1, 3, 3, 1});
}

TEST_CASE("stratifying system axioms hold for the rank two subsets families") {
  std::vector<FieldSpec> fields = {FieldSpec::generic(), FieldSpec::finite(5, 1, 2),
                                   FieldSpec::finite(11, 1, 2)};
  for (const std::string name : {"A1", "A2"}) {
    const auto& a = setup(name).alg;
    for (const auto& fs : fields) {
      json r = stratification_report(a, fs, 7);
      INFO(name << " over " << fs.str());
      CHECK(r["ss1"].get<bool>());
      CHECK(r["ss2"]["pass"].get<bool>());
      CHECK(r["ss3"]["pass"].get<bool>());
      CHECK(r["pass"].get<bool>());
      // every standard module admits a map from its own projective
      auto hom = r["hom_dims"].get<std::vector<std::vector<int>>>();
      for (size_t i = 0; i < hom.size(); ++i) CHECK(hom[i][i] > 0);
    }
  }
  json rb = stratification_report(setup("B2").alg, FieldSpec::generic(), 7);
  CHECK(rb["pass"].get<bool>());
  CHECK(rb["delta_dims"].get<std::vector<int>>() == rb["ranks"].get<std::vector<int>>());
  json rb11 = stratification_report(setup("B2").alg, FieldSpec::finite(11, 1, 2), 7);
  CHECK(rb11["pass"].get<bool>());

  CHECK(code_of([&] {
          stratification_report(setup("schur22").alg, FieldSpec::generic(), 7);
        }) == "family-not-ideal");
}

TEST_CASE("trace ideal chain layers across coefficient fields") {
  std::vector<FieldSpec> fields = {FieldSpec::generic(), FieldSpec::finite(5, 1, 2),
                                   FieldSpec::finite(11, 1, 2)};
  {
    json r = trace_ideal_report(setup("A1").alg, fields, 7);
    CHECK(r["hi1"].get<bool>());
    CHECK(r["pass"].get<bool>());
    CHECK(r["heights"].get<std::vector<long>>() == std::vector<long>{2, 1});
    CHECK(r["fields"][0]["dims"].get<std::vector<int>>() == std::vector<int>{4, 5});
  }
  {
    json r = trace_ideal_report(setup("A2").alg, fields, 7);
    CHECK(r["hi1"].get<bool>());
    CHECK(r["pass"].get<bool>());
    CHECK(r["heights"].get<std::vector<long>>() == std::vector<long>{4, 2, 1});
    for (int fi = 0; fi < 3; ++fi) {
      CHECK(r["fields"][fi]["dims"].get<std::vector<int>>() ==
            std::vector<int>{16, 32, 33});
      for (const auto& layer : r["fields"][fi]["layers"]) {
        CHECK(layer["hi2"]["pass"].get<bool>());
        CHECK(layer["hi3"].get<bool>());
        CHECK(layer["hi4"]["pass"].get<bool>());
      }
    }
    // the middle layer decomposes through both covered cells of height two
    auto ms = r["fields"][0]["layers"][1]["hi2"]["multiplicities"].get<std::vector<int>>();
    int total = 0;
    for (int m : ms) total += m;
    CHECK(total == 4);
  }
}

TEST_CASE("layerwise standard basis with bilinear forms") {
  {
    json r = standard_basis_report(setup("A2").alg, FieldSpec::generic(), 7);
    CHECK(r["pass"].get<bool>());
    CHECK(r["count_ok"].get<bool>());
    CHECK(r["congruences"].get<bool>());
    CHECK(r["form_consistent"].get<bool>());
    CHECK(r["associativity"].get<bool>());
    CHECK(r["all_forms_nonsingular"].get<bool>());
    CHECK(r["lambda1_size"].get<int>() == 3);
    REQUIRE(r["classes"].size() == 3);
    CHECK(r["classes"][0]["height"].get<long>() == 4);
    CHECK(r["classes"][0]["cols"].get<int>() == 4);
    CHECK(r["classes"][0]["layer_dim"].get<int>() == 16);
    CHECK(r["classes"][1]["height"].get<long>() == 2);
    CHECK(r["classes"][1]["cols"].get<int>() == 4);
    CHECK(r["classes"][1]["layer_dim"].get<int>() == 16);
    CHECK(r["classes"][2]["height"].get<long>() == 1);
    CHECK(r["classes"][2]["cols"].get<int>() == 1);
    CHECK(r["classes"][2]["layer_dim"].get<int>() == 1);
  }
  {
    json r = standard_basis_report(setup("A1").alg, FieldSpec::generic(), 7);
    CHECK(r["pass"].get<bool>());
    CHECK(r["all_forms_nonsingular"].get<bool>());
    CHECK(r["lambda1_size"].get<int>() == 2);
  }
  {
    // at t a square root of two in characteristic three, t^2 = -1: the top
    // form degenerates to rank one but stays nonzero
    json r = standard_basis_report(setup("A1").alg, FieldSpec::finite_sqrt2(3, 2), 7);
    CHECK(r["pass"].get<bool>());
    CHECK(r["lambda1_size"].get<int>() == 2);
    CHECK_FALSE(r["all_forms_nonsingular"].get<bool>());
    bool saw_singular = false;
    for (const auto& cj : r["classes"])
      if (!cj["form_nonsingular"].get<bool>() && cj["in_lambda1"].get<bool>())
        saw_singular = true;
    CHECK(saw_singular);
  }
  CHECK(code_of([&] {
          standard_basis_report(setup("B2").alg, FieldSpec::generic(), 7);
        }) == "corner-not-scalar");
}

TEST_CASE("split semisimple bookkeeping generically and at probes") {
  {
    json r = generic_class_report(setup("A1").alg, FieldSpec::finite(11, 1, 2), 7);
    CHECK(r["mode"] == "classes");
    CHECK(r["class_ranks"].get<std::vector<int>>() == std::vector<int>{1, 2});
    CHECK(r["sum_squares"].get<long>() == 5);
    CHECK(r["generic_gram_nonsingular"].get<bool>());
    CHECK(r["pass"].get<bool>());
  }
  {
    json r = generic_class_report(setup("A2").alg, FieldSpec::finite(11, 1, 2), 7);
    CHECK(r["mode"] == "classes");
    CHECK(r["class_ranks"].get<std::vector<int>>() == std::vector<int>{1, 4, 4});
    CHECK(r["sum_squares"].get<long>() == 33);
    CHECK(r["pass"].get<bool>());
  }
  {
    json r = generic_class_report(setup("B2").alg, FieldSpec::finite(11, 1, 2), 7);
    CHECK(r["mode"] == "probe");
    CHECK(r["generic_gram_nonsingular"].get<bool>());
    CHECK(sorted_ints(r["wedderburn"]) == std::vector<int>{1, 2, 2, 4, 4});
    CHECK(r["probe"]["sum_squares"].get<long>() == 41);
    CHECK(r["probe"]["center_dim"].get<int>() == 5);
    CHECK(r["probe"]["mult_matches_dim"].get<bool>());
    CHECK(r["pass"].get<bool>());
  }
  {
    json r = generic_class_report(setup("schur22").alg, FieldSpec::finite(11, 1, 2), 7);
    CHECK(r["mode"] == "probe");
    CHECK(sorted_ints(r["wedderburn"]) == std::vector<int>{1, 1, 3, 3, 4});
    CHECK(r["probe"]["sum_squares"].get<long>() == 36);
    CHECK(r["probe"]["center_dim"].get<int>() == 5);
    CHECK(r["pass"].get<bool>());
  }
  CHECK(code_of([&] {
          generic_class_report(setup("B2").alg, FieldSpec::generic(), 7);
        }) == "probe-needed");
  CHECK(code_of([&] {
          generic_class_report(setup("B2").alg, FieldSpec::finite(2, 1, 1), 7);
        }) == "probe-bad-prime");
}

TEST_CASE("field specs and excluded primes") {
  CHECK(FieldSpec::generic().str() == "Frac(Z[t,t^-1])");
  CHECK(FieldSpec::finite(5, 1, 2).str() == "GF(5),t=2");
  CHECK(FieldSpec::finite_sqrt2(3, 2).str() == "GF(3^2),t=sqrt2");
  CHECK(bad_primes(setup("A2").h.group()).empty());
  CHECK(bad_primes(setup("B2").h.group()) == std::vector<long>{2});
  auto g2 = CoxeterSystem::build(SystemSpec::from_catalog("G2"));
  CHECK(bad_primes(*g2) == std::vector<long>{2, 3});
  auto f16 = CoxeterSystem::build(SystemSpec::from_catalog("2F4"));
  CHECK(bad_primes(*f16) == std::vector<long>{2, 3});
}

TEST_CASE("bundled report carries every section") {
  const auto& a1 = setup("A1").alg;
  json r = endo_report_json(a1, {FieldSpec::generic(), FieldSpec::finite(11, 1, 2)}, 7);
  CHECK(r["dim"].get<int>() == 5);
  CHECK(r["covered_ideal"].get<bool>());
  CHECK(r["stratification"].size() == 2);
  CHECK(r["trace"]["pass"].get<bool>());
  CHECK(r["standard_basis"]["pass"].get<bool>());
  CHECK(r["classes"]["pass"].get<bool>());

  const auto& bb = setup("B2").alg;
  json rb = endo_report_json(bb, {FieldSpec::finite(11, 1, 2)}, 7);
  CHECK(rb["standard_basis"]["skipped"] == "corner-not-scalar");
  CHECK(rb["classes"]["pass"].get<bool>());
}
