#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <functional>
#include <set>

#include "hendo/coxeter.hpp"

using namespace hendo;

namespace {

std::shared_ptr<const CoxeterSystem> catalog(const std::string& name) {
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

}  // namespace

TEST_CASE("catalog shapes and group orders") {
  struct Row {
    const char* name;
    int order;
    int longest_len;
    long longest_weight;
  };
  // orders of the finite reflection groups, weight of w0 = sum over a reduced word
  const Row rows[] = {
      {"A1", 2, 1, 1},     {"A2", 6, 3, 3},      {"A3", 24, 6, 6},
      {"B2", 8, 4, 4},     {"C3", 48, 9, 9},     {"G2", 12, 6, 6},
      {"D4", 192, 12, 12}, {"F4", 1152, 24, 24}, {"2F4", 16, 8, 24},
  };
  for (const auto& r : rows) {
    CAPTURE(r.name);
    auto w = catalog(r.name);
    CHECK(w->size() == r.order);
    CHECK(w->length(w->longest()) == r.longest_len);
    CHECK(w->weight_L(w->longest()) == r.longest_weight);
  }
}

TEST_CASE("quasi-split unitary weights land on type B") {
  auto su4 = SystemSpec::from_catalog("SU4");
  CHECK(su4.matrix == SystemSpec::from_catalog("B2").matrix);
  CHECK(su4.weights == std::vector<long>{2, 1});
  auto su5 = SystemSpec::from_catalog("SU5");
  CHECK(su5.matrix == SystemSpec::from_catalog("B2").matrix);
  CHECK(su5.weights == std::vector<long>{2, 3});
  auto su6 = SystemSpec::from_catalog("SU6");
  CHECK(su6.matrix == SystemSpec::from_catalog("B3").matrix);
  CHECK(su6.weights == std::vector<long>{2, 2, 1});
  auto su7 = SystemSpec::from_catalog("SU7");
  CHECK(su7.weights == std::vector<long>{2, 2, 3});
  // the double bond sits on the last pair of nodes
  CHECK(su6.matrix[1][2] == 4);
  CHECK(su6.matrix[0][1] == 3);
}

TEST_CASE("E-series and D-series bond layout") {
  auto e6 = SystemSpec::from_catalog("E6");
  int triple = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (e6.matrix[i][j] == 3) ++triple;
  CHECK(triple == 5);  // tree with 6 nodes
  CHECK(e6.matrix[1][3] == 3);  // branch node
  CHECK(e6.matrix[0][2] == 3);
  CHECK(e6.matrix[0][1] == 2);

  auto d4 = SystemSpec::from_catalog("D4");
  CHECK(d4.matrix[1][2] == 3);
  CHECK(d4.matrix[1][3] == 3);
  CHECK(d4.matrix[2][3] == 2);
  CHECK(d4.matrix[0][1] == 3);
}

TEST_CASE("spec json round trip and validation errors") {
  auto spec = SystemSpec::from_catalog("SU5");
  auto back = SystemSpec::from_json(spec.to_json());
  CHECK(back.matrix == spec.matrix);
  CHECK(back.weights == spec.weights);
  CHECK(back.tag == "SU5");
  auto by_name = SystemSpec::from_json(nlohmann::json("G2"));
  CHECK(by_name.matrix[0][1] == 6);

  CHECK(code_of([] { SystemSpec::from_catalog("H3"); }) == "bad-catalog-tag");
  CHECK(code_of([] { SystemSpec::from_catalog("Ax"); }) == "bad-catalog-tag");

  SystemSpec bad;
  bad.matrix = {{1, 5}, {5, 1}};
  bad.weights = {1, 1};
  CHECK(code_of([&] { CoxeterSystem::build(bad); }) == "bad-system");

  SystemSpec uneven;  // odd bond with unequal weights is not a weight function
  uneven.matrix = {{1, 3}, {3, 1}};
  uneven.weights = {1, 2};
  CHECK(code_of([&] { CoxeterSystem::build(uneven); }) == "not-a-weight-function");

  SystemSpec evenok;  // an even bond supports unequal weights
  evenok.matrix = {{1, 4}, {4, 1}};
  evenok.weights = {1, 7};
  auto w = CoxeterSystem::build(evenok);
  CHECK(w->size() == 8);
  CHECK(w->weight_L(w->longest()) == 16);
}

TEST_CASE("infinite systems are refused") {
  SystemSpec affine;  // triangle of order-3 bonds generates an infinite group
  affine.matrix = {{1, 3, 3}, {3, 1, 3}, {3, 3, 1}};
  affine.weights = {1, 1, 1};
  CHECK(code_of([&] { CoxeterSystem::build(affine); }) == "infinite-or-too-large");
}

TEST_CASE("canonical words are ShortLex and round trip") {
  for (const char* name : {"B3", "G2", "2F4"}) {
    CAPTURE(name);
    auto w = catalog(name);
    std::vector<std::uint8_t> prev;
    for (int x = 0; x < w->size(); ++x) {
      const auto& word = w->word(x);
      CHECK(static_cast<int>(word.size()) == w->length(x));
      std::vector<int> letters(word.begin(), word.end());
      CHECK(w->element_from_word(letters) == x);
      if (x > 0) {
        bool shorter = prev.size() < word.size();
        bool lex_before = prev.size() == word.size() &&
                          std::lexicographical_compare(prev.begin(), prev.end(),
                                                       word.begin(), word.end());
        CHECK((shorter || lex_before));
      }
      prev = word;
    }
  }
}

TEST_CASE("group laws") {
  auto w = catalog("A3");
  std::mt19937 rng(20240811);
  std::uniform_int_distribution<int> pick(0, w->size() - 1);
  for (int trial = 0; trial < 500; ++trial) {
    int a = pick(rng), b = pick(rng), c = pick(rng);
    CHECK(w->multiply(a, w->multiply(b, c)) == w->multiply(w->multiply(a, b), c));
  }
  for (int x = 0; x < w->size(); ++x) {
    CHECK(w->multiply(x, w->inverse(x)) == 0);
    CHECK(w->multiply(w->inverse(x), x) == 0);
    CHECK(w->length(w->inverse(x)) == w->length(x));
    CHECK(w->weight_L(w->inverse(x)) == w->weight_L(x));
    CHECK(w->sign(x) == (w->length(x) % 2 == 0 ? 1 : -1));
  }
  CHECK(code_of([&] { w->multiply(0, w->size()); }) == "element-out-of-range");
  CHECK(code_of([&] { w->length(-1); }) == "element-out-of-range");
}

TEST_CASE("descent sets match length drops") {
  for (const char* name : {"A3", "B2", "2F4"}) {
    CAPTURE(name);
    auto w = catalog(name);
    CHECK(w->right_descents(0) == 0u);
    CHECK(w->left_descents(0) == 0u);
    unsigned full = (1u << w->rank()) - 1;
    CHECK(w->right_descents(w->longest()) == full);
    CHECK(w->left_descents(w->longest()) == full);
    for (int x = 0; x < w->size(); ++x) {
      for (int s = 0; s < w->rank(); ++s) {
        bool rdrop = w->length(w->right_mul(x, s)) < w->length(x);
        bool ldrop = w->length(w->left_mul(s, x)) < w->length(x);
        CHECK(((w->right_descents(x) >> s) & 1u) == (rdrop ? 1u : 0u));
        CHECK(((w->left_descents(x) >> s) & 1u) == (ldrop ? 1u : 0u));
      }
    }
  }
}

TEST_CASE("left descents delete one letter from a reduced word") {
  for (const char* name : {"B2", "G2"}) {
    CAPTURE(name);
    auto w = catalog(name);
    for (int x = 1; x < w->size(); ++x) {
      const auto& word = w->word(x);
      for (int s = 0; s < w->rank(); ++s) {
        if (!((w->left_descents(x) >> s) & 1u)) continue;
        int sx = w->left_mul(s, x);
        bool found = false;
        for (size_t drop = 0; drop < word.size() && !found; ++drop) {
          std::vector<int> letters;
          for (size_t i = 0; i < word.size(); ++i)
            if (i != drop) letters.push_back(word[i]);
          found = w->element_from_word(letters) == sx;
        }
        CHECK(found);
      }
    }
  }
}

TEST_CASE("weight additivity happens exactly when length is additive") {
  auto w = catalog("SU5");
  for (int a = 0; a < w->size(); ++a)
    for (int b = 0; b < w->size(); ++b) {
      int ab = w->multiply(a, b);
      bool len_add = w->length(ab) == w->length(a) + w->length(b);
      bool wt_add = w->weight_L(ab) == w->weight_L(a) + w->weight_L(b);
      CHECK(len_add == wt_add);
    }
}

TEST_CASE("Bruhat order against the subword characterization") {
  for (const char* name : {"A3", "B2", "G2"}) {
    CAPTURE(name);
    auto w = catalog(name);
    int n = w->size();
    // reachable x below y: some subsequence of y's canonical word multiplies
    // to x without cancellation
    std::vector<std::vector<bool>> below(n, std::vector<bool>(n, false));
    for (int y = 0; y < n; ++y) {
      const auto& word = w->word(y);
      int k = static_cast<int>(word.size());
      for (unsigned sub = 0; sub < (1u << k); ++sub) {
        std::vector<int> letters;
        for (int i = 0; i < k; ++i)
          if (sub & (1u << i)) letters.push_back(word[i]);
        int p = w->element_from_word(letters);
        if (w->length(p) == static_cast<int>(letters.size())) below[y][p] = true;
      }
    }
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) CHECK(w->bruhat_leq(x, y) == below[y][x]);
  }
}

TEST_CASE("Bruhat chain in the rank two symmetric group") {
  auto w = catalog("A2");
  int s1 = w->element_from_word({0});
  int s2 = w->element_from_word({1});
  int s1s2 = w->element_from_word({0, 1});
  CHECK(w->bruhat_leq(0, s1));
  CHECK(w->bruhat_leq(s1, s1s2));
  CHECK(w->bruhat_leq(s1s2, w->longest()));
  CHECK(!w->bruhat_leq(s1, s2));
  CHECK(!w->bruhat_leq(s2, s1));
  CHECK(w->bruhat_leq(s2, s1s2));
}

TEST_CASE("Bruhat table refuses oversized groups") {
  auto w = catalog("A6");  // 5040 elements, past the table cap
  CHECK(w->size() == 5040);
  CHECK(code_of([&] { w->bruhat_leq(0, 1); }) == "too-large");
}

TEST_CASE("parabolic data") {
  auto a2 = catalog("A2");
  auto p1 = a2->parabolic(0b01);
  CHECK(p1.elements == std::vector<int>{0, a2->element_from_word({0})});
  CHECK(p1.w0J == a2->element_from_word({0}));
  CHECK(p1.min_left_reps.size() == 3);
  CHECK(p1.min_right_reps.size() == 3);

  for (const char* name : {"A3", "B3", "2F4"}) {
    CAPTURE(name);
    auto w = catalog(name);
    for (unsigned jmask : w->all_parabolic_masks()) {
      auto p = w->parabolic(jmask);
      // longest element of the parabolic has exactly J as its descent set
      CHECK(w->right_descents(p.w0J) == jmask);
      CHECK(w->left_descents(p.w0J) == jmask);
      CHECK(p.min_left_reps.size() * p.elements.size() == static_cast<size_t>(w->size()));
      CHECK(p.min_right_reps.size() == p.min_left_reps.size());
      // every group element factors as (minimal rep) * (parabolic part)
      std::set<int> seen;
      for (int d : p.min_left_reps)
        for (int u : p.elements) {
          int x = w->multiply(d, u);
          CHECK(w->length(x) == w->length(d) + w->length(u));
          seen.insert(x);
        }
      CHECK(seen.size() == static_cast<size_t>(w->size()));
    }
  }
}

TEST_CASE("double cosets in rank one") {
  auto w = catalog("A1");
  auto count = [&](unsigned i, unsigned j) {
    return w->double_cosets(i, j).reps.size();
  };
  CHECK(count(0, 0) == 2);
  CHECK(count(1, 0) == 1);
  CHECK(count(0, 1) == 1);
  CHECK(count(1, 1) == 1);
  CHECK(count(0, 0) + count(1, 0) + count(0, 1) + count(1, 1) == 5);
}

TEST_CASE("double coset blocks partition the group with unique minimal reps") {
  for (const char* name : {"A2", "B2", "B3"}) {
    CAPTURE(name);
    auto w = catalog(name);
    for (unsigned imask : w->all_parabolic_masks())
      for (unsigned jmask : w->all_parabolic_masks()) {
        auto dc = w->double_cosets(imask, jmask);
        int nblocks = static_cast<int>(dc.reps.size());
        for (int x = 0; x < w->size(); ++x) {
          CHECK(dc.block_of[x] >= 0);
          CHECK(dc.block_of[x] < nblocks);
        }
        for (int b = 0; b < nblocks; ++b) {
          int rep = dc.reps[b];
          CHECK(dc.block_of[rep] == b);
          int at_min = 0;
          for (int x = 0; x < w->size(); ++x)
            if (dc.block_of[x] == b && w->length(x) == w->length(rep)) ++at_min;
          CHECK(at_min == 1);
        }
      }
  }
}

TEST_CASE("word rendering") {
  auto w = catalog("A2");
  CHECK(w->word_str(0) == "e");
  CHECK(w->word_str(w->longest()) == "1.2.1");
}
