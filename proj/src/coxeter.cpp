#include "hendo/coxeter.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace hendo {

namespace {

std::vector<std::vector<int>> chain_matrix(int n) {
  std::vector<std::vector<int>> m(n, std::vector<int>(n, 2));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  for (int i = 0; i + 1 < n; ++i) m[i][i + 1] = m[i + 1][i] = 3;
  return m;
}

}  // namespace

nlohmann::json SystemSpec::to_json() const {
  nlohmann::json j;
  j["matrix"] = matrix;
  j["weights"] = weights;
  if (!tag.empty()) j["tag"] = tag;
  return j;
}

SystemSpec SystemSpec::from_json(const nlohmann::json& j) {
  if (j.is_string()) return from_catalog(j.get<std::string>());
  if (j.contains("tag") && !j.contains("matrix"))
    return from_catalog(j.at("tag").get<std::string>());
  SystemSpec s;
  require(j.contains("matrix") && j.contains("weights"), "bad-json",
          "system descriptor needs matrix and weights");
  s.matrix = j.at("matrix").get<std::vector<std::vector<int>>>();
  s.weights = j.at("weights").get<std::vector<long>>();
  if (j.contains("tag")) s.tag = j.at("tag").get<std::string>();
  return s;
}

SystemSpec SystemSpec::from_catalog(const std::string& name) {
  SystemSpec s;
  s.tag = name;
  auto rank_of = [&](size_t prefix) {
    require(name.size() > prefix, "bad-catalog-tag", "missing rank in " + name);
    int n = 0;
    for (size_t i = prefix; i < name.size(); ++i) {
      require(name[i] >= '0' && name[i] <= '9', "bad-catalog-tag",
              "bad rank in " + name);
      n = 10 * n + (name[i] - '0');
    }
    return n;
  };
  char head = name.empty() ? '?' : name[0];
  if (name == "G2") {
    s.matrix = chain_matrix(2);
    s.matrix[0][1] = s.matrix[1][0] = 6;
    s.weights = {1, 1};
    return s;
  }
  if (name == "F4") {
    s.matrix = chain_matrix(4);
    s.matrix[1][2] = s.matrix[2][1] = 4;
    s.weights = {1, 1, 1, 1};
    return s;
  }
  if (name == "2F4") {
    // dihedral of order 16 with the Ree-group weights
    s.matrix = chain_matrix(2);
    s.matrix[0][1] = s.matrix[1][0] = 8;
    s.weights = {2, 4};
    return s;
  }
  if (head == 'A') {
    int n = rank_of(1);
    require(n >= 1, "bad-catalog-tag", "rank must be >= 1");
    s.matrix = chain_matrix(n);
    s.weights.assign(n, 1);
    return s;
  }
  if (head == 'B' || head == 'C') {
    int n = rank_of(1);
    require(n >= 2, "bad-catalog-tag", "rank must be >= 2");
    s.matrix = chain_matrix(n);
    s.matrix[n - 2][n - 1] = s.matrix[n - 1][n - 2] = 4;
    s.weights.assign(n, 1);
    return s;
  }
  if (head == 'D') {
    int n = rank_of(1);
    require(n >= 4, "bad-catalog-tag", "rank must be >= 4");
    s.matrix = chain_matrix(n);
    // fork: the last node hangs off node n-3 instead of n-2
    s.matrix[n - 2][n - 1] = s.matrix[n - 1][n - 2] = 2;
    s.matrix[n - 3][n - 1] = s.matrix[n - 1][n - 3] = 3;
    s.weights.assign(n, 1);
    return s;
  }
  if (head == 'E') {
    int n = rank_of(1);
    require(n >= 6 && n <= 8, "bad-catalog-tag", "E rank must be 6..8");
    // Bourbaki numbering: chain 1-3-4-5-...-n with node 2 attached to 4
    s.matrix.assign(n, std::vector<int>(n, 2));
    for (int i = 0; i < n; ++i) s.matrix[i][i] = 1;
    auto bond = [&](int a, int b) { s.matrix[a - 1][b - 1] = s.matrix[b - 1][a - 1] = 3; };
    bond(1, 3);
    bond(3, 4);
    bond(2, 4);
    for (int i = 4; i < n; ++i) bond(i, i + 1);
    s.weights.assign(n, 1);
    return s;
  }
  if (name.rfind("SU", 0) == 0) {
    int n = rank_of(2);
    require(n >= 4, "bad-catalog-tag", "SU needs n >= 4");
    int m = n / 2;
    s.matrix = chain_matrix(m);
    if (m >= 2) s.matrix[m - 2][m - 1] = s.matrix[m - 1][m - 2] = 4;
    s.weights.assign(m, 2);
    s.weights[m - 1] = (n % 2 == 0) ? 1 : 3;
    return s;
  }
  fail("bad-catalog-tag", "unknown catalog name " + name);
}

std::shared_ptr<const CoxeterSystem> CoxeterSystem::build(const SystemSpec& spec,
                                                          std::size_t element_cap) {
  auto sys = std::shared_ptr<CoxeterSystem>(new CoxeterSystem());
  sys->spec_ = spec;
  int n = static_cast<int>(spec.matrix.size());
  require(n >= 1, "bad-system", "empty Coxeter matrix");
  require(static_cast<int>(spec.weights.size()) == n, "bad-system",
          "weights size must match rank");
  sys->rank_ = n;
  require(n <= 8, "bad-system", "rank capped at 8");
  sys->ring_ = RingTag::Z;
  for (int i = 0; i < n; ++i) {
    require(static_cast<int>(spec.matrix[i].size()) == n, "bad-system",
            "Coxeter matrix must be square");
    require(spec.weights[i] >= 1, "bad-system", "weights must be positive");
    for (int j = 0; j < n; ++j) {
      int m = spec.matrix[i][j];
      if (i == j) {
        require(m == 1, "bad-system", "diagonal entries must be 1");
        continue;
      }
      require(m == spec.matrix[j][i], "bad-system", "Coxeter matrix must be symmetric");
      require(m == 2 || m == 3 || m == 4 || m == 6 || m == 8, "bad-system",
              "bond orders limited to 2,3,4,6,8");
      if (m == 8) sys->ring_ = RingTag::Zsqrt2;
      // odd bonds conjugate the two generators, forcing equal weights
      if (m % 2 == 1)
        require(spec.weights[i] == spec.weights[j], "not-a-weight-function",
                "odd bond requires equal weights");
    }
  }

  // Cartan pairing with exact entries: product of the off-diagonal pair
  // equals 4cos^2(pi/m).
  sys->cartan_.assign(n, std::vector<Coeff>(n, Coeff()));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        sys->cartan_[i][j] = Coeff(2);
        continue;
      }
      int m = spec.matrix[i][j];
      if (m == 2) continue;  // zero pair
      if (m == 3) {
        sys->cartan_[i][j] = Coeff(-1);
        continue;
      }
      // asymmetric pairs, the smaller index carries the -1
      Coeff big = m == 4 ? Coeff(-2) : m == 6 ? Coeff(-3) : Coeff(-2, -1);
      sys->cartan_[i][j] = i < j ? Coeff(-1) : big;
    }
  }

  sys->enumerate_roots(100000);
  sys->enumerate_elements(element_cap);
  if (sys->size() <= kBruhatCap) sys->build_bruhat();
  return sys;
}

void CoxeterSystem::enumerate_roots(std::size_t root_cap) {
  int n = rank_;
  std::map<std::vector<std::pair<mpz_class, mpz_class>>, int> index;
  auto key_of = [&](const std::vector<Coeff>& r) {
    std::vector<std::pair<mpz_class, mpz_class>> k;
    k.reserve(n);
    for (auto& c : r) k.emplace_back(c.a, c.b);
    return k;
  };
  auto add_root = [&](const std::vector<Coeff>& r) {
    auto k = key_of(r);
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(roots_.size());
    require(roots_.size() < root_cap, "infinite-or-too-large",
            "root enumeration exceeded cap");
    roots_.push_back(r);
    index.emplace(std::move(k), id);
    return id;
  };
  for (int s = 0; s < n; ++s) {
    std::vector<Coeff> e(n, Coeff());
    e[s] = Coeff(1);
    add_root(e);
  }
  auto apply_gen = [&](int s, const std::vector<Coeff>& r) {
    // s(r) = r - <pairing of r against s> e_s
    Coeff c;
    for (int u = 0; u < n; ++u) c = c + cartan_[s][u] * r[u];
    std::vector<Coeff> out = r;
    out[s] = out[s] - c;
    return out;
  };
  for (size_t head = 0; head < roots_.size(); ++head) {
    for (int s = 0; s < n; ++s) add_root(apply_gen(s, roots_[head]));
  }
  // fill the generator action tables now that the set is closed
  gen_root_action_.assign(n, std::vector<int>(roots_.size(), -1));
  for (int s = 0; s < n; ++s)
    for (size_t r = 0; r < roots_.size(); ++r) {
      auto img = apply_gen(s, roots_[r]);
      auto it = index.find(key_of(img));
      require(it != index.end(), "internal", "root set not closed");
      gen_root_action_[s][r] = it->second;
    }
  root_positive_.assign(roots_.size(), false);
  for (size_t r = 0; r < roots_.size(); ++r) {
    bool nonneg = true;
    for (auto& c : roots_[r])
      if (real_sign(c) < 0) nonneg = false;
    root_positive_[r] = nonneg;
  }
}

void CoxeterSystem::enumerate_elements(std::size_t element_cap) {
  int n = rank_;
  int nroots = static_cast<int>(roots_.size());
  std::map<std::vector<int>, int> index;
  auto simple_key = [&](const std::vector<int>& perm) {
    return std::vector<int>(perm.begin(), perm.begin() + n);
  };

  std::vector<int> id_perm(nroots);
  for (int r = 0; r < nroots; ++r) id_perm[r] = r;
  perms_.push_back(id_perm);
  words_.push_back({});
  weightL_.push_back(0);
  index.emplace(simple_key(id_perm), 0);

  for (size_t head = 0; head < perms_.size(); ++head) {
    for (int s = 0; s < n; ++s) {
      // right multiplication: (w s)(r) = w(s(r))
      // length increases exactly when w sends alpha_s to a positive root
      if (!root_positive_[perms_[head][s]]) continue;
      std::vector<int> child(nroots);
      const std::vector<int>& pw = perms_[head];
      const std::vector<int>& ps = gen_root_action_[s];
      for (int r = 0; r < nroots; ++r) child[r] = pw[ps[r]];
      auto k = simple_key(child);
      if (index.find(k) != index.end()) continue;
      require(perms_.size() < element_cap, "infinite-or-too-large",
              "element enumeration exceeded cap");
      int id = static_cast<int>(perms_.size());
      index.emplace(std::move(k), id);
      perms_.push_back(std::move(child));
      std::vector<std::uint8_t> w = words_[head];
      w.push_back(static_cast<std::uint8_t>(s));
      words_.push_back(std::move(w));
      weightL_.push_back(weightL_[head] + spec_.weights[s]);
    }
  }

  int sz = size();
  // inverses by inverting the root permutation
  inv_.assign(sz, -1);
  for (int w = 0; w < sz; ++w) {
    std::vector<int> ip(nroots);
    for (int r = 0; r < nroots; ++r) ip[perms_[w][r]] = r;
    auto it = index.find(simple_key(ip));
    require(it != index.end(), "internal", "inverse not found");
    inv_[w] = it->second;
  }
  // multiplication against generators, both sides
  rmul_.assign(static_cast<size_t>(sz) * n, -1);
  lmul_.assign(static_cast<size_t>(sz) * n, -1);
  for (int w = 0; w < sz; ++w) {
    for (int s = 0; s < n; ++s) {
      std::vector<int> key(n);
      for (int u = 0; u < n; ++u) key[u] = perms_[w][gen_root_action_[s][u]];
      auto it = index.find(key);
      require(it != index.end(), "internal", "right product not found");
      rmul_[static_cast<size_t>(w) * n + s] = it->second;
    }
  }
  for (int w = 0; w < sz; ++w)
    for (int s = 0; s < n; ++s)
      lmul_[static_cast<size_t>(w) * n + s] =
          inv_[rmul_[static_cast<size_t>(inv_[w]) * n + s]];

  longest_ = 0;
  for (int w = 0; w < sz; ++w)
    if (length(w) > length(longest_)) longest_ = w;
}

int CoxeterSystem::multiply(int a, int b) const {
  check(a);
  check(b);
  int r = a;
  for (std::uint8_t s : words_[b]) r = rmul_[static_cast<size_t>(r) * rank_ + s];
  return r;
}

std::string CoxeterSystem::word_str(int w) const {
  const auto& ww = words_[check(w)];
  if (ww.empty()) return "e";
  std::string s;
  for (std::uint8_t c : ww) {
    if (!s.empty()) s += ".";
    s += std::to_string(c + 1);
  }
  return s;
}

int CoxeterSystem::element_from_word(const std::vector<int>& letters) const {
  int r = 0;
  for (int s : letters) {
    require(s >= 0 && s < rank_, "element-out-of-range", "bad generator index");
    r = rmul_[static_cast<size_t>(r) * rank_ + s];
  }
  return r;
}

unsigned CoxeterSystem::right_descents(int w) const {
  check(w);
  unsigned mask = 0;
  for (int s = 0; s < rank_; ++s)
    if (!root_positive_[perms_[w][s]]) mask |= 1u << s;
  return mask;
}

unsigned CoxeterSystem::left_descents(int w) const { return right_descents(inv_[check(w)]); }

void CoxeterSystem::build_bruhat() {
  int sz = size();
  int wordsz = (sz + 63) / 64;
  bruhat_.assign(sz, std::vector<std::uint64_t>(wordsz, 0));
  auto set_bit = [&](int y, int x) { bruhat_[y][x >> 6] |= 1ull << (x & 63); };
  auto get_bit = [&](int y, int x) {
    return (bruhat_[y][x >> 6] >> (x & 63)) & 1ull;
  };
  set_bit(0, 0);
  // ids are in ShortLex order, so every proper prefix parent precedes
  for (int y = 1; y < sz; ++y) {
    int s = words_[y][0];  // a left descent of y
    int yp = lmul_[static_cast<size_t>(y) * rank_ + s];
    for (int x = 0; x < sz; ++x) {
      int sx = lmul_[static_cast<size_t>(x) * rank_ + s];
      bool below = length(sx) < length(x) ? (get_bit(yp, sx) != 0)
                                          : (get_bit(yp, x) != 0);
      if (below || x == y) set_bit(y, x);
    }
  }
}

bool CoxeterSystem::bruhat_leq(int x, int y) const {
  check(x);
  check(y);
  require(!bruhat_.empty(), "too-large",
          "Bruhat table only built for groups of size <= 4096");
  return (bruhat_[y][x >> 6] >> (x & 63)) & 1ull;
}

CoxeterSystem::ParabolicData CoxeterSystem::parabolic(unsigned jmask) const {
  ParabolicData out;
  // closure of {e} under right multiplication by J
  std::vector<bool> in(size(), false);
  std::vector<int> queue{0};
  in[0] = true;
  for (size_t head = 0; head < queue.size(); ++head) {
    for (int s = 0; s < rank_; ++s) {
      if (!(jmask & (1u << s))) continue;
      int v = rmul_[static_cast<size_t>(queue[head]) * rank_ + s];
      if (!in[v]) {
        in[v] = true;
        queue.push_back(v);
      }
    }
  }
  for (int w = 0; w < size(); ++w)
    if (in[w]) out.elements.push_back(w);
  out.w0J = 0;
  for (int w : out.elements)
    if (length(w) > length(out.w0J)) out.w0J = w;
  for (int w = 0; w < size(); ++w) {
    if ((right_descents(w) & jmask) == 0) out.min_left_reps.push_back(w);
    if ((left_descents(w) & jmask) == 0) out.min_right_reps.push_back(w);
  }
  return out;
}

CoxeterSystem::DoubleCosetData CoxeterSystem::double_cosets(unsigned imask,
                                                            unsigned jmask) const {
  DoubleCosetData out;
  out.block_of.assign(size(), -1);
  std::vector<std::pair<int, int>> rep_blocks;  // (rep, block id) in discovery order
  for (int seed = 0; seed < size(); ++seed) {
    if (out.block_of[seed] >= 0) continue;
    int block = static_cast<int>(rep_blocks.size());
    std::vector<int> queue{seed};
    out.block_of[seed] = block;
    int rep = seed;
    for (size_t head = 0; head < queue.size(); ++head) {
      int w = queue[head];
      if (length(w) < length(rep)) rep = w;
      for (int s = 0; s < rank_; ++s) {
        if (imask & (1u << s)) {
          int v = lmul_[static_cast<size_t>(w) * rank_ + s];
          if (out.block_of[v] < 0) {
            out.block_of[v] = block;
            queue.push_back(v);
          }
        }
        if (jmask & (1u << s)) {
          int v = rmul_[static_cast<size_t>(w) * rank_ + s];
          if (out.block_of[v] < 0) {
            out.block_of[v] = block;
            queue.push_back(v);
          }
        }
      }
    }
    rep_blocks.emplace_back(rep, block);
  }
  out.reps.resize(rep_blocks.size());
  for (auto& [rep, block] : rep_blocks) out.reps[block] = rep;
  return out;
}

std::vector<unsigned> CoxeterSystem::all_parabolic_masks() const {
  std::vector<unsigned> out;
  for (unsigned m = 0; m < (1u << rank_); ++m) out.push_back(m);
  return out;
}

}  // namespace hendo
