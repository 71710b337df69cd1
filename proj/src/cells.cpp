#include "hendo/cells.hpp"

#include <algorithm>
#include <numeric>

namespace hendo {

namespace {

// iterative Tarjan; returns component index per node, components numbered
// arbitrarily, then renumbered by least member for determinism
std::vector<int> sccs(int n, const std::vector<std::vector<int>>& out) {
  std::vector<int> comp(n, -1), low(n), disc(n, -1), stack;
  std::vector<bool> on_stack(n, false);
  int timer = 0, ncomp = 0;
  struct Frame {
    int v;
    size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    disc[root] = low[root] = timer++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.edge < out[f.v].size()) {
        int u = out[f.v][f.edge++];
        if (disc[u] < 0) {
          disc[u] = low[u] = timer++;
          stack.push_back(u);
          on_stack[u] = true;
          call.push_back({u, 0});
        } else if (on_stack[u]) {
          low[f.v] = std::min(low[f.v], disc[u]);
        }
      } else {
        if (low[f.v] == disc[f.v]) {
          while (true) {
            int u = stack.back();
            stack.pop_back();
            on_stack[u] = false;
            comp[u] = ncomp;
            if (u == f.v) break;
          }
          ++ncomp;
        }
        int v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  // renumber by least member
  std::vector<int> least(ncomp, n);
  for (int v = 0; v < n; ++v) least[comp[v]] = std::min(least[comp[v]], v);
  std::vector<int> order(ncomp);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return least[a] < least[b]; });
  std::vector<int> rank(ncomp);
  for (int i = 0; i < ncomp; ++i) rank[order[i]] = i;
  for (int v = 0; v < n; ++v) comp[v] = rank[comp[v]];
  return comp;
}

std::vector<std::vector<int>> group_by(const std::vector<int>& comp) {
  int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::vector<int>> out(ncomp);
  for (size_t v = 0; v < comp.size(); ++v) out[comp[v]].push_back(static_cast<int>(v));
  return out;
}

// condensation edges and downward reachability: le(a, b) iff a is reachable
// from b along the arrows, which all point from higher to lower
Preorder condense(const std::vector<int>& comp, int ncomp,
                  const std::vector<std::vector<int>>& out,
                  std::vector<std::pair<int, int>>* edges) {
  std::vector<std::vector<int>> cedges(ncomp);
  for (size_t v = 0; v < comp.size(); ++v)
    for (int u : out[v])
      if (comp[v] != comp[u]) cedges[comp[v]].push_back(comp[u]);
  for (auto& e : cedges) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
  if (edges) {
    edges->clear();
    for (int c = 0; c < ncomp; ++c)
      for (int d : cedges[c]) edges->emplace_back(c, d);
  }
  Preorder p;
  p.n = ncomp;
  p.leq.assign(ncomp, std::vector<bool>(ncomp, false));
  for (int start = 0; start < ncomp; ++start) {
    std::vector<int> queue{start};
    p.leq[start][start] = true;
    for (size_t head = 0; head < queue.size(); ++head)
      for (int d : cedges[queue[head]])
        if (!p.leq[d][start]) {
          p.leq[d][start] = true;
          queue.push_back(d);
        }
  }
  return p;
}

}  // namespace

Preorder Preorder::discrete(int n) {
  Preorder p;
  p.n = n;
  p.leq.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) p.leq[i][i] = true;
  return p;
}

Preorder Preorder::opposite() const {
  Preorder p;
  p.n = n;
  p.leq.assign(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) p.leq[a][b] = leq[b][a];
  return p;
}

std::vector<std::vector<int>> Preorder::classes() const {
  std::vector<int> cls(n, -1);
  int next = 0;
  for (int a = 0; a < n; ++a) {
    if (cls[a] >= 0) continue;
    cls[a] = next;
    for (int b = a + 1; b < n; ++b)
      if (cls[b] < 0 && sim(a, b)) cls[b] = next;
    ++next;
  }
  return group_by(cls);
}

DominanceResult dominance_check(const Preorder& p1, const Preorder& p2) {
  require(p1.n == p2.n, "ground-set-mismatch", "preorders on different sets");
  DominanceResult r;
  r.dominates = true;
  r.strictly_dominates = true;
  for (int a = 0; a < p1.n; ++a)
    for (int b = 0; b < p1.n; ++b) {
      if (p1.le(a, b) && !p2.le(a, b)) r.dominates = false;
      if (p1.lt(a, b) && !p2.lt(a, b)) r.strictly_dominates = false;
    }
  if (!r.dominates) r.strictly_dominates = false;
  return r;
}

int CellDecomposition::lr_of_left(int left_cell) const {
  return two_sided_of[left_cells[left_cell][0]];
}

bool CellDecomposition::left_leq(int x, int y) const {
  return left_order.le(left_of[x], left_of[y]);
}

bool CellDecomposition::right_leq(int x, int y) const {
  return right_order.le(right_of[x], right_of[y]);
}

bool CellDecomposition::lr_leq(int x, int y) const {
  return lr_order.le(two_sided_of[x], two_sided_of[y]);
}

CellDecomposition cell_decomposition(const HeckeAlgebra& h) {
  const auto& w = h.group();
  int n = w.size();
  CellDecomposition out;
  out.system = h.system();

  // arrows point downward: x -> y whenever c_y shows up in some c_s c_x
  std::vector<std::vector<int>> left_arrows(n), right_arrows(n), union_arrows(n);
  for (int x = 0; x < n; ++x) {
    for (int s = 0; s < w.rank(); ++s) {
      int gen = w.element_from_word({s});
      for (auto& [y, c] : h.h_row(gen, x)) {
        (void)c;
        if (y != x) left_arrows[x].push_back(y);
      }
    }
    std::sort(left_arrows[x].begin(), left_arrows[x].end());
    left_arrows[x].erase(std::unique(left_arrows[x].begin(), left_arrows[x].end()),
                         left_arrows[x].end());
  }
  for (int x = 0; x < n; ++x)
    for (int y : left_arrows[x]) right_arrows[w.inverse(x)].push_back(w.inverse(y));
  for (int x = 0; x < n; ++x) {
    union_arrows[x] = left_arrows[x];
    union_arrows[x].insert(union_arrows[x].end(), right_arrows[x].begin(),
                           right_arrows[x].end());
  }

  out.left_of = sccs(n, left_arrows);
  out.right_of = sccs(n, right_arrows);
  out.two_sided_of = sccs(n, union_arrows);
  out.left_cells = group_by(out.left_of);
  out.right_cells = group_by(out.right_of);
  out.two_sided_cells = group_by(out.two_sided_of);

  out.left_order = condense(out.left_of, static_cast<int>(out.left_cells.size()),
                            left_arrows, &out.left_edges);
  out.right_order = condense(out.right_of, static_cast<int>(out.right_cells.size()),
                             right_arrows, nullptr);
  out.lr_order = condense(out.two_sided_of, static_cast<int>(out.two_sided_cells.size()),
                          union_arrows, &out.two_sided_edges);

  // each left cell sits inside one two-sided cell, so the two-sided preorder
  // restricts to left cells
  int nleft = static_cast<int>(out.left_cells.size());
  out.lr_order_left.n = nleft;
  out.lr_order_left.leq.assign(nleft, std::vector<bool>(nleft, false));
  for (int a = 0; a < nleft; ++a) {
    for (int x : out.left_cells[a])
      require(out.two_sided_of[x] == out.lr_of_left(a), "internal",
              "left cell split across two-sided cells");
    for (int b = 0; b < nleft; ++b)
      out.lr_order_left.leq[a][b] =
          out.lr_order.le(out.lr_of_left(a), out.lr_of_left(b));
  }
  return out;
}

AFunction a_function(const HeckeAlgebra& h, const CellDecomposition& cells) {
  const auto& w = h.group();
  int n = w.size();
  AFunction out;
  out.a.assign(n, 0);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (auto& [z, c] : h.h_row(x, y)) {
        long drop = -c.low_exp();
        if (drop > out.a[z]) out.a[z] = drop;
      }
  for (auto& cell : cells.two_sided_cells)
    for (int x : cell)
      require(out.a[x] == out.a[cell[0]], "P-failure",
              "a-function not constant on the two-sided cell of " + w.word_str(cell[0]));
  return out;
}

GammaData gamma_table(const HeckeAlgebra& h, const CellDecomposition& cells,
                      const AFunction& afun) {
  const auto& w = h.group();
  int n = w.size();
  GammaData out;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (auto& [z, c] : h.h_row(x, y)) {
        Coeff top = c.coeff(afun.a[z]);
        if (top == Coeff(0)) continue;
        require(top.b == 0, "gamma-not-integer",
                "leading coefficient outside Z at " + w.word_str(z));
        require(top.a.fits_slong_p(), "gamma-not-integer", "gamma overflow");
        out.gamma[{x, y, z}] = top.a.get_si();
      }

  // one distinguished element per left cell: the unique member z whose
  // gamma_{x^{-1},x,z} is nonzero for every x in that cell
  std::vector<int> d_in_cell(cells.left_cells.size(), -1);
  for (size_t c = 0; c < cells.left_cells.size(); ++c) {
    const auto& cell = cells.left_cells[c];
    for (int z : cell) {
      bool all = true;
      for (int x : cell)
        if (out.gamma.find({w.inverse(x), x, z}) == out.gamma.end()) {
          all = false;
          break;
        }
      if (!all) continue;
      require(d_in_cell[c] < 0, "P-failure",
              "two distinguished candidates in the left cell of " +
                  w.word_str(cell.front()));
      d_in_cell[c] = z;
    }
    int d = d_in_cell[c];
    require(d >= 0, "P-failure",
            "no distinguished element in the left cell of " +
                w.word_str(cell.front()));
    require(w.multiply(d, d) == 0, "P-failure",
            "distinguished element " + w.word_str(d) + " is not an involution");
    long nd = out.gamma.at({d, d, d});
    require(nd == 1 || nd == -1, "P-failure",
            "sign of " + w.word_str(d) + " is not a unit");
    out.n.emplace(d, static_cast<int>(nd));
  }
  for (auto& [d, nd] : out.n) {
    (void)nd;
    out.distinguished.push_back(d);
  }

  // every x meets exactly one distinguished element, with the matching sign
  for (int x = 0; x < n; ++x) {
    int xi = w.inverse(x);
    int hits = 0;
    for (int d : out.distinguished) {
      auto it = out.gamma.find({xi, x, d});
      if (it == out.gamma.end()) continue;
      ++hits;
      require(it->second == out.n.at(d), "P-failure",
              "sign mismatch at " + w.word_str(x));
    }
    require(hits == 1, "P-failure",
            "distinguished count for " + w.word_str(x) + " is not one");
  }

  out.n_hat.assign(n, 0);
  for (int z = 0; z < n; ++z)
    out.n_hat[z] = out.n.at(d_in_cell[cells.left_of[w.inverse(z)]]);
  return out;
}

std::vector<long> standard_height(int n, const std::vector<std::pair<int, int>>& edges) {
  // longest path ending at each node over the strict relation
  std::vector<std::vector<int>> below(n);  // per node, its strict predecessors
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> up(n);
  for (auto& [a, b] : edges) {
    require(a >= 0 && a < n && b >= 0 && b < n, "element-out-of-range", "bad edge");
    require(a != b, "not-a-poset", "self loop");
    up[a].push_back(b);
    ++indeg[b];
    below[b].push_back(a);
  }
  std::vector<int> order;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) order.push_back(v);
  for (size_t head = 0; head < order.size(); ++head)
    for (int u : up[order[head]])
      if (--indeg[u] == 0) order.push_back(u);
  require(static_cast<int>(order.size()) == n, "not-a-poset", "cycle detected");
  std::vector<long> height(n, 0);
  for (int v : order)
    for (int p : below[v]) height[v] = std::max(height[v], height[p] + 1);
  return height;
}

std::vector<long> standard_height(const Preorder& p) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < p.n; ++a)
    for (int b = 0; b < p.n; ++b)
      if (p.lt(a, b)) edges.emplace_back(a, b);
  return standard_height(p.n, edges);
}

bool height_compatible(const std::vector<long>& h, const Preorder& p) {
  require(static_cast<int>(h.size()) == p.n, "ground-set-mismatch",
          "height vector size differs from the preorder");
  for (int a = 0; a < p.n; ++a)
    for (int b = 0; b < p.n; ++b) {
      if (p.lt(a, b) && !(h[a] < h[b])) return false;
      if (p.sim(a, b) && h[a] != h[b]) return false;
    }
  return true;
}

HeightFunction a_height(const CellDecomposition& cells, const AFunction& afun,
                        bool left_oriented) {
  int nleft = static_cast<int>(cells.left_cells.size());
  HeightFunction out;
  out.kind = left_oriented ? HeightFunction::Kind::ALeft : HeightFunction::Kind::ARight;
  out.value.resize(nleft);
  for (int c = 0; c < nleft; ++c) {
    long a = afun.a[cells.left_cells[c][0]];
    for (int x : cells.left_cells[c])
      require(afun.a[x] == a, "P-failure", "a-function not constant on a left cell");
    out.value[c] = left_oriented ? -a - 1 : a + 1;
  }
  const Preorder& target =
      left_oriented ? cells.lr_order_left : cells.lr_order_left.opposite();
  require(height_compatible(out.value, target), "P-failure",
          "a-based heights incompatible with the two-sided preorder");
  return out;
}

Preorder preceq(const CellDecomposition& cells, const std::vector<long>& heights) {
  int nleft = static_cast<int>(cells.left_cells.size());
  require(static_cast<int>(heights.size()) == nleft, "ground-set-mismatch",
          "heights must be indexed by left cells");
  Preorder p;
  p.n = nleft;
  p.leq.assign(nleft, std::vector<bool>(nleft, false));
  for (int a = 0; a < nleft; ++a)
    for (int b = 0; b < nleft; ++b)
      p.leq[a][b] = heights[a] < heights[b] ||
                    (heights[a] == heights[b] && cells.lr_of_left(a) == cells.lr_of_left(b));
  return p;
}

nlohmann::json cells_report_json(const HeckeAlgebra& h, const CellDecomposition& cells,
                                 const AFunction& afun, const GammaData& gamma) {
  const auto& w = h.group();
  auto partition_json = [&](const std::vector<std::vector<int>>& cs) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& cell : cs) {
      nlohmann::json one = nlohmann::json::array();
      for (int x : cell) one.push_back(w.word_str(x));
      arr.push_back(std::move(one));
    }
    return arr;
  };
  auto edges_json = [](const std::vector<std::pair<int, int>>& es) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& [from, to] : es) arr.push_back({{"from", from}, {"to", to}});
    return arr;
  };
  nlohmann::json j;
  j["left_cells"] = partition_json(cells.left_cells);
  j["right_cells"] = partition_json(cells.right_cells);
  j["two_sided_cells"] = partition_json(cells.two_sided_cells);
  j["left_dag"] = edges_json(cells.left_edges);
  j["two_sided_dag"] = edges_json(cells.two_sided_edges);
  nlohmann::json a = nlohmann::json::object();
  for (int x = 0; x < w.size(); ++x) a[w.word_str(x)] = afun.a[x];
  j["a"] = std::move(a);
  nlohmann::json dist = nlohmann::json::array();
  for (int d : gamma.distinguished)
    dist.push_back({{"element", w.word_str(d)}, {"sign", gamma.n.at(d)}});
  j["distinguished"] = std::move(dist);
  return j;
}

}  // namespace hendo
