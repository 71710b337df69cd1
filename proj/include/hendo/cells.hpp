#pragma once

#include <map>
#include <memory>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hendo/hecke.hpp"

namespace hendo {

// A preorder on {0..n-1} stored as its full relation matrix.
struct Preorder {
  int n = 0;
  std::vector<std::vector<bool>> leq;

  static Preorder discrete(int n);
  bool le(int a, int b) const { return leq[a][b]; }
  bool sim(int a, int b) const { return leq[a][b] && leq[b][a]; }
  bool lt(int a, int b) const { return leq[a][b] && !leq[b][a]; }
  Preorder opposite() const;
  // partition into equivalence classes, each sorted, ordered by least member
  std::vector<std::vector<int>> classes() const;
};

struct DominanceResult {
  bool dominates = false;
  bool strictly_dominates = false;
};
// whether every p1 relation (and strict relation) also holds in p2
DominanceResult dominance_check(const Preorder& p1, const Preorder& p2);

struct CellDecomposition {
  std::shared_ptr<const CoxeterSystem> system;

  std::vector<std::vector<int>> left_cells;
  std::vector<std::vector<int>> right_cells;
  std::vector<std::vector<int>> two_sided_cells;
  std::vector<int> left_of;       // element id -> left cell id
  std::vector<int> right_of;
  std::vector<int> two_sided_of;

  // generating edges on cell ids, (from, to) meaning to lies below from
  std::vector<std::pair<int, int>> left_edges;
  std::vector<std::pair<int, int>> two_sided_edges;

  Preorder left_order;      // on left cell ids
  Preorder right_order;     // on right cell ids
  Preorder lr_order;        // on two-sided cell ids
  Preorder lr_order_left;   // the two-sided preorder viewed on left cells

  int lr_of_left(int left_cell) const;
  bool left_leq(int x, int y) const;   // element-level queries
  bool right_leq(int x, int y) const;
  bool lr_leq(int x, int y) const;
};

CellDecomposition cell_decomposition(const HeckeAlgebra& h);

struct AFunction {
  std::vector<long> a;  // per element id
};

// minimal a(z) with t^{a(z)} h_{x,y,z} polynomial over all x, y; verifies
// constancy on two-sided cells
AFunction a_function(const HeckeAlgebra& h, const CellDecomposition& cells);

struct GammaData {
  std::map<std::tuple<int, int, int>, long> gamma;  // nonzero entries only
  std::vector<int> distinguished;                   // sorted element ids
  std::map<int, int> n;                             // d -> plus or minus 1
  std::vector<int> n_hat;                           // per element id
};

GammaData gamma_table(const HeckeAlgebra& h, const CellDecomposition& cells,
                      const AFunction& afun);

// longest proper chain below each node; edges (a, b) mean a strictly below b
std::vector<long> standard_height(int n, const std::vector<std::pair<int, int>>& edges);
std::vector<long> standard_height(const Preorder& p);

struct HeightFunction {
  enum class Kind { Standard, ALeft, ARight } kind = Kind::Standard;
  std::vector<long> value;  // indexed by left cell id
};

// h(omega) < h(nu) whenever omega is strictly below nu, equal on equivalent ones
bool height_compatible(const std::vector<long>& h, const Preorder& p);

// heights from the a-function: -a-1 on the left orientation, a+1 on the right
HeightFunction a_height(const CellDecomposition& cells, const AFunction& afun,
                        bool left_oriented);

// omega before omega' when the height is smaller, or equal heights within one
// two-sided cell; a preorder on left cells whose classes are two-sided cells
Preorder preceq(const CellDecomposition& cells, const std::vector<long>& heights);

nlohmann::json cells_report_json(const HeckeAlgebra& h, const CellDecomposition& cells,
                                 const AFunction& afun, const GammaData& gamma);

}  // namespace hendo
