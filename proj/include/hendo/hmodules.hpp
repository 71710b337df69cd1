#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hendo/cells.hpp"
#include "hendo/linalg.hpp"

namespace hendo {

// A module over the Hecke algebra presented by explicit generator matrices on
// a labeled basis. Labels are group element ids: for a cell module the basis
// vector with label x is the class of c_x, for a dual module it is the dual
// functional of that class.
//
// Matrix convention: c_action[s].at(i, j) is the coefficient of basis vector
// i in c_s * b_j (left modules) or in b_j * c_s (right modules). Left action
// matrices compose covariantly, right ones contravariantly; the generator
// relations are insensitive to the difference.
struct BasedModule {
  enum class Side { Left, Right };

  std::shared_ptr<const CoxeterSystem> system;
  Side side = Side::Left;
  std::vector<int> labels;
  std::vector<Mat<Laurent>> c_action;  // one matrix per generator
  std::string origin;

  int rank() const { return static_cast<int>(labels.size()); }
  int position_of(int label) const;        // index in labels, or throws
  Mat<Laurent> t_action(int s) const;      // t_s * c_action[s] - identity
};

// Checks the quadratic relation (T_s - t_s^2)(T_s + 1) = 0 and the braid
// relations on the assembled T_s matrices; throws "bad-module" on failure.
void verify_hecke_relations(const BasedModule& m);

// Left cell module: basis {c_x : x in the cell}, action of c_s read off the
// structure constant rows and truncated to the cell.
BasedModule cell_module(const HeckeAlgebra& h, const CellDecomposition& cells,
                        int cell);

// Transpose dual; flips the side and keeps the labels.
BasedModule dual_module(const BasedModule& m);

// Right module dual to cell_module(cell).
BasedModule dual_cell_module(const HeckeAlgebra& h, const CellDecomposition& cells,
                             int cell);

// q-permutation module on the ideal generated by c_{w0J}: the left version
// carries basis {c_v : v covered by w0J in the left preorder}; the right
// version is its dual.
BasedModule q_perm_module(const HeckeAlgebra& h, const CellDecomposition& cells,
                          unsigned jmask, BasedModule::Side side);

// Computes three descriptions of the same element set (right descent sets
// containing J, length-additive multiples of w0J, the left-preorder ideal of
// w0J) and requires them to agree; returns the common sorted set.
std::vector<int> set_equality_w0J(const HeckeAlgebra& h,
                                  const CellDecomposition& cells, unsigned jmask);

struct FiltrationSection {
  long height = 0;
  std::vector<int> cells;      // left cell ids, one module summand each
  std::vector<int> positions;  // basis indices of the module in this section
};

// A height filtration. For a left module the recorded chain decreases from
// the whole label set to nothing; for a right module it increases from
// nothing to the whole set. In both cases sections[i] is the i-th chain step
// quotient and sections run from the top height value downward, so for right
// permutation modules sections[0] is the bottom submodule.
struct Filtration {
  BasedModule::Side side = BasedModule::Side::Left;
  std::vector<std::vector<int>> chain;  // label lists, sections.size() + 1 entries
  std::vector<FiltrationSection> sections;
};

// Builds and certifies the filtration of m induced by a height function on
// left cells (one value per cell, increasing along the left preorder, e.g.
// the negative a-heights). Certification checks that every generator matrix
// is block triangular across heights and that each section's blocks equal the
// (dual) cell module matrices on matching labels, zero between different
// cells; throws "section-mismatch" otherwise.
Filtration height_filtration(const HeckeAlgebra& h, const CellDecomposition& cells,
                             const BasedModule& m, const std::vector<long>& height);

// Basis of the common eigenlattice { v : c_s v = (t_s + t_s^{-1}) v for all
// s in J } of a left module, computed over the fraction field and saturated
// to primitive Laurent columns.
std::vector<std::vector<Laurent>> fixed_points(const HeckeAlgebra& h,
                                               const BasedModule& m, unsigned jmask);

// Surjectivity of K^{H_J} -> (K/I)^{H_J} for nested C-basis left ideals
// I inside K, each given by its label set. Checked generically over the
// fraction field and, when t_values is nonempty, integrally at each integer
// specialization via Smith normal form. The report carries per-stage verdicts
// and, on failure, a witness vector in the quotient basis.
nlohmann::json onto_check(const HeckeAlgebra& h, const CellDecomposition& cells,
                          const std::vector<int>& K, const std::vector<int>& I,
                          unsigned jmask, const std::vector<long>& t_values = {2, 3, 5});

}  // namespace hendo
