#pragma once

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hendo/cells.hpp"
#include "hendo/coxeter.hpp"
#include "hendo/hecke.hpp"
#include "hendo/hmodules.hpp"
#include "hendo/laurent.hpp"
#include "hendo/matrix.hpp"

namespace hendo {

// Endomorphism algebras of direct sums of the right modules x_J H, with the
// machinery that examines their layered structure over a coefficient field:
// standard and projective modules, the stratifying-system axioms, trace-ideal
// chains, and layerwise standard bases with bilinear forms.

// The list of parabolic masks indexing the summands; repeats are allowed and
// act as multiplicities.
struct ParabolicFamily {
  std::vector<unsigned> masks;
  std::string name;
};

ParabolicFamily all_subsets_family(const CoxeterSystem& sys);

// Weight-space families over a type B chain on r generators, one summand per
// composition of r: variant 'i' uses n parts, variant 'j' uses n + 1 parts
// with the last part contributing no cut. Composition (l_1, ..., l_k) keeps
// the generators away from the cut points l_1, l_1 + l_2, ... along the chain.
ParabolicFamily schur_family(const CoxeterSystem& sys, int n, int r, char variant);

// x_J H realized on the basis { x_J Ttilde_d : d minimal in W_J d }, with the
// collapse tables that rewrite an arbitrary Ttilde_w against that basis.
struct SummandModule {
  unsigned jmask = 0;
  BasedModule mod;         // side Right, labels are the coset representatives
  std::vector<int> pos;    // element id -> index of its representative
  std::vector<long> vwt;   // element id -> weight of the W_J prefix
  int rank() const { return mod.rank(); }
};

// One basis map: phi sends the generator x_{J_src} to the double coset sum
// T_p over the coset with the given minimal representative.
struct EndoBasisElem {
  int tgt = 0;
  int src = 0;
  int coset = 0;
  int rep = 0;
};

// The top section of x_J H: the canonical basis elements c_z with z in the
// right cell of w0J span the head of the summand, and rewriting each coset
// basis vector into the canonical basis and truncating to that cell gives a
// surjective equivariant projection, both properties checked exactly over
// the Laurent ring.
struct TopSection {
  std::vector<int> zs;                 // cell elements, increasing id
  std::vector<Mat<Laurent>> c_action;  // right action of c_s on the cell basis
  Mat<Laurent> project;                // cell basis x summand coordinates
};

struct EndoAlgebra {
  std::shared_ptr<const CoxeterSystem> system;
  ParabolicFamily family;
  std::vector<SummandModule> summands;

  std::vector<EndoBasisElem> basis;
  std::map<std::tuple<int, int, int>, int> index_of;  // (tgt, src, coset)
  std::vector<Mat<Laurent>> hom_matrix;
  // product a * b (a after b): sparse rows of the multiplication table
  std::vector<std::vector<std::vector<std::pair<int, Laurent>>>> mul;
  std::vector<int> unit;  // identity map of each summand

  // index set for the stratification: left cells of the w0(J_k)
  std::vector<int> summand_cell;   // summand -> left cell id
  std::vector<int> omega;          // distinct covered cells, increasing id
  std::vector<int> omega_summand;  // covered cell -> first summand with it
  std::vector<long> omega_height;  // covered cell -> height
  std::vector<int> omega_rank;     // covered cell -> generic standard dim
  std::vector<int> omega_class;    // covered cell -> class under generic iso
  std::vector<TopSection> tops;    // covered cell -> top section data
  bool covered_ideal = false;      // covered set closed upward in the order
  HeightFunction height;           // heights of all left cells
  Preorder order;                  // comparison of all left cells

  int dim() const { return static_cast<int>(basis.size()); }
  int block_dim(int tgt, int src) const;
  int omega_index(int cell) const;  // position in omega, -1 when absent
};

// Builds the algebra over the Laurent ring and verifies its internal
// certificates exactly: every basis map intertwines the action, composition
// closes in the double coset basis, the summand identities are identity
// matrices, and the top-section projections are equivariant and surjective.
// Standard module dimensions are computed over the fraction field and cross
// checked against the rank of the maps into each top section.
EndoAlgebra build_endo_algebra(const HeckeAlgebra& h, const CellDecomposition& cells,
                               const AFunction& afun, const ParabolicFamily& fam);

// Dimension of Hom(x_J H, x_I H) over the fraction field, solved as a plain
// linear system with no reference to the double coset basis.
int hom_dimension_generic(const HeckeAlgebra& h, unsigned imask, unsigned jmask);

// Coefficient field selector: p == 0 is the fraction field of the Laurent
// ring, anything else is GF(p^m) with t sent to the given residue (or to a
// square root of 2 when t_sqrt2 is set).
struct FieldSpec {
  long p = 0;
  int m = 1;
  long t_image = 1;
  bool t_sqrt2 = false;

  static FieldSpec generic() { return {}; }
  static FieldSpec finite(long p, int m, long t) {
    FieldSpec s;
    s.p = p;
    s.m = m;
    s.t_image = t;
    return s;
  }
  static FieldSpec finite_sqrt2(long p, int m) {
    FieldSpec s;
    s.p = p;
    s.m = m;
    s.t_sqrt2 = true;
    return s;
  }
  bool is_generic() const { return p == 0; }
  std::string str() const;
};

// Primes at which verdicts for this group are reported but not enforced.
std::vector<long> bad_primes(const CoxeterSystem& sys);

// Standard and projective module data over one field, the Hom dimension
// matrix, and the three stratifying-system axioms with witnesses.
nlohmann::json stratification_report(const EndoAlgebra& a, const FieldSpec& fs,
                                     std::uint64_t seed);

// Trace-ideal chain of the algebra itself: layer dimensions across the given
// fields, idempotent generation, layer decompositions, and the semisimplicity
// of each layer endomorphism ring. The first field supplies the reference
// dimensions and is normally the generic one.
nlohmann::json trace_ideal_report(const EndoAlgebra& a, const std::vector<FieldSpec>& fields,
                                  std::uint64_t seed);

// Layerwise standard basis with its bilinear forms; requires every layer
// corner to be one dimensional, which holds when the covered cell modules
// are generically irreducible.
nlohmann::json standard_basis_report(const EndoAlgebra& a, const FieldSpec& fs,
                                     std::uint64_t seed);

// Split semisimple bookkeeping over the fraction field. When the covered
// classes account for the full dimension the class list is used directly;
// otherwise the irreducible dimensions are read off at the supplied
// semisimple specialization and cross-checked against the generic center.
nlohmann::json generic_class_report(const EndoAlgebra& a, const FieldSpec& probe,
                                    std::uint64_t seed);

// Bundle of the reports above for the command line driver.
nlohmann::json endo_report_json(const EndoAlgebra& a, const std::vector<FieldSpec>& fields,
                                std::uint64_t seed);

}  // namespace hendo
