#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hendo/cells.hpp"
#include "hendo/hecke.hpp"
#include "hendo/matrix.hpp"

namespace hendo {

// Element of the asymptotic ring: a sparse combination of the basis {j_x},
// one basis element per group element. Coefficients are Laurent polynomials
// so that images of Hecke elements fit; plain integer combinations are the
// common case. Zero coefficients are never stored.
struct JElement {
  std::map<int, Laurent> coeffs;

  bool is_zero() const { return coeffs.empty(); }
  Laurent coeff(int x) const {
    auto it = coeffs.find(x);
    return it == coeffs.end() ? Laurent(RingTag::Z) : it->second;
  }
  void add_term(int x, const Laurent& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = coeffs.emplace(x, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) coeffs.erase(it);
    }
  }
  std::string str(const CoxeterSystem& sys) const;
};

bool operator==(const JElement& a, const JElement& b);
inline bool operator!=(const JElement& a, const JElement& b) { return !(a == b); }
JElement operator+(const JElement& a, const JElement& b);
JElement operator-(const JElement& a, const JElement& b);

// Search for an invertible U over the fraction field with U*a[i] = b[i]*U for
// every i, certifying that the two families of action matrices define
// isomorphic module structures. The result is denominator-cleared. Returns
// nothing when the intertwiner space contains no invertible element.
std::optional<Mat<Laurent>> find_intertwiner(const std::vector<Mat<Laurent>>& a,
                                             const std::vector<Mat<Laurent>>& b);

// The asymptotic ring of a weighted Coxeter system: the integral ring on the
// basis {j_x} whose structure constants are the leading coefficients gamma of
// the KL structure constants. Also carries the ring homomorphism from the
// Hecke algebra (column map varpi), the graded action on a-level pieces, and
// the lifting of cell modules across varpi.
class JRing {
 public:
  JRing(const HeckeAlgebra& h, const CellDecomposition& cells,
        const AFunction& afun, const GammaData& gamma);

  const HeckeAlgebra& hecke() const { return *h_; }
  const CoxeterSystem& group() const { return h_->group(); }
  int size() const { return n_; }

  // gamma lookup; zero when the triple is not in the table
  long structure_constant(int x, int y, int z) const;

  JElement j_basis(int x) const;
  JElement j_mul(const JElement& a, const JElement& b) const;
  // Two-sided identity, found by solving the defining linear system over the
  // rationals. Always equals the signed sum of the distinguished involutions;
  // a missing or different unit is reported as a positivity failure.
  const JElement& j_unit() const;

  // column w is the image of c_w written in the j basis
  const Mat<Laurent>& phi_matrix() const;
  JElement varpi(const HeckeElement& a) const;
  // matrix of the dagger involution on the KL basis; squares to the identity
  const Mat<Laurent>& dagger_matrix() const;

  // varpi is a unital ring homomorphism: varpi(1) is the unit, and
  // varpi(c_s) varpi(c_w) = varpi(c_s c_w) for every generator s and every w.
  // Also checks the factorization through dagger as a matrix identity.
  void verify_homomorphism() const;
  // the column map is nonsingular over the fraction field
  void verify_invertible() const;

  // sorted labels of the graded piece spanned by {c_w : a(w) = a_value}
  std::vector<int> graded_piece(long a_value) const;
  // matrix of j acting on that graded piece
  Mat<Laurent> boxdot_action(long a_value, const JElement& j) const;
  // The graded action never lowers the a-level, and on each graded section
  // it agrees with left multiplication composed with varpi: for all s, w the
  // products c_s c_w and varpi(c_s) applied to c_w match at level a(w) and
  // below. Failures are reported as positivity failures.
  void verify_graded_action() const;

  struct CellLift {
    int cell = 0;
    std::vector<int> labels;            // the cell, sorted by element id
    std::map<int, Mat<long>> j_action;  // x -> matrix of j_x; zero matrices omitted
    bool identity_certificate = true;   // restricted action equals the cell action
    Mat<Laurent> basis_change;          // U with U * cell action = lifted action * U
    bool ok = true;
    std::string note;
  };
  // Module structure over the asymptotic ring whose restriction through the
  // column map is the given left cell module, together with an explicit
  // basis-change certificate. ok=false carries a diagnostic instead of
  // throwing: a missing certificate indicates a bug, not bad input.
  CellLift lift_cell_module(int cell_index) const;

  nlohmann::json report_json() const;

 private:
  const HeckeAlgebra* h_;
  const CellDecomposition* cells_;
  const AFunction* afun_;
  const GammaData* gamma_;
  int n_ = 0;

  // structure table regrouped by the first two indices for products
  std::map<std::pair<int, int>, std::vector<std::pair<int, long>>> by_xy_;

  mutable std::optional<JElement> unit_;
  mutable std::optional<Mat<Laurent>> phi_;
  mutable std::optional<Mat<Laurent>> dagger_;
};

}  // namespace hendo
