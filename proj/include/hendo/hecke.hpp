#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hendo/coxeter.hpp"
#include "hendo/laurent.hpp"

namespace hendo {

// Bases of the Hecke algebra: the defining basis T_w, its normalization
// T̃_w = t^{-L(w)} T_w, and the Kazhdan-Lusztig basis c_w.
enum class Basis { T, Ttilde, C };

inline std::string basis_name(Basis b) {
  switch (b) {
    case Basis::T: return "T";
    case Basis::Ttilde: return "Ttilde";
    default: return "C";
  }
}

// A Hecke algebra element: sparse coefficients over group element ids in a
// declared basis. Zero coefficients are never stored.
struct HeckeElement {
  std::shared_ptr<const CoxeterSystem> system;
  Basis basis = Basis::Ttilde;
  std::map<int, Laurent> coeffs;

  bool is_zero() const { return coeffs.empty(); }
  const Laurent* find(int w) const {
    auto it = coeffs.find(w);
    return it == coeffs.end() ? nullptr : &it->second;
  }
  Laurent coeff(int w) const {
    auto it = coeffs.find(w);
    return it == coeffs.end() ? Laurent(RingTag::Z) : it->second;
  }
  void add_term(int w, const Laurent& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = coeffs.emplace(w, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) coeffs.erase(it);
    }
  }
  std::string str() const;
};

inline void check_compatible(const HeckeElement& a, const HeckeElement& b) {
  require(a.system == b.system, "system-mismatch",
          "elements live over different Coxeter systems");
  require(a.basis == b.basis, "basis-mismatch",
          "implicit arithmetic across bases; convert explicitly");
}

HeckeElement operator+(const HeckeElement& a, const HeckeElement& b);
HeckeElement operator-(const HeckeElement& a, const HeckeElement& b);
HeckeElement operator*(const Laurent& c, const HeckeElement& a);
bool operator==(const HeckeElement& a, const HeckeElement& b);

// The generic Hecke algebra of a weighted Coxeter system over Z[t,t^-1].
// Memoized tables (KL basis rows, bar images of basis elements, structure
// constant rows) fill on demand; fills are deterministic and append-only,
// guarded by one recursive mutex so concurrent readers are safe.
class HeckeAlgebra {
public:
  explicit HeckeAlgebra(std::shared_ptr<const CoxeterSystem> sys);

  const std::shared_ptr<const CoxeterSystem>& system() const { return sys_; }
  const CoxeterSystem& group() const { return *sys_; }

  Laurent ts(int s) const { return Laurent::t_pow(sys_->gen_weight(s), RingTag::Z); }
  Laurent ts_inv(int s) const { return Laurent::t_pow(-sys_->gen_weight(s), RingTag::Z); }
  // t_s + t_s^-1, the eigenvalue of right multiplication by c_s on c_w with ws < w
  Laurent cs_eigenvalue(int s) const { return ts(s) + ts_inv(s); }

  HeckeElement zero(Basis b = Basis::Ttilde) const;
  HeckeElement basis_element(Basis b, int w) const;
  HeckeElement from_coeffs(Basis b, std::map<int, Laurent> m) const;

  HeckeElement convert(const HeckeElement& a, Basis target) const;
  // product, returned in the basis of the left factor
  HeckeElement mul(const HeckeElement& a, const HeckeElement& b) const;

  // ring involution: t -> t^-1, T_w -> inverse of T over the inverse element
  HeckeElement bar(const HeckeElement& a) const;
  // linear involution T̃_w -> sgn(w) * (T̃ of w^-1)^-1
  HeckeElement dagger(const HeckeElement& a) const;

  // c_w expanded in the T̃ basis; rows are the polynomials p_{y,w}
  const HeckeElement& kl_element(int w) const;
  Laurent kl_p(int y, int w) const;
  // correction polynomials recorded by the recursion, keyed (s, x, w) from
  // c_s c_w = c_{sw} + sum mu^s_{x,w} c_x when sw > w
  const std::map<std::tuple<int, int, int>, Laurent>& mu_table() const;

  // row h_{x,y,.} of c_x c_y = sum_z h_{x,y,z} c_z
  const std::map<int, Laurent>& h_row(int x, int y) const;
  Laurent h(int x, int y, int z) const;

  HeckeElement x_element(unsigned jmask) const;  // sum of T_w over the parabolic
  HeckeElement y_element(unsigned jmask) const;  // signed sum, the other sheet

  void fill_kl() const;
  nlohmann::json kl_cache_json() const;
  // validate a previously written table against the defining conditions,
  // then adopt it in place of recomputation
  void load_kl_cache(const nlohmann::json& j) const;

private:
  void ensure_kl(int upto) const;
  void ensure_bar(int upto) const;
  // right and left multiplication by the generator basis element, T̃ basis
  HeckeElement mul_gen_right(const HeckeElement& a, int s) const;
  HeckeElement mul_gen_left(int s, const HeckeElement& a) const;
  HeckeElement mul_ttilde(const HeckeElement& a, const HeckeElement& b) const;

  std::shared_ptr<const CoxeterSystem> sys_;

  mutable std::recursive_mutex memo_;
  mutable std::vector<HeckeElement> kl_;      // indexed by element id
  mutable int kl_filled_ = 0;
  mutable std::vector<HeckeElement> bart_;    // bar images of T̃_w
  mutable int bar_filled_ = 0;
  mutable std::map<std::tuple<int, int, int>, Laurent> mu_;
  mutable std::map<std::pair<int, int>, std::map<int, Laurent>> h_rows_;
};

}  // namespace hendo
