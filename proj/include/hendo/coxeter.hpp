#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "hendo/zring.hpp"

namespace hendo {

// Raw description of a weighted Coxeter system: the Coxeter matrix m_{st}
// (symmetric, 2..8 off-diagonal, m_{ss} = 1 conventionally stored as 1),
// one positive weight per generator, and an optional catalog tag.
struct SystemSpec {
  std::vector<std::vector<int>> matrix;
  std::vector<long> weights;
  std::string tag;

  nlohmann::json to_json() const;
  static SystemSpec from_json(const nlohmann::json& j);

  // Named systems: "A<n>", "B<n>"/"C<n>" (weights 1), "D<n>", "E6/7/8",
  // "F4", "G2", "2F4" (dihedral of order 16, weights 2 and 4), and the
  // quasi-split unitary families "SU<n>" (type B_m with weights 2,...,2,1
  // for n = 2m and 2,...,2,3 for n = 2m+1).
  static SystemSpec from_catalog(const std::string& name);
};

// A fully enumerated finite weighted Coxeter system. Elements are integer
// ids in ShortLex order of their canonical reduced words (id 0 is the
// identity); multiplication goes through permutations of the finite root
// set, computed once at build time.
class CoxeterSystem {
public:
  static std::shared_ptr<const CoxeterSystem> build(const SystemSpec& spec,
                                                    std::size_t element_cap = 1000000);

  int rank() const { return rank_; }
  int size() const { return static_cast<int>(words_.size()); }
  RingTag root_ring() const { return ring_; }
  const SystemSpec& spec() const { return spec_; }
  int coxeter_m(int s, int u) const { return spec_.matrix[s][u]; }
  long gen_weight(int s) const { return spec_.weights[s]; }

  int multiply(int a, int b) const;
  int inverse(int a) const { return inv_[check(a)]; }
  int left_mul(int s, int w) const { return lmul_[check(w) * rank_ + s]; }
  int right_mul(int w, int s) const { return rmul_[check(w) * rank_ + s]; }

  int length(int w) const { return static_cast<int>(words_[check(w)].size()); }
  long weight_L(int w) const { return weightL_[check(w)]; }
  int sign(int w) const { return length(w) % 2 == 0 ? 1 : -1; }
  const std::vector<std::uint8_t>& word(int w) const { return words_[check(w)]; }
  std::string word_str(int w) const;
  int element_from_word(const std::vector<int>& letters) const;

  unsigned left_descents(int w) const;   // bitmask over generators
  unsigned right_descents(int w) const;  // bitmask over generators
  bool bruhat_leq(int x, int y) const;
  int longest() const { return longest_; }

  struct ParabolicData {
    std::vector<int> elements;        // W_J in id order
    int w0J = 0;                      // longest element of W_J
    std::vector<int> min_left_reps;   // minimal d in each coset d W_J
    std::vector<int> min_right_reps;  // minimal d in each coset W_J d
  };
  ParabolicData parabolic(unsigned jmask) const;

  struct DoubleCosetData {
    std::vector<int> reps;      // minimal-length representative per block
    std::vector<int> block_of;  // element id -> block index
  };
  DoubleCosetData double_cosets(unsigned imask, unsigned jmask) const;

  // All subsets J of generators, as bitmasks in a fixed order.
  std::vector<unsigned> all_parabolic_masks() const;

private:
  CoxeterSystem() = default;
  int check(int w) const {
    require(w >= 0 && w < size(), "element-out-of-range",
            "element id " + std::to_string(w));
    return w;
  }
  void enumerate_roots(std::size_t root_cap);
  void enumerate_elements(std::size_t element_cap);
  void build_bruhat();

  SystemSpec spec_;
  int rank_ = 0;
  RingTag ring_ = RingTag::Z;

  // Cartan pairing entries: action of generator s on coordinates,
  // s(e_u) = e_u - cartan_[s][u] * e_s.
  std::vector<std::vector<Coeff>> cartan_;

  std::vector<std::vector<Coeff>> roots_;    // coordinates in the simple basis
  std::vector<bool> root_positive_;
  std::vector<std::vector<int>> gen_root_action_;  // per generator, root permutation

  std::vector<std::vector<int>> perms_;      // element id -> root permutation
  std::vector<std::vector<std::uint8_t>> words_;
  std::vector<long> weightL_;
  std::vector<int> inv_;
  std::vector<int> lmul_, rmul_;             // flattened tables
  int longest_ = 0;

  // Bruhat table as bitsets, built for groups up to this size.
  static constexpr int kBruhatCap = 4096;
  std::vector<std::vector<std::uint64_t>> bruhat_;
};

}  // namespace hendo
