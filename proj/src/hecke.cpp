#include "hendo/hecke.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

namespace hendo {

namespace {

// parse back the word rendering used by CoxeterSystem::word_str
int element_from_word_str(const CoxeterSystem& w, const std::string& s) {
  if (s == "e") return 0;
  std::vector<int> letters;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t dot = s.find('.', pos);
    if (dot == std::string::npos) dot = s.size();
    require(dot > pos, "cache-invalid", "empty letter in word " + s);
    int v = 0;
    for (size_t i = pos; i < dot; ++i) {
      require(s[i] >= '0' && s[i] <= '9', "cache-invalid", "bad word " + s);
      v = 10 * v + (s[i] - '0');
    }
    require(v >= 1 && v <= w.rank(), "cache-invalid", "letter out of range in " + s);
    letters.push_back(v - 1);
    pos = dot + 1;
  }
  int el = w.element_from_word(letters);
  require(static_cast<size_t>(w.length(el)) == letters.size(), "cache-invalid",
          "non-reduced word " + s);
  return el;
}

}  // namespace

std::string HeckeElement::str() const {
  if (coeffs.empty()) return "0";
  std::string out;
  for (auto& [w, c] : coeffs) {
    if (!out.empty()) out += " + ";
    out += "(" + c.str() + ")" + basis_name(basis) + "[" + system->word_str(w) + "]";
  }
  return out;
}

HeckeElement operator+(const HeckeElement& a, const HeckeElement& b) {
  check_compatible(a, b);
  HeckeElement out = a;
  for (auto& [w, c] : b.coeffs) out.add_term(w, c);
  return out;
}

HeckeElement operator-(const HeckeElement& a, const HeckeElement& b) {
  check_compatible(a, b);
  HeckeElement out = a;
  for (auto& [w, c] : b.coeffs) out.add_term(w, Laurent(c.ring()) - c);
  return out;
}

HeckeElement operator*(const Laurent& c, const HeckeElement& a) {
  HeckeElement out;
  out.system = a.system;
  out.basis = a.basis;
  if (c.is_zero()) return out;
  for (auto& [w, v] : a.coeffs) out.add_term(w, c * v);
  return out;
}

bool operator==(const HeckeElement& a, const HeckeElement& b) {
  return a.system == b.system && a.basis == b.basis && a.coeffs == b.coeffs;
}

HeckeAlgebra::HeckeAlgebra(std::shared_ptr<const CoxeterSystem> sys)
    : sys_(std::move(sys)) {
  kl_.resize(sys_->size());
  bart_.resize(sys_->size());
}

HeckeElement HeckeAlgebra::zero(Basis b) const {
  HeckeElement e;
  e.system = sys_;
  e.basis = b;
  return e;
}

HeckeElement HeckeAlgebra::basis_element(Basis b, int w) const {
  sys_->length(w);  // bounds check
  HeckeElement e = zero(b);
  e.add_term(w, Laurent(1, RingTag::Z));
  return e;
}

HeckeElement HeckeAlgebra::from_coeffs(Basis b, std::map<int, Laurent> m) const {
  HeckeElement e = zero(b);
  for (auto& [w, c] : m) {
    sys_->length(w);
    e.add_term(w, c);
  }
  return e;
}

HeckeElement HeckeAlgebra::mul_gen_right(const HeckeElement& a, int s) const {
  HeckeElement out = zero(Basis::Ttilde);
  for (auto& [w, c] : a.coeffs) {
    int ws = sys_->right_mul(w, s);
    out.add_term(ws, c);
    if (sys_->length(ws) < sys_->length(w))
      out.add_term(w, c * (ts(s) - ts_inv(s)));
  }
  return out;
}

HeckeElement HeckeAlgebra::mul_gen_left(int s, const HeckeElement& a) const {
  HeckeElement out = zero(Basis::Ttilde);
  for (auto& [w, c] : a.coeffs) {
    int sw = sys_->left_mul(s, w);
    out.add_term(sw, c);
    if (sys_->length(sw) < sys_->length(w))
      out.add_term(w, c * (ts(s) - ts_inv(s)));
  }
  return out;
}

HeckeElement HeckeAlgebra::mul_ttilde(const HeckeElement& a, const HeckeElement& b) const {
  HeckeElement out = zero(Basis::Ttilde);
  for (auto& [v, cv] : b.coeffs) {
    HeckeElement part = a;
    for (std::uint8_t s : sys_->word(v)) part = mul_gen_right(part, s);
    for (auto& [w, c] : part.coeffs) out.add_term(w, c * cv);
  }
  return out;
}

HeckeElement HeckeAlgebra::convert(const HeckeElement& a, Basis target) const {
  require(a.system == sys_, "system-mismatch", "element from another algebra");
  if (a.basis == target) return a;
  // route everything through T̃
  if (a.basis == Basis::T) {
    HeckeElement tt = zero(Basis::Ttilde);
    for (auto& [w, c] : a.coeffs)
      tt.add_term(w, c * Laurent::t_pow(sys_->weight_L(w), RingTag::Z));
    return convert(tt, target);
  }
  if (a.basis == Basis::C) {
    HeckeElement tt = zero(Basis::Ttilde);
    for (auto& [w, c] : a.coeffs) {
      const HeckeElement& cw = kl_element(w);
      for (auto& [y, p] : cw.coeffs) tt.add_term(y, c * p);
    }
    return convert(tt, target);
  }
  // from T̃
  if (target == Basis::T) {
    HeckeElement out = zero(Basis::T);
    for (auto& [w, c] : a.coeffs)
      out.add_term(w, c * Laurent::t_pow(-sys_->weight_L(w), RingTag::Z));
    return out;
  }
  // T̃ to C: peel the largest id, whose KL row is unitriangular against it
  HeckeElement out = zero(Basis::C);
  std::map<int, Laurent> rest = a.coeffs;
  while (!rest.empty()) {
    auto it = std::prev(rest.end());
    int w = it->first;
    Laurent coef = it->second;
    out.add_term(w, coef);
    const HeckeElement& cw = kl_element(w);
    for (auto& [y, p] : cw.coeffs) {
      auto [jt, fresh] = rest.emplace(y, Laurent(RingTag::Z));
      jt->second -= coef * p;
      if (jt->second.is_zero()) rest.erase(jt);
      (void)fresh;
    }
    require(rest.find(w) == rest.end(), "internal", "triangular peel failed");
  }
  return out;
}

HeckeElement HeckeAlgebra::mul(const HeckeElement& a, const HeckeElement& b) const {
  require(a.system == sys_ && b.system == sys_, "system-mismatch",
          "factors from another algebra");
  HeckeElement prod =
      mul_ttilde(convert(a, Basis::Ttilde), convert(b, Basis::Ttilde));
  return convert(prod, a.basis);
}

void HeckeAlgebra::ensure_bar(int upto) const {
  std::lock_guard<std::recursive_mutex> lock(memo_);
  for (; bar_filled_ <= upto; ++bar_filled_) {
    int w = bar_filled_;
    if (w == 0) {
      bart_[0] = basis_element(Basis::Ttilde, 0);
      continue;
    }
    // w = s v with v shorter; bar is multiplicative and
    // bar(T̃_s) = T̃_s^-1 = T̃_s - (t_s - t_s^-1)
    int s = sys_->word(w)[0];
    int v = sys_->left_mul(s, w);
    bart_[w] = mul_gen_left(s, bart_[v]) + (ts_inv(s) - ts(s)) * bart_[v];
  }
}

HeckeElement HeckeAlgebra::bar(const HeckeElement& a) const {
  HeckeElement tt = convert(a, Basis::Ttilde);
  HeckeElement out = zero(Basis::Ttilde);
  for (auto& [w, c] : tt.coeffs) {
    ensure_bar(w);
    Laurent cb = c.bar();
    for (auto& [y, p] : bart_[w].coeffs) out.add_term(y, cb * p);
  }
  return convert(out, a.basis);
}

HeckeElement HeckeAlgebra::dagger(const HeckeElement& a) const {
  HeckeElement tt = convert(a, Basis::Ttilde);
  HeckeElement out = zero(Basis::Ttilde);
  for (auto& [w, c] : tt.coeffs) {
    // sgn(w) (T̃_{w^-1})^-1, taken with the coefficient untouched
    ensure_bar(w);
    Laurent cs = sys_->sign(w) == 1 ? c : Laurent(c.ring()) - c;
    for (auto& [y, p] : bart_[w].coeffs) out.add_term(y, cs * p);
  }
  return convert(out, a.basis);
}

void HeckeAlgebra::ensure_kl(int upto) const {
  std::lock_guard<std::recursive_mutex> lock(memo_);
  for (; kl_filled_ <= upto; ++kl_filled_) {
    int w = kl_filled_;
    if (w == 0) {
      kl_[0] = basis_element(Basis::Ttilde, 0);
      continue;
    }
    int s = sys_->word(w)[0];
    int wp = sys_->left_mul(s, w);
    // c_s c_{w'} = (T̃_s + t_s^-1) c_{w'}
    HeckeElement c = mul_gen_left(s, kl_[wp]) + ts_inv(s) * kl_[wp];
    // strip away lower KL terms until every coefficient below w is in
    // t^-1 Z[t^-1]; ids order by length then lex, so the largest offender
    // strictly decreases and the sweep terminates
    while (true) {
      int bad = -1;
      for (auto it = c.coeffs.rbegin(); it != c.coeffs.rend(); ++it) {
        if (it->first == w) continue;
        if (!it->second.strictly_negative()) {
          bad = it->first;
          break;
        }
      }
      if (bad < 0) break;
      Laurent m = c.coeff(bad).make_bar_invariant();
      require(!m.is_zero(), "internal", "stalled KL reduction");
      require(sys_->length(sys_->left_mul(s, bad)) < sys_->length(bad), "internal",
              "correction term without the expected descent");
      for (auto& [y, p] : kl_[bad].coeffs) {
        Laurent mp = m * p;
        c.add_term(y, Laurent(mp.ring()) - mp);
      }
      auto key = std::make_tuple(s, bad, wp);
      require(mu_.find(key) == mu_.end(), "internal", "correction recorded twice");
      mu_.emplace(key, std::move(m));
    }
    require(c.coeff(w) == Laurent(1, RingTag::Z), "internal",
            "KL leading coefficient is not 1");
    kl_[w] = std::move(c);
  }
}

const HeckeElement& HeckeAlgebra::kl_element(int w) const {
  sys_->length(w);
  ensure_kl(w);
  return kl_[w];
}

Laurent HeckeAlgebra::kl_p(int y, int w) const {
  sys_->length(y);
  return kl_element(w).coeff(y);
}

void HeckeAlgebra::fill_kl() const { ensure_kl(sys_->size() - 1); }

const std::map<std::tuple<int, int, int>, Laurent>& HeckeAlgebra::mu_table() const {
  fill_kl();
  return mu_;
}

const std::map<int, Laurent>& HeckeAlgebra::h_row(int x, int y) const {
  sys_->length(x);
  sys_->length(y);
  std::lock_guard<std::recursive_mutex> lock(memo_);
  auto key = std::make_pair(x, y);
  auto it = h_rows_.find(key);
  if (it != h_rows_.end()) return it->second;
  HeckeElement prod = convert(
      mul_ttilde(kl_element(x), kl_element(y)), Basis::C);
  return h_rows_.emplace(key, std::move(prod.coeffs)).first->second;
}

Laurent HeckeAlgebra::h(int x, int y, int z) const {
  sys_->length(z);
  const auto& row = h_row(x, y);
  auto it = row.find(z);
  return it == row.end() ? Laurent(RingTag::Z) : it->second;
}

HeckeElement HeckeAlgebra::x_element(unsigned jmask) const {
  HeckeElement out = zero(Basis::T);
  for (int w : sys_->parabolic(jmask).elements)
    out.add_term(w, Laurent(1, RingTag::Z));
  return out;
}

HeckeElement HeckeAlgebra::y_element(unsigned jmask) const {
  HeckeElement out = zero(Basis::T);
  for (int w : sys_->parabolic(jmask).elements) {
    Laurent c = Laurent::t_pow(-2 * sys_->weight_L(w), RingTag::Z);
    out.add_term(w, sys_->sign(w) == 1 ? c : Laurent(c.ring()) - c);
  }
  return out;
}

nlohmann::json HeckeAlgebra::kl_cache_json() const {
  fill_kl();
  std::lock_guard<std::recursive_mutex> lock(memo_);
  nlohmann::json j;
  j["version"] = 1;
  j["system"] = sys_->spec().to_json();
  nlohmann::json p = nlohmann::json::object();
  for (int w = 0; w < sys_->size(); ++w)
    for (auto& [y, c] : kl_[w].coeffs)
      p[sys_->word_str(y) + "|" + sys_->word_str(w)] = c.to_json();
  j["p"] = std::move(p);
  nlohmann::json mu = nlohmann::json::object();
  for (auto& [key, c] : mu_) {
    auto [s, x, w] = key;
    mu[std::to_string(s + 1) + "|" + sys_->word_str(x) + "|" + sys_->word_str(w)] =
        c.to_json();
  }
  j["mu"] = std::move(mu);
  return j;
}

void HeckeAlgebra::load_kl_cache(const nlohmann::json& j) const {
  require(j.is_object() && j.value("version", 0) == 1, "cache-invalid",
          "unsupported cache version");
  require(j.contains("system") && j.contains("p") && j.contains("mu"),
          "cache-invalid", "missing cache sections");
  SystemSpec cached = SystemSpec::from_json(j.at("system"));
  require(cached.matrix == sys_->spec().matrix && cached.weights == sys_->spec().weights,
          "cache-mismatch", "cache written for a different system");

  std::vector<std::map<int, Laurent>> table(sys_->size());
  for (auto& [key, val] : j.at("p").items()) {
    size_t bar_pos = key.find('|');
    require(bar_pos != std::string::npos, "cache-invalid", "bad p key " + key);
    int y = element_from_word_str(*sys_, key.substr(0, bar_pos));
    int w = element_from_word_str(*sys_, key.substr(bar_pos + 1));
    Laurent c = Laurent::from_json(val);
    require(!c.is_zero(), "cache-invalid", "explicit zero in p table");
    require(sys_->bruhat_leq(y, w), "cache-invalid",
            "p entry outside the Bruhat interval: " + key);
    if (y == w)
      require(c == Laurent(1, RingTag::Z), "cache-invalid", "diagonal p must be 1");
    else
      require(c.strictly_negative(), "cache-invalid",
              "off-diagonal p not in t^-1 Z[t^-1]: " + key);
    require(table[w].emplace(y, std::move(c)).second, "cache-invalid",
            "duplicate p key " + key);
  }
  std::map<std::tuple<int, int, int>, Laurent> mu;
  for (auto& [key, val] : j.at("mu").items()) {
    size_t b1 = key.find('|');
    size_t b2 = b1 == std::string::npos ? b1 : key.find('|', b1 + 1);
    require(b2 != std::string::npos, "cache-invalid", "bad mu key " + key);
    int s = 0;
    for (char ch : key.substr(0, b1)) {
      require(ch >= '0' && ch <= '9', "cache-invalid", "bad mu generator " + key);
      s = 10 * s + (ch - '0');
    }
    require(s >= 1 && s <= sys_->rank(), "cache-invalid", "mu generator range");
    int x = element_from_word_str(*sys_, key.substr(b1 + 1, b2 - b1 - 1));
    int w = element_from_word_str(*sys_, key.substr(b2 + 1));
    Laurent c = Laurent::from_json(val);
    require(c.is_bar_symmetric(), "cache-invalid", "mu entry not bar-fixed: " + key);
    mu.emplace(std::make_tuple(s - 1, x, w), std::move(c));
  }

  // the conditions verified below pin the table down uniquely, so a table
  // passing them is the one the recursion would produce
  std::lock_guard<std::recursive_mutex> lock(memo_);
  for (int w = 0; w < sys_->size(); ++w) {
    auto diag = table[w].find(w);
    require(diag != table[w].end(), "cache-invalid",
            "missing diagonal entry for " + sys_->word_str(w));
    HeckeElement cw = zero(Basis::Ttilde);
    for (auto& [y, c] : table[w]) cw.add_term(y, c);
    require(bar(cw) == cw, "cache-invalid",
            "cached row is not bar-fixed at " + sys_->word_str(w));
  }
  for (int w = 0; w < sys_->size(); ++w) {
    kl_[w] = zero(Basis::Ttilde);
    for (auto& [y, c] : table[w]) kl_[w].add_term(y, c);
  }
  kl_filled_ = sys_->size();
  mu_ = std::move(mu);
  h_rows_.clear();
}

}  // namespace hendo
