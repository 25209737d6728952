#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "formalis/error.hpp"
#include "formalis/polynomial.hpp"

namespace formalis {

using CoxeterMatrix = std::vector<std::vector<int>>;
using Word = std::vector<int>;  // 0-based generator indices

inline constexpr std::size_t kMaxCoxeterGroupSize = 100000;

// Coxeter matrix of a finite irreducible type, Bourbaki numbering.
inline CoxeterMatrix coxeter_matrix(const std::string& type, int rank) {
  if (rank < 1) throw InvalidInput("Coxeter rank must be positive");
  const std::size_t n = static_cast<std::size_t>(rank);
  CoxeterMatrix m(n, std::vector<int>(n, 2));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  auto edge = [&](std::size_t i, std::size_t j, int order) { m[i][j] = m[j][i] = order; };
  if (type == "A") {
    for (std::size_t i = 0; i + 1 < n; ++i) edge(i, i + 1, 3);
  } else if (type == "B" || type == "C") {
    if (rank < 2) throw InvalidInput("type " + type + " needs rank >= 2");
    for (std::size_t i = 0; i + 1 < n; ++i) edge(i, i + 1, 3);
    edge(n - 2, n - 1, 4);
  } else if (type == "D") {
    if (rank < 4) throw InvalidInput("type D needs rank >= 4");
    for (std::size_t i = 0; i + 2 < n; ++i) edge(i, i + 1, 3);
    edge(n - 3, n - 1, 3);
  } else if (type == "E") {
    if (rank < 6 || rank > 8) throw InvalidInput("type E needs rank 6, 7 or 8");
    edge(0, 2, 3);
    edge(1, 3, 3);
    for (std::size_t i = 2; i + 1 < n; ++i) edge(i, i + 1, 3);
  } else if (type == "F") {
    if (rank != 4) throw InvalidInput("type F needs rank 4");
    edge(0, 1, 3);
    edge(1, 2, 4);
    edge(2, 3, 3);
  } else if (type == "G") {
    if (rank != 2) throw InvalidInput("type G needs rank 2");
    edge(0, 1, 6);
  } else {
    throw InvalidInput("unknown Cartan type '" + type + "'");
  }
  return m;
}

// Number of positive roots, i.e. dim G/B.
inline int positive_root_count(const std::string& type, int rank) {
  coxeter_matrix(type, rank);
  if (type == "A") return rank * (rank + 1) / 2;
  if (type == "B" || type == "C") return rank * rank;
  if (type == "D") return rank * (rank - 1);
  if (type == "E") return rank == 6 ? 36 : rank == 7 ? 63 : 120;
  if (type == "F") return 24;
  return 6;  // G2
}

inline CoxeterMatrix block_sum(const CoxeterMatrix& a, const CoxeterMatrix& b) {
  const std::size_t n = a.size() + b.size();
  CoxeterMatrix m(n, std::vector<int>(n, 2));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m[i][j] = a[i][j];
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m[a.size() + i][a.size() + j] = b[i][j];
  return m;
}

struct KLCache {
  std::recursive_mutex mutex;
  std::unordered_map<std::uint64_t, Polynomial> polynomials;
  std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, std::int64_t>>> mu_lists;
};

// A finite Coxeter group with every element enumerated. Realized as the Weyl group of a
// generalized Cartan matrix with a_ij a_ji = 0,1,2,3 for m_ij = 2,3,4,6, acting on weights in
// fundamental-weight coordinates; w is keyed by w^{-1}(rho), whose negative coordinates are
// exactly the right descents of w. Element 0 is the identity and indices follow ShortLex order.
class CoxeterSystem {
 public:
  explicit CoxeterSystem(CoxeterMatrix m, std::string name = "custom", std::optional<int> type_a_rank = std::nullopt)
      : matrix_(std::move(m)), name_(std::move(name)), type_a_rank_(type_a_rank) {
    validate_matrix();
    build();
  }

  static CoxeterSystem of_type(const std::string& type, int rank) {
    return CoxeterSystem(coxeter_matrix(type, rank), type + std::to_string(rank),
                         type == "A" ? std::optional<int>(rank) : std::nullopt);
  }

  std::size_t rank() const { return matrix_.size(); }
  std::size_t size() const { return length_.size(); }
  const CoxeterMatrix& matrix() const { return matrix_; }
  const std::string& name() const { return name_; }
  std::size_t identity() const { return 0; }

  int length(std::size_t w) const { return length_.at(w); }
  std::size_t right_multiply(std::size_t w, int s) const { return rmul_[w * rank() + static_cast<std::size_t>(s)]; }
  std::size_t left_multiply(int s, std::size_t w) const { return lmul_[w * rank() + static_cast<std::size_t>(s)]; }
  bool right_descent(std::size_t w, int s) const { return length(right_multiply(w, s)) < length(w); }
  bool left_descent(std::size_t w, int s) const { return length(left_multiply(s, w)) < length(w); }
  std::size_t inverse(std::size_t w) const { return inverse_[w]; }

  // ShortLex normal form.
  Word word(std::size_t w) const {
    Word out;
    while (w != 0) {
      out.push_back(last_letter_[w]);
      w = parent_[w];
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::size_t element(const Word& word) const {
    std::size_t w = 0;
    for (int s : word) {
      if (s < 0 || static_cast<std::size_t>(s) >= rank()) throw InvalidInput("generator index out of range");
      w = right_multiply(w, s);
    }
    return w;
  }

  std::size_t multiply(std::size_t x, std::size_t y) const {
    for (int s : word(y)) x = right_multiply(x, s);
    return x;
  }

  // "s1 s3 s2"; identity written "e" (empty input also means the identity).
  std::size_t parse(const std::string& text) const {
    std::istringstream in(text);
    std::string token;
    Word w;
    while (in >> token) {
      if (token == "e") continue;
      if (token.size() < 2 || token[0] != 's' ||
          !std::all_of(token.begin() + 1, token.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw InvalidInput("bad generator token '" + token + "'; expected s1..s" + std::to_string(rank()));
      const int k = std::stoi(token.substr(1));
      if (k < 1 || static_cast<std::size_t>(k) > rank())
        throw InvalidInput("generator " + token + " out of range for rank " + std::to_string(rank()));
      w.push_back(k - 1);
    }
    return element(w);
  }

  std::string format(std::size_t w) const {
    const Word wd = word(w);
    if (wd.empty()) return "e";
    std::string out;
    for (int s : wd) out += (out.empty() ? "s" : " s") + std::to_string(s + 1);
    return out;
  }

  std::size_t longest_element() const { return longest_; }

  // Bruhat order via the lifting property: for ws < w, x <= w iff min(x, xs) <= ws.
  bool bruhat_leq(std::size_t x, std::size_t w) const {
    while (true) {
      if (x == w) return true;
      if (length(x) >= length(w)) return false;
      int s = first_right_descent(w);
      if (right_descent(x, s)) x = right_multiply(x, s);
      w = right_multiply(w, s);
    }
  }

  int first_right_descent(std::size_t w) const {
    for (std::size_t s = 0; s < rank(); ++s)
      if (right_descent(w, static_cast<int>(s))) return static_cast<int>(s);
    return -1;
  }

  // Longest element of the parabolic subgroup W_J.
  std::size_t parabolic_longest(const std::set<int>& J) const {
    for (int s : J)
      if (s < 0 || static_cast<std::size_t>(s) >= rank()) throw InvalidInput("parabolic generator out of range");
    std::size_t w = 0;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int s : J)
        if (!right_descent(w, s)) {
          w = right_multiply(w, s);
          grew = true;
        }
    }
    return w;
  }

  // Minimal length in its coset w W_J.
  bool is_minimal_coset_representative(std::size_t w, const std::set<int>& J) const {
    return std::none_of(J.begin(), J.end(), [&](int s) { return right_descent(w, s); });
  }

  bool has_permutation_model() const { return type_a_rank_.has_value(); }

  // One-line notation on {0..n}; s_i swaps positions i and i+1, words act left to right.
  std::vector<int> to_permutation(std::size_t w) const {
    if (!type_a_rank_) throw DomainError("permutation model exists for type A only");
    std::vector<int> p(static_cast<std::size_t>(*type_a_rank_) + 1);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = static_cast<int>(k);
    for (int s : word(w)) std::swap(p[static_cast<std::size_t>(s)], p[static_cast<std::size_t>(s) + 1]);
    return p;
  }

  std::size_t from_permutation(std::vector<int> p) const {
    if (!type_a_rank_) throw DomainError("permutation model exists for type A only");
    if (p.size() != static_cast<std::size_t>(*type_a_rank_) + 1) throw InvalidInput("permutation has the wrong size");
    // Bubble sort records a word for p^{-1}; reversing it gives p.
    Word w;
    for (bool swapped = true; swapped;) {
      swapped = false;
      for (std::size_t k = 0; k + 1 < p.size(); ++k)
        if (p[k] > p[k + 1]) {
          std::swap(p[k], p[k + 1]);
          w.push_back(static_cast<int>(k));
          swapped = true;
        }
    }
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p[k] != static_cast<int>(k)) throw InvalidInput("not a permutation");
    std::reverse(w.begin(), w.end());
    return element(w);
  }

  KLCache& kl_cache() const { return *cache_; }

 private:
  void validate_matrix() {
    const std::size_t n = matrix_.size();
    if (n == 0) throw InvalidInput("Coxeter matrix is empty");
    for (const auto& row : matrix_)
      if (row.size() != n) throw InvalidInput("Coxeter matrix is not square");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const int m = matrix_[i][j];
        if (m != matrix_[j][i]) throw InvalidInput("Coxeter matrix is not symmetric");
        if (i == j && m != 1) throw InvalidInput("Coxeter matrix needs m(s,s) = 1");
        if (i != j && m != 2 && m != 3 && m != 4 && m != 6)
          throw DomainError("edge order " + std::to_string(m) + " unsupported; orders must lie in {2,3,4,6}");
      }
  }

  void build() {
    const std::size_t n = rank();
    // a_ij for i < j is -1 (or 0); a_ji carries the product.
    std::vector<std::vector<std::int64_t>> cartan(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      cartan[i][i] = 2;
      for (std::size_t j = i + 1; j < n; ++j) {
        const int m = matrix_[i][j];
        const std::int64_t prod = m == 2 ? 0 : m == 3 ? 1 : m == 4 ? 2 : 3;
        cartan[i][j] = prod == 0 ? 0 : -1;
        cartan[j][i] = -prod;
      }
    }
    // s_i(lambda)_k = lambda_k - lambda_i a_{ki}.
    auto reflect = [&](const std::vector<std::int64_t>& v, std::size_t i) {
      std::vector<std::int64_t> out = v;
      for (std::size_t k = 0; k < n; ++k) out[k] -= v[i] * cartan[k][i];
      return out;
    };
    std::map<std::vector<std::int64_t>, std::size_t> index;
    std::vector<std::vector<std::int64_t>> keys;
    keys.emplace_back(n, 1);
    index[keys[0]] = 0;
    length_.push_back(0);
    parent_.push_back(0);
    last_letter_.push_back(-1);
    for (std::size_t head = 0; head < keys.size(); ++head) {
      for (std::size_t i = 0; i < n; ++i) {
        auto next = reflect(keys[head], i);
        auto [it, inserted] = index.emplace(next, keys.size());
        if (inserted) {
          if (keys.size() >= kMaxCoxeterGroupSize)
            throw DomainError("Coxeter group " + name_ + " has more than " + std::to_string(kMaxCoxeterGroupSize) +
                              " elements");
          keys.push_back(std::move(next));
          length_.push_back(length_[head] + 1);
          parent_.push_back(head);
          last_letter_.push_back(static_cast<int>(i));
        }
      }
    }
    const std::size_t N = keys.size();
    rmul_.assign(N * n, 0);
    for (std::size_t w = 0; w < N; ++w)
      for (std::size_t i = 0; i < n; ++i) rmul_[w * n + i] = index.at(reflect(keys[w], i));
    inverse_.assign(N, 0);
    for (std::size_t w = 0; w < N; ++w) {
      Word wd = word(w);
      std::reverse(wd.begin(), wd.end());
      inverse_[w] = element(wd);
    }
    lmul_.assign(N * n, 0);
    for (std::size_t w = 0; w < N; ++w)
      for (std::size_t i = 0; i < n; ++i) lmul_[w * n + i] = inverse_[rmul_[inverse_[w] * n + i]];
    longest_ = static_cast<std::size_t>(std::max_element(length_.begin(), length_.end()) - length_.begin());
  }

  CoxeterMatrix matrix_;
  std::string name_;
  std::optional<int> type_a_rank_;
  std::vector<int> length_;
  std::vector<std::size_t> parent_;
  std::vector<int> last_letter_;
  std::vector<std::size_t> rmul_, lmul_, inverse_;
  std::size_t longest_ = 0;
  std::shared_ptr<KLCache> cache_ = std::make_shared<KLCache>();
};

// W_a x W_b with generators of b renumbered after those of a.
inline CoxeterSystem product_system(const CoxeterSystem& a, const CoxeterSystem& b) {
  return CoxeterSystem(block_sum(a.matrix(), b.matrix()), a.name() + "x" + b.name());
}

// The element (x, y) of a product system.
inline std::size_t product_element(const CoxeterSystem& prod, const CoxeterSystem& a, std::size_t x,
                                   const CoxeterSystem& b, std::size_t y) {
  Word w = a.word(x);
  for (int s : b.word(y)) w.push_back(s + static_cast<int>(a.rank()));
  return prod.element(w);
}

}  // namespace formalis
