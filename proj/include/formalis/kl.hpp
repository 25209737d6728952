#pragma once

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "formalis/coxeter.hpp"
#include "formalis/error.hpp"
#include "formalis/number_theory.hpp"
#include "formalis/polynomial.hpp"

namespace formalis {

inline Polynomial kl_polynomial(const CoxeterSystem& sys, std::size_t x, std::size_t w);

namespace detail {

inline std::uint64_t kl_key(const CoxeterSystem& sys, std::size_t x, std::size_t w) {
  return static_cast<std::uint64_t>(x) * sys.size() + w;
}

inline std::int64_t mu_from(const CoxeterSystem& sys, std::size_t z, std::size_t v, const Polynomial& p) {
  const int gap = sys.length(v) - sys.length(z);
  if (gap <= 0 || gap % 2 == 0) return 0;
  return p.coefficient(static_cast<std::size_t>((gap - 1) / 2));
}

// Elements z < v with mu(z, v) != 0.
inline const std::vector<std::pair<std::size_t, std::int64_t>>& mu_list(const CoxeterSystem& sys, std::size_t v) {
  auto& cache = sys.kl_cache();
  std::lock_guard lock(cache.mutex);
  if (auto it = cache.mu_lists.find(v); it != cache.mu_lists.end()) return it->second;
  std::vector<std::pair<std::size_t, std::int64_t>> out;
  for (std::size_t z = 0; z < sys.size(); ++z) {
    if (sys.length(z) >= sys.length(v) || (sys.length(v) - sys.length(z)) % 2 == 0) continue;
    if (!sys.bruhat_leq(z, v)) continue;
    const std::int64_t m = mu_from(sys, z, v, kl_polynomial(sys, z, v));
    if (m != 0) out.push_back({z, m});
  }
  return cache.mu_lists.emplace(v, std::move(out)).first->second;
}

}  // namespace detail

inline bool bruhat_leq(const CoxeterSystem& sys, std::size_t x, std::size_t w) { return sys.bruhat_leq(x, w); }

// P_{x,w} by the right-descent recursion: for ws < w, v = ws, c = [xs < x],
//   P_{x,w} = q^{1-c} P_{xs,v} + q^c P_{x,v} - sum_{z<v, zs<z} mu(z,v) q^{(l(w)-l(z))/2} P_{x,z}.
inline Polynomial kl_polynomial(const CoxeterSystem& sys, std::size_t x, std::size_t w) {
  if (x >= sys.size() || w >= sys.size()) throw InvalidInput("element index out of range");
  if (x == w) return Polynomial::constant(1);
  if (!sys.bruhat_leq(x, w)) return {};
  auto& cache = sys.kl_cache();
  std::lock_guard lock(cache.mutex);
  const auto key = detail::kl_key(sys, x, w);
  if (auto it = cache.polynomials.find(key); it != cache.polynomials.end()) return it->second;

  const int s = sys.first_right_descent(w);
  const std::size_t v = sys.right_multiply(w, s);
  const std::size_t xs = sys.right_multiply(x, s);
  const bool c = sys.length(xs) < sys.length(x);
  Polynomial p = kl_polynomial(sys, xs, v).shifted(c ? 0 : 1) + kl_polynomial(sys, x, v).shifted(c ? 1 : 0);
  for (const auto& [z, m] : detail::mu_list(sys, v)) {
    if (!sys.right_descent(z, s) || !sys.bruhat_leq(x, z)) continue;
    const int e = (sys.length(w) - sys.length(z)) / 2;
    p -= (m * kl_polynomial(sys, x, z)).shifted(static_cast<std::size_t>(e));
  }
  cache.polynomials.emplace(key, p);
  return p;
}

inline std::int64_t mu(const CoxeterSystem& sys, std::size_t x, std::size_t w) {
  if (!sys.bruhat_leq(x, w) || x == w) return 0;
  return detail::mu_from(sys, x, w, kl_polynomial(sys, x, w));
}

// Graded multiplicity of IC_mu in Delta_lambda, taken to be P_{lambda,mu}.
inline Polynomial graded_multiplicity(const CoxeterSystem& sys, std::size_t lambda, std::size_t mu_) {
  return kl_polynomial(sys, lambda, mu_);
}

struct StalkEntry {
  int degree = 0;
  std::int64_t rank = 0;
  int weight_exponent = 0;
  friend bool operator==(const StalkEntry&, const StalkEntry&) = default;
};

// Stalk of IC(X_lambda)[d_lambda] along the stratum of mu on G/P.
struct StalkTable {
  std::size_t lambda = 0;
  std::size_t mu = 0;
  int d_lambda = 0;
  Polynomial polynomial;
  std::vector<StalkEntry> entries;

  // All degrees share one parity.
  bool even() const {
    for (const auto& e : entries)
      if (((e.degree - entries.front().degree) % 2 + 2) % 2 != 0) return false;
    return true;
  }
  // Weight exponent (degree + d_lambda) / 2 throughout.
  bool tate() const {
    for (const auto& e : entries)
      if (2 * e.weight_exponent != e.degree + d_lambda) return false;
    return true;
  }
};

// lambda, mu minimal in their cosets modulo W_J; the stalk is P_{mu w_J, lambda w_J}.
inline StalkTable parabolic_stalk_table(const CoxeterSystem& sys, const std::set<int>& J, std::size_t lambda,
                                        std::size_t mu_) {
  if (!sys.is_minimal_coset_representative(lambda, J))
    throw DomainError(sys.format(lambda) + " is not a minimal coset representative");
  if (!sys.is_minimal_coset_representative(mu_, J))
    throw DomainError(sys.format(mu_) + " is not a minimal coset representative");
  const std::size_t wj = sys.parabolic_longest(J);
  StalkTable t;
  t.lambda = lambda;
  t.mu = mu_;
  t.d_lambda = sys.length(lambda);
  t.polynomial = kl_polynomial(sys, sys.multiply(mu_, wj), sys.multiply(lambda, wj));
  for (std::size_t k = 0; k < t.polynomial.coefficients().size(); ++k) {
    const std::int64_t r = t.polynomial.coefficient(k);
    if (r == 0) continue;
    t.entries.push_back({-t.d_lambda + 2 * static_cast<int>(k), r, static_cast<int>(k)});
  }
  return t;
}

inline std::vector<std::size_t> minimal_coset_representatives(const CoxeterSystem& sys, const std::set<int>& J) {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < sys.size(); ++w)
    if (sys.is_minimal_coset_representative(w, J)) out.push_back(w);
  return out;
}

// Curated modular parity for one family: IC^O-parity holds for every prime outside the
// excluded set, or is unknown.
struct ParityRecord {
  std::string cartan_type;
  int rank = 0;
  std::vector<std::uint64_t> excluded_primes;
  bool known = true;
  std::string source = "curated-table";
};

enum class Tristate { yes, no, unknown };

inline std::string to_string(Tristate t) {
  return t == Tristate::yes ? "yes" : t == Tristate::no ? "no" : "unknown";
}

struct ParityVerdict {
  Tristate parity = Tristate::unknown;
  bool combinatorially_even = false;
  std::string reason;
  std::string source;
};

inline ParityVerdict bgs_parity_verdict(const std::vector<StalkTable>& tables, std::uint64_t l,
                                        const std::optional<ParityRecord>& curated) {
  require_prime(l);
  ParityVerdict v;
  v.combinatorially_even = true;
  for (const auto& t : tables)
    if (!t.even() || !t.tate()) v.combinatorially_even = false;
  if (!v.combinatorially_even) {
    v.parity = Tristate::no;
    v.reason = "stalk table mixes parities";
    return v;
  }
  if (!curated || !curated->known) {
    v.parity = Tristate::unknown;
    v.reason = "combinatorial evenness only; modular parity unknown";
    if (curated) v.source = curated->source;
    return v;
  }
  v.source = curated->source;
  const auto& ex = curated->excluded_primes;
  if (std::find(ex.begin(), ex.end(), l) != ex.end()) {
    v.parity = Tristate::no;
    v.reason = "IC^O-parity fails for l = " + std::to_string(l);
  } else {
    v.parity = Tristate::yes;
    v.reason = ex.empty() ? "IC^O-parity holds for every l" : "IC^O-parity holds for l outside the excluded primes";
  }
  return v;
}

inline ParityVerdict bgs_parity_verdict(const StalkTable& table, std::uint64_t l, const std::optional<ParityRecord>& curated) {
  return bgs_parity_verdict(std::vector<StalkTable>{table}, l, curated);
}

}  // namespace formalis
