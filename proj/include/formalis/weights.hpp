#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "formalis/error.hpp"
#include "formalis/number_theory.hpp"

namespace formalis {

// Finite set of exponents e standing for q^e.
struct WeightSet {
  std::set<int> exponents;

  static WeightSet interval(int lo, int hi) {
    WeightSet w;
    for (int e = lo; e <= hi; ++e) w.exponents.insert(e);
    return w;
  }
  static WeightSet point() { return interval(0, 0); }

  bool empty() const { return exponents.empty(); }
  int max() const {
    if (exponents.empty()) throw DomainError("empty weight set has no greatest exponent");
    return *exponents.rbegin();
  }
  bool is_interval_from_zero() const { return !empty() && *exponents.begin() == 0 && static_cast<int>(exponents.size()) == max() + 1; }
  std::vector<int> list() const { return {exponents.begin(), exponents.end()}; }

  friend bool operator==(const WeightSet&, const WeightSet&) = default;
};

// Sumset {e + f}.
inline WeightSet wt_product(const WeightSet& a, const WeightSet& b) {
  WeightSet out;
  for (int e : a.exponents)
    for (int f : b.exponents) out.exponents.insert(e + f);
  return out;
}

// Greatest exponent plus one.
inline int wr(const WeightSet& w) { return w.max() + 1; }

inline std::uint64_t reduce_mod(long long q, std::uint64_t l) {
  long long r = q % static_cast<long long>(l);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<long long>(l) : r);
}

// e -> q^e mod l is injective on the exponents: no two are congruent modulo ord_l(q).
inline bool separated(const WeightSet& w, long long q, std::uint64_t l) {
  require_prime(l);
  const std::uint64_t qr = reduce_mod(q, l);
  if (qr == 0) throw DomainError("l = " + std::to_string(l) + " divides q = " + std::to_string(q));
  const std::uint64_t order = multiplicative_order(qr, l);
  std::set<std::uint64_t> classes;
  for (int e : w.exponents) {
    const std::uint64_t c = static_cast<std::uint64_t>(((e % static_cast<long long>(order)) + order) % order);
    if (!classes.insert(c).second) return false;
  }
  return true;
}

struct AdmissibleQ {
  std::optional<long long> q;   // smallest admissible prime q <= bound
  bool l_exceeds_wr = false;    // l > wr(wt)
};

inline AdmissibleQ admissible_q(const WeightSet& w, std::uint64_t l, long long search_bound) {
  require_prime(l);
  AdmissibleQ out;
  out.l_exceeds_wr = static_cast<long long>(l) > wr(w);
  for (long long q = 2; q <= search_bound; ++q) {
    if (!is_prime(static_cast<std::uint64_t>(q)) || q % static_cast<long long>(l) == 0) continue;
    if (separated(w, q, l)) {
      out.q = q;
      break;
    }
  }
  return out;
}

}  // namespace formalis
