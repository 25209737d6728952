#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "formalis/bigraded.hpp"
#include "formalis/dgg_algebra.hpp"
#include "formalis/error.hpp"
#include "formalis/linalg.hpp"
#include "formalis/number_theory.hpp"

namespace formalis {

// Derived tensor products over an internally connected algebra B, computed with the
// normalized two-sided bar construction
//   M (x) (sB')^{(x)p} (x) N,   B' = B / k.1,   |sb| = |b| - 1.
// Internal degree is preserved by the differential, and every bar letter has internal
// degree >= delta >= 1, so internal degree i only sees p <= (i - min M - min N) / delta.

struct DerivedTensorOptions {
  std::size_t length_bound = 12;        // longest bar word
  std::optional<int> internal_limit;    // highest internal degree computed
  std::size_t max_basis = 200000;
};

struct DerivedTensorResult {
  BigradedModule complex;         // the bar complex through internal degree exact_through
  BasisLabels labels;
  CohomologyTable cohomology;     // exact for internal degrees <= exact_through
  int exact_through = 0;
  std::size_t bar_length = 0;     // longest bar word that occurs
  bool complete = false;          // true when nothing was cut off
  // Bar words per bidegree, in basis order: flat index in M, complement letters of B, flat index in N.
  std::map<Bidegree, std::vector<std::vector<std::uint32_t>>> words;
};

namespace detail {

using Sparse = std::map<std::size_t, std::uint64_t>;

struct FlatBasis {
  std::vector<BasisElement> elements;
  std::map<BasisElement, std::size_t> index;
  std::map<Bidegree, std::size_t> offset;

  explicit FlatBasis(const BigradedModule& m) {
    for (const auto& [b, n] : m.components()) {
      offset[b] = elements.size();
      for (std::size_t k = 0; k < n; ++k) {
        index[{b, k}] = elements.size();
        elements.push_back({b, k});
      }
    }
  }

  Sparse flatten(const Element& x, std::uint64_t l) const {
    Sparse out;
    for (const auto& [b, v] : x) {
      const std::size_t base = offset.at(b);
      for (std::size_t k = 0; k < v.size(); ++k) {
        Integer r = v[k] % Integer(l);
        if (r < 0) r += l;
        if (r != 0) out[base + k] = static_cast<std::uint64_t>(r);
      }
    }
    return out;
  }
};

inline std::uint64_t signed_mod(long long s, std::uint64_t c, std::uint64_t l) {
  return s > 0 ? c % l : (l - c % l) % l;
}

// Quotient B -> B / k.1 with the complement spanned by every basis vector except one pivot
// where the unit has a nonzero coefficient.
struct AugmentationQuotient {
  std::uint64_t l = 2;
  FlatBasis basis;
  std::size_t pivot = 0;
  Sparse unit;
  std::uint64_t unit_pivot_inverse = 1;
  std::vector<std::size_t> letters;             // flat indices in B of the complement basis
  std::map<std::size_t, std::size_t> letter_of;  // flat index -> letter index

  AugmentationQuotient(const DggAlgebra& b, std::uint64_t prime) : l(prime), basis(b.module()) {
    unit = basis.flatten(b.unit(), l);
    if (unit.empty()) throw InvalidInput("algebra has zero unit");
    pivot = unit.begin()->first;
    unit_pivot_inverse = inverse_mod(unit.begin()->second, l);
    for (std::size_t k = 0; k < basis.elements.size(); ++k) {
      if (k == pivot) continue;
      letter_of[k] = letters.size();
      letters.push_back(k);
    }
  }

  // Coordinates in the complement after removing the unit component.
  Sparse project(const Sparse& x) const {
    std::uint64_t c = 0;
    if (auto it = x.find(pivot); it != x.end()) c = mulmod(it->second, unit_pivot_inverse, l);
    Sparse out;
    for (const auto& [k, v] : x) {
      if (k == pivot) continue;
      std::uint64_t value = v;
      if (auto u = unit.find(k); u != unit.end()) value = (value + l - mulmod(c, u->second, l)) % l;
      if (value != 0) out[letter_of.at(k)] = value;
    }
    return out;
  }
};

inline void accumulate(std::map<std::vector<std::uint32_t>, std::uint64_t>& acc, std::vector<std::uint32_t> key,
                       std::uint64_t value, std::uint64_t l) {
  if (value == 0) return;
  auto& slot = acc[std::move(key)];
  slot = (slot + value) % l;
}

inline std::pair<int, int> internal_range(const BigradedModule& m) {
  int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
  for (const auto& [b, n] : m.components()) {
    lo = std::min(lo, b.internal);
    hi = std::max(hi, b.internal);
  }
  return {lo, hi};
}

}  // namespace detail

// Internal degree 0 of B is k.1 and everything else sits in positive internal degree.
// Returns the least positive internal degree of B / k.1 (nullopt when B = k).
inline std::optional<int> connectivity_gap(const DggAlgebra& b) {
  std::size_t degree_zero = 0;
  std::optional<int> delta;
  for (const auto& [d, n] : b.module().components()) {
    if (d.internal < 0)
      throw ResolutionNotFound("algebra has negative internal degree " + to_string(d) +
                               "; bar resolution needs internal connectivity");
    if (d.internal == 0)
      degree_zero += n;
    else
      delta = delta ? std::min(*delta, d.internal) : d.internal;
  }
  if (degree_zero != 1)
    throw ResolutionNotFound("internal degree 0 part of the algebra has dimension " + std::to_string(degree_zero) +
                             "; bar resolution needs it to be the scalars");
  return delta;
}

// H(M (x)^L_B N) for an A-B bimodule M and a B-C bimodule N over F_l.
inline DerivedTensorResult derived_tensor(const DggBimodule& m, const DggBimodule& n,
                                          const DerivedTensorOptions& options = {}) {
  const Coefficients& coeff = m.coefficients();
  if (!coeff.is_field()) throw DomainError("derived tensor products are computed over a field only");
  if (!(n.coefficients() == coeff)) throw InvalidInput("bimodules use different coefficients");
  if (!(m.right() == n.left())) throw InvalidInput("right algebra of the first bimodule differs from left algebra of the second");
  m.module().validate();
  n.module().validate();
  const DggAlgebra& B = m.right();
  B.module().validate();
  const std::uint64_t l = *coeff.prime;

  DerivedTensorResult result;
  result.complex = BigradedModule(coeff);
  if (m.module().empty() || n.module().empty()) {
    result.complete = true;
    return result;
  }

  const std::optional<int> delta = connectivity_gap(B);
  const auto [minM, maxM] = detail::internal_range(m.module());
  const auto [minN, maxN] = detail::internal_range(n.module());
  const auto [minB, maxB] = detail::internal_range(B.module());
  (void)minB;

  int limit = options.internal_limit.value_or(maxM + maxN + maxB);
  if (!delta) {
    limit = std::min(limit, maxM + maxN);
    result.complete = limit >= maxM + maxN;
  } else {
    const long long exact = static_cast<long long>(options.length_bound + 1) * *delta + minM + minN - 1;
    limit = static_cast<int>(std::min<long long>(limit, exact));
  }
  result.exact_through = limit;

  const detail::FlatBasis Mb(m.module()), Nb(n.module());
  const detail::AugmentationQuotient Q(B, l);
  auto letter_degree = [&](std::size_t j) { return Q.basis.elements[Q.letters[j]].degree; };
  auto letter_element = [&](std::size_t j) { return basis_element(B.module(), Q.basis.elements[Q.letters[j]]); };

  // Structure maps in flat coordinates.
  std::vector<detail::Sparse> dM(Mb.elements.size()), dN(Nb.elements.size()), dL(Q.letters.size());
  for (std::size_t i = 0; i < Mb.elements.size(); ++i)
    dM[i] = Mb.flatten(m.d(m.element(Mb.elements[i])), l);
  for (std::size_t i = 0; i < Nb.elements.size(); ++i)
    dN[i] = Nb.flatten(n.d(n.element(Nb.elements[i])), l);
  for (std::size_t j = 0; j < Q.letters.size(); ++j)
    dL[j] = Q.project(Q.basis.flatten(B.d(letter_element(j)), l));
  std::map<std::pair<std::size_t, std::size_t>, detail::Sparse> mb, bb, bn;
  auto act_mb = [&](std::size_t i, std::size_t j) -> const detail::Sparse& {
    auto it = mb.find({i, j});
    if (it == mb.end())
      it = mb.emplace(std::pair{i, j}, Mb.flatten(m.act_right(m.element(Mb.elements[i]), letter_element(j)), l)).first;
    return it->second;
  };
  auto mul_bb = [&](std::size_t i, std::size_t j) -> const detail::Sparse& {
    auto it = bb.find({i, j});
    if (it == bb.end())
      it = bb.emplace(std::pair{i, j}, Q.project(Q.basis.flatten(B.multiply(letter_element(i), letter_element(j)), l)))
               .first;
    return it->second;
  };
  auto act_bn = [&](std::size_t j, std::size_t k) -> const detail::Sparse& {
    auto it = bn.find({j, k});
    if (it == bn.end())
      it = bn.emplace(std::pair{j, k}, Nb.flatten(n.act_left(letter_element(j), n.element(Nb.elements[k])), l)).first;
    return it->second;
  };

  // Enumerate words m|b1|...|bp|n through the internal limit.
  using Key = std::vector<std::uint32_t>;
  std::map<Key, std::pair<Bidegree, std::size_t>> position;
  std::map<Bidegree, std::vector<Key>> words;
  auto add_word = [&](const Key& key, Bidegree deg) {
    auto& list = words[deg];
    position.emplace(key, std::pair{deg, list.size()});
    list.push_back(key);
    if (position.size() > options.max_basis)
      throw ResolutionNotFound("bar construction exceeds " + std::to_string(options.max_basis) +
                               " basis vectors; lower the internal limit");
    result.bar_length = std::max(result.bar_length, key.size() - 2);
  };
  Key prefix;
  std::vector<Bidegree> prefix_degree;
  auto extend = [&](auto&& self, Bidegree deg) -> void {
    if (deg.internal + minN > limit) return;
    for (std::size_t k = 0; k < Nb.elements.size(); ++k) {
      Bidegree total = deg + Nb.elements[k].degree;
      if (total.internal > limit) continue;
      Key key = prefix;
      key.push_back(static_cast<std::uint32_t>(k));
      add_word(key, total);
    }
    if (prefix.size() - 1 >= options.length_bound) return;
    for (std::size_t j = 0; j < Q.letters.size(); ++j) {
      Bidegree b = letter_degree(j);
      Bidegree next{deg.internal + b.internal, deg.cohom + b.cohom - 1};
      if (next.internal + minN > limit) continue;
      prefix.push_back(static_cast<std::uint32_t>(j));
      self(self, next);
      prefix.pop_back();
    }
  };
  for (std::size_t i = 0; i < Mb.elements.size(); ++i) {
    prefix = {static_cast<std::uint32_t>(i)};
    extend(extend, Mb.elements[i].degree);
  }

  // Differential of one word.
  auto differential = [&](const Key& w) {
    std::map<Key, std::uint64_t> out;
    const std::size_t p = w.size() - 2;
    const int cm = Mb.elements[w[0]].degree.cohom;
    std::vector<int> eps(p + 2);  // Koszul degree before slot k (slot 0 = m, slot p+1 = n)
    eps[1] = cm;
    for (std::size_t k = 1; k <= p; ++k) eps[k + 1] = eps[k] + letter_degree(w[k]).cohom - 1;
    auto sgn = [](int e) { return (e % 2 == 0) ? 1LL : -1LL; };

    for (const auto& [i, c] : dM[w[0]]) {
      Key v = w;
      v[0] = static_cast<std::uint32_t>(i);
      detail::accumulate(out, std::move(v), c, l);
    }
    for (std::size_t k = 1; k <= p; ++k)
      for (const auto& [j, c] : dL[w[k]]) {
        Key v = w;
        v[k] = static_cast<std::uint32_t>(j);
        detail::accumulate(out, std::move(v), detail::signed_mod(-sgn(eps[k]), c, l), l);
      }
    for (const auto& [i, c] : dN[w[p + 1]]) {
      Key v = w;
      v[p + 1] = static_cast<std::uint32_t>(i);
      detail::accumulate(out, std::move(v), detail::signed_mod(sgn(eps[p + 1]), c, l), l);
    }
    if (p == 0) return out;
    // m.b1
    for (const auto& [i, c] : act_mb(w[0], w[1])) {
      Key v{static_cast<std::uint32_t>(i)};
      v.insert(v.end(), w.begin() + 2, w.end());
      detail::accumulate(out, std::move(v), detail::signed_mod(sgn(cm), c, l), l);
    }
    // b_k.b_{k+1}
    for (std::size_t k = 1; k < p; ++k)
      for (const auto& [j, c] : mul_bb(w[k], w[k + 1])) {
        Key v(w.begin(), w.begin() + k);
        v.push_back(static_cast<std::uint32_t>(j));
        v.insert(v.end(), w.begin() + k + 2, w.end());
        const int e = eps[k] + letter_degree(w[k]).cohom - 1;
        detail::accumulate(out, std::move(v), detail::signed_mod(sgn(e), c, l), l);
      }
    // b_p.n, with the sign making the left action square to zero against b_k.b_{k+1}
    for (const auto& [i, c] : act_bn(w[p], w[p + 1])) {
      Key v(w.begin(), w.begin() + p);
      v.push_back(static_cast<std::uint32_t>(i));
      detail::accumulate(out, std::move(v), detail::signed_mod(-sgn(eps[p]), c, l), l);
    }
    return out;
  };

  for (const auto& [deg, list] : words) result.complex.set_rank(deg, list.size());
  std::map<Bidegree, IntMatrix> matrices;
  for (const auto& [deg, list] : words) {
    const Bidegree up = deg.next();
    const std::size_t rows = result.complex.rank(up);
    if (rows == 0) continue;
    IntMatrix d(rows, list.size());
    for (std::size_t c = 0; c < list.size(); ++c)
      for (const auto& [key, value] : differential(list[c])) {
        auto it = position.find(key);
        if (it == position.end()) continue;  // beyond the internal limit
        d(it->second.second, c) = value;
      }
    result.complex.set_differential(deg, std::move(d));
  }

  for (const auto& [deg, list] : words)
    for (const Key& key : list) {
      std::string name = m.label(Mb.elements[key[0]]);
      for (std::size_t k = 1; k + 1 < key.size(); ++k) name += "|" + B.label(Q.basis.elements[Q.letters[key[k]]]);
      name += "|" + n.label(Nb.elements[key.back()]);
      result.labels[deg].push_back(std::move(name));
    }
  result.cohomology = cohomology(result.complex);
  result.words = std::move(words);
  return result;
}

// The bar complex through its exact range as an A-C bimodule: A acts on the M slot, C on the
// N slot. Words above the internal limit form a sub-bimodule when A and C sit in internal
// degrees >= 0, so the result is the quotient by it.
inline DggBimodule derived_tensor_bimodule(const DggBimodule& m, const DggBimodule& n,
                                           const DerivedTensorOptions& options = {}) {
  for (const DggAlgebra* a : {&m.left(), &n.right()})
    for (const auto& [b, r] : a->module().components())
      if (b.internal < 0) throw DomainError("outer algebras need internal degrees >= 0");
  DerivedTensorResult r = derived_tensor(m, n, options);
  const Coefficients& coeff = m.coefficients();
  const std::uint64_t l = *coeff.prime;
  const detail::FlatBasis Mb(m.module()), Nb(n.module());

  using Key = std::vector<std::uint32_t>;
  std::map<Key, BasisElement> position;
  for (const auto& [deg, list] : r.words)
    for (std::size_t k = 0; k < list.size(); ++k) position.emplace(list[k], BasisElement{deg, k});

  auto element_of = [&](const std::map<Key, std::uint64_t>& acc) {
    Element out;
    for (const auto& [key, c] : acc) {
      auto it = position.find(key);
      if (it == position.end()) continue;
      auto& v = out[it->second.degree];
      if (v.empty()) v.assign(r.complex.rank(it->second.degree), Integer(0));
      v[it->second.index] = c;
    }
    return normalized(std::move(out), coeff);
  };

  StructureConstants left, right;
  const auto& A = m.left();
  const auto& C = n.right();
  for (BasisElement a : A.basis())
    for (const auto& [deg, list] : r.words)
      for (std::size_t k = 0; k < list.size(); ++k) {
        const Key& w = list[k];
        std::map<Key, std::uint64_t> acc;
        for (const auto& [i, c] : Mb.flatten(m.act_left(A.element(a), m.element(Mb.elements[w[0]])), l)) {
          Key v = w;
          v[0] = static_cast<std::uint32_t>(i);
          detail::accumulate(acc, std::move(v), c, l);
        }
        Element x = element_of(acc);
        if (!x.empty()) left[{a, BasisElement{deg, k}}] = std::move(x);
      }
  for (BasisElement c : C.basis())
    for (const auto& [deg, list] : r.words)
      for (std::size_t k = 0; k < list.size(); ++k) {
        const Key& w = list[k];
        std::map<Key, std::uint64_t> acc;
        for (const auto& [i, v] : Nb.flatten(n.act_right(n.element(Nb.elements[w.back()]), C.element(c)), l)) {
          Key u = w;
          u.back() = static_cast<std::uint32_t>(i);
          detail::accumulate(acc, std::move(u), v, l);
        }
        Element x = element_of(acc);
        if (!x.empty()) right[{BasisElement{deg, k}, c}] = std::move(x);
      }
  return DggBimodule(A, C, r.complex, r.labels, std::move(left), std::move(right));
}

// Outcome of the bounded projective-resolution test for membership in the thick closure of A.
enum class Membership { member, inconclusive };

struct GeneratorCheck {
  Membership status = Membership::inconclusive;
  std::size_t steps = 0;                         // resolution terms built
  std::vector<std::size_t> generators;           // generators per term
  std::string detail;
};

// Minimal free resolution of a left module M over a connected algebra A with zero differentials,
// built term by term. Terminating within the bound gives a finite resolution by finitely
// generated frees, hence M lies in the thick closure of A. M is given as an A-k bimodule.
inline GeneratorCheck generator_check(const DggBimodule& m, std::size_t length_bound = 12) {
  const Coefficients& coeff = m.coefficients();
  if (!coeff.is_field()) throw DomainError("generator_check works over a field only");
  const DggAlgebra& A = m.left();
  if (!A.module().differentials().empty() || !m.module().differentials().empty())
    throw InvalidInput("generator_check needs zero differentials on the algebra and the module");
  const std::uint64_t l = *coeff.prime;
  connectivity_gap(A);
  const detail::AugmentationQuotient Q(A, l);

  const detail::FlatBasis Ab(A.module());
  const std::size_t dimA = Ab.elements.size();

  // A vector space presented inside an ambient space with an action: vectors are dense over
  // the ambient basis, grouped by bidegree.
  using Dense = std::vector<std::uint64_t>;
  struct Sub {
    std::map<Bidegree, std::vector<Dense>> vectors;
  };

  auto reduce_against = [&](std::vector<Dense>& echelon, std::vector<std::size_t>& pivots, Dense v) -> bool {
    for (std::size_t r = 0; r < echelon.size(); ++r) {
      const std::uint64_t c = v[pivots[r]];
      if (c == 0) continue;
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = (v[k] + l - mulmod(c, echelon[r][k], l)) % l;
    }
    auto it = std::find_if(v.begin(), v.end(), [](std::uint64_t x) { return x != 0; });
    if (it == v.end()) return false;
    const std::size_t pivot = static_cast<std::size_t>(it - v.begin());
    const std::uint64_t inv = inverse_mod(*it, l);
    for (auto& x : v) x = mulmod(x, inv, l);
    for (auto& row : echelon) {
      const std::uint64_t c = row[pivot];
      if (c == 0) continue;
      for (std::size_t k = 0; k < v.size(); ++k) row[k] = (row[k] + l - mulmod(c, v[k], l)) % l;
    }
    echelon.push_back(std::move(v));
    pivots.push_back(pivot);
    return true;
  };

  // Step 0: the ambient is M itself.
  const detail::FlatBasis Mb(m.module());
  std::map<Bidegree, std::vector<std::size_t>> ambient_index;  // bidegree -> flat ambient indices
  std::size_t ambient_dim = Mb.elements.size();
  for (std::size_t k = 0; k < Mb.elements.size(); ++k) ambient_index[Mb.elements[k].degree].push_back(k);

  // Action of basis element a of A on an ambient vector, currently M.
  std::function<Dense(std::size_t, const Dense&)> act = [&](std::size_t a, const Dense& v) {
    Dense out(ambient_dim, 0);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k] == 0) continue;
      for (const auto& [i, c] : Mb.flatten(m.act_left(A.element(Ab.elements[a]), m.element(Mb.elements[k])), l))
        out[i] = (out[i] + mulmod(c, v[k], l)) % l;
    }
    return out;
  };
  Sub current;
  for (const auto& [deg, idx] : ambient_index)
    for (std::size_t k : idx) {
      Dense v(ambient_dim, 0);
      v[k] = 1;
      current.vectors[deg].push_back(std::move(v));
    }

  GeneratorCheck out;
  std::vector<std::size_t> augmentation_letters;
  for (std::size_t j = 0; j < Q.letters.size(); ++j) augmentation_letters.push_back(Q.letters[j]);

  for (std::size_t step = 0; step <= length_bound; ++step) {
    bool empty = true;
    for (const auto& [deg, vs] : current.vectors)
      if (!vs.empty()) empty = false;
    if (empty) {
      out.status = Membership::member;
      out.steps = step;
      out.detail = "finite free resolution of length " + std::to_string(step == 0 ? 0 : step - 1);
      return out;
    }
    if (step == length_bound) break;

    // Minimal generators: complement of A'.X inside X, bidegree by bidegree.
    std::vector<std::pair<Bidegree, Dense>> generators;
    for (const auto& [deg, vs] : current.vectors) {
      std::vector<Dense> echelon;
      std::vector<std::size_t> pivots;
      for (std::size_t a : augmentation_letters) {
        const Bidegree da = Ab.elements[a].degree;
        Bidegree src{deg.internal - da.internal, deg.cohom - da.cohom};
        auto it = current.vectors.find(src);
        if (it == current.vectors.end()) continue;
        for (const auto& x : it->second) reduce_against(echelon, pivots, act(a, x));
      }
      for (const auto& x : vs)
        if (reduce_against(echelon, pivots, x)) generators.push_back({deg, x});
    }
    out.generators.push_back(generators.size());

    // Free module on the generators and the map to the ambient.
    const std::size_t free_dim = generators.size() * dimA;
    std::map<Bidegree, std::vector<std::size_t>> free_index;
    for (std::size_t g = 0; g < generators.size(); ++g)
      for (std::size_t a = 0; a < dimA; ++a) free_index[generators[g].first + Ab.elements[a].degree].push_back(g * dimA + a);
    Sub kernel;
    for (const auto& [deg, idx] : free_index) {
      std::vector<IntVector> columns;
      for (std::size_t f : idx) {
        Dense image = act(f % dimA, generators[f / dimA].second);
        columns.emplace_back(image.begin(), image.end());
      }
      IntMatrix phi = IntMatrix::from_columns(columns, ambient_dim);
      for (const auto& v : kernel_basis(phi, coeff)) {
        Dense dense(free_dim, 0);
        for (std::size_t k = 0; k < idx.size(); ++k) dense[idx[k]] = static_cast<std::uint64_t>(coeff.reduce(v[k]));
        kernel.vectors[deg].push_back(std::move(dense));
      }
    }

    // The kernel lives in the free module, whose action is left multiplication in A.
    std::vector<detail::Sparse> products(dimA * dimA);
    for (std::size_t a = 0; a < dimA; ++a)
      for (std::size_t b = 0; b < dimA; ++b)
        products[a * dimA + b] = Ab.flatten(A.multiply(Ab.elements[a], Ab.elements[b]), l);
    ambient_dim = free_dim;
    act = [products, dimA, free_dim, l](std::size_t a, const Dense& v) {
      Dense res(free_dim, 0);
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] == 0) continue;
        const std::size_t g = k / dimA, b = k % dimA;
        for (const auto& [c, coef] : products[a * dimA + b])
          res[g * dimA + c] = (res[g * dimA + c] + mulmod(coef, v[k], l)) % l;
      }
      return res;
    };
    current = std::move(kernel);
    out.steps = step + 1;
  }
  out.status = Membership::inconclusive;
  out.detail = "no finite free resolution within " + std::to_string(length_bound) + " terms";
  return out;
}

}  // namespace formalis
