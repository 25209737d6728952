#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "formalis/bigraded.hpp"
#include "formalis/dgg_algebra.hpp"
#include "formalis/error.hpp"
#include "formalis/linalg.hpp"

namespace formalis {

// Non-negatively graded algebras are DggAlgebras with degree k stored at bidegree (k,k) and
// zero differential.
using GradedAlgebra = DggAlgebra;

inline int graded_degree(Bidegree b) { return b.internal; }

// Degreewise matrices of a graded linear map: degree -> target.dim(k) x source.dim(k).
using GradedMap = std::map<int, IntMatrix>;

inline std::size_t graded_dim(const GradedAlgebra& a, int k) { return a.module().rank({k, k}); }

inline int top_degree(const GradedAlgebra& a) {
  int top = -1;
  for (const auto& [b, n] : a.module().components()) top = std::max(top, b.internal);
  return top;
}

// Builds a graded algebra from dimensions per degree, products on basis pairs (degree, index)
// and the unit vector in degree 0.
inline GradedAlgebra make_graded_algebra(const Coefficients& coeff, const std::vector<std::size_t>& dims,
                                         const std::map<std::pair<std::pair<int, std::size_t>, std::pair<int, std::size_t>>,
                                                        IntVector>& products,
                                         const IntVector& unit) {
  BigradedModule m(coeff);
  for (std::size_t k = 0; k < dims.size(); ++k) m.set_rank({static_cast<int>(k), static_cast<int>(k)}, dims[k]);
  StructureConstants c;
  for (const auto& [key, v] : products) {
    const auto [a, b] = key;
    const int k = a.first + b.first;
    BasisElement x{{a.first, a.first}, a.second}, y{{b.first, b.first}, b.second};
    if (k >= static_cast<int>(dims.size())) {
      if (std::any_of(v.begin(), v.end(), [](const Integer& z) { return z != 0; }))
        throw InvalidInput("product lands above the top degree");
      continue;
    }
    c[{x, y}] = Element{{{k, k}, v}};
  }
  return GradedAlgebra(m, default_labels(m), c, Element{{{0, 0}, unit}});
}

struct GradedAlgebraTower {
  std::vector<GradedAlgebra> terms;  // H_0, H_1, ...
  std::vector<GradedMap> maps;       // maps[i] = psi_i : H_{i+1} -> H_i
};

namespace detail {

inline IntVector apply_graded(const GradedMap& f, int k, const IntVector& v, std::size_t target_dim) {
  auto it = f.find(k);
  if (it == f.end()) return IntVector(target_dim);
  return it->second.apply(v);
}

inline Element apply_graded(const GradedMap& f, const Element& x, const GradedAlgebra& target) {
  Element out;
  for (const auto& [b, v] : x) {
    const std::size_t n = graded_dim(target, b.internal);
    if (n == 0) continue;
    out[b] = apply_graded(f, b.internal, v, n);
  }
  return normalized(std::move(out), target.coefficients());
}

inline GradedMap compose(const GradedMap& g, const GradedMap& f) {
  GradedMap out;
  for (const auto& [k, m] : f) {
    auto it = g.find(k);
    if (it == g.end()) continue;
    out[k] = it->second * m;
  }
  return out;
}

}  // namespace detail

// Structural checks on one graded algebra: bidegrees (k,k) with k >= 0, zero differential,
// and the degree-0 part a finite product of copies of F_l. Over F_l a finite-dimensional
// commutative algebra is such a product exactly when Frobenius is the identity; Frobenius is
// F_l-linear on a commutative algebra, so checking b^l = b on a basis suffices.
inline void validate_graded_algebra(const GradedAlgebra& a, const std::string& what) {
  const auto& coeff = a.coefficients();
  if (!coeff.is_field()) throw InvalidInput(what + ": towers are taken over F_l");
  for (const auto& [b, n] : a.module().components())
    if (b.internal != b.cohom || b.internal < 0)
      throw InvalidInput(what + ": component at " + to_string(b) + " is not in a bidegree (k,k) with k >= 0");
  if (!a.module().differentials().empty()) throw InvalidInput(what + ": graded algebras carry no differential");
  const auto report = check_dgg_axioms(a);
  if (!report.ok())
    throw InvalidInput(what + ": " + report.violations.front().axiom + " fails: " + report.violations.front().detail);
  const std::size_t n0 = graded_dim(a, 0);
  for (std::size_t x = 0; x < n0; ++x)
    for (std::size_t y = 0; y < n0; ++y) {
      BasisElement ex{{0, 0}, x}, ey{{0, 0}, y};
      if (!equal(a.multiply(ex, ey), a.multiply(ey, ex), coeff))
        throw DomainError(what + ": degree-0 part is not commutative");
    }
  const std::uint64_t l = *coeff.prime;
  for (std::size_t x = 0; x < n0; ++x) {
    Element e = a.element({{0, 0}, x});
    Element power = e;
    for (std::uint64_t k = 1; k < l; ++k) power = a.multiply(power, e);
    if (!equal(power, e, coeff))
      throw DomainError(what + ": degree-0 part is not a product of copies of F_" + std::to_string(l));
  }
}

// psi : source -> target is a unital multiplicative degree-preserving map.
inline void validate_morphism(const GradedMap& psi, const GradedAlgebra& source, const GradedAlgebra& target,
                              const std::string& what) {
  const auto& coeff = target.coefficients();
  for (const auto& [k, m] : psi)
    if (m.rows() != graded_dim(target, k) || m.cols() != graded_dim(source, k))
      throw InvalidInput(what + ": block in degree " + std::to_string(k) + " has the wrong shape");
  if (!equal(detail::apply_graded(psi, source.unit(), target), target.unit(), coeff))
    throw DomainError(what + " does not preserve the unit");
  for (BasisElement x : source.basis())
    for (BasisElement y : source.basis()) {
      Element lhs = detail::apply_graded(psi, source.multiply(x, y), target);
      Element rhs = target.multiply(detail::apply_graded(psi, source.element(x), target),
                                    detail::apply_graded(psi, source.element(y), target));
      if (!equal(lhs, rhs, coeff))
        throw DomainError(what + " is not multiplicative on (" + source.label(x) + ", " + source.label(y) + ")");
    }
}

// Every invariant of the tower; throws InvalidInput for malformed data and DomainError when
// psi_i fails to be an isomorphism below degree i.
inline void validate_tower(const GradedAlgebraTower& t) {
  if (t.terms.empty()) throw InvalidInput("tower has no terms");
  if (t.maps.size() + 1 != t.terms.size())
    throw InvalidInput("tower with " + std::to_string(t.terms.size()) + " terms needs " +
                       std::to_string(t.terms.size() - 1) + " maps");
  for (std::size_t i = 0; i < t.terms.size(); ++i) {
    if (!(t.terms[i].coefficients() == t.terms[0].coefficients())) throw InvalidInput("tower terms use different coefficients");
    validate_graded_algebra(t.terms[i], "H_" + std::to_string(i));
  }
  for (std::size_t i = 0; i < t.maps.size(); ++i) {
    const std::string name = "psi_" + std::to_string(i);
    validate_morphism(t.maps[i], t.terms[i + 1], t.terms[i], name);
    const auto& coeff = t.terms[i].coefficients();
    for (int k = 0; k < static_cast<int>(i); ++k) {
      const std::size_t a = graded_dim(t.terms[i + 1], k), b = graded_dim(t.terms[i], k);
      const std::size_t r = a == 0 ? 0 : rank(t.maps[i].count(k) ? t.maps[i].at(k) : IntMatrix(b, a), coeff);
      if (a != b || r != a)
        throw DomainError(name + " is not an isomorphism in degree " + std::to_string(k) + " (dimensions " +
                          std::to_string(a) + " -> " + std::to_string(b) + ", rank " + std::to_string(r) + ")");
    }
  }
}

struct StabilizationCertificate {
  int through_degree = 0;
  std::size_t source_term = 0;               // H_{d+1}
  std::map<int, std::size_t> stable_from;    // degree k -> first index from which psi is iso in degree k
  std::vector<std::size_t> agreeing_terms;   // terms j >= d+1 checked against the limit
};

struct LimitAlgebra {
  GradedAlgebra algebra;  // degrees 0..d
  StabilizationCertificate certificate;
};

// Degree <= d quotient of a graded algebra.
inline GradedAlgebra truncate_degrees(const GradedAlgebra& a, int d) {
  BigradedModule m(a.coefficients());
  BasisLabels labels;
  for (const auto& [b, n] : a.module().components())
    if (b.internal <= d) {
      m.set_rank(b, n);
      labels[b] = a.labels().at(b);
    }
  StructureConstants c;
  for (const auto& [key, value] : a.product()) {
    if (key.first.degree.internal > d || key.second.degree.internal > d) continue;
    Element v;
    for (const auto& [b, x] : value)
      if (b.internal <= d) v[b] = x;
    if (!v.empty()) c[key] = v;
  }
  return GradedAlgebra(m, labels, c, a.unit());
}

namespace detail {

// Composite H_j -> H_{d+1} of the tower maps.
inline GradedMap transition(const GradedAlgebraTower& t, std::size_t j, std::size_t target) {
  GradedMap f;
  for (const auto& [b, n] : t.terms[j].module().components()) f[b.internal] = IntMatrix::identity(n);
  for (std::size_t i = j; i > target; --i) f = compose(t.maps[i - 1], f);
  return f;
}

}  // namespace detail

// Whether the degree <= d part of H_j, transported to H_{d+1} along the tower maps, is the
// limit algebra: the transition is bijective in each degree <= d and carries products to products.
inline bool agrees_with_term(const LimitAlgebra& limit, const GradedAlgebraTower& t, std::size_t j) {
  const int d = limit.certificate.through_degree;
  if (j < static_cast<std::size_t>(d + 1) || j >= t.terms.size()) return false;
  const auto& coeff = limit.algebra.coefficients();
  const GradedMap f = detail::transition(t, j, static_cast<std::size_t>(d + 1));
  const GradedAlgebra hj = truncate_degrees(t.terms[j], d);
  for (int k = 0; k <= d; ++k) {
    const std::size_t a = graded_dim(hj, k), b = graded_dim(limit.algebra, k);
    if (a != b) return false;
    if (a == 0) continue;
    auto it = f.find(k);
    if (it == f.end() || rank(it->second, coeff) != a) return false;
  }
  if (!equal(detail::apply_graded(f, hj.unit(), limit.algebra), limit.algebra.unit(), coeff)) return false;
  for (BasisElement x : hj.basis())
    for (BasisElement y : hj.basis()) {
      Element lhs = detail::apply_graded(f, hj.multiply(x, y), limit.algebra);
      Element rhs = limit.algebra.multiply(detail::apply_graded(f, hj.element(x), limit.algebra),
                                           detail::apply_graded(f, hj.element(y), limit.algebra));
      if (!equal(lhs, rhs, coeff)) return false;
    }
  return true;
}

// The inverse limit through degree d: in degree k < i every psi_i is bijective, so the limit
// in degrees <= d is read off H_{d+1}.
inline LimitAlgebra graded_limit(const GradedAlgebraTower& t, int d) {
  if (d < 0) throw InvalidInput("degree bound must be non-negative");
  if (t.terms.size() < static_cast<std::size_t>(d) + 2)
    throw DomainError("tower has " + std::to_string(t.terms.size()) + " terms; degree " + std::to_string(d) +
                      " needs at least " + std::to_string(d + 2));
  validate_tower(t);
  LimitAlgebra out;
  const std::size_t source = static_cast<std::size_t>(d) + 1;
  out.algebra = truncate_degrees(t.terms[source], d);
  out.certificate.through_degree = d;
  out.certificate.source_term = source;
  for (int k = 0; k <= d; ++k) out.certificate.stable_from[k] = static_cast<std::size_t>(k) + 1;
  for (std::size_t j = source; j < t.terms.size(); ++j)
    if (agrees_with_term(out, t, j))
      out.certificate.agreeing_terms.push_back(j);
    else
      throw DomainError("limit through degree " + std::to_string(d) + " does not stabilize at H_" + std::to_string(j));
  return out;
}

}  // namespace formalis
