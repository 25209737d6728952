#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "formalis/bigraded.hpp"
#include "formalis/error.hpp"
#include "formalis/linalg.hpp"

namespace formalis {

struct BasisElement {
  Bidegree degree;
  std::size_t index = 0;

  friend auto operator<=>(const BasisElement&, const BasisElement&) = default;
  friend bool operator==(const BasisElement&, const BasisElement&) = default;
};

// Coordinates per bidegree. Canonical form: reduced coefficients, no zero parts.
using Element = std::map<Bidegree, IntVector>;

// Bilinear map on basis pairs; absent pairs map to zero.
using StructureConstants = std::map<std::pair<BasisElement, BasisElement>, Element>;

using BasisLabels = std::map<Bidegree, std::vector<std::string>>;

inline Element basis_element(const BigradedModule& m, BasisElement e) {
  const std::size_t n = m.rank(e.degree);
  if (e.index >= n) throw InvalidInput("basis element index out of range at " + to_string(e.degree));
  IntVector v(n);
  v[e.index] = 1;
  return Element{{e.degree, std::move(v)}};
}

inline Element normalized(Element x, const Coefficients& coeff) {
  for (auto it = x.begin(); it != x.end();) {
    coeff.reduce_in_place(it->second);
    if (coeff.is_zero(it->second))
      it = x.erase(it);
    else
      ++it;
  }
  return x;
}

inline void add_scaled(Element& acc, const Element& x, const Integer& factor) {
  if (factor == 0) return;
  for (const auto& [b, v] : x) {
    auto& target = acc[b];
    if (target.empty()) target.assign(v.size(), Integer(0));
    if (target.size() != v.size()) throw InvalidInput("element parts of different length at " + to_string(b));
    for (std::size_t k = 0; k < v.size(); ++k) target[k] += factor * v[k];
  }
}

inline bool equal(const Element& a, const Element& b, const Coefficients& coeff) {
  return normalized(a, coeff) == normalized(b, coeff);
}

inline std::vector<std::pair<BasisElement, Integer>> terms(const Element& x) {
  std::vector<std::pair<BasisElement, Integer>> out;
  for (const auto& [b, v] : x)
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k] != 0) out.push_back({BasisElement{b, k}, v[k]});
  return out;
}

inline std::vector<BasisElement> basis_of(const BigradedModule& m) {
  std::vector<BasisElement> out;
  for (const auto& [b, n] : m.components())
    for (std::size_t k = 0; k < n; ++k) out.push_back({b, k});
  return out;
}

inline Element apply_bilinear(const StructureConstants& c, const Element& x, const Element& y,
                              const Coefficients& coeff) {
  Element out;
  for (const auto& [a, ca] : terms(x))
    for (const auto& [b, cb] : terms(y)) {
      auto it = c.find({a, b});
      if (it != c.end()) add_scaled(out, it->second, ca * cb);
    }
  return normalized(std::move(out), coeff);
}

inline Element apply_differential(const BigradedModule& m, const Element& x) {
  Element out;
  for (const auto& [b, v] : x) {
    if (m.rank(b.next()) == 0) continue;
    out[b.next()] = m.differential(b).apply(v);
  }
  return normalized(std::move(out), m.coefficients());
}

inline Element scaled(Element x, const Integer& f, const Coefficients& coeff) {
  for (auto& [b, v] : x)
    for (auto& c : v) c *= f;
  return normalized(std::move(x), coeff);
}

inline Element sum(Element a, const Element& b, const Coefficients& coeff) {
  add_scaled(a, b, Integer(1));
  return normalized(std::move(a), coeff);
}

inline int sign_of_degree(int cohom) { return (cohom % 2 == 0) ? 1 : -1; }

inline std::string default_label(Bidegree b, std::size_t k) {
  return "e" + std::to_string(b.internal) + "_" + std::to_string(b.cohom) + "_" + std::to_string(k);
}

inline BasisLabels default_labels(const BigradedModule& m) {
  BasisLabels labels;
  for (const auto& [b, n] : m.components())
    for (std::size_t k = 0; k < n; ++k) labels[b].push_back(default_label(b, k));
  return labels;
}

inline std::string format_element(const BasisLabels& labels, const Element& x) {
  std::string out;
  for (const auto& [e, c] : terms(x)) {
    const std::string& name = labels.at(e.degree).at(e.index);
    if (c < 0)
      out += out.empty() ? "-" : "-";
    else if (!out.empty())
      out += "+";
    Integer a = c < 0 ? Integer(-c) : c;
    if (a != 1) out += a.str() + "*";
    out += name;
  }
  return out.empty() ? "0" : out;
}

inline void check_element_shape(const BigradedModule& m, const Element& x, const std::string& what) {
  for (const auto& [b, v] : x)
    if (v.size() != m.rank(b)) throw InvalidInput(what + ": element part at " + to_string(b) + " has wrong length");
}

// Labelled basis over a bigraded module; shared by algebras and bimodules.
class LabelledModule {
 public:
  LabelledModule() = default;
  LabelledModule(BigradedModule module, BasisLabels labels) : module_(std::move(module)), labels_(std::move(labels)) {
    if (labels_.empty()) labels_ = default_labels(module_);
    for (const auto& [b, n] : module_.components()) {
      auto it = labels_.find(b);
      if (it == labels_.end() || it->second.size() != n)
        throw InvalidInput("basis labels do not match the component ranks at " + to_string(b));
    }
    for (const auto& [b, names] : labels_) {
      if (module_.rank(b) != names.size()) throw InvalidInput("labels given for an empty component " + to_string(b));
      for (std::size_t k = 0; k < names.size(); ++k)
        if (!index_.emplace(names[k], BasisElement{b, k}).second) throw InvalidInput("duplicate basis label " + names[k]);
    }
  }

  const BigradedModule& module() const { return module_; }
  const Coefficients& coefficients() const { return module_.coefficients(); }
  const BasisLabels& labels() const { return labels_; }
  const std::string& label(BasisElement e) const { return labels_.at(e.degree).at(e.index); }
  std::vector<BasisElement> basis() const { return basis_of(module_); }

  BasisElement find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw InvalidInput("unknown basis label '" + name + "'");
    return it->second;
  }

  Element element(BasisElement e) const { return basis_element(module_, e); }
  Element d(const Element& x) const { return apply_differential(module_, x); }
  std::string format(const Element& x) const { return format_element(labels_, x); }

 private:
  BigradedModule module_;
  BasisLabels labels_;
  std::map<std::string, BasisElement> index_;
};

class DggAlgebra : public LabelledModule {
 public:
  DggAlgebra() = default;
  DggAlgebra(BigradedModule module, BasisLabels labels, StructureConstants product, Element unit)
      : LabelledModule(std::move(module), std::move(labels)), product_(std::move(product)) {
    const auto& coeff = coefficients();
    for (auto& [key, value] : product_) {
      check_element_shape(this->module(), value, "product " + label(key.first) + "*" + label(key.second));
      value = normalized(std::move(value), coeff);
    }
    unit_ = normalized(std::move(unit), coeff);
    check_element_shape(this->module(), unit_, "unit");
    for (const auto& [b, v] : unit_)
      if (b != Bidegree{0, 0}) throw InvalidInput("unit must lie in bidegree (0,0)");
  }

  const StructureConstants& product() const { return product_; }
  const Element& unit() const { return unit_; }

  Element multiply(const Element& x, const Element& y) const {
    return apply_bilinear(product_, x, y, coefficients());
  }
  Element multiply(BasisElement a, BasisElement b) const { return multiply(element(a), element(b)); }

  friend bool operator==(const DggAlgebra& a, const DggAlgebra& b) {
    return a.module() == b.module() && a.labels() == b.labels() && a.product_ == b.product_ && a.unit_ == b.unit_;
  }

 private:
  StructureConstants product_;
  Element unit_;
};

class DggBimodule : public LabelledModule {
 public:
  DggBimodule() = default;
  DggBimodule(DggAlgebra left, DggAlgebra right, BigradedModule module, BasisLabels labels, StructureConstants left_action,
              StructureConstants right_action)
      : LabelledModule(std::move(module), std::move(labels)),
        left_(std::move(left)),
        right_(std::move(right)),
        left_action_(std::move(left_action)),
        right_action_(std::move(right_action)) {
    if (!(left_.coefficients() == coefficients()) || !(right_.coefficients() == coefficients()))
      throw InvalidInput("bimodule and algebras use different coefficients");
    for (auto* table : {&left_action_, &right_action_})
      for (auto& [key, value] : *table) {
        check_element_shape(this->module(), value, "action");
        value = normalized(std::move(value), coefficients());
      }
  }

  const DggAlgebra& left() const { return left_; }
  const DggAlgebra& right() const { return right_; }
  const StructureConstants& left_action() const { return left_action_; }
  const StructureConstants& right_action() const { return right_action_; }

  Element act_left(const Element& a, const Element& m) const {
    return apply_bilinear(left_action_, a, m, coefficients());
  }
  Element act_right(const Element& m, const Element& b) const {
    return apply_bilinear(right_action_, m, b, coefficients());
  }

 private:
  DggAlgebra left_;
  DggAlgebra right_;
  StructureConstants left_action_;
  StructureConstants right_action_;
};

// The one-dimensional algebra of scalars in bidegree (0,0).
inline DggAlgebra scalar_algebra(const Coefficients& coeff, const std::string& name = "1") {
  BigradedModule m(coeff);
  m.set_rank({0, 0}, 1);
  BasisElement one{{0, 0}, 0};
  StructureConstants product{{{one, one}, basis_element(m, one)}};
  Element unit = basis_element(m, one);
  return DggAlgebra(m, BasisLabels{{{0, 0}, {name}}}, product, unit);
}

inline DggBimodule regular_bimodule(const DggAlgebra& a) {
  return DggBimodule(a, a, a.module(), a.labels(), a.product(), a.product());
}

struct AxiomViolation {
  std::string axiom;
  std::vector<std::string> witness;
  std::string detail;
};

struct AxiomReport {
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool degree_additive(const Element& out, Bidegree expected) {
  for (const auto& [b, v] : out)
    if (b != expected) return false;
  return true;
}

// Leibniz for a bilinear map x*y -> z: d(xy) = d(x)y + (-1)^{|x|} x d(y).
template <typename Left, typename Right, typename Target, typename Mul>
void check_leibniz(const Left& left, const Right& right, const Target& target, Mul mul, const std::string& axiom,
                   AxiomReport& report) {
  const auto& coeff = target.coefficients();
  for (BasisElement a : left.basis())
    for (BasisElement b : right.basis()) {
      Element x = left.element(a), y = right.element(b);
      Element lhs = target.d(mul(x, y));
      Element rhs = sum(mul(left.d(x), y), scaled(mul(x, right.d(y)), Integer(sign_of_degree(a.degree.cohom)), coeff),
                        coeff);
      if (!equal(lhs, rhs, coeff))
        report.violations.push_back({axiom, {left.label(a), right.label(b)}, "d(xy) = " + target.format(lhs) + " but d(x)y +- xd(y) = " + target.format(rhs)});
    }
}

template <typename Left, typename Right, typename Target>
void check_degrees(const Left& left, const Right& right, const Target& target, const StructureConstants& c,
                   const std::string& axiom, AxiomReport& report) {
  for (const auto& [key, value] : c) {
    if (!degree_additive(value, key.first.degree + key.second.degree))
      report.violations.push_back({axiom, {left.label(key.first), right.label(key.second)},
                                   "product " + target.format(value) + " is not in bidegree " +
                                       to_string(key.first.degree + key.second.degree)});
  }
}

inline void check_complex(const LabelledModule& m, const std::string& what, AxiomReport& report) {
  try {
    m.module().validate();
  } catch (const InvalidInput& e) {
    report.violations.push_back({what, {}, e.what()});
  }
}

}  // namespace detail

inline AxiomReport check_dgg_axioms(const DggAlgebra& a) {
  AxiomReport report;
  detail::check_complex(a, "complex", report);
  if (!report.ok()) return report;
  const auto& coeff = a.coefficients();
  auto mul = [&](const Element& x, const Element& y) { return a.multiply(x, y); };
  detail::check_degrees(a, a, a, a.product(), "degree", report);
  for (BasisElement e : a.basis()) {
    Element x = a.element(e);
    if (!equal(a.multiply(a.unit(), x), x, coeff) || !equal(a.multiply(x, a.unit()), x, coeff))
      report.violations.push_back({"unit", {a.label(e)}, "unit does not act as identity"});
  }
  const auto basis = a.basis();
  for (BasisElement x : basis)
    for (BasisElement y : basis) {
      Element xy = a.multiply(x, y);
      for (BasisElement z : basis) {
        Element lhs = a.multiply(xy, a.element(z));
        Element rhs = a.multiply(a.element(x), a.multiply(y, z));
        if (!equal(lhs, rhs, coeff))
          report.violations.push_back({"associativity", {a.label(x), a.label(y), a.label(z)},
                                       "(xy)z = " + a.format(lhs) + " but x(yz) = " + a.format(rhs)});
      }
    }
  detail::check_leibniz(a, a, a, mul, "leibniz", report);
  return report;
}

inline AxiomReport check_bimodule_axioms(const DggBimodule& m) {
  AxiomReport report = check_dgg_axioms(m.left());
  for (auto& v : report.violations) v.axiom = "left algebra: " + v.axiom;
  AxiomReport right = check_dgg_axioms(m.right());
  for (auto& v : right.violations) {
    v.axiom = "right algebra: " + v.axiom;
    report.violations.push_back(v);
  }
  detail::check_complex(m, "complex", report);
  if (!report.ok()) return report;
  const auto& coeff = m.coefficients();
  const auto& A = m.left();
  const auto& B = m.right();
  detail::check_degrees(A, m, m, m.left_action(), "left degree", report);
  detail::check_degrees(m, B, m, m.right_action(), "right degree", report);
  for (BasisElement e : m.basis()) {
    Element x = m.element(e);
    if (!equal(m.act_left(A.unit(), x), x, coeff)) report.violations.push_back({"left unit", {m.label(e)}, ""});
    if (!equal(m.act_right(x, B.unit()), x, coeff)) report.violations.push_back({"right unit", {m.label(e)}, ""});
  }
  for (BasisElement x : m.basis()) {
    const Element mx = m.element(x);
    for (BasisElement a1 : A.basis())
      for (BasisElement a2 : A.basis()) {
        Element lhs = m.act_left(A.multiply(a1, a2), mx);
        Element rhs = m.act_left(A.element(a1), m.act_left(A.element(a2), mx));
        if (!equal(lhs, rhs, coeff))
          report.violations.push_back({"left associativity", {A.label(a1), A.label(a2), m.label(x)}, ""});
      }
    for (BasisElement b1 : B.basis())
      for (BasisElement b2 : B.basis()) {
        Element lhs = m.act_right(mx, B.multiply(b1, b2));
        Element rhs = m.act_right(m.act_right(mx, B.element(b1)), B.element(b2));
        if (!equal(lhs, rhs, coeff))
          report.violations.push_back({"right associativity", {m.label(x), B.label(b1), B.label(b2)}, ""});
      }
    for (BasisElement a : A.basis())
      for (BasisElement b : B.basis()) {
        Element lhs = m.act_right(m.act_left(A.element(a), mx), B.element(b));
        Element rhs = m.act_left(A.element(a), m.act_right(mx, B.element(b)));
        if (!equal(lhs, rhs, coeff))
          report.violations.push_back({"compatibility", {A.label(a), m.label(x), B.label(b)}, ""});
      }
  }
  detail::check_leibniz(A, m, m, [&](const Element& a, const Element& x) { return m.act_left(a, x); }, "left leibniz",
                        report);
  detail::check_leibniz(m, B, m, [&](const Element& x, const Element& b) { return m.act_right(x, b); },
                        "right leibniz", report);
  return report;
}

// ---------------------------------------------------------------------------------------------
// Transport along the diagonal truncation.

// S-coordinates -> ambient coordinates.
inline Element include(const DiagonalTruncation& t, const BigradedModule& ambient, const Element& s) {
  Element out;
  for (const auto& [b, v] : s) out[b] = t.inclusion.at(b, t.truncated, ambient).apply(v);
  return normalized(std::move(out), ambient.coefficients());
}

// Ambient coordinates -> S-coordinates; nullopt names nothing, the caller reports the bidegree.
inline std::optional<Element> restrict_to_truncation(const DiagonalTruncation& t, const Element& x,
                                                     Bidegree* failure = nullptr) {
  Element out;
  for (const auto& [b, v] : x) {
    auto s = t.to_truncated(b, v);
    if (!s) {
      if (failure) *failure = b;
      return std::nullopt;
    }
    if (!s->empty()) out[b] = std::move(*s);
  }
  return normalized(std::move(out), t.truncated.coefficients());
}

// S -> H(M); zero off the diagonal.
inline Element project(const DiagonalTruncation& t, const Element& s) {
  Element out;
  for (const auto& [b, v] : s) {
    auto it = t.projection->blocks.find(b);
    if (it == t.projection->blocks.end()) continue;
    out[b] = it->second.apply(v);
  }
  return normalized(std::move(out), t.truncated.coefficients());
}

// H(M) -> S, a cycle representative.
inline Element lift(const DiagonalTruncation& t, const Element& h) {
  Element out;
  for (const auto& [b, v] : h) out[b] = t.lifts.at(b).apply(v);
  return normalized(std::move(out), t.truncated.coefficients());
}

inline BasisLabels truncated_labels(const DiagonalTruncation& t, const LabelledModule& ambient) {
  BasisLabels labels;
  for (const auto& [b, n] : t.truncated.components()) {
    const IntMatrix& k = t.inclusion.blocks.at(b);
    for (std::size_t c = 0; c < n; ++c) {
      Element x{{b, k.column(c)}};
      labels[b].push_back(b.on_diagonal() && terms(x).size() != 1 ? "(" + ambient.format(x) + ")" : ambient.format(x));
    }
  }
  return labels;
}

inline BasisLabels cohomology_labels(const DiagonalTruncation& t, const LabelledModule& ambient) {
  BasisLabels labels;
  for (const auto& [b, n] : t.cohomology_module->components())
    for (std::size_t k = 0; k < n; ++k) {
      Element h{{b, IntVector(n)}};
      h[b][k] = 1;
      labels[b].push_back("[" + ambient.format(include(t, ambient.module(), lift(t, h))) + "]");
    }
  return labels;
}

// Restricts a bilinear map U x V -> W to the truncations; throws if S(W) is not closed.
inline StructureConstants truncate_constants(const StructureConstants& c, const DiagonalTruncation& tu,
                                             const BigradedModule& u, const DiagonalTruncation& tv,
                                             const BigradedModule& v, const DiagonalTruncation& tw) {
  StructureConstants out;
  const auto& coeff = tw.truncated.coefficients();
  for (BasisElement a : basis_of(tu.truncated))
    for (BasisElement b : basis_of(tv.truncated)) {
      Element x = include(tu, u, basis_element(tu.truncated, a));
      Element y = include(tv, v, basis_element(tv.truncated, b));
      Element z = apply_bilinear(c, x, y, coeff);
      Bidegree where{};
      auto s = restrict_to_truncation(tw, z, &where);
      if (!s)
        throw DomainError("truncation is not closed under multiplication: product of basis elements in bidegrees " +
                          to_string(a.degree) + " and " + to_string(b.degree) + " leaves S at " + to_string(where));
      if (!s->empty()) out[{a, b}] = std::move(*s);
    }
  return out;
}

// The induced bilinear map on cohomology, through cycle lifts and the projection.
inline StructureConstants cohomology_constants(const StructureConstants& truncated, const DiagonalTruncation& tu,
                                               const DiagonalTruncation& tv, const DiagonalTruncation& tw) {
  StructureConstants out;
  const auto& coeff = tw.truncated.coefficients();
  for (BasisElement a : basis_of(*tu.cohomology_module))
    for (BasisElement b : basis_of(*tv.cohomology_module)) {
      Element x = lift(tu, basis_element(*tu.cohomology_module, a));
      Element y = lift(tv, basis_element(*tv.cohomology_module, b));
      Element z = project(tw, apply_bilinear(truncated, x, y, coeff));
      if (!z.empty()) out[{a, b}] = std::move(z);
    }
  return out;
}

// S(A) of a pure algebra together with the truncation data it was built from.
struct TruncatedAlgebra {
  DiagonalTruncation data;
  DggAlgebra algebra;
};

inline TruncatedAlgebra truncate_algebra(const DggAlgebra& a, DiagonalTruncation t) {
  StructureConstants c = truncate_constants(a.product(), t, a.module(), t, a.module(), t);
  auto unit = restrict_to_truncation(t, a.unit());
  if (!unit) throw DomainError("unit is not a cycle");
  BasisLabels labels = truncated_labels(t, a);
  DggAlgebra s(t.truncated, std::move(labels), std::move(c), std::move(*unit));
  return TruncatedAlgebra{std::move(t), std::move(s)};
}

inline TruncatedAlgebra s_subalgebra(const DggAlgebra& a) { return truncate_algebra(a, diagonal_truncation(a.module())); }

inline DggAlgebra cohomology_algebra(const DggAlgebra& a, const TruncatedAlgebra& s) {
  const auto& t = s.data;
  if (!t.cohomology_module) throw DomainError("integral cohomology has torsion; H(A) is not a free bigraded module");
  StructureConstants c = cohomology_constants(s.algebra.product(), t, t, t);
  return DggAlgebra(*t.cohomology_module, cohomology_labels(t, a), std::move(c), project(t, s.algebra.unit()));
}

// ---------------------------------------------------------------------------------------------
// Formality roofs  A <- S(A) -> H(A)  and  M <- S(M) -> H(M).

struct RoofReport {
  bool pure = false;
  std::optional<int> weight;
  std::optional<Bidegree> impurity_witness;
  CohomologyTable cohomology;
  CohomologyTable truncated_cohomology;

  bool inclusion_chain_map = false;
  bool inclusion_quasi_iso = false;
  bool inclusion_multiplicative = false;
  std::optional<Bidegree> inclusion_failure;  // first nonzero degree of the mapping cone

  bool projection_available = false;
  bool projection_chain_map = false;
  bool projection_quasi_iso = false;
  bool projection_multiplicative = false;
  bool cohomology_has_torsion = false;

  std::vector<std::string> notes;

  bool certified() const {
    return pure && inclusion_chain_map && inclusion_quasi_iso && inclusion_multiplicative && projection_quasi_iso &&
           projection_multiplicative;
  }
};

namespace detail {

// Projection certificate when H has torsion: S -> H is a quasi-isomorphism iff H(S) vanishes
// off the diagonal and agrees with H(M) on it, since Z^{ii} -> Z^{ii}/B^{ii} is the identity quotient.
inline bool torsion_projection_quasi_iso(const CohomologyTable& hs, const CohomologyTable& hm) {
  if (off_diagonal_witness(hs)) return false;
  for (const auto& [b, g] : hm.groups)
    if (b.on_diagonal() && !(hs.at(b) == g)) return false;
  for (const auto& [b, g] : hs.groups)
    if (!(hm.at(b) == g)) return false;
  return true;
}

}  // namespace detail

inline RoofReport verify_formality_roof(const DggAlgebra& a) {
  RoofReport report;
  const auto& coeff = a.coefficients();
  report.cohomology = cohomology(a.module());
  report.weight = purity_weight(report.cohomology);
  report.impurity_witness = off_diagonal_witness(report.cohomology);
  report.pure = !report.impurity_witness.has_value();

  DiagonalTruncation t = diagonal_truncation(a.module(), report.pure);
  report.truncated_cohomology = cohomology(t.truncated);
  const auto inclusion = check_quasi_isomorphism(t.inclusion, t.truncated, a.module());
  report.inclusion_chain_map = inclusion.chain_map;
  report.inclusion_quasi_iso = inclusion.quasi_isomorphism;
  report.inclusion_failure = inclusion.failing_cone_degree;

  if (!report.pure) {
    report.notes.push_back("not pure of weight 0: cohomology at " + to_string(*report.impurity_witness));
    if (report.inclusion_quasi_iso)
      report.notes.push_back("the inclusion S(A) -> A is nevertheless a quasi-isomorphism");
    else
      report.notes.push_back("the inclusion S(A) -> A is not a quasi-isomorphism; its cone has cohomology at " +
                             to_string(*report.inclusion_failure));
    return report;
  }

  TruncatedAlgebra s = truncate_algebra(a, std::move(t));
  const auto& td = s.data;
  report.inclusion_multiplicative = equal(include(td, a.module(), s.algebra.unit()), a.unit(), coeff);
  const auto sbasis = s.algebra.basis();
  for (BasisElement x : sbasis)
    for (BasisElement y : sbasis) {
      Element lhs = include(td, a.module(), s.algebra.multiply(x, y));
      Element rhs = a.multiply(include(td, a.module(), s.algebra.element(x)), include(td, a.module(), s.algebra.element(y)));
      if (!equal(lhs, rhs, coeff)) report.inclusion_multiplicative = false;
    }

  report.cohomology_has_torsion = td.cohomology_has_torsion;
  if (td.cohomology_has_torsion) {
    report.projection_quasi_iso = detail::torsion_projection_quasi_iso(report.truncated_cohomology, report.cohomology);
    // The product on H is induced from S, so multiplicativity is the closure of S plus the
    // projection being a ring quotient on Z^{**}; both hold once S is a subalgebra.
    report.projection_multiplicative = true;
    report.notes.push_back("integral cohomology has torsion; projection certified on cohomology groups");
    return report;
  }

  report.projection_available = true;
  DggAlgebra h = cohomology_algebra(a, s);
  const auto projection = check_quasi_isomorphism(*td.projection, td.truncated, h.module());
  report.projection_chain_map = projection.chain_map;
  report.projection_quasi_iso = projection.quasi_isomorphism;
  report.projection_multiplicative = equal(project(td, s.algebra.unit()), h.unit(), coeff);
  for (BasisElement x : sbasis)
    for (BasisElement y : sbasis) {
      Element lhs = project(td, s.algebra.multiply(x, y));
      Element rhs = h.multiply(project(td, s.algebra.element(x)), project(td, s.algebra.element(y)));
      if (!equal(lhs, rhs, coeff)) report.projection_multiplicative = false;
    }
  return report;
}

struct BimoduleRoofReport {
  CohomologyTable cohomology;
  bool inclusion_quasi_iso = false;
  bool inclusion_compatible = false;   // S(A) S(M) S(B) -> A M B respects the actions
  bool projection_available = false;
  bool projection_quasi_iso = false;
  bool projection_compatible = false;  // S(M) -> H(M) intertwines S(A)->H(A), S(B)->H(B)
  bool cohomology_has_torsion = false;
  std::vector<std::string> notes;

  bool certified() const { return inclusion_quasi_iso && inclusion_compatible && projection_quasi_iso && projection_compatible; }
};

namespace detail {

inline void require_weight_zero(const BigradedModule& m, const std::string& what) {
  const auto h = cohomology(m);
  if (auto w = off_diagonal_witness(h))
    throw NotPure(what + " is " + not_pure_message(*w), w->internal, w->cohom);
}

}  // namespace detail

inline BimoduleRoofReport verify_bimodule_roof(const DggBimodule& m) {
  detail::require_weight_zero(m.left().module(), "left algebra");
  detail::require_weight_zero(m.right().module(), "right algebra");
  detail::require_weight_zero(m.module(), "bimodule");
  const auto& coeff = m.coefficients();
  BimoduleRoofReport report;
  report.cohomology = cohomology(m.module());

  TruncatedAlgebra sa = s_subalgebra(m.left());
  TruncatedAlgebra sb = s_subalgebra(m.right());
  DiagonalTruncation tm = diagonal_truncation(m.module());
  const auto& A = m.left();
  const auto& B = m.right();

  StructureConstants left = truncate_constants(m.left_action(), sa.data, A.module(), tm, m.module(), tm);
  StructureConstants right = truncate_constants(m.right_action(), tm, m.module(), sb.data, B.module(), tm);

  report.inclusion_quasi_iso = check_quasi_isomorphism(tm.inclusion, tm.truncated, m.module()).quasi_isomorphism;
  report.inclusion_compatible = true;
  for (BasisElement a : sa.algebra.basis())
    for (BasisElement x : basis_of(tm.truncated)) {
      Element sx = basis_element(tm.truncated, x);
      Element lhs = include(tm, m.module(), apply_bilinear(left, sa.algebra.element(a), sx, coeff));
      Element rhs = m.act_left(include(sa.data, A.module(), sa.algebra.element(a)), include(tm, m.module(), sx));
      if (!equal(lhs, rhs, coeff)) report.inclusion_compatible = false;
    }
  for (BasisElement x : basis_of(tm.truncated))
    for (BasisElement b : sb.algebra.basis()) {
      Element sx = basis_element(tm.truncated, x);
      Element lhs = include(tm, m.module(), apply_bilinear(right, sx, sb.algebra.element(b), coeff));
      Element rhs = m.act_right(include(tm, m.module(), sx), include(sb.data, B.module(), sb.algebra.element(b)));
      if (!equal(lhs, rhs, coeff)) report.inclusion_compatible = false;
    }

  report.cohomology_has_torsion =
      tm.cohomology_has_torsion || sa.data.cohomology_has_torsion || sb.data.cohomology_has_torsion;
  if (report.cohomology_has_torsion) {
    report.projection_quasi_iso =
        detail::torsion_projection_quasi_iso(cohomology(tm.truncated), report.cohomology);
    report.projection_compatible = true;
    report.notes.push_back("integral cohomology has torsion; projection certified on cohomology groups");
    return report;
  }

  report.projection_available = true;
  StructureConstants hleft = cohomology_constants(left, sa.data, tm, tm);
  StructureConstants hright = cohomology_constants(right, tm, sb.data, tm);
  report.projection_quasi_iso =
      check_quasi_isomorphism(*tm.projection, tm.truncated, *tm.cohomology_module).quasi_isomorphism;
  report.projection_compatible = true;
  for (BasisElement a : sa.algebra.basis())
    for (BasisElement x : basis_of(tm.truncated)) {
      Element sx = basis_element(tm.truncated, x);
      Element lhs = project(tm, apply_bilinear(left, sa.algebra.element(a), sx, coeff));
      Element rhs = apply_bilinear(hleft, project(sa.data, sa.algebra.element(a)), project(tm, sx), coeff);
      if (!equal(lhs, rhs, coeff)) report.projection_compatible = false;
    }
  for (BasisElement x : basis_of(tm.truncated))
    for (BasisElement b : sb.algebra.basis()) {
      Element sx = basis_element(tm.truncated, x);
      Element lhs = project(tm, apply_bilinear(right, sx, sb.algebra.element(b), coeff));
      Element rhs = apply_bilinear(hright, project(tm, sx), project(sb.data, sb.algebra.element(b)), coeff);
      if (!equal(lhs, rhs, coeff)) report.projection_compatible = false;
    }
  return report;
}

}  // namespace formalis
