#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "formalis/approx.hpp"
#include "formalis/bigraded.hpp"
#include "formalis/coxeter.hpp"
#include "formalis/derived.hpp"
#include "formalis/dgg_algebra.hpp"
#include "formalis/error.hpp"
#include "formalis/kl.hpp"
#include "formalis/linalg.hpp"
#include "formalis/tower.hpp"
#include "formalis/weights.hpp"
#include "json.hpp"

namespace formalis::io {

using nlohmann::json;

// ---------------------------------------------------------------------------------------------
// Scalars

// Integers go out as JSON numbers when they fit in int64, otherwise as decimal strings.
inline json integer_to_json(const Integer& x) {
  if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(x);
  return x.str();
}

inline Integer integer_from_json(const json& j) {
  if (j.is_number_integer()) return Integer(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return Integer(j.get<std::uint64_t>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos)
      throw InvalidInput("'" + s + "' is not an integer");
    return Integer(s);
  }
  throw InvalidInput("expected an integer, got " + j.dump());
}

template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("field '") + key + "' has the wrong type");
  }
}

inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline json matrix_to_json(const IntMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(integer_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

// An empty list is a 0x0 matrix; shapes with zero columns are written as lists of empty rows.
inline IntMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("matrix must be a list of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? (j[0].is_array() ? j[0].size() : 0) : 0;
  IntMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw InvalidInput("matrix rows must be lists of equal length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = integer_from_json(j[r][c]);
  }
  return m;
}

inline json vector_to_json(const IntVector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(integer_to_json(x));
  return out;
}

// ---------------------------------------------------------------------------------------------
// Bigraded modules

inline Coefficients coefficients_from_json(const json& j, const Coefficients* fallback = nullptr) {
  if (!j.contains("mode")) {
    if (fallback) return *fallback;
    return Coefficients::integers();
  }
  const auto mode = get_field<std::string>(j, "mode");
  if (mode == "Z") return Coefficients::integers();
  if (mode != "Fl") throw InvalidInput("mode must be \"Z\" or \"Fl\"");
  const auto l = get_field<std::int64_t>(j, "l");
  if (l < 2 || !is_prime(static_cast<std::uint64_t>(l))) throw InvalidInput("l must be a prime");
  return Coefficients::field(static_cast<std::uint64_t>(l));
}

inline void coefficients_to_json(const Coefficients& c, json& out) {
  if (c.is_field()) {
    out["mode"] = "Fl";
    out["l"] = *c.prime;
  } else {
    out["mode"] = "Z";
  }
}

// Components in the order they are listed; the basis of an algebra follows this order.
inline std::vector<std::pair<Bidegree, std::size_t>> components_from_json(const json& j) {
  const json& comps = need(j, "components");
  if (!comps.is_array()) throw InvalidInput("components must be a list");
  std::vector<std::pair<Bidegree, std::size_t>> out;
  std::set<Bidegree> seen;
  for (const auto& c : comps) {
    Bidegree b{get_field<int>(c, "i"), get_field<int>(c, "j")};
    const auto r = get_field<std::int64_t>(c, "rank");
    if (r < 0) throw InvalidInput("negative rank at " + to_string(b));
    if (!seen.insert(b).second) throw InvalidInput("component " + to_string(b) + " listed twice");
    if (r > 0) out.push_back({b, static_cast<std::size_t>(r)});
  }
  return out;
}

inline BigradedModule module_from_json(const json& j, const Coefficients* fallback = nullptr) {
  BigradedModule m(coefficients_from_json(j, fallback));
  for (const auto& [b, r] : components_from_json(j)) m.set_rank(b, r);
  if (j.contains("differentials")) {
    const json& ds = j.at("differentials");
    if (!ds.is_array()) throw InvalidInput("differentials must be a list");
    std::set<Bidegree> seen;
    for (const auto& d : ds) {
      Bidegree b{get_field<int>(d, "i"), get_field<int>(d, "j")};
      if (!seen.insert(b).second) throw InvalidInput("differential at " + to_string(b) + " listed twice");
      IntMatrix mat = matrix_from_json(need(d, "matrix"));
      const std::size_t rows = m.rank(b.next()), cols = m.rank(b);
      if (mat.rows() == 0 && mat.cols() == 0 && rows * cols == 0) continue;
      if (mat.rows() != rows || mat.cols() != cols)
        throw InvalidInput("differential at " + to_string(b) + " must be " + std::to_string(rows) + "x" +
                           std::to_string(cols));
      m.set_differential(b, std::move(mat));
    }
  }
  m.validate();
  return m;
}

inline json module_to_json(const BigradedModule& m) {
  json out;
  json comps = json::array();
  for (const auto& [b, r] : m.components()) comps.push_back({{"i", b.internal}, {"j", b.cohom}, {"rank", r}});
  json ds = json::array();
  for (const auto& [b, d] : m.differentials())
    ds.push_back({{"i", b.internal}, {"j", b.cohom}, {"matrix", matrix_to_json(d)}});
  out["components"] = comps;
  out["differentials"] = ds;
  coefficients_to_json(m.coefficients(), out);
  return out;
}

inline json cohomology_to_json(const CohomologyTable& h) {
  json out = json::array();
  for (const auto& [b, g] : h.groups) {
    json t = json::array();
    for (const auto& x : g.torsion) t.push_back(integer_to_json(x));
    out.push_back({{"i", b.internal}, {"j", b.cohom}, {"rank", g.free_rank}, {"torsion", t}});
  }
  return out;
}

inline CohomologyTable cohomology_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("cohomology table must be a list");
  CohomologyTable h;
  for (const auto& e : j) {
    CohomologyGroup g;
    const auto r = get_field<std::int64_t>(e, "rank");
    if (r < 0) throw InvalidInput("negative rank");
    g.free_rank = static_cast<std::size_t>(r);
    if (e.contains("torsion"))
      for (const auto& t : e.at("torsion")) {
        Integer x = integer_from_json(t);
        if (x <= 1) throw InvalidInput("torsion divisors must exceed 1");
        g.torsion.push_back(x);
      }
    h.set({get_field<int>(e, "i"), get_field<int>(e, "j")}, g);
  }
  return h;
}

// ---------------------------------------------------------------------------------------------
// Labelled bases, elements, structure constants

inline BasisLabels labels_from_json(const json& j, const std::vector<std::pair<Bidegree, std::size_t>>& comps,
                                    const BigradedModule& m) {
  if (!j.contains("basis")) return default_labels(m);
  const json& names = j.at("basis");
  std::size_t total = 0;
  for (const auto& [b, r] : comps) total += r;
  if (!names.is_array() || names.size() != total)
    throw InvalidInput("basis must list " + std::to_string(total) + " names in component order");
  BasisLabels labels;
  std::size_t k = 0;
  for (const auto& [b, r] : comps)
    for (std::size_t t = 0; t < r; ++t, ++k) {
      if (!names[k].is_string()) throw InvalidInput("basis names must be strings");
      labels[b].push_back(names[k].get<std::string>());
    }
  return labels;
}

inline json labels_to_json(const LabelledModule& m) {
  json out = json::array();
  for (const auto& [b, names] : m.labels())
    for (const auto& n : names) out.push_back(n);
  return out;
}

inline Element element_from_json(const LabelledModule& m, const json& j) {
  if (j.is_string()) return m.element(m.find(j.get<std::string>()));
  if (!j.is_array()) throw InvalidInput("element must be a basis name or a list of {c, coeff}");
  Element x;
  for (const auto& t : j) add_scaled(x, m.element(m.find(get_field<std::string>(t, "c"))), integer_from_json(need(t, "coeff")));
  return normalized(std::move(x), m.coefficients());
}

inline json element_to_json(const LabelledModule& m, const Element& x) {
  json out = json::array();
  for (const auto& [e, c] : terms(x)) out.push_back({{"c", m.label(e)}, {"coeff", integer_to_json(c)}});
  return out;
}

inline StructureConstants constants_from_json(const json& j, const char* key, const LabelledModule& left,
                                              const LabelledModule& right, const LabelledModule& target) {
  StructureConstants c;
  if (!j.contains(key)) return c;
  const json& list = j.at(key);
  if (!list.is_array()) throw InvalidInput(std::string(key) + " must be a list");
  for (const auto& e : list) {
    const BasisElement a = left.find(get_field<std::string>(e, "a"));
    const BasisElement b = right.find(get_field<std::string>(e, "b"));
    if (c.count({a, b})) throw InvalidInput(std::string(key) + " lists a pair twice");
    c[{a, b}] = element_from_json(target, need(e, "out"));
  }
  return c;
}

inline json constants_to_json(const StructureConstants& c, const LabelledModule& left, const LabelledModule& right,
                              const LabelledModule& target) {
  json out = json::array();
  for (const auto& [key, v] : c) {
    if (v.empty()) continue;
    out.push_back({{"a", left.label(key.first)}, {"b", right.label(key.second)}, {"out", element_to_json(target, v)}});
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Algebras and bimodules

inline DggAlgebra algebra_from_json(const json& j, const Coefficients* fallback = nullptr) {
  BigradedModule m = module_from_json(j, fallback);
  const auto comps = components_from_json(j);
  LabelledModule basis(m, labels_from_json(j, comps, m));
  StructureConstants product = constants_from_json(j, "product", basis, basis, basis);
  Element unit = element_from_json(basis, need(j, "unit"));
  return DggAlgebra(m, basis.labels(), std::move(product), std::move(unit));
}

inline json algebra_to_json(const DggAlgebra& a) {
  json out = module_to_json(a.module());
  out["basis"] = labels_to_json(a);
  out["product"] = constants_to_json(a.product(), a, a, a);
  const auto t = terms(a.unit());
  if (t.size() == 1 && t[0].second == 1)
    out["unit"] = a.label(t[0].first);
  else
    out["unit"] = element_to_json(a, a.unit());
  return out;
}

// {"left": algebra, "right": algebra, module fields, "basis", "leftAction": [{"a","b","out"}],
//  "rightAction": [{"a","b","out"}]}; in leftAction a names an algebra element and b a module
// element, in rightAction the other way round.
inline DggBimodule bimodule_from_json(const json& j) {
  BigradedModule m = module_from_json(j);
  const Coefficients coeff = m.coefficients();
  DggAlgebra left = algebra_from_json(need(j, "left"), &coeff);
  DggAlgebra right = algebra_from_json(need(j, "right"), &coeff);
  const auto comps = components_from_json(j);
  LabelledModule basis(m, labels_from_json(j, comps, m));
  StructureConstants la = constants_from_json(j, "leftAction", left, basis, basis);
  StructureConstants ra = constants_from_json(j, "rightAction", basis, right, basis);
  return DggBimodule(std::move(left), std::move(right), m, basis.labels(), std::move(la), std::move(ra));
}

// An algebra given where a bimodule is expected is read as its regular bimodule.
inline DggBimodule bimodule_or_regular_from_json(const json& j) {
  if (j.contains("left") || j.contains("right")) return bimodule_from_json(j);
  return regular_bimodule(algebra_from_json(j));
}

inline json bimodule_to_json(const DggBimodule& m) {
  json out = module_to_json(m.module());
  out["basis"] = labels_to_json(m);
  out["left"] = algebra_to_json(m.left());
  out["right"] = algebra_to_json(m.right());
  out["leftAction"] = constants_to_json(m.left_action(), m.left(), m, m);
  out["rightAction"] = constants_to_json(m.right_action(), m, m.right(), m);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Towers: {"terms": [graded algebra], "maps": [[{"degree": k, "matrix": ...}]]}, maps[i] = psi_i.

inline GradedAlgebraTower tower_from_json(const json& j) {
  GradedAlgebraTower t;
  const Coefficients coeff = coefficients_from_json(j);
  const json& terms = need(j, "terms");
  if (!terms.is_array()) throw InvalidInput("terms must be a list");
  for (const auto& term : terms) t.terms.push_back(algebra_from_json(term, &coeff));
  if (j.contains("maps")) {
    const json& maps = j.at("maps");
    if (!maps.is_array()) throw InvalidInput("maps must be a list");
    for (const auto& psi : maps) {
      if (!psi.is_array()) throw InvalidInput("each map is a list of {degree, matrix}");
      GradedMap f;
      for (const auto& e : psi) {
        const int k = get_field<int>(e, "degree");
        if (f.count(k)) throw InvalidInput("map lists degree " + std::to_string(k) + " twice");
        f[k] = matrix_from_json(need(e, "matrix"));
      }
      t.maps.push_back(std::move(f));
    }
  }
  if (t.maps.size() + 1 != t.terms.size() && !t.terms.empty())
    throw InvalidInput("a tower with " + std::to_string(t.terms.size()) + " terms needs " +
                       std::to_string(t.terms.size() - 1) + " maps");
  return t;
}

inline json graded_map_to_json(const GradedMap& f) {
  json out = json::array();
  for (const auto& [k, m] : f) out.push_back({{"degree", k}, {"matrix", matrix_to_json(m)}});
  return out;
}

inline json tower_to_json(const GradedAlgebraTower& t) {
  json out;
  json terms = json::array();
  for (const auto& a : t.terms) terms.push_back(algebra_to_json(a));
  json maps = json::array();
  for (const auto& f : t.maps) maps.push_back(graded_map_to_json(f));
  out["terms"] = terms;
  out["maps"] = maps;
  if (!t.terms.empty()) coefficients_to_json(t.terms.front().coefficients(), out);
  return out;
}

inline json limit_to_json(const LimitAlgebra& lim) {
  json dims = json::array();
  for (int k = 0; k <= lim.certificate.through_degree; ++k) dims.push_back(graded_dim(lim.algebra, k));
  json stable = json::array();
  for (const auto& [k, i] : lim.certificate.stable_from) stable.push_back({{"degree", k}, {"fromTerm", i}});
  return {{"throughDegree", lim.certificate.through_degree},
          {"dimensions", dims},
          {"algebra", algebra_to_json(lim.algebra)},
          {"certificate",
           {{"sourceTerm", lim.certificate.source_term},
            {"stableFrom", stable},
            {"agreeingTerms", lim.certificate.agreeing_terms}}}};
}

// ---------------------------------------------------------------------------------------------
// Reports

inline json smith_to_json(const SmithForm& s) {
  json diag = json::array();
  for (const auto& d : s.diagonal) diag.push_back(integer_to_json(d));
  return {{"diagonal", diag}, {"leftTransform", matrix_to_json(s.left)}, {"rightTransform", matrix_to_json(s.right)}};
}

inline json roof_to_json(const RoofReport& r) {
  json out{{"pure", r.pure},
           {"inclusionQuasiIso", r.inclusion_quasi_iso},
           {"projectionQuasiIso", r.projection_quasi_iso},
           {"inclusionMultiplicative", r.inclusion_multiplicative},
           {"projectionMultiplicative", r.projection_multiplicative},
           {"certified", r.certified()},
           {"cohomology", cohomology_to_json(r.cohomology)},
           {"truncatedCohomology", cohomology_to_json(r.truncated_cohomology)},
           {"notes", r.notes}};
  if (r.weight) out["weight"] = *r.weight;
  if (r.impurity_witness) out["impurityWitness"] = {r.impurity_witness->internal, r.impurity_witness->cohom};
  if (r.inclusion_failure) out["inclusionFailure"] = {r.inclusion_failure->internal, r.inclusion_failure->cohom};
  return out;
}

inline json bimodule_roof_to_json(const BimoduleRoofReport& r) {
  return {{"inclusionQuasiIso", r.inclusion_quasi_iso}, {"inclusionCompatible", r.inclusion_compatible},
          {"projectionQuasiIso", r.projection_quasi_iso}, {"projectionCompatible", r.projection_compatible},
          {"certified", r.certified()}, {"cohomology", cohomology_to_json(r.cohomology)}, {"notes", r.notes}};
}

inline json stalk_to_json(const CoxeterSystem& sys, const StalkTable& t) {
  json entries = json::array();
  for (const auto& e : t.entries)
    entries.push_back({{"degree", e.degree}, {"rank", e.rank}, {"weight", e.weight_exponent}});
  return {{"lambda", sys.format(t.lambda)}, {"mu", sys.format(t.mu)}, {"dLambda", t.d_lambda},
          {"polynomial", t.polynomial.to_string()}, {"entries", entries}, {"even", t.even()}, {"tate", t.tate()}};
}

// ---------------------------------------------------------------------------------------------
// Coxeter systems: {"type": "A", "rank": 3} or {"matrix": [[1,3],[3,1]]}.

inline CoxeterSystem coxeter_from_json(const json& j) {
  if (j.contains("matrix")) {
    const json& mj = j.at("matrix");
    if (!mj.is_array()) throw InvalidInput("matrix must be a list of rows");
    CoxeterMatrix m;
    for (const auto& row : mj) {
      if (!row.is_array()) throw InvalidInput("matrix rows must be lists");
      std::vector<int> r;
      for (const auto& x : row) {
        if (!x.is_number_integer()) throw InvalidInput("Coxeter matrix entries must be integers");
        r.push_back(x.get<int>());
      }
      m.push_back(std::move(r));
    }
    return CoxeterSystem(std::move(m));
  }
  return CoxeterSystem::of_type(get_field<std::string>(j, "type"), get_field<int>(j, "rank"));
}

// ---------------------------------------------------------------------------------------------
// Space specs: {"space": {...}, "group": {...}}; a product space carries full specs as factors.

inline GroupSpec group_from_json(const json& j) {
  const auto kind = get_field<std::string>(j, "kind");
  if (kind == "none") return {};
  if (kind == "gm") return group_gm();
  if (kind == "torus") return group_torus(get_field<int>(j, "rank"));
  if (kind == "gl") return group_gl(get_field<int>(j, "k"));
  if (kind == "parabolic") return group_parabolic(get_field<int>(j, "n"), get_field<std::vector<int>>(j, "blocks"));
  if (kind == "solvable") return group_solvable(get_field<int>(j, "torusRank"));
  if (kind == "borel") {
    if (j.value("ambient", std::string()) == "GL") return group_borel_gl(get_field<int>(j, "n"));
    return group_borel(get_field<std::string>(j, "type"), get_field<int>(j, "rank"));
  }
  throw InvalidInput("unknown group kind '" + kind + "'");
}

inline json group_to_json(const GroupSpec& g) {
  using K = GroupSpec::Kind;
  switch (g.kind) {
    case K::none: return {{"kind", "none"}};
    case K::gm: return {{"kind", "gm"}};
    case K::torus: return {{"kind", "torus"}, {"rank", g.rank}};
    case K::gl: return {{"kind", "gl"}, {"k", g.rank}};
    case K::parabolic: return {{"kind", "parabolic"}, {"n", g.n}, {"blocks", g.blocks}};
    case K::solvable: return {{"kind", "solvable"}, {"torusRank", g.rank}};
    case K::borel:
      if (g.cartan_type == "GL") return {{"kind", "borel"}, {"ambient", "GL"}, {"n", g.n}};
      return {{"kind", "borel"}, {"type", g.cartan_type}, {"rank", g.rank}};
  }
  return {};
}

inline SpaceSpec space_spec_from_json(const json& j) {
  const json& sp = need(j, "space");
  const auto kind = get_field<std::string>(sp, "kind");
  SpaceSpec s;
  if (kind == "point")
    s = SpaceSpec::point();
  else if (kind == "grassmannian")
    s = SpaceSpec::grassmannian(get_field<int>(sp, "k"), get_field<int>(sp, "n"));
  else if (kind == "full_flag")
    s = SpaceSpec::full_flag(get_field<std::string>(sp, "type"), get_field<int>(sp, "rank"));
  else if (kind == "partial_flag") {
    const auto gens = get_field<std::vector<int>>(sp, "parabolic");
    s = SpaceSpec::partial_flag(get_field<std::string>(sp, "type"), get_field<int>(sp, "rank"), {gens.begin(), gens.end()});
  } else if (kind == "product")
    s = SpaceSpec::product(space_spec_from_json(need(sp, "left")), space_spec_from_json(need(sp, "right")));
  else
    throw InvalidInput("unknown space kind '" + kind + "'");
  if (sp.contains("bgsKnown")) s.bgs_known = get_field<bool>(sp, "bgsKnown");
  if (j.contains("group")) s.group = group_from_json(j.at("group"));
  return s;
}

inline json space_spec_to_json(const SpaceSpec& s) {
  json sp;
  switch (s.kind) {
    case SpaceSpec::Kind::point: sp = {{"kind", "point"}}; break;
    case SpaceSpec::Kind::grassmannian: sp = {{"kind", "grassmannian"}, {"k", s.k}, {"n", s.n}}; break;
    case SpaceSpec::Kind::full_flag: sp = {{"kind", "full_flag"}, {"type", s.cartan_type}, {"rank", s.rank}}; break;
    case SpaceSpec::Kind::partial_flag:
      sp = {{"kind", "partial_flag"}, {"type", s.cartan_type}, {"rank", s.rank},
            {"parabolic", std::vector<int>(s.parabolic.begin(), s.parabolic.end())}};
      break;
    case SpaceSpec::Kind::product:
      sp = {{"kind", "product"}, {"left", space_spec_to_json(*s.left)}, {"right", space_spec_to_json(*s.right)}};
      break;
  }
  if (s.bgs_known) sp["bgsKnown"] = *s.bgs_known;
  return {{"space", sp}, {"group", group_to_json(s.group)}};
}

inline json verdict_to_json(const Verdict& v) {
  json reasons = json::array();
  for (const auto& r : v.reasons)
    reasons.push_back({{"hypothesis", r.hypothesis}, {"status", r.status}, {"citation", r.citation}, {"detail", r.detail}});
  json out{{"applicable", to_string(v.applicable)}, {"reasons", reasons}, {"l", v.l}, {"q", v.q},
           {"description", v.description}};
  out["wt"] = v.wt ? json(v.wt->list()) : json(nullptr);
  out["wr"] = v.wr ? json(*v.wr) : json(nullptr);
  if (v.order) out["order"] = *v.order;
  if (v.separated_at) out["separated"] = *v.separated_at;
  if (v.l_exceeds_wr) out["lExceedsWr"] = *v.l_exceeds_wr;
  return out;
}

inline WeightSet weight_set_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("weight set must be a list of exponents");
  WeightSet w;
  for (const auto& e : j) {
    if (!e.is_number_integer() || e.get<int>() < 0) throw InvalidInput("exponents must be non-negative integers");
    w.exponents.insert(e.get<int>());
  }
  return w;
}

}  // namespace formalis::io
