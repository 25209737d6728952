#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "formalis/coxeter.hpp"
#include "formalis/error.hpp"
#include "formalis/kl.hpp"
#include "formalis/number_theory.hpp"
#include "formalis/parity_data.hpp"
#include "formalis/weights.hpp"

namespace formalis {

struct GroupSpec {
  enum class Kind { none, gm, torus, gl, parabolic, solvable, borel };
  Kind kind = Kind::none;
  int rank = 0;             // torus rank, k of GL_k, torus rank of a solvable group, semisimple rank of a Borel
  int n = 0;                // ambient GL_n of a parabolic, or of a Borel when cartan_type == "GL"
  std::vector<int> blocks;  // Levi blocks of a parabolic in GL_n
  std::string cartan_type;  // Borel: a Cartan type, or "GL"
};

struct SpaceSpec {
  enum class Kind { point, grassmannian, full_flag, partial_flag, product };
  Kind kind = Kind::point;
  int k = 0, n = 0;               // Gr(k,n)
  std::string cartan_type;        // flag varieties
  int rank = 0;
  std::set<int> parabolic;        // 1-based generators of the parabolic (partial flags)
  std::shared_ptr<const SpaceSpec> left, right;  // product factors, each with its own group
  GroupSpec group;
  std::optional<bool> bgs_known;  // override of the built-in BGS flag

  static SpaceSpec point() { return {}; }
  static SpaceSpec grassmannian(int k, int n) {
    SpaceSpec s;
    s.kind = Kind::grassmannian;
    s.k = k;
    s.n = n;
    return s;
  }
  static SpaceSpec full_flag(std::string type, int rank) {
    SpaceSpec s;
    s.kind = Kind::full_flag;
    s.cartan_type = std::move(type);
    s.rank = rank;
    return s;
  }
  static SpaceSpec partial_flag(std::string type, int rank, std::set<int> parabolic) {
    SpaceSpec s;
    s.kind = Kind::partial_flag;
    s.cartan_type = std::move(type);
    s.rank = rank;
    s.parabolic = std::move(parabolic);
    return s;
  }
  static SpaceSpec product(SpaceSpec a, SpaceSpec b) {
    SpaceSpec s;
    s.kind = Kind::product;
    s.left = std::make_shared<const SpaceSpec>(std::move(a));
    s.right = std::make_shared<const SpaceSpec>(std::move(b));
    return s;
  }
  SpaceSpec with_group(GroupSpec g) const {
    SpaceSpec s = *this;
    s.group = std::move(g);
    return s;
  }
};

inline GroupSpec group_gm() { return {GroupSpec::Kind::gm, 1, 0, {}, {}}; }
inline GroupSpec group_torus(int r) { return {GroupSpec::Kind::torus, r, 0, {}, {}}; }
inline GroupSpec group_gl(int k) { return {GroupSpec::Kind::gl, k, 0, {}, {}}; }
inline GroupSpec group_parabolic(int n, std::vector<int> blocks) {
  return {GroupSpec::Kind::parabolic, 0, n, std::move(blocks), {}};
}
inline GroupSpec group_solvable(int torus_rank) { return {GroupSpec::Kind::solvable, torus_rank, 0, {}, {}}; }
inline GroupSpec group_borel(std::string type, int rank) { return {GroupSpec::Kind::borel, rank, 0, {}, std::move(type)}; }
inline GroupSpec group_borel_gl(int n) { return {GroupSpec::Kind::borel, 0, n, {}, "GL"}; }

// IC^O-parity of a certificate: holds for every prime outside `excluded`, or is unknown.
struct ParityRule {
  bool known = true;
  std::set<std::uint64_t> excluded;
  std::set<std::string> sources;

  Tristate at(std::uint64_t l) const {
    if (!known) return Tristate::unknown;
    return excluded.count(l) ? Tristate::no : Tristate::yes;
  }
  static ParityRule from(const std::optional<ParityRecord>& r) {
    ParityRule p;
    if (!r) {
      p.known = false;
      return p;
    }
    p.known = r->known;
    p.excluded.insert(r->excluded_primes.begin(), r->excluded_primes.end());
    p.sources.insert(r->source);
    return p;
  }
  friend ParityRule operator&&(const ParityRule& a, const ParityRule& b) {
    ParityRule p;
    p.known = a.known && b.known;
    p.excluded = a.excluded;
    p.excluded.insert(b.excluded.begin(), b.excluded.end());
    p.sources = a.sources;
    p.sources.insert(b.sources.begin(), b.sources.end());
    return p;
  }
};

// Affine lower bound n -> slope*n + offset on the acyclicity of X_n.
struct AcyclicityBound {
  int slope = 0;
  int offset = 0;
  friend bool operator==(const AcyclicityBound&, const AcyclicityBound&) = default;
};

struct ApproximationCert {
  std::string description;
  // Guaranteed acyclicity of the n-th term is the minimum over the bounds; no bounds means no
  // approximation is needed (trivial group).
  std::vector<AcyclicityBound> acyclicity;
  std::optional<WeightSet> wt;  // nullopt: no closed form known
  bool bgs = true;
  ParityRule parity;

  std::optional<int> level(int n) const {
    if (acyclicity.empty()) return std::nullopt;
    int out = std::numeric_limits<int>::max();
    for (const auto& b : acyclicity) out = std::min(out, b.slope * n + b.offset);
    return out;
  }
  // Non-decreasing and unbounded in n.
  bool levels_valid() const {
    return std::all_of(acyclicity.begin(), acyclicity.end(), [](const AcyclicityBound& b) { return b.slope > 0; });
  }
  std::optional<int> wr_value() const { return wt ? std::optional<int>(wr(*wt)) : std::nullopt; }
};

inline ApproximationCert point_cert() {
  ApproximationCert c;
  c.description = "pt";
  c.wt = WeightSet::point();
  return c;
}

// (X_n x Y_n, X x Y, G x H).
inline ApproximationCert approx_product(const ApproximationCert& a, const ApproximationCert& b) {
  ApproximationCert c;
  c.description = "(" + a.description + ") x (" + b.description + ")";
  c.acyclicity = a.acyclicity;
  for (const auto& x : b.acyclicity)
    if (std::find(c.acyclicity.begin(), c.acyclicity.end(), x) == c.acyclicity.end()) c.acyclicity.push_back(x);
  if (a.wt && b.wt) c.wt = wt_product(*a.wt, *b.wt);
  c.bgs = a.bgs && b.bgs;
  c.parity = a.parity && b.parity;
  return c;
}

// From (pt, L) to (pt, P) for a split extension P = K x| L with acyclic kernel K.
inline ApproximationCert approx_split_extension(const ApproximationCert& l, bool acyclic_kernel, const std::string& name) {
  if (!acyclic_kernel) throw DomainError("split extension needs an acyclic kernel");
  ApproximationCert c = l;
  c.description = name + " <- split extension of " + l.description;
  return c;
}

// (E_n x X, X, G) for X with an acyclic G-stable stratification.
inline ApproximationCert approx_balanced(const ApproximationCert& x, const ApproximationCert& g) {
  if (!x.acyclicity.empty()) throw DomainError("balanced product needs a space without its own group action");
  ApproximationCert c;
  c.description = "E_n x_G (" + x.description + ") with (" + g.description + ")";
  c.acyclicity = g.acyclicity;
  if (x.wt && g.wt) c.wt = wt_product(*x.wt, *g.wt);
  c.bgs = x.bgs && g.bgs;
  c.parity = x.parity && g.parity;
  return c;
}

// (pt, G) for the atoms of the grammar. G_m via A^{n+1} - 0 and GL_k via the Stiefel variety
// E(k, k+n), both 2n-connected.
inline ApproximationCert group_cert(const GroupSpec& g, const std::vector<ParityRecord>& parity) {
  const ParityRule point_parity = ParityRule::from(find_parity(parity, "point", 0));
  auto gl = [&](int k) {
    if (k < 1) throw InvalidInput("GL_k needs k >= 1");
    ApproximationCert c;
    c.description = "(pt,GL_" + std::to_string(k) + ") via Gr(" + std::to_string(k) + ",k+n)";
    c.acyclicity = {{2, 0}};
    c.wt = WeightSet::interval(0, k);
    c.parity = point_parity;
    return c;
  };
  auto torus = [&](int r) {
    if (r < 0) throw InvalidInput("torus rank must be non-negative");
    ApproximationCert c = point_cert();
    c.parity = point_parity;
    for (int i = 0; i < r; ++i) c = approx_product(c, gl(1));
    c.description = "(pt,T" + std::to_string(r) + ")";
    return c;
  };
  switch (g.kind) {
    case GroupSpec::Kind::none: {
      ApproximationCert c = point_cert();
      c.parity = point_parity;
      return c;
    }
    case GroupSpec::Kind::gm: {
      ApproximationCert c = gl(1);
      c.description = "(pt,G_m) via P^n";
      return c;
    }
    case GroupSpec::Kind::torus:
      return torus(g.rank);
    case GroupSpec::Kind::gl:
      return gl(g.rank);
    case GroupSpec::Kind::parabolic: {
      if (g.blocks.empty()) throw InvalidInput("parabolic needs Levi block sizes");
      if (std::accumulate(g.blocks.begin(), g.blocks.end(), 0) != g.n)
        throw InvalidInput("Levi blocks must add up to n");
      ApproximationCert levi = point_cert();
      levi.parity = point_parity;
      for (int b : g.blocks) levi = approx_product(levi, gl(b));
      return approx_split_extension(levi, true, "(pt,P in GL_" + std::to_string(g.n) + ")");
    }
    case GroupSpec::Kind::solvable:
      return approx_split_extension(torus(g.rank), true, "(pt,solvable of torus rank " + std::to_string(g.rank) + ")");
    case GroupSpec::Kind::borel: {
      const int r = g.cartan_type == "GL" ? g.n : g.rank;
      if (g.cartan_type != "GL") coxeter_matrix(g.cartan_type, g.rank);
      const std::string name = g.cartan_type == "GL" ? "(pt,B in GL_" + std::to_string(g.n) + ")"
                                                     : "(pt,B of " + g.cartan_type + std::to_string(g.rank) + ")";
      return approx_split_extension(torus(r), true, name);
    }
  }
  throw InvalidInput("unknown group kind");
}

namespace detail {

// Type A partial flag with one node removed is a Grassmannian.
inline std::optional<std::pair<int, int>> as_grassmannian(const SpaceSpec& s) {
  if (s.kind == SpaceSpec::Kind::grassmannian) return std::pair{s.k, s.n};
  if (s.kind != SpaceSpec::Kind::partial_flag || s.cartan_type != "A") return std::nullopt;
  if (static_cast<int>(s.parabolic.size()) != s.rank - 1) return std::nullopt;
  for (int k = 1; k <= s.rank; ++k)
    if (!s.parabolic.count(k)) return std::pair{k, s.rank + 1};
  return std::nullopt;
}

}  // namespace detail

// wt(X) with no group, for flag-type atoms.
inline ApproximationCert space_cert(const SpaceSpec& s, const std::vector<ParityRecord>& parity) {
  ApproximationCert c;
  switch (s.kind) {
    case SpaceSpec::Kind::point:
      c = point_cert();
      c.parity = ParityRule::from(find_parity(parity, "point", 0));
      break;
    case SpaceSpec::Kind::grassmannian:
      if (s.k < 0 || s.n < 1 || s.k > s.n) throw InvalidInput("Gr(k,n) needs 0 <= k <= n, n >= 1");
      c.description = "Gr(" + std::to_string(s.k) + "," + std::to_string(s.n) + ")";
      c.wt = WeightSet::interval(0, std::min(s.k, s.n - s.k));
      c.parity = ParityRule::from(find_parity(parity, "Grassmannian", 0));
      break;
    case SpaceSpec::Kind::full_flag: {
      const int dim = positive_root_count(s.cartan_type, s.rank);
      c.description = "G/B of type " + s.cartan_type + std::to_string(s.rank);
      c.wt = WeightSet::interval(0, dim);
      auto rec = find_parity(parity, s.cartan_type, s.rank);
      c.parity = ParityRule::from(rec ? rec : find_parity(parity, "reductive", 0));
      break;
    }
    case SpaceSpec::Kind::partial_flag: {
      coxeter_matrix(s.cartan_type, s.rank);
      for (int j : s.parabolic)
        if (j < 1 || j > s.rank) throw InvalidInput("parabolic generator out of range");
      if (s.parabolic.empty()) return space_cert(SpaceSpec::full_flag(s.cartan_type, s.rank), parity);
      if (auto gr = detail::as_grassmannian(s)) return space_cert(SpaceSpec::grassmannian(gr->first, gr->second), parity);
      c.description = "G/P of type " + s.cartan_type + std::to_string(s.rank);
      c.wt = std::nullopt;
      c.parity = ParityRule::from(std::nullopt);
      break;
    }
    case SpaceSpec::Kind::product:
      throw InvalidInput("products carry their groups on the factors");
  }
  if (s.bgs_known) c.bgs = *s.bgs_known;
  return c;
}

namespace detail {

// Only actions whose orbits refine the Bruhat stratification are licensed.
inline void check_licensed(const SpaceSpec& s) {
  using K = GroupSpec::Kind;
  const auto& g = s.group;
  if (s.kind == SpaceSpec::Kind::point || g.kind == K::none) return;
  if (g.kind == K::gl || g.kind == K::parabolic)
    throw DomainError("GL_k and parabolic actions are licensed on a point only");
  if (g.kind != K::borel) return;  // tori and solvable groups inside B
  if (auto gr = as_grassmannian(s)) {
    if (g.cartan_type != "GL" || g.n != gr->second)
      throw DomainError("Gr(k,n) carries the Borel of GL_n; got another Borel");
    return;
  }
  if (g.cartan_type == "GL") {
    if (s.cartan_type != "A" || g.n != s.rank + 1) throw DomainError("Borel of GL_n acts on flags of type A_{n-1}");
    return;
  }
  if (g.cartan_type != s.cartan_type || g.rank != s.rank)
    throw DomainError("Borel of type " + g.cartan_type + std::to_string(g.rank) + " does not act on " +
                      s.cartan_type + std::to_string(s.rank) + " flags");
}

}  // namespace detail

// Certificate for (X, G) built through the constructor tree.
inline ApproximationCert build_cert(const SpaceSpec& s, const std::vector<ParityRecord>& parity) {
  if (s.kind == SpaceSpec::Kind::product) {
    if (s.group.kind != GroupSpec::Kind::none) throw InvalidInput("a product space takes its groups from the factors");
    if (!s.left || !s.right) throw InvalidInput("product needs two factors");
    return approx_product(build_cert(*s.left, parity), build_cert(*s.right, parity));
  }
  detail::check_licensed(s);
  const ApproximationCert g = group_cert(s.group, parity);
  if (s.kind == SpaceSpec::Kind::point && s.group.kind != GroupSpec::Kind::none) return g;
  return approx_balanced(space_cert(s, parity), g);
}

// Closed-form weight set of an atom: a space with no group, or a group acting on a point.
inline WeightSet base_weight(const SpaceSpec& s, const std::vector<ParityRecord>& parity = builtin_parity_table()) {
  if (s.kind == SpaceSpec::Kind::product) throw DomainError("products are not atoms");
  std::optional<WeightSet> wt;
  if (s.group.kind == GroupSpec::Kind::none)
    wt = space_cert(s, parity).wt;
  else if (s.kind == SpaceSpec::Kind::point)
    wt = group_cert(s.group, parity).wt;
  else
    throw DomainError("a space with a group action is not an atom");
  if (!wt) throw DomainError("no closed-form weight set for this atom");
  return *wt;
}

struct Reason {
  std::string hypothesis;
  std::string status;  // yes | no | unknown | info
  std::string citation;
  std::string detail;
};

struct Verdict {
  Tristate applicable = Tristate::unknown;
  std::optional<WeightSet> wt;
  std::optional<int> wr;
  std::vector<Reason> reasons;
  long long q = 0;
  std::uint64_t l = 0;
  std::optional<std::uint64_t> order;       // ord_l(q)
  std::optional<bool> separated_at;
  std::optional<bool> l_exceeds_wr;
  std::string description;
};

inline Verdict formality_verdict(const SpaceSpec& s, std::uint64_t l, long long q,
                                 const std::vector<ParityRecord>& parity = default_parity_table()) {
  require_prime(l);
  if (q < 2) throw DomainError("q must be at least 2");
  Verdict v;
  v.q = q;
  v.l = l;
  std::vector<Tristate> hyps;

  std::optional<ApproximationCert> cert;
  try {
    cert = build_cert(s, parity);
  } catch (const DomainError& e) {
    v.reasons.push_back({"approximation exists", "unknown", "approximation constructors", e.what()});
    v.reasons.push_back({"BGS", "unknown", "BGS constructor rules", "no certificate"});
    v.reasons.push_back({"IC^O-parity at l", "unknown", "curated parity data", "no certificate"});
    v.reasons.push_back({"wt(X,G) separated at (q,l)", "unknown", "separatedness", "no weight set"});
    v.applicable = Tristate::unknown;
    return v;
  }
  v.description = cert->description;
  v.wt = cert->wt;
  v.wr = cert->wr_value();

  const bool approx_ok = cert->levels_valid();
  hyps.push_back(approx_ok ? Tristate::yes : Tristate::unknown);
  {
    std::string lv = "trivial group";
    if (auto a = cert->level(1)) lv = "acyclicity level " + std::to_string(*a) + " at n=1, " +
                                     std::to_string(*cert->level(4)) + " at n=4";
    v.reasons.push_back({"approximation exists", to_string(hyps.back()),
                         "products, split extensions and balanced products of approximations", lv});
  }

  hyps.push_back(cert->bgs ? Tristate::yes : Tristate::unknown);
  v.reasons.push_back({"BGS", to_string(hyps.back()), "BGS passes to products, split extensions and balanced products",
                       cert->bgs ? "all factors BGS" : "a factor is not known to be BGS"});

  hyps.push_back(cert->parity.at(l));
  {
    std::string src;
    for (const auto& x : cert->parity.sources) src += (src.empty() ? "" : ",") + x;
    std::string detail = !cert->parity.known ? "modular parity unknown"
                         : cert->parity.excluded.count(l) ? "fails for l = " + std::to_string(l)
                                                          : "holds for l = " + std::to_string(l);
    v.reasons.push_back({"IC^O-parity at l", to_string(hyps.back()), "curated parity data (" + src + ")", detail});
  }

  if (!v.wt) {
    hyps.push_back(Tristate::unknown);
    v.reasons.push_back({"wt(X,G) separated at (q,l)", "unknown", "q^e mod l pairwise distinct", "no closed form for wt"});
  } else if (reduce_mod(q, l) == 0) {
    hyps.push_back(Tristate::no);
    v.separated_at = false;
    v.reasons.push_back({"wt(X,G) separated at (q,l)", "no", "q^e mod l pairwise distinct", "l divides q"});
  } else {
    v.order = multiplicative_order(reduce_mod(q, l), l);
    v.separated_at = separated(*v.wt, q, l);
    hyps.push_back(*v.separated_at ? Tristate::yes : Tristate::no);
    v.reasons.push_back({"wt(X,G) separated at (q,l)", to_string(hyps.back()), "q^e mod l pairwise distinct",
                         "ord_l(q) = " + std::to_string(*v.order) + ", greatest exponent " + std::to_string(v.wt->max())});
  }
  if (v.wr) {
    v.l_exceeds_wr = static_cast<long long>(l) > *v.wr;
    v.reasons.push_back({"l > wr(X,G)", "info", "necessary for some q to separate an interval weight set",
                         "wr = " + std::to_string(*v.wr)});
  }

  if (std::count(hyps.begin(), hyps.end(), Tristate::no))
    v.applicable = Tristate::no;
  else if (std::count(hyps.begin(), hyps.end(), Tristate::unknown))
    v.applicable = Tristate::unknown;
  else
    v.applicable = Tristate::yes;
  return v;
}

}  // namespace formalis
