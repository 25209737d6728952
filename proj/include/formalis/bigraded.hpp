#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "formalis/error.hpp"
#include "formalis/linalg.hpp"

namespace formalis {

// (internal degree i, cohomological degree j). Differentials raise j by one.
struct Bidegree {
  int internal = 0;
  int cohom = 0;

  Bidegree next() const { return {internal, cohom + 1}; }
  Bidegree previous() const { return {internal, cohom - 1}; }
  bool on_diagonal() const { return internal == cohom; }

  friend Bidegree operator+(Bidegree a, Bidegree b) { return {a.internal + b.internal, a.cohom + b.cohom}; }
  friend auto operator<=>(const Bidegree&, const Bidegree&) = default;
  friend bool operator==(const Bidegree&, const Bidegree&) = default;
};

inline std::string to_string(Bidegree b) {
  return "(" + std::to_string(b.internal) + "," + std::to_string(b.cohom) + ")";
}

struct CohomologyGroup {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;  // elementary divisors > 1, divisibility-ordered

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  friend bool operator==(const CohomologyGroup&, const CohomologyGroup&) = default;
};

// Only nonzero groups are stored.
struct CohomologyTable {
  std::map<Bidegree, CohomologyGroup> groups;

  CohomologyGroup at(Bidegree b) const {
    auto it = groups.find(b);
    return it == groups.end() ? CohomologyGroup{} : it->second;
  }
  void set(Bidegree b, CohomologyGroup g) {
    if (g.is_zero())
      groups.erase(b);
    else
      groups[b] = std::move(g);
  }
  bool is_zero() const { return groups.empty(); }
  friend bool operator==(const CohomologyTable&, const CohomologyTable&) = default;
};

// Finite free bigraded cochain complex. Components of rank zero and zero differentials are
// never stored, so structurally equal modules compare equal.
class BigradedModule {
 public:
  BigradedModule() = default;
  explicit BigradedModule(Coefficients coeff) : coeff_(coeff) {}

  const Coefficients& coefficients() const { return coeff_; }

  void set_rank(Bidegree b, std::size_t rank) {
    if (rank == 0)
      ranks_.erase(b);
    else
      ranks_[b] = rank;
  }

  // Differential from b to b.next(); shape rank(b.next()) x rank(b).
  void set_differential(Bidegree source, IntMatrix d) {
    d = d.reduced(coeff_);
    if (d.is_zero())
      differentials_.erase(source);
    else
      differentials_[source] = std::move(d);
  }

  std::size_t rank(Bidegree b) const {
    auto it = ranks_.find(b);
    return it == ranks_.end() ? 0 : it->second;
  }

  IntMatrix differential(Bidegree source) const {
    auto it = differentials_.find(source);
    if (it != differentials_.end()) return it->second;
    return IntMatrix(rank(source.next()), rank(source));
  }

  const std::map<Bidegree, std::size_t>& components() const { return ranks_; }
  const std::map<Bidegree, IntMatrix>& differentials() const { return differentials_; }

  std::size_t total_dimension() const {
    std::size_t n = 0;
    for (const auto& [b, r] : ranks_) n += r;
    return n;
  }

  bool empty() const { return ranks_.empty(); }

  // Shapes and d*d = 0; throws InvalidInput.
  void validate() const {
    for (const auto& [b, d] : differentials_) {
      if (d.rows() != rank(b.next()) || d.cols() != rank(b))
        throw InvalidInput("differential at " + to_string(b) + " has shape " + std::to_string(d.rows()) + "x" +
                           std::to_string(d.cols()) + ", expected " + std::to_string(rank(b.next())) + "x" +
                           std::to_string(rank(b)));
    }
    for (const auto& [b, d] : differentials_) {
      auto next = differentials_.find(b.next());
      if (next == differentials_.end()) continue;
      if (!(next->second * d).reduced(coeff_).is_zero())
        throw InvalidInput("d o d != 0 starting at bidegree " + to_string(b));
    }
  }

  friend bool operator==(const BigradedModule&, const BigradedModule&) = default;

 private:
  Coefficients coeff_;
  std::map<Bidegree, std::size_t> ranks_;
  std::map<Bidegree, IntMatrix> differentials_;
};

inline IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
  for (std::size_t r = 0; r < b.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c) out(a.rows() + r, a.cols() + c) = b(r, c);
  return out;
}

inline BigradedModule direct_sum(const BigradedModule& a, const BigradedModule& b) {
  if (!(a.coefficients() == b.coefficients())) throw InvalidInput("direct sum of modules over different coefficients");
  BigradedModule out(a.coefficients());
  std::set<Bidegree> degrees;
  for (const auto& [d, r] : a.components()) degrees.insert(d);
  for (const auto& [d, r] : b.components()) degrees.insert(d);
  for (Bidegree d : degrees) out.set_rank(d, a.rank(d) + b.rank(d));
  for (Bidegree d : degrees) out.set_differential(d, block_diagonal(a.differential(d), b.differential(d)));
  return out;
}

inline CohomologyTable cohomology(const BigradedModule& m) {
  m.validate();
  const Coefficients& coeff = m.coefficients();
  CohomologyTable table;
  for (const auto& [b, n] : m.components()) {
    const std::size_t rank_out = rank(m.differential(b), coeff);
    const auto incoming = smith_normal_form(m.differential(b.previous()));
    CohomologyGroup group;
    std::size_t rank_in = 0;
    for (const auto& d : incoming.diagonal) {
      if (coeff.is_zero(d)) continue;
      ++rank_in;
      if (!coeff.is_field() && d > 1) group.torsion.push_back(d);
    }
    group.free_rank = n - rank_out - rank_in;
    table.set(b, std::move(group));
  }
  return table;
}

// Weight n with every nonzero H^{i,j} at i = j + n; nullopt when no such n exists.
// The zero module reports weight 0.
inline std::optional<int> purity_weight(const CohomologyTable& h) {
  std::optional<int> weight;
  for (const auto& [b, g] : h.groups) {
    const int w = b.internal - b.cohom;
    if (weight && *weight != w) return std::nullopt;
    weight = w;
  }
  return weight.value_or(0);
}

inline std::optional<int> purity_weight(const BigradedModule& m) { return purity_weight(cohomology(m)); }

// First nonzero cohomology group off the diagonal, if any.
inline std::optional<Bidegree> off_diagonal_witness(const CohomologyTable& h) {
  for (const auto& [b, g] : h.groups)
    if (!b.on_diagonal()) return b;
  return std::nullopt;
}

// Degreewise matrices target.rank(b) x source.rank(b); absent blocks are zero.
struct ChainMap {
  std::map<Bidegree, IntMatrix> blocks;

  IntMatrix at(Bidegree b, const BigradedModule& source, const BigradedModule& target) const {
    auto it = blocks.find(b);
    if (it != blocks.end()) return it->second;
    return IntMatrix(target.rank(b), source.rank(b));
  }
};

inline std::set<Bidegree> support(const BigradedModule& a, const BigradedModule& b) {
  std::set<Bidegree> out;
  for (const auto& [d, r] : a.components()) out.insert(d);
  for (const auto& [d, r] : b.components()) out.insert(d);
  return out;
}

inline bool is_chain_map(const ChainMap& f, const BigradedModule& source, const BigradedModule& target) {
  const Coefficients& coeff = target.coefficients();
  for (const auto& [b, m] : f.blocks)
    if (m.rows() != target.rank(b) || m.cols() != source.rank(b)) return false;
  for (Bidegree b : support(source, target)) {
    IntMatrix lhs = target.differential(b) * f.at(b, source, target);
    IntMatrix rhs = f.at(b.next(), source, target) * source.differential(b);
    if (!(lhs - rhs).reduced(coeff).is_zero()) return false;
  }
  return true;
}

// Cone^{i,j} = source^{i,j+1} (+) target^{i,j};  d(c, x) = (-d c, f c + d x).
inline BigradedModule mapping_cone(const ChainMap& f, const BigradedModule& source, const BigradedModule& target) {
  BigradedModule cone(target.coefficients());
  std::set<Bidegree> degrees;
  for (Bidegree b : support(source, target)) {
    degrees.insert(b);
    degrees.insert(b.previous());
  }
  for (Bidegree b : degrees) cone.set_rank(b, source.rank(b.next()) + target.rank(b));
  for (Bidegree b : degrees) {
    const std::size_t s1 = source.rank(b.next()), t0 = target.rank(b);
    const std::size_t s2 = source.rank(b.next().next()), t1 = target.rank(b.next());
    IntMatrix d(s2 + t1, s1 + t0);
    const IntMatrix ds = source.differential(b.next());
    const IntMatrix fb = f.at(b.next(), source, target);
    const IntMatrix dt = target.differential(b);
    for (std::size_t r = 0; r < s2; ++r)
      for (std::size_t c = 0; c < s1; ++c) d(r, c) = -ds(r, c);
    for (std::size_t r = 0; r < t1; ++r) {
      for (std::size_t c = 0; c < s1; ++c) d(s2 + r, c) = fb(r, c);
      for (std::size_t c = 0; c < t0; ++c) d(s2 + r, s1 + c) = dt(r, c);
    }
    cone.set_differential(b, std::move(d));
  }
  return cone;
}

struct QuasiIsoCheck {
  bool chain_map = false;
  bool quasi_isomorphism = false;
  std::optional<Bidegree> failing_cone_degree;  // first nonzero cone cohomology
};

inline QuasiIsoCheck check_quasi_isomorphism(const ChainMap& f, const BigradedModule& source,
                                             const BigradedModule& target) {
  QuasiIsoCheck out;
  out.chain_map = is_chain_map(f, source, target);
  if (!out.chain_map) return out;
  const auto h = cohomology(mapping_cone(f, source, target));
  out.quasi_isomorphism = h.is_zero();
  if (!h.is_zero()) out.failing_cone_degree = h.groups.begin()->first;
  return out;
}

// The diagonal truncation S(M) of a pure weight-0 module together with the roof maps
// M <- S(M) -> H(M).
struct DiagonalTruncation {
  BigradedModule truncated;
  ChainMap inclusion;
  // Cohomology as a complex with zero differential, plus the projection S(M) -> H(M) and a
  // lift H(M) -> S(M) on the diagonal. Absent when integral cohomology has torsion.
  std::optional<BigradedModule> cohomology_module;
  std::optional<ChainMap> projection;
  std::map<Bidegree, IntMatrix> lifts;
  bool cohomology_has_torsion = false;

  // Coordinates in S(M) of a vector of M at bidegree b; nullopt when it does not lie in S(M).
  std::optional<IntVector> to_truncated(Bidegree b, const IntVector& v) const {
    const Coefficients& coeff = truncated.coefficients();
    if (b.internal > b.cohom) return v;
    if (b.internal < b.cohom) {
      if (!coeff.is_zero(v)) return std::nullopt;
      return IntVector{};
    }
    auto it = kernel_solvers.find(b);
    if (it == kernel_solvers.end()) {
      if (!coeff.is_zero(v)) return std::nullopt;
      return IntVector{};
    }
    return it->second.solve(v);
  }

  std::map<Bidegree, LinearSolver> kernel_solvers;
};

inline std::string not_pure_message(Bidegree witness) {
  return "not pure of weight 0: nonzero cohomology at bidegree " + to_string(witness);
}

// Builds S(M). With require_pure the input must be pure of weight 0 (NotPure otherwise);
// without it the same subcomplex is formed but no cohomology data is attached.
inline DiagonalTruncation diagonal_truncation(const BigradedModule& m, bool require_pure = true) {
  const auto h = cohomology(m);
  const bool pure = !off_diagonal_witness(h).has_value();
  if (require_pure && !pure) {
    const Bidegree w = *off_diagonal_witness(h);
    throw NotPure(not_pure_message(w), w.internal, w.cohom);
  }
  const Coefficients& coeff = m.coefficients();
  DiagonalTruncation out;
  out.truncated = BigradedModule(coeff);

  std::map<Bidegree, IntMatrix> kernels;  // columns span Z^{ii}
  for (const auto& [b, n] : m.components()) {
    if (b.internal > b.cohom) {
      out.truncated.set_rank(b, n);
      out.inclusion.blocks[b] = IntMatrix::identity(n);
    } else if (b.on_diagonal()) {
      auto basis = kernel_basis(m.differential(b), coeff);
      if (basis.empty()) continue;
      IntMatrix k = IntMatrix::from_columns(basis, n);
      out.truncated.set_rank(b, k.cols());
      out.kernel_solvers.emplace(b, LinearSolver(k, coeff));
      out.inclusion.blocks[b] = k;
      kernels.emplace(b, std::move(k));
    }
  }
  for (const auto& [b, n] : out.truncated.components()) {
    const Bidegree up = b.next();
    if (up.internal < up.cohom || out.truncated.rank(up) == 0) continue;
    const IntMatrix d = m.differential(b);
    if (up.internal > up.cohom) {
      out.truncated.set_differential(b, d);
      continue;
    }
    // Lands on the diagonal: rewrite in kernel coordinates.
    IntMatrix coords(out.truncated.rank(up), n);
    for (std::size_t c = 0; c < n; ++c) {
      auto x = out.kernel_solvers.at(up).solve(d.column(c));
      if (!x) throw InvalidInput("image of d does not lie in the kernel at " + to_string(up));
      for (std::size_t r = 0; r < x->size(); ++r) coords(r, c) = (*x)[r];
    }
    out.truncated.set_differential(b, std::move(coords));
  }
  if (!pure) return out;

  // H^{ii} = Z^{ii} / B^{ii}, presented through the Smith form of B in kernel coordinates.
  BigradedModule hmod(coeff);
  ChainMap projection;
  for (const auto& [b, n] : out.truncated.components()) {
    if (!b.on_diagonal()) continue;
    const IntMatrix incoming = out.truncated.differential(b.previous());
    const auto snf = smith_normal_form(incoming);
    std::vector<std::size_t> survivors;
    for (std::size_t k = 0; k < n; ++k) {
      if (k >= snf.rank() || coeff.is_zero(snf.diagonal[k])) {
        survivors.push_back(k);
      } else if (!coeff.is_field() && snf.diagonal[k] > 1) {
        out.cohomology_has_torsion = true;
      }
    }
    if (survivors.empty()) continue;
    IntMatrix pi(survivors.size(), n), lift(n, survivors.size());
    for (std::size_t s = 0; s < survivors.size(); ++s) {
      for (std::size_t c = 0; c < n; ++c) pi(s, c) = coeff.reduce(snf.left(survivors[s], c));
      for (std::size_t r = 0; r < n; ++r) lift(r, s) = coeff.reduce(snf.left_inverse(r, survivors[s]));
    }
    hmod.set_rank(b, survivors.size());
    projection.blocks[b] = std::move(pi);
    out.lifts[b] = std::move(lift);
  }
  if (!out.cohomology_has_torsion) {
    out.cohomology_module = std::move(hmod);
    out.projection = std::move(projection);
  } else {
    out.lifts.clear();
  }
  return out;
}

inline BigradedModule s_truncation(const BigradedModule& m) { return diagonal_truncation(m).truncated; }

// Per-stratum stalk cohomology is l-torsion free and lives in degrees of a single parity.
inline bool parity_check(const std::map<std::string, CohomologyTable>& stalks, std::uint64_t l) {
  require_prime(l);
  const Integer prime = l;
  for (const auto& [stratum, table] : stalks) {
    std::set<int> parities;
    for (const auto& [b, g] : table.groups) {
      for (const auto& d : g.torsion)
        if (d % prime == 0) return false;
      if (g.free_rank > 0) parities.insert(((b.cohom % 2) + 2) % 2);
    }
    if (parities.size() > 1) return false;
  }
  return true;
}

}  // namespace formalis
