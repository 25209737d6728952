#pragma once

// Oracles and generators shared by the unit tests and the acceptance runner. Everything here
// is written independently of the library code paths it checks.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "formalis/formalis.hpp"

namespace formalis::testing {

using Rational = boost::multiprecision::cpp_rational;
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20240611;

// Seed for every randomized suite; set from --seed by the test main.
inline std::uint64_t& global_seed() {
  static std::uint64_t seed = kDefaultSeed;
  return seed;
}

inline Rng make_rng(std::uint64_t salt = 0) { return Rng(global_seed() * 1000003u + salt); }

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// ---------------------------------------------------------------------------------------------
// Linear algebra oracles

// Gaussian elimination over Q.
inline std::size_t rational_rank(const IntMatrix& m) {
  std::vector<std::vector<Rational>> a(m.rows(), std::vector<Rational>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) a[r][c] = Rational(m(r, c));
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t p = rank;
    while (p < m.rows() && a[p][c] == 0) ++p;
    if (p == m.rows()) continue;
    std::swap(a[p], a[rank]);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == rank || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < m.cols(); ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

inline Rational rational_determinant(const IntMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a[r][c] = Rational(m(r, c));
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

// Gaussian elimination over F_p with machine integers.
inline std::size_t rank_mod_p(const IntMatrix& m, std::int64_t p) {
  std::vector<std::vector<std::int64_t>> a(m.rows(), std::vector<std::int64_t>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      Integer x = m(r, c) % p;
      if (x < 0) x += p;
      a[r][c] = static_cast<std::int64_t>(x);
    }
  auto inv = [p](std::int64_t x) {
    std::int64_t r = 1, e = p - 2, b = x % p;
    while (e) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return r;
  };
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t piv = rank;
    while (piv < m.rows() && a[piv][c] == 0) ++piv;
    if (piv == m.rows()) continue;
    std::swap(a[piv], a[rank]);
    const std::int64_t iv = inv(a[rank][c]);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == rank || a[r][c] == 0) continue;
      const std::int64_t f = a[r][c] * iv % p;
      for (std::size_t k = c; k < m.cols(); ++k) a[r][k] = ((a[r][k] - f * a[rank][k]) % p + p) % p;
    }
    ++rank;
  }
  return rank;
}

// Random matrices of mixed shape: dense, sparse, and rank-deficient products.
// gcd of the k x k minors of an n x k matrix; 1 exactly when the columns span a saturated lattice.
inline Integer maximal_minor_gcd(const IntMatrix& cols) {
  const std::size_t n = cols.rows(), k = cols.cols();
  Integer g = 0;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    IntMatrix sub(k, k);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) {
        for (std::size_t c = 0; c < k; ++c) sub(r, c) = cols(i, c);
        ++r;
      }
    const auto det = rational_determinant(sub);
    g = boost::multiprecision::gcd(g, Integer(boost::multiprecision::abs(boost::multiprecision::numerator(det))));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return g;
}

inline IntMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, int range = 9) {
  const int style = uniform(rng, 0, 3);
  IntMatrix m(rows, cols);
  if (style == 3 && rows > 1 && cols > 1) {
    const std::size_t inner = static_cast<std::size_t>(uniform(rng, 1, static_cast<int>(std::min(rows, cols)) - 1));
    IntMatrix a(rows, inner), b(inner, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < inner; ++c) a(r, c) = uniform(rng, -4, 4);
    for (std::size_t r = 0; r < inner; ++r)
      for (std::size_t c = 0; c < cols; ++c) b(r, c) = uniform(rng, -4, 4);
    return a * b;
  }
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (style == 1 && uniform(rng, 0, 2) != 0) continue;
      m(r, c) = uniform(rng, -range, range);
      if (style == 2) m(r, c) *= uniform(rng, 1, 3) * 2;  // even entries, forcing torsion
    }
  return m;
}

// Random unimodular P with its inverse, as products of elementary operations.
struct Unimodular {
  IntMatrix p;
  IntMatrix inverse;
};

inline Unimodular random_unimodular(Rng& rng, std::size_t n, int steps = -1) {
  Unimodular u{IntMatrix::identity(n), IntMatrix::identity(n)};
  if (n == 0) return u;
  if (steps < 0) steps = static_cast<int>(3 * n);
  for (int s = 0; s < steps; ++s) {
    const std::size_t a = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(n) - 1));
    const std::size_t b = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(n) - 1));
    const int op = uniform(rng, 0, 3);
    if (op <= 1 && a != b) {
      const int f = uniform(rng, -2, 2);
      // P <- P (I + f e_b e_a^T): column a += f * column b; inverse: row b -= f * row a.
      u.p.add_col(a, b, f);
      u.inverse.add_row(b, a, -f);
    } else if (op == 2 && a != b) {
      u.p.swap_cols(a, b);
      u.inverse.swap_rows(a, b);
    } else {
      u.p.negate_col(a);
      u.inverse.negate_row(a);
    }
  }
  return u;
}

// ---------------------------------------------------------------------------------------------
// Bigraded modules with known cohomology

struct ModuleWithCohomology {
  BigradedModule module;
  CohomologyTable expected;
};

// Direct sum of elementary pieces, then a random change of basis in every component.
// Pieces: a free class, an acyclic pair with d = 1, and a pair with d = c (torsion c).
// pure = true keeps all cohomology on the diagonal.
inline ModuleWithCohomology random_module(Rng& rng, const Coefficients& coeff, bool pure, int pieces = -1) {
  if (pieces < 0) pieces = uniform(rng, 1, 5);
  std::map<Bidegree, std::size_t> ranks;
  struct Piece {
    Bidegree from;
    std::size_t a, b;
    Integer c;
  };
  std::vector<Piece> pairs;
  std::map<Bidegree, CohomologyGroup> groups;
  auto slot = [&](Bidegree b) { return ranks[b]++; };
  for (int k = 0; k < pieces; ++k) {
    const int kind = uniform(rng, 0, 2);
    const int i = uniform(rng, -1, 2);
    if (kind == 0) {
      Bidegree b{i, pure ? i : i + uniform(rng, -1, 1)};
      slot(b);
      groups[b].free_rank++;
    } else if (kind == 1) {
      Bidegree b{i, uniform(rng, -2, 2)};
      const std::size_t a = slot(b), t = slot(b.next());
      pairs.push_back({b, a, t, 1});
    } else {
      // Target on the diagonal when pure.
      Bidegree b{i, pure ? i - 1 : uniform(rng, -2, 2)};
      const std::size_t a = slot(b), t = slot(b.next());
      Integer c = uniform(rng, 2, 6);
      if (pure && coeff.is_field() && coeff.is_zero(c)) c += 1;
      pairs.push_back({b, a, t, c});
      if (coeff.is_field()) {
        if (coeff.is_zero(c)) {
          groups[b].free_rank++;
          groups[b.next()].free_rank++;
        }
      } else {
        groups[b.next()].torsion.push_back(c);
      }
    }
  }
  std::map<Bidegree, IntMatrix> d;
  for (const auto& p : pairs) {
    auto& m = d.try_emplace(p.from, ranks[p.from.next()], ranks[p.from]).first->second;
    m(p.b, p.a) = p.c;
  }
  // Conjugate by random unimodular changes of basis.
  std::map<Bidegree, Unimodular> change;
  for (const auto& [b, n] : ranks) change[b] = random_unimodular(rng, n);
  ModuleWithCohomology out{BigradedModule(coeff), {}};
  for (const auto& [b, n] : ranks) out.module.set_rank(b, n);
  for (auto& [b, m] : d) {
    // old coordinates = P new coordinates
    out.module.set_differential(b, change[b.next()].inverse * m * change[b].p);
  }
  for (auto& [b, g] : groups) {
    // Torsion as a divisibility chain: smith form of the diagonal.
    if (!g.torsion.empty()) {
      std::vector<Integer> chain;
      // gcd/lcm normalization of a diagonal.
      std::vector<Integer> v = g.torsion;
      for (std::size_t x = 0; x < v.size(); ++x)
        for (std::size_t y = x + 1; y < v.size(); ++y) {
          const Integer gg = boost::multiprecision::gcd(v[x], v[y]);
          const Integer ll = v[x] / gg * v[y];
          v[x] = gg;
          v[y] = ll;
        }
      for (const auto& x : v)
        if (x > 1) chain.push_back(x);
      g.torsion = chain;
    }
    out.expected.set(b, g);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Algebras from named generators

struct AlgebraSpec {
  Coefficients coeff;
  std::vector<std::pair<std::string, Bidegree>> basis;
  std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::string, long long>>> product;
  std::map<std::string, std::vector<std::pair<std::string, long long>>> d;
  std::vector<std::pair<std::string, long long>> unit;

  // Named unit e: e*x = x*e = x for every basis vector.
  void with_unit(const std::string& e) {
    unit = {{e, 1}};
    for (const auto& [x, b] : basis) {
      product[{e, x}] = {{x, 1}};
      product[{x, e}] = {{x, 1}};
    }
  }

  DggAlgebra build() const {
    BigradedModule m(coeff);
    BasisLabels labels;
    std::map<std::string, BasisElement> where;
    for (const auto& [name, b] : basis) {
      where[name] = {b, labels[b].size()};
      labels[b].push_back(name);
    }
    for (const auto& [b, names] : labels) m.set_rank(b, names.size());
    auto combo = [&](const std::vector<std::pair<std::string, long long>>& terms) {
      Element x;
      for (const auto& [name, c] : terms) add_scaled(x, basis_element(m, where.at(name)), Integer(c));
      return normalized(std::move(x), coeff);
    };
    std::map<Bidegree, IntMatrix> dm;
    for (const auto& [name, terms] : d) {
      const BasisElement src = where.at(name);
      auto& mat = dm.try_emplace(src.degree, m.rank(src.degree.next()), m.rank(src.degree)).first->second;
      for (const auto& [t, c] : terms) {
        const BasisElement dst = where.at(t);
        if (dst.degree != src.degree.next()) throw InvalidInput("d must raise j by one");
        mat(dst.index, src.index) += c;
      }
    }
    for (auto& [b, mat] : dm) m.set_differential(b, mat);
    StructureConstants c;
    for (const auto& [key, terms] : product) {
      Element v = combo(terms);
      if (!v.empty()) c[{where.at(key.first), where.at(key.second)}] = v;
    }
    return DggAlgebra(m, labels, c, combo(unit));
  }
};

// Graded tensor product A (x) B with the Koszul sign on the cohomological degree.
inline DggAlgebra tensor_algebras(const DggAlgebra& a, const DggAlgebra& b) {
  const Coefficients& coeff = a.coefficients();
  BigradedModule m(coeff);
  BasisLabels labels;
  std::map<std::pair<BasisElement, BasisElement>, BasisElement> where;
  for (BasisElement x : a.basis())
    for (BasisElement y : b.basis()) {
      const Bidegree deg = x.degree + y.degree;
      where[{x, y}] = {deg, labels[deg].size()};
      labels[deg].push_back(a.label(x) + "." + b.label(y));
    }
  for (const auto& [deg, names] : labels) m.set_rank(deg, names.size());
  auto tensor = [&](const Element& x, const Element& y) {
    Element out;
    for (const auto& [ex, cx] : terms(x))
      for (const auto& [ey, cy] : terms(y)) add_scaled(out, basis_element(m, where.at({ex, ey})), cx * cy);
    return normalized(std::move(out), coeff);
  };
  const auto sign = [](int j) { return (j % 2 == 0) ? 1 : -1; };
  std::map<Bidegree, IntMatrix> dm;
  for (BasisElement x : a.basis())
    for (BasisElement y : b.basis()) {
      Element dx = sum(tensor(a.d(a.element(x)), b.element(y)),
                       scaled(tensor(a.element(x), b.d(b.element(y))), Integer(sign(x.degree.cohom)), coeff), coeff);
      const BasisElement src = where.at({x, y});
      for (const auto& [e, c] : terms(dx)) {
        auto& mat = dm.try_emplace(src.degree, m.rank(src.degree.next()), m.rank(src.degree)).first->second;
        mat(e.index, src.index) += c;
      }
    }
  for (auto& [deg, mat] : dm) m.set_differential(deg, mat);
  StructureConstants c;
  for (BasisElement x : a.basis())
    for (BasisElement y : b.basis())
      for (BasisElement x2 : a.basis())
        for (BasisElement y2 : b.basis()) {
          Element v = tensor(a.multiply(x, x2), b.multiply(y, y2));
          if (v.empty()) continue;
          c[{where.at({x, y}), where.at({x2, y2})}] = scaled(v, Integer(sign(y.degree.cohom * x2.degree.cohom)), coeff);
        }
  return DggAlgebra(m, labels, c, tensor(a.unit(), b.unit()));
}

// Same algebra in the basis e'_k = sum_r P(r,k) e_r per component.
inline DggAlgebra change_basis(const DggAlgebra& a, const std::map<Bidegree, Unimodular>& change) {
  const Coefficients& coeff = a.coefficients();
  BigradedModule m(coeff);
  for (const auto& [b, n] : a.module().components()) m.set_rank(b, n);
  auto to_new = [&](const Element& x) {
    Element out;
    for (const auto& [b, v] : x) out[b] = change.at(b).inverse.apply(v);
    return normalized(std::move(out), coeff);
  };
  auto from_new = [&](BasisElement e) {
    Element out;
    out[e.degree] = change.at(e.degree).p.column(e.index);
    return normalized(std::move(out), coeff);
  };
  for (const auto& [b, d] : a.module().differentials()) {
    const Bidegree up = b.next();
    m.set_differential(b, change.at(up).inverse * d * change.at(b).p);
  }
  StructureConstants c;
  for (BasisElement x : a.basis())
    for (BasisElement y : a.basis()) {
      Element v = to_new(a.multiply(from_new(x), from_new(y)));
      if (!v.empty()) c[{x, y}] = v;
    }
  return DggAlgebra(m, a.labels(), c, to_new(a.unit()));
}

inline DggAlgebra random_basis_change(Rng& rng, const DggAlgebra& a) {
  std::map<Bidegree, Unimodular> change;
  for (const auto& [b, n] : a.module().components()) change[b] = random_unimodular(rng, n);
  return change_basis(a, change);
}

// ---------------------------------------------------------------------------------------------
// Catalogue of small algebras

inline DggAlgebra scalars(const Coefficients& c) {
  AlgebraSpec s{c, {{"1", {0, 0}}}, {}, {}, {}};
  s.with_unit("1");
  return s.build();
}

// k[t]/(t^n) with t in bidegree (w, w).
inline DggAlgebra truncated_polynomial(const Coefficients& c, int n, int w = 1) {
  AlgebraSpec s{c, {}, {}, {}, {}};
  for (int k = 0; k < n; ++k) s.basis.push_back({k == 0 ? "1" : "t" + std::to_string(k), {k * w, k * w}});
  auto name = [](int k) { return k == 0 ? std::string("1") : "t" + std::to_string(k); };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a + b < n) s.product[{name(a), name(b)}] = {{name(a + b), 1}};
  s.unit = {{"1", 1}};
  return s.build();
}

// Exterior algebra on x in bidegree (w, w) with x^2 = 0.
inline DggAlgebra exterior(const Coefficients& c, int w = 1) {
  AlgebraSpec s{c, {{"1", {0, 0}}, {"x", {w, w}}}, {}, {}, {}};
  s.with_unit("1");
  return s.build();
}

// k x k with unit e1 + e2.
inline DggAlgebra split_pair(const Coefficients& c) {
  AlgebraSpec s{c, {{"e1", {0, 0}}, {"e2", {0, 0}}}, {}, {}, {}};
  s.product[{"e1", "e1"}] = {{"e1", 1}};
  s.product[{"e2", "e2"}] = {{"e2", 1}};
  s.unit = {{"e1", 1}, {"e2", 1}};
  return s.build();
}

// Path algebra of 1 -a-> 2 with a in bidegree (1,1); noncommutative, unit e1 + e2.
inline DggAlgebra path_a2(const Coefficients& c) {
  AlgebraSpec s{c, {{"e1", {0, 0}}, {"e2", {0, 0}}, {"a", {1, 1}}}, {}, {}, {}};
  s.product[{"e1", "e1"}] = {{"e1", 1}};
  s.product[{"e2", "e2"}] = {{"e2", 1}};
  s.product[{"e1", "a"}] = {{"a", 1}};
  s.product[{"a", "e2"}] = {{"a", 1}};
  s.unit = {{"e1", 1}, {"e2", 1}};
  return s.build();
}

// k.1 + k.x + k.y, x in bidegree (i, j), y = dx / c in (i, j+1), all products of x, y zero.
// Acyclic apart from the unit (over a field with c invertible).
inline DggAlgebra acyclic_pair(const Coefficients& c, int i, int j, long long factor = 1) {
  AlgebraSpec s{c, {{"1", {0, 0}}, {"x", {i, j}}, {"y", {i, j + 1}}}, {}, {}, {}};
  s.with_unit("1");
  s.d["x"] = {{"y", factor}};
  return s.build();
}

// k.1 + k.z with z at (i, j), z^2 = 0, d = 0. Pure only when i = j.
inline DggAlgebra single_class(const Coefficients& c, int i, int j) {
  AlgebraSpec s{c, {{"1", {0, 0}}, {"z", {i, j}}}, {}, {}, {}};
  s.with_unit("1");
  return s.build();
}

inline DggAlgebra random_diagonal_algebra(Rng& rng, const Coefficients& c) {
  switch (uniform(rng, 0, 5)) {
    case 0: return scalars(c);
    case 1: return split_pair(c);
    case 2: return truncated_polynomial(c, 2);
    case 3: return truncated_polynomial(c, 3);
    case 4: return path_a2(c);
    default: return exterior(c, 2);
  }
}

// Pure of weight 0 with total dimension <= 10: a diagonal algebra tensored with an acyclic
// augmentation, in a random basis.
inline DggAlgebra random_pure_algebra(Rng& rng, const Coefficients& c) {
  static const std::vector<std::pair<int, int>> places = {{1, 0}, {2, 0}, {3, 1}, {1, 1}, {0, 1}, {2, 2}, {0, 0}, {2, 1}, {-1, -1}};
  DggAlgebra d = random_diagonal_algebra(rng, c);
  const auto [i, j] = places[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(places.size()) - 1))];
  DggAlgebra a = uniform(rng, 0, 4) == 0 ? d : tensor_algebras(d, acyclic_pair(c, i, j));
  if (a.module().total_dimension() <= 3 && uniform(rng, 0, 1)) {
    const auto [i2, j2] = places[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(places.size()) - 1))];
    a = tensor_algebras(a, acyclic_pair(c, i2, j2));
  }
  return random_basis_change(rng, a);
}

// ---------------------------------------------------------------------------------------------
// Graded algebra towers

// Paths of length <= top in a quiver, as a graded algebra; vertices in degree 0.
struct Quiver {
  int vertices = 1;
  std::vector<std::pair<int, int>> arrows;  // (source, target)
};

inline GradedAlgebra path_algebra(const Coefficients& c, const Quiver& q, int top) {
  // path = (start vertex, arrow list); a vertex path has no arrows.
  using Path = std::pair<int, std::vector<int>>;
  std::vector<std::vector<Path>> by_degree(static_cast<std::size_t>(top) + 1);
  for (int v = 0; v < q.vertices; ++v) by_degree[0].push_back({v, {}});
  for (int k = 1; k <= top; ++k)
    for (const auto& [s, arrows] : by_degree[static_cast<std::size_t>(k) - 1]) {
      const int end = arrows.empty() ? s : q.arrows[static_cast<std::size_t>(arrows.back())].second;
      for (std::size_t a = 0; a < q.arrows.size(); ++a)
        if (q.arrows[a].first == end) {
          auto next = arrows;
          next.push_back(static_cast<int>(a));
          by_degree[static_cast<std::size_t>(k)].push_back({s, next});
        }
    }
  std::map<Path, std::pair<int, std::size_t>> index;
  std::vector<std::size_t> dims;
  for (int k = 0; k <= top; ++k) {
    dims.push_back(by_degree[static_cast<std::size_t>(k)].size());
    for (std::size_t t = 0; t < dims.back(); ++t) index[by_degree[static_cast<std::size_t>(k)][t]] = {k, t};
  }
  auto end_of = [&](const Path& p) { return p.second.empty() ? p.first : q.arrows[static_cast<std::size_t>(p.second.back())].second; };
  std::map<std::pair<std::pair<int, std::size_t>, std::pair<int, std::size_t>>, IntVector> products;
  for (const auto& [p, ip] : index)
    for (const auto& [r, ir] : index) {
      if (end_of(p) != r.first) continue;
      const int k = ip.first + ir.first;
      if (k > top) continue;
      Path joined{p.first, p.second};
      joined.second.insert(joined.second.end(), r.second.begin(), r.second.end());
      IntVector v(dims[static_cast<std::size_t>(k)]);
      v[index.at(joined).second] = 1;
      products[{ip, ir}] = v;
    }
  IntVector unit(dims[0], Integer(1));
  return make_graded_algebra(c, dims, products, unit);
}

struct TowerCase {
  GradedAlgebraTower tower;
  Quiver quiver;
  // Old coordinates = P new coordinates, per term and degree.
  std::vector<std::map<int, Unimodular>> change;
};

// H_i = paths of length <= top_i with top_i >= i non-decreasing, psi the projections,
// all in random bases.
inline TowerCase random_tower(Rng& rng, const Coefficients& c, std::size_t terms) {
  static const std::vector<Quiver> quivers = {
      {1, {{0, 0}}},                  // k[x]
      {2, {{0, 1}, {1, 0}}},          // 2-cycle
      {2, {{0, 0}, {0, 1}}},          // loop plus an exit
      {2, {{0, 1}}},                  // A2
      {3, {{0, 1}, {1, 2}, {0, 2}}},  // triangle
      {2, {{0, 1}, {0, 1}}},          // Kronecker
  };
  const Quiver& q = quivers[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(quivers.size()) - 1))];
  std::vector<int> top(terms);
  for (std::size_t i = 0; i < terms; ++i) {
    top[i] = static_cast<int>(i) + uniform(rng, 0, 1);
    if (i > 0) top[i] = std::max(top[i], top[i - 1]);
  }
  TowerCase out;
  out.quiver = q;
  std::vector<GradedAlgebra> plain;
  for (std::size_t i = 0; i < terms; ++i) plain.push_back(path_algebra(c, q, top[i]));
  for (std::size_t i = 0; i < terms; ++i) {
    std::map<int, Unimodular> ch;
    std::map<Bidegree, Unimodular> bch;
    for (int k = 0; k <= top[i]; ++k) {
      ch[k] = random_unimodular(rng, graded_dim(plain[i], k));
      bch[{k, k}] = ch[k];
    }
    out.tower.terms.push_back(change_basis(plain[i], bch));
    out.change.push_back(ch);
  }
  for (std::size_t i = 0; i + 1 < terms; ++i) {
    GradedMap psi;
    for (int k = 0; k <= top[i]; ++k) {
      const std::size_t n = graded_dim(plain[i], k);
      // projection is the identity on degrees <= top[i] in the path bases
      psi[k] = out.change[i].at(k).inverse * IntMatrix::identity(n) * out.change[i + 1].at(k).p;
    }
    out.tower.maps.push_back(psi);
  }
  return out;
}

inline GradedAlgebraTower polynomial_tower(const Coefficients& c, std::size_t terms) {
  GradedAlgebraTower t;
  const Quiver loop{1, {{0, 0}}};
  for (std::size_t i = 0; i < terms; ++i) t.terms.push_back(path_algebra(c, loop, static_cast<int>(i)));
  for (std::size_t i = 0; i + 1 < terms; ++i) {
    GradedMap psi;
    for (int k = 0; k <= static_cast<int>(i); ++k) psi[k] = IntMatrix::identity(1);
    t.maps.push_back(psi);
  }
  return t;
}

// f: source -> target given per degree on coordinates; checks bijectivity (mod-p elimination),
// unit and products, independently of the library's limit code.
inline bool is_isomorphism(const std::map<int, IntMatrix>& f, const GradedAlgebra& source, const GradedAlgebra& target, int top) {
  const auto& c = target.coefficients();
  const auto p = static_cast<std::int64_t>(*c.prime);
  auto apply = [&](const Element& x) {
    Element out;
    for (const auto& [b, v] : x) {
      if (b.internal > top) continue;
      out[b] = f.at(b.internal).apply(v);
    }
    return normalized(std::move(out), c);
  };
  for (int k = 0; k <= top; ++k) {
    const std::size_t a = graded_dim(source, k), b = graded_dim(target, k);
    if (a != b) return false;
    if (a == 0) continue;
    if (rank_mod_p(f.at(k), p) != a) return false;
  }
  if (!equal(apply(source.unit()), target.unit(), c)) return false;
  for (BasisElement x : source.basis())
    for (BasisElement y : source.basis()) {
      if (x.degree.internal + y.degree.internal > top) continue;
      if (!equal(apply(source.multiply(x, y)), target.multiply(apply(source.element(x)), apply(source.element(y))), c))
        return false;
    }
  return true;
}

// ---------------------------------------------------------------------------------------------
// Symmetric group oracles on permutations (one-line notation, 0-based)

using Perm = std::vector<int>;

inline Perm perm_of_word(std::size_t n, const std::vector<int>& word) {
  Perm p(n);
  for (std::size_t k = 0; k < n; ++k) p[k] = static_cast<int>(k);
  // right multiplication by s_i swaps the entries in positions i, i+1
  for (int s : word) std::swap(p[static_cast<std::size_t>(s)], p[static_cast<std::size_t>(s) + 1]);
  return p;
}

inline int inversions(const Perm& p) {
  int n = 0;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p[a] > p[b]) ++n;
  return n;
}

// Tableau criterion: x <= w iff for all i, k, #{a <= i : x(a) >= k} <= #{a <= i : w(a) >= k}.
inline bool tableau_leq(const Perm& x, const Perm& w) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      int cx = 0, cw = 0;
      for (std::size_t a = 0; a <= i; ++a) {
        cx += x[a] >= static_cast<int>(k);
        cw += w[a] >= static_cast<int>(k);
      }
      if (cx > cw) return false;
    }
  return true;
}

// Subword property on a fixed reduced word of w.
inline bool subword_leq(std::size_t n, const std::vector<int>& reduced_w, const Perm& x) {
  const std::size_t len = reduced_w.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << len); ++mask) {
    std::vector<int> sub;
    for (std::size_t k = 0; k < len; ++k)
      if (mask >> k & 1) sub.push_back(reduced_w[k]);
    if (perm_of_word(n, sub) == x) return true;
  }
  return false;
}

using Poly = std::vector<long long>;  // coefficient of q^k at index k

inline Poly poly_trim(Poly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}
inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()));
  for (std::size_t k = 0; k < a.size(); ++k) r[k] += a[k];
  for (std::size_t k = 0; k < b.size(); ++k) r[k] += b[k];
  return poly_trim(r);
}
inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return poly_trim(r);
}

// KL polynomials of S_n from R-polynomials:
//   q^{l(w)-l(x)} P_{x,w}(1/q) - P_{x,w}(q) = sum_{x < y <= w} R_{x,y}(q) P_{y,w}(q),
// and deg P_{x,w} <= (l(w)-l(x)-1)/2 picks out P as minus the low part of the right side.
class ROracle {
 public:
  explicit ROracle(std::size_t n) : n_(n) {
    Perm p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = static_cast<int>(k);
    do {
      index_[p] = perms_.size();
      perms_.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    const std::size_t N = perms_.size();
    len_.resize(N);
    for (std::size_t i = 0; i < N; ++i) len_[i] = inversions(perms_[i]);
    leq_.assign(N * N, false);
    for (std::size_t x = 0; x < N; ++x)
      for (std::size_t w = 0; w < N; ++w) leq_[x * N + w] = tableau_leq(perms_[x], perms_[w]);
    order_.resize(N);
    for (std::size_t i = 0; i < N; ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return len_[a] < len_[b]; });
    r_.assign(N * N, {});
    computed_r_.assign(N * N, false);
    p_.assign(N * N, {});
    computed_p_.assign(N * N, false);
  }

  std::size_t size() const { return perms_.size(); }
  const Perm& perm(std::size_t i) const { return perms_[i]; }
  std::size_t index(const Perm& p) const { return index_.at(p); }
  int length(std::size_t i) const { return len_[i]; }
  bool leq(std::size_t x, std::size_t w) const { return leq_[x * perms_.size() + w]; }

  std::size_t times_s(std::size_t w, std::size_t s) const {
    Perm p = perms_[w];
    std::swap(p[s], p[s + 1]);
    return index_.at(p);
  }

  const Poly& R(std::size_t x, std::size_t w) {
    const std::size_t N = perms_.size();
    if (computed_r_[x * N + w]) return r_[x * N + w];
    Poly out;
    if (x == w)
      out = {1};
    else if (leq(x, w)) {
      std::size_t s = 0;
      while (!(len_[times_s(w, s)] < len_[w])) ++s;
      const std::size_t ws = times_s(w, s), xs = times_s(x, s);
      if (len_[xs] < len_[x])
        out = R(xs, ws);
      else
        out = poly_add(poly_mul({-1, 1}, R(x, ws)), poly_mul({0, 1}, R(xs, ws)));
    }
    computed_r_[x * N + w] = true;
    return r_[x * N + w] = out;
  }

  const Poly& P(std::size_t x, std::size_t w) {
    const std::size_t N = perms_.size();
    if (computed_p_[x * N + w]) return p_[x * N + w];
    Poly out;
    if (x == w)
      out = {1};
    else if (leq(x, w)) {
      Poly rhs;
      for (std::size_t y = 0; y < N; ++y)
        if (y != x && leq(x, y) && leq(y, w)) rhs = poly_add(rhs, poly_mul(R(x, y), P(y, w)));
      const int bound = (len_[w] - len_[x] - 1) / 2;
      for (int k = 0; k <= bound && static_cast<std::size_t>(k) < rhs.size(); ++k) {
        if (out.size() <= static_cast<std::size_t>(k)) out.resize(static_cast<std::size_t>(k) + 1);
        out[static_cast<std::size_t>(k)] = -rhs[static_cast<std::size_t>(k)];
      }
      out = poly_trim(out);
    }
    computed_p_[x * N + w] = true;
    return p_[x * N + w] = out;
  }

 private:
  std::size_t n_;
  std::vector<Perm> perms_;
  std::map<Perm, std::size_t> index_;
  std::vector<int> len_;
  std::vector<bool> leq_;
  std::vector<std::size_t> order_;
  std::vector<Poly> r_, p_;
  std::vector<bool> computed_r_, computed_p_;
};

inline Poly to_poly(const Polynomial& p) {
  Poly out;
  for (std::size_t k = 0; k < p.coefficients().size(); ++k) out.push_back(p.coefficient(k));
  return poly_trim(out);
}

// Library element -> oracle index through its ShortLex word.
// Uniform element of the lower Bruhat interval [e, top].
inline std::size_t random_below(Rng& rng, const CoxeterSystem& sys, std::size_t top) {
  std::vector<std::size_t> below;
  for (std::size_t x = 0; x < sys.size(); ++x)
    if (sys.bruhat_leq(x, top)) below.push_back(x);
  return below[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(below.size()) - 1))];
}

inline std::size_t oracle_index(const CoxeterSystem& sys, const ROracle& o, std::size_t n, std::size_t w) {
  return o.index(perm_of_word(n, sys.word(w)));
}

// ---------------------------------------------------------------------------------------------
// Residue enumeration for separatedness

inline bool residues_distinct(const WeightSet& w, long long q, long long l) {
  std::set<long long> seen;
  for (int e : w.exponents) {
    long long r = 1;
    for (int k = 0; k < e; ++k) r = r * (q % l) % l;
    if (!seen.insert(r).second) return false;
  }
  return true;
}

}  // namespace formalis::testing
