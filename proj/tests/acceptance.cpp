// One line per criterion: "criterion N PASS|FAIL <name> <ms> ms: <detail>".
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "support.hpp"
#include "formalis/table.hpp"

namespace {

using namespace formalis;
using namespace formalis::testing;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void check(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

bool prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void table_reproduction(Outcome& o) {
  const auto golden = load_json_file(std::string(FORMALIS_DATA_DIR) + "/table-golden.json");
  const auto rep = emit_table(golden, builtin_parity_table());
  for (const auto& m : rep.mismatches)
    o.detail << m.row << "/" << m.instance << " " << m.field << " golden " << m.expected << " computed " << m.actual
             << "; ";
  o.ok = rep.matches();
  // Closed forms, independently of the golden copy.
  for (const auto& r : rep.rows)
    for (const auto& i : r.instances) {
      if (r.key == "point-parabolic") {
        const int n = std::stoi(i.name.substr(2, i.name.find(':') - 2));
        o.check(i.wt_xg == WeightSet::interval(0, n), i.name);
      } else if (r.key == "grassmannian") {
        int k = 0, n = 0;
        std::sscanf(i.name.c_str(), "Gr(%d,%d)", &k, &n);
        o.check(i.wt_xg == WeightSet::interval(0, std::min(k, n - k) + n), i.name);
      }
    }
}

void grassmannian_verdicts(Outcome& o) {
  const auto s = SpaceSpec::grassmannian(2, 4).with_group(group_borel_gl(4));
  const auto yes = formality_verdict(s, 11, 2, builtin_parity_table());
  o.check(yes.wt == WeightSet::interval(0, 6) && yes.wr == 7, "wt {0..6}, wr 7");
  o.check(yes.applicable == Tristate::yes, "l=11 q=2 is yes");
  for (long long q = 2; q <= 200; ++q)
    o.check(formality_verdict(s, 7, q, builtin_parity_table()).applicable == Tristate::no, "l=7 q=" + std::to_string(q));
  o.check(admissible_q(*yes.wt, 11, 1000).q == 2, "admissible q at 11");
  int checked = 0;
  for (int l = 2; l <= 50; ++l) {
    if (!prime(l)) continue;
    std::optional<long long> first;
    for (long long q = 2; q <= 2 * l + 1; ++q) {
      if (q % l == 0) continue;
      const auto v = formality_verdict(s, static_cast<std::uint64_t>(l), q, builtin_parity_table());
      const bool enumerated = residues_distinct(*yes.wt, q, l);
      o.check(v.separated_at == enumerated, "separation at l=" + std::to_string(l) + " q=" + std::to_string(q));
      o.check((v.applicable == Tristate::yes) == enumerated, "verdict at l=" + std::to_string(l));
      if (!first && enumerated && prime(static_cast<int>(q))) first = q;
      ++checked;
    }
    // No separating q at all below l = 8: ord_l(q) <= l - 1 <= 6.
    if (l <= 7) o.check(!first, "l=" + std::to_string(l) + " has no admissible q");
    if (first) o.check(admissible_q(*yes.wt, static_cast<std::uint64_t>(l), 2 * l + 1).q == first, "admissible_q at " + std::to_string(l));
  }
  o.detail << checked << " (l, q) pairs enumerated; ";
}

void formality_roof(Outcome& o) {
  const auto Z = Coefficients::integers();
  const auto F3 = Coefficients::field(3);
  const std::vector<std::pair<std::string, DggAlgebra>> pure = {
      {"diagonal path algebra", path_a2(Z)},
      {"acyclic augmentation", tensor_algebras(truncated_polynomial(Z, 2), acyclic_pair(Z, 1, 0))},
      {"acyclic pair below the diagonal", acyclic_pair(Z, 3, 1)},
      {"exterior algebra", exterior(Z, 1)},
      {"truncated polynomial", truncated_polynomial(Z, 4)},
      {"6-dimensional mixed", tensor_algebras(split_pair(Z), acyclic_pair(Z, 2, 1))}};
  for (const auto& [name, a] : pure) {
    const auto r = verify_formality_roof(a);
    o.check(r.certified(), name);
  }
  o.check(pure.back().second.module().total_dimension() == 6, "mixed example has dimension 6");
  const std::vector<std::pair<std::string, DggAlgebra>> impure = {
      {"class at (0,1)", single_class(Z, 0, 1)}, {"class at (1,3) over F3", single_class(F3, 1, 3)},
      {"class at (0,1) tensor exterior", tensor_algebras(exterior(Z, 1), single_class(Z, 0, 1))}};
  for (const auto& [name, a] : impure) {
    const auto r = verify_formality_roof(a);
    o.check(!r.pure && r.impurity_witness.has_value(), name + " reported not pure");
    o.check(!r.inclusion_quasi_iso && r.inclusion_failure.has_value(), name + " exhibits the failing inclusion");
  }
  auto rng = make_rng(301);
  for (int t = 0; t < 100; ++t) {
    const Coefficients c = t % 3 == 0 ? Z : Coefficients::field(t % 2 ? 2 : 7);
    const auto a = random_pure_algebra(rng, c);
    o.check(a.module().total_dimension() <= 10, "dimension bound");
    const auto s = s_subalgebra(a);
    o.check(cohomology(s.algebra.module()) == cohomology(a.module()), "H(S(A)) = H(A), case " + std::to_string(t));
    o.check(verify_formality_roof(a).certified(), "random roof " + std::to_string(t));
  }
  o.detail << pure.size() << " pure, " << impure.size() << " non-pure, 100 random; ";
}

void kl_oracle(Outcome& o) {
  std::size_t pairs = 0;
  for (int n : {3, 4}) {
    const auto w = CoxeterSystem::of_type("A", n - 1);
    ROracle r(static_cast<std::size_t>(n));
    for (std::size_t x = 0; x < w.size(); ++x)
      for (std::size_t y = 0; y < w.size(); ++y, ++pairs) {
        const auto ox = oracle_index(w, r, static_cast<std::size_t>(n), x), oy = oracle_index(w, r, static_cast<std::size_t>(n), y);
        o.check(to_poly(kl_polynomial(w, x, y)) == r.P(ox, oy), "S" + std::to_string(n) + " pair");
      }
  }
  const auto w = CoxeterSystem::of_type("A", 4);
  std::size_t s5 = 0;
  for (std::size_t x = 0; x < w.size(); ++x)
    for (std::size_t y = 0; y < w.size(); ++y) {
      const auto p = kl_polynomial(w, x, y);
      const bool leq = tableau_leq(w.to_permutation(x), w.to_permutation(y));
      o.check(p.is_zero() == !leq, "support equals Bruhat interval");
      ++s5;
      if (!leq) continue;
      o.check(p.coefficient(0) == 1, "constant term 1");
      if (x != y) o.check(2 * static_cast<int>(p.degree()) <= w.length(y) - w.length(x) - 1, "degree bound");
    }
  o.detail << pairs << " S3/S4 pairs, " << s5 << " S5 pairs; ";
}

void product_multiplicity(Outcome& o) {
  const auto a = CoxeterSystem::of_type("A", 2), b = CoxeterSystem::of_type("A", 3);
  const auto prod = product_system(a, b);
  auto rng = make_rng(501);
  int nontrivial = 0;
  for (int t = 0; t < 50; ++t) {
    const auto m1 = static_cast<std::size_t>(uniform(rng, 0, 5)), m2 = static_cast<std::size_t>(uniform(rng, 0, 23));
    // Most pairs comparable, so the multiplicities are mostly nonzero.
    const bool comparable = uniform(rng, 0, 3) != 0;
    const auto l1 = comparable ? random_below(rng, a, m1) : static_cast<std::size_t>(uniform(rng, 0, 5));
    const auto l2 = comparable ? random_below(rng, b, m2) : static_cast<std::size_t>(uniform(rng, 0, 23));
    const auto lhs = graded_multiplicity(a, l1, m1) * graded_multiplicity(b, l2, m2);
    const auto rhs = graded_multiplicity(prod, product_element(prod, a, l1, b, l2), product_element(prod, a, m1, b, m2));
    o.check(lhs == rhs, "pair " + std::to_string(t));
    nontrivial += !lhs.is_zero();
  }
  o.detail << "50 pairs, " << nontrivial << " with nonzero multiplicity; ";
}

void limit_stabilization(Outcome& o) {
  const auto F5 = Coefficients::field(5);
  const auto poly = polynomial_tower(F5, 8);
  for (int d = 0; d <= 6; ++d) {
    const auto lim = graded_limit(poly, d);
    std::map<int, IntMatrix> id;
    for (int k = 0; k <= d; ++k) id[k] = IntMatrix::identity(1);
    o.check(is_isomorphism(id, lim.algebra, truncated_polynomial(F5, d + 1), d), "k[x] through degree " + std::to_string(d));
    for (std::size_t j = static_cast<std::size_t>(d) + 1; j < 8; ++j)
      o.check(is_isomorphism(id, truncate_degrees(poly.terms[j], d), lim.algebra, d), "k[x] term");
  }
  auto rng = make_rng(601);
  for (int t = 0; t < 20; ++t) {
    const std::size_t terms = static_cast<std::size_t>(uniform(rng, 3, 5));
    const auto tc = random_tower(rng, F5, terms);
    for (int d = 0; d + 2 <= static_cast<int>(terms); ++d) {
      const auto lim = graded_limit(tc.tower, d);
      const auto& base = tc.change[static_cast<std::size_t>(d) + 1];
      std::map<int, IntMatrix> to_plain;
      for (int k = 0; k <= d; ++k) to_plain[k] = base.at(k).p;
      o.check(is_isomorphism(to_plain, lim.algebra, path_algebra(F5, tc.quiver, d), d), "random tower " + std::to_string(t));
      for (std::size_t j = static_cast<std::size_t>(d) + 1; j < terms; ++j) {
        std::map<int, IntMatrix> f;
        for (int k = 0; k <= d; ++k) f[k] = base.at(k).inverse * tc.change[j].at(k).p;
        o.check(is_isomorphism(f, truncate_degrees(tc.tower.terms[j], d), lim.algebra, d), "term agreement");
      }
    }
  }
  auto killed = polynomial_tower(F5, 5);
  for (auto& [k, m] : killed.maps[2])
    if (k >= 1) m = IntMatrix(1, 1);
  bool rejected = false;
  try {
    graded_limit(killed, 1);
  } catch (const DomainError&) {
    rejected = true;
  }
  o.check(rejected, "tower violating the hypothesis rejected");
  o.detail << "k[x] tower and 20 random towers; ";
}

IntMatrix diagonal_form(const SmithForm& s, std::size_t rows, std::size_t cols) {
  IntMatrix d(rows, cols);
  for (std::size_t k = 0; k < s.diagonal.size(); ++k) d(k, k) = s.diagonal[k];
  return d;
}

void linalg_invariants(Outcome& o) {
  auto rng = make_rng(701);
  for (int t = 0; t < 500; ++t) {
    const auto rows = static_cast<std::size_t>(uniform(rng, 1, 8)), cols = static_cast<std::size_t>(uniform(rng, 1, 8));
    const IntMatrix m = random_matrix(rng, rows, cols);
    const auto s = smith_normal_form(m);
    const std::string tag = "matrix " + std::to_string(t);
    for (std::size_t k = 0; k + 1 < s.diagonal.size(); ++k) o.check(s.diagonal[k + 1] % s.diagonal[k] == 0, tag + " divisibility");
    o.check(s.diagonal.size() == rational_rank(m), tag + " rank");
    o.check(s.left * m * s.right == diagonal_form(s, rows, cols), tag + " reconstruction");
    o.check(boost::multiprecision::abs(rational_determinant(s.left)) == 1, tag + " left unimodular");
    o.check(boost::multiprecision::abs(rational_determinant(s.right)) == 1, tag + " right unimodular");
    o.check(s.left * s.left_inverse == IntMatrix::identity(rows) && s.right * s.right_inverse == IntMatrix::identity(cols),
            tag + " inverses");
    const auto k = kernel_basis(m);
    o.check(k.size() == cols - rational_rank(m), tag + " kernel rank");
    for (const auto& v : k)
      for (const auto& x : m.apply(v)) o.check(x == 0, tag + " kernel vector");
    if (!k.empty()) o.check(maximal_minor_gcd(IntMatrix::from_columns(k, cols)) == 1, tag + " saturation");
  }
  o.detail << "500 matrices; ";
}

struct Criterion {
  int id;
  const char* name;
  double budget_ms;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::uint64_t seed = kDefaultSeed;
  app.add_option("--criterion", only, "run one criterion (1-7)");
  app.add_option("--seed", seed, "seed for the randomized suites");
  CLI11_PARSE(app, argc, argv);
  if (const char* env = std::getenv("FORMALIS_SEED"); env && !app.count("--seed")) seed = std::stoull(env);
  global_seed() = seed;

  const std::vector<Criterion> all = {
      {1, "table reproduction", 1000, table_reproduction},
      {2, "Grassmannian verdicts", 1000, grassmannian_verdicts},
      {3, "formality roof", 30000, formality_roof},
      {4, "KL oracle equivalence", 60000, kl_oracle},
      {5, "product multiplicities", 60000, product_multiplicity},
      {6, "graded limit stabilization", 60000, limit_stabilization},
      {7, "exact linalg invariants", 60000, linalg_invariants}};
  bool all_ok = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what() << "; ";
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (ms > c.budget_ms) {
      o.ok = false;
      o.detail << "over the " << c.budget_ms << " ms budget; ";
    }
    std::cout << "criterion " << c.id << " " << (o.ok ? "PASS" : "FAIL") << " " << c.name << " " << static_cast<long>(ms)
              << " ms (seed " << seed << "): " << o.detail.str() << "\n";
    all_ok = all_ok && o.ok;
  }
  return all_ok ? 0 : 1;
}
