#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "formalis/formalis.hpp"

#ifndef FORMALIS_DATA_DIR
#define FORMALIS_DATA_DIR "data"
#endif

using nlohmann::json;
namespace io = formalis::io;

namespace {

struct Output {
  std::string path;
  void write(const json& j) const {
    const std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    if (!out) throw formalis::InvalidInput("cannot write " + path);
    out << text;
  }
};

json read_input(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) throw formalis::InvalidInput("cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw formalis::InvalidInput("input is not valid JSON: " + std::string(e.what()));
  }
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::string t = text;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw formalis::InvalidInput("'" + tok + "' is not an integer");
    }
  }
  return out;
}

formalis::WeightSet parse_weights(const std::string& text) {
  formalis::WeightSet w;
  for (int e : parse_ints(text)) {
    if (e < 0) throw formalis::InvalidInput("exponents must be non-negative");
    w.exponents.insert(e);
  }
  if (w.empty()) throw formalis::InvalidInput("weight set is empty");
  return w;
}

std::uint64_t checked_prime(long long l) {
  if (l < 2 || !formalis::is_prime(static_cast<std::uint64_t>(l)))
    throw formalis::DomainError(std::to_string(l) + " is not prime");
  return static_cast<std::uint64_t>(l);
}

struct SpaceFlags {
  std::string in;
  std::string space = "point";
  int k = 0, n = 0, rank = 0;
  std::string type;
  std::string parabolic;
  std::string group = "none";
  int group_rank = -1, group_n = -1;
  std::string group_type;
  std::string blocks;

  void add(CLI::App* app) {
    app->add_option("--in", in, "space spec JSON file ('-' for stdin)");
    app->add_option("--space", space, "point | grassmannian | full_flag | partial_flag");
    app->add_option("--k", k, "k of Gr(k,n)");
    app->add_option("--n", n, "n of Gr(k,n)");
    app->add_option("--type", type, "Cartan type of a flag variety");
    app->add_option("--rank", rank, "rank of a flag variety");
    app->add_option("--parabolic", parabolic, "generators of the parabolic, e.g. \"1 3\"");
    app->add_option("--group", group, "none | gm | torus | gl | parabolic | solvable | borel");
    app->add_option("--group-rank", group_rank, "torus rank, k of GL_k, or rank of a Borel");
    app->add_option("--group-n", group_n, "ambient GL_n of a parabolic or Borel");
    app->add_option("--group-type", group_type, "Cartan type of a Borel, or GL");
    app->add_option("--blocks", blocks, "Levi block sizes of a parabolic, e.g. \"2 1\"");
  }

  formalis::SpaceSpec build() const {
    using namespace formalis;
    if (!in.empty()) return io::space_spec_from_json(read_input(in));
    SpaceSpec s;
    if (space == "point")
      s = SpaceSpec::point();
    else if (space == "grassmannian")
      s = SpaceSpec::grassmannian(k, n);
    else if (space == "full_flag")
      s = SpaceSpec::full_flag(type, rank);
    else if (space == "partial_flag") {
      const auto gens = parse_ints(parabolic);
      s = SpaceSpec::partial_flag(type, rank, {gens.begin(), gens.end()});
    } else
      throw InvalidInput("unknown space '" + space + "'");

    if (group == "none") {
    } else if (group == "gm")
      s.group = group_gm();
    else if (group == "torus")
      s.group = group_torus(group_rank);
    else if (group == "gl")
      s.group = group_gl(group_rank);
    else if (group == "parabolic")
      s.group = group_parabolic(group_n, parse_ints(blocks));
    else if (group == "solvable")
      s.group = group_solvable(group_rank);
    else if (group == "borel") {
      // Default: the Borel that belongs to the space.
      std::string gt = group_type;
      if (gt.empty()) gt = (space == "grassmannian") ? "GL" : type;
      if (gt == "GL")
        s.group = group_borel_gl(group_n >= 0 ? group_n : (space == "grassmannian" ? n : rank + 1));
      else
        s.group = group_borel(gt, group_rank >= 0 ? group_rank : rank);
    } else
      throw InvalidInput("unknown group '" + group + "'");
    return s;
  }
};

int fail(const Output& out, const char* kind, const std::string& message, int code) {
  json err{{"error", {{"kind", kind}, {"message", message}}}};
  try {
    out.write(err);
  } catch (...) {
    std::cout << err.dump(2) << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"formalis: formality, Kazhdan-Lusztig and weight-set toolkit"};
  app.require_subcommand(1);
  Output out;
  app.add_option("--out", out.path, "write the JSON report here instead of stdout");

  std::string in;
  auto add_in = [&](CLI::App* sub, const char* what) { sub->add_option("--in", in, what)->required(); };

  long long l = 0, q = 0, bound = 1000;
  int degree = 0;
  std::string type, xw, ww, lambda, mu, wts, parabolic, golden;
  int rank = 0;

  auto* snf = app.add_subcommand("snf", "Smith normal form of an integer matrix");
  add_in(snf, "JSON: a list of rows, or {\"matrix\": rows}");
  snf->add_option("--l", l, "also report l-local torsion for this prime");

  auto* coh = app.add_subcommand("cohomology", "cohomology table of a bigraded module");
  add_in(coh, "bigraded module JSON");
  auto* pur = app.add_subcommand("purity", "purity weight of a bigraded module");
  add_in(pur, "bigraded module JSON");
  auto* trunc = app.add_subcommand("truncate", "diagonal truncation S(M) of a pure module");
  add_in(trunc, "bigraded module JSON");
  auto* roof = app.add_subcommand("roof", "formality roof A <- S(A) -> H(A) of a dgg-algebra");
  add_in(roof, "dgg-algebra JSON");
  auto* broof = app.add_subcommand("bimodule-roof", "formality roof of a dgg-bimodule");
  add_in(broof, "dgg-bimodule JSON");
  auto* lim = app.add_subcommand("limit", "inverse limit of a graded-algebra tower through a degree");
  add_in(lim, "tower JSON");
  lim->add_option("--degree", degree, "degree bound d")->required();

  std::string coxeter_in;
  auto add_coxeter = [&](CLI::App* sub) {
    sub->add_option("--type", type, "Cartan type A|B|C|D|E|F|G");
    sub->add_option("--rank", rank, "rank");
    sub->add_option("--coxeter", coxeter_in, "coxeter JSON file instead of --type/--rank");
  };
  auto* kl = app.add_subcommand("kl", "Kazhdan-Lusztig polynomial P_{x,w}");
  add_coxeter(kl);
  kl->add_option("--x", xw, "reduced word, e.g. \"s2\"")->required();
  kl->add_option("--w", ww, "reduced word, e.g. \"s2 s1 s3 s2\"")->required();

  auto* st = app.add_subcommand("stalks", "parabolic stalk tables and parity verdict");
  add_coxeter(st);
  st->add_option("--parabolic", parabolic, "generators of W_J, e.g. \"1 3\" (empty: full flag)");
  st->add_option("--lambda", lambda, "minimal representative; all pairs when omitted");
  st->add_option("--mu", mu, "minimal representative");
  st->add_option("--l", l, "prime for the parity verdict");

  SpaceFlags wt_flags, verdict_flags;
  auto* wt = app.add_subcommand("wt", "weight set wt(X,G) and wr");
  wt_flags.add(wt);
  auto* sep = app.add_subcommand("separated", "is a weight set separated at (q, l)");
  sep->add_option("--wt", wts, "exponents, e.g. \"0 1 2\"")->required();
  sep->add_option("--q", q, "q")->required();
  sep->add_option("--l", l, "prime l")->required();
  auto* adm = app.add_subcommand("admissible", "smallest prime q separating a weight set at l");
  adm->add_option("--wt", wts, "exponents")->required();
  adm->add_option("--l", l, "prime l")->required();
  adm->add_option("--bound", bound, "search bound for q");
  auto* ver = app.add_subcommand("verdict", "formality verdict for (space, group, l, q)");
  verdict_flags.add(ver);
  ver->add_option("--l", l, "prime l")->required();
  ver->add_option("--q", q, "q")->required();
  auto* tab = app.add_subcommand("table", "regenerate the weight/parity table and compare with the golden copy");
  golden = std::string(FORMALIS_DATA_DIR) + "/table-golden.json";
  tab->add_option("--golden", golden, "golden table JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(out, "usage", e.what(), 2);
  }

  auto coxeter = [&]() {
    if (!coxeter_in.empty()) return io::coxeter_from_json(read_input(coxeter_in));
    if (type.empty()) throw formalis::InvalidInput("give --type and --rank, or --coxeter");
    return formalis::CoxeterSystem::of_type(type, rank);
  };

  try {
    using namespace formalis;
    json report;
    if (*snf) {
      const json j = read_input(in);
      const IntMatrix m = io::matrix_from_json(j.is_object() ? io::need(j, "matrix") : j);
      report = io::smith_to_json(smith_normal_form(m));
      report["rank"] = formalis::rank(m);
      if (l) report["lLocalTorsion"] = l_local_torsion(m, checked_prime(l));
    } else if (*coh) {
      report = io::cohomology_to_json(cohomology(io::module_from_json(read_input(in))));
    } else if (*pur) {
      const auto h = cohomology(io::module_from_json(read_input(in)));
      const auto w = purity_weight(h);
      report["pure"] = w.has_value();
      if (w)
        report["weight"] = *w;
      else {
        // Two nonzero groups with different i - j.
        std::vector<json> wit;
        std::set<int> weights;
        for (const auto& [b, g] : h.groups)
          if (weights.insert(b.internal - b.cohom).second) wit.push_back({b.internal, b.cohom});
        report["witnesses"] = wit;
      }
    } else if (*trunc) {
      const auto t = diagonal_truncation(io::module_from_json(read_input(in)));
      json inc = json::array();
      for (const auto& [b, m] : t.inclusion.blocks)
        inc.push_back({{"i", b.internal}, {"j", b.cohom}, {"matrix", io::matrix_to_json(m)}});
      report = {{"truncated", io::module_to_json(t.truncated)}, {"inclusion", inc}};
    } else if (*roof) {
      report = io::roof_to_json(verify_formality_roof(io::algebra_from_json(read_input(in))));
    } else if (*broof) {
      report = io::bimodule_roof_to_json(verify_bimodule_roof(io::bimodule_from_json(read_input(in))));
    } else if (*lim) {
      report = io::limit_to_json(graded_limit(io::tower_from_json(read_input(in)), degree));
    } else if (*kl) {
      const auto sys = coxeter();
      report = kl_polynomial(sys, sys.parse(xw), sys.parse(ww)).to_string();
    } else if (*st) {
      const auto sys = coxeter();
      std::set<int> J;
      for (int g : parse_ints(parabolic)) {
        if (g < 1 || static_cast<std::size_t>(g) > sys.rank()) throw InvalidInput("parabolic generator out of range");
        J.insert(g - 1);
      }
      std::vector<StalkTable> tables;
      if (!lambda.empty() || !mu.empty()) {
        if (lambda.empty() || mu.empty()) throw InvalidInput("give both --lambda and --mu, or neither");
        tables.push_back(parabolic_stalk_table(sys, J, sys.parse(lambda), sys.parse(mu)));
      } else {
        const auto reps = minimal_coset_representatives(sys, J);
        for (auto lam : reps)
          for (auto m : reps)
            if (sys.bruhat_leq(m, lam)) tables.push_back(parabolic_stalk_table(sys, J, lam, m));
      }
      json tj = json::array();
      for (const auto& t : tables) tj.push_back(io::stalk_to_json(sys, t));
      report["tables"] = tj;
      if (l) {
        std::optional<ParityRecord> rec;
        if (!type.empty()) {
          const auto table = default_parity_table();
          rec = (!J.empty() && static_cast<int>(J.size()) == rank - 1 && type == "A")
                    ? find_parity(table, "Grassmannian", 0)
                    : find_parity(table, type, rank);
        }
        const auto v = bgs_parity_verdict(tables, checked_prime(l), rec);
        report["parity"] = {{"verdict", to_string(v.parity)},
                            {"combinatoriallyEven", v.combinatorially_even},
                            {"reason", v.reason},
                            {"source", v.source}};
      }
    } else if (*wt) {
      const auto cert = build_cert(wt_flags.build(), default_parity_table());
      report["description"] = cert.description;
      report["wt"] = cert.wt ? json(cert.wt->list()) : json(nullptr);
      report["wr"] = cert.wt ? json(wr(*cert.wt)) : json(nullptr);
    } else if (*sep) {
      const auto w = parse_weights(wts);
      const auto lp = checked_prime(l);
      report = {{"separated", separated(w, q, lp)}, {"order", multiplicative_order(reduce_mod(q, lp), lp)}};
    } else if (*adm) {
      const auto w = parse_weights(wts);
      const auto a = admissible_q(w, checked_prime(l), bound);
      report = {{"q", a.q ? json(*a.q) : json(nullptr)}, {"lExceedsWr", a.l_exceeds_wr}, {"wr", wr(w)}};
    } else if (*ver) {
      report = io::verdict_to_json(formality_verdict(verdict_flags.build(), checked_prime(l), q));
    } else if (*tab) {
      const auto rep = emit_table(load_json_file(golden));
      report = to_json(rep);
      if (!rep.matches()) {
        report["error"] = {{"kind", "table-mismatch"},
                           {"message", std::to_string(rep.mismatches.size()) + " entries differ from " + golden}};
        out.write(report);
        return 1;
      }
    }
    out.write(report);
    return 0;
  } catch (const formalis::NotPure& e) {
    json err{{"error", {{"kind", e.kind()}, {"message", e.what()}, {"witness", {e.internal(), e.cohom()}}}}};
    out.write(err);
    return 1;
  } catch (const formalis::DomainError& e) {
    return fail(out, e.kind(), e.what(), 1);
  } catch (const formalis::InvalidInput& e) {
    return fail(out, e.kind(), e.what(), 2);
  } catch (const std::exception& e) {
    return fail(out, "invalid-input", e.what(), 2);
  }
}
