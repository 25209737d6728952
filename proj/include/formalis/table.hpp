#pragma once

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "formalis/approx.hpp"
#include "formalis/error.hpp"
#include "json.hpp"

namespace formalis {

struct TableInstance {
  std::string name;
  WeightSet wt_x;
  WeightSet wt_xg;
};

struct TableRow {
  std::string key;
  std::string action;
  std::string parity;  // "any", "l != 2", "??"
  std::vector<TableInstance> instances;
};

inline std::string parity_column(const ParityRule& p) {
  if (!p.known) return "??";
  if (p.excluded.empty()) return "any";
  std::string out;
  for (auto l : p.excluded) out += (out.empty() ? "" : " and ") + std::string("l != ") + std::to_string(l);
  return out;
}

namespace detail {

// wt(X) from the space alone, wt(X,G) and parity from the full certificate.
inline TableInstance table_instance(const std::string& name, const SpaceSpec& s, const std::vector<ParityRecord>& parity,
                                    std::set<std::string>& parity_seen) {
  SpaceSpec bare = s;
  bare.group = {};
  const auto x = build_cert(bare, parity);
  const auto xg = build_cert(s, parity);
  if (!x.wt || !xg.wt) throw DomainError("no closed-form weight set for " + name);
  parity_seen.insert(parity_column(xg.parity));
  return {name, *x.wt, *xg.wt};
}

inline void finish_row(TableRow& row, const std::set<std::string>& seen) {
  if (seen.size() != 1) throw DomainError("row " + row.key + " mixes parity verdicts");
  row.parity = *seen.begin();
}

}  // namespace detail

// Rows of the weight/parity table, rebuilt from the certificate constructors.
inline std::vector<TableRow> generate_table(const std::vector<ParityRecord>& parity) {
  std::vector<TableRow> rows;
  using detail::table_instance;

  {
    // A general reductive G: only the generic record is consulted.
    std::vector<ParityRecord> generic;
    for (const auto& r : parity)
      if (r.rank == 0) generic.push_back(r);
    TableRow row{"reductive", "B on G/B, G connected reductive", "", {}};
    std::set<std::string> seen;
    const std::vector<std::pair<std::string, int>> types = {
        {"A", 1}, {"A", 2}, {"A", 3}, {"A", 4}, {"A", 5}, {"A", 6}, {"A", 7}, {"B", 2}, {"B", 3}, {"B", 4},
        {"C", 3}, {"D", 4}, {"D", 5}, {"E", 6}, {"E", 7}, {"E", 8}, {"F", 4}, {"G", 2}};
    std::vector<std::pair<std::string, SpaceSpec>> specs;
    for (const auto& [t, r] : types)
      specs.push_back({t + std::to_string(r), SpaceSpec::full_flag(t, r).with_group(group_borel(t, r))});
    for (int n = 2; n <= 6; ++n)
      specs.push_back({"GL" + std::to_string(n), SpaceSpec::full_flag("A", n - 1).with_group(group_borel_gl(n))});
    std::sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [name, s] : specs) row.instances.push_back(table_instance(name, s, generic, seen));
    detail::finish_row(row, seen);
    rows.push_back(std::move(row));
  }
  {
    TableRow row{"point-parabolic", "P on pt, P in GL_n parabolic", "", {}};
    std::set<std::string> seen;
    for (int n = 1; n <= 8; ++n) {
      std::vector<std::vector<int>> shapes = {{n}, std::vector<int>(n, 1)};
      if (n >= 2) shapes.push_back({(n + 1) / 2, n / 2});
      std::set<std::vector<int>> done;
      for (const auto& b : shapes) {
        if (!done.insert(b).second) continue;
        std::string name = "GL" + std::to_string(n) + ":";
        for (std::size_t i = 0; i < b.size(); ++i) name += (i ? "," : "") + std::to_string(b[i]);
        row.instances.push_back(table_instance(name, SpaceSpec::point().with_group(group_parabolic(n, b)), parity, seen));
      }
    }
    detail::finish_row(row, seen);
    rows.push_back(std::move(row));
  }
  {
    TableRow row{"grassmannian", "B on Gr(k,n), B in GL_n Borel", "", {}};
    std::set<std::string> seen;
    for (int n = 2; n <= 8; ++n)
      for (int k = 1; k < n; ++k)
        row.instances.push_back(table_instance("Gr(" + std::to_string(k) + "," + std::to_string(n) + ")",
                                               SpaceSpec::grassmannian(k, n).with_group(group_borel_gl(n)), parity,
                                               seen));
    detail::finish_row(row, seen);
    rows.push_back(std::move(row));
  }
  auto semisimple = [&](const std::string& key, const std::string& type, std::vector<int> ranks) {
    TableRow row{key, "B on G/B, type " + key, "", {}};
    std::set<std::string> seen;
    for (int r : ranks)
      row.instances.push_back(table_instance(type + std::to_string(r),
                                             SpaceSpec::full_flag(type, r).with_group(group_borel(type, r)), parity,
                                             seen));
    detail::finish_row(row, seen);
    rows.push_back(std::move(row));
  };
  semisimple("A_k, k<=6", "A", {1, 2, 3, 4, 5, 6});
  semisimple("A_7", "A", {7});
  semisimple("B_2", "B", {2});
  semisimple("D_4", "D", {4});
  semisimple("G_2", "G", {2});
  return rows;
}

inline nlohmann::json weight_to_json(const WeightSet& w) {
  if (w.is_interval_from_zero()) return w.max();
  return w.list();
}

inline WeightSet weight_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return WeightSet::interval(0, j.get<int>());
  if (j.is_array()) {
    WeightSet w;
    for (const auto& e : j) {
      if (!e.is_number_integer() || e.get<int>() < 0) throw InvalidInput("weight exponents must be non-negative integers");
      w.exponents.insert(e.get<int>());
    }
    return w;
  }
  throw InvalidInput("weight set must be an integer m (for 0..m) or a list of exponents");
}

struct TableMismatch {
  std::string row;
  std::string instance;
  std::string field;
  std::string expected;
  std::string actual;
};

struct TableReport {
  std::vector<TableRow> rows;
  std::vector<TableMismatch> mismatches;
  bool matches() const { return mismatches.empty(); }
};

inline std::string weight_text(const WeightSet& w) {
  if (w.is_interval_from_zero()) return "{0.." + std::to_string(w.max()) + "}";
  std::string out = "{";
  for (int e : w.exponents) out += (out.size() > 1 ? "," : "") + std::to_string(e);
  return out + "}";
}

// Exact set comparison, row by row and instance by instance, in both directions.
inline TableReport compare_table(std::vector<TableRow> rows, const nlohmann::json& golden) {
  TableReport rep;
  if (!golden.is_object() || !golden.contains("rows") || !golden["rows"].is_array())
    throw InvalidInput("golden table needs a rows array");
  std::map<std::string, const TableRow*> by_key;
  for (const auto& r : rows) by_key[r.key] = &r;
  std::set<std::string> seen_rows;
  try {
    for (const auto& g : golden["rows"]) {
      const std::string key = g.at("row").get<std::string>();
      seen_rows.insert(key);
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        rep.mismatches.push_back({key, "", "row", "present", "missing"});
        continue;
      }
      const TableRow& row = *it->second;
      const std::string gp = g.at("parity").get<std::string>();
      if (gp != row.parity) rep.mismatches.push_back({key, "", "parity", gp, row.parity});
      std::map<std::string, const TableInstance*> inst;
      for (const auto& x : row.instances) inst[x.name] = &x;
      std::set<std::string> seen_inst;
      for (const auto& gi : g.at("instances")) {
        const std::string name = gi.at("instance").get<std::string>();
        seen_inst.insert(name);
        auto jt = inst.find(name);
        if (jt == inst.end()) {
          rep.mismatches.push_back({key, name, "instance", "present", "missing"});
          continue;
        }
        const WeightSet ex = weight_from_json(gi.at("wtX")), exg = weight_from_json(gi.at("wtXG"));
        if (!(ex == jt->second->wt_x)) rep.mismatches.push_back({key, name, "wtX", weight_text(ex), weight_text(jt->second->wt_x)});
        if (!(exg == jt->second->wt_xg))
          rep.mismatches.push_back({key, name, "wtXG", weight_text(exg), weight_text(jt->second->wt_xg)});
      }
      for (const auto& x : row.instances)
        if (!seen_inst.count(x.name)) rep.mismatches.push_back({key, x.name, "instance", "absent", "extra"});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed golden table: ") + e.what());
  }
  for (const auto& r : rows)
    if (!seen_rows.count(r.key)) rep.mismatches.push_back({r.key, "", "row", "absent", "extra"});
  rep.rows = std::move(rows);
  return rep;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + " is not valid JSON: " + e.what());
  }
}

inline TableReport emit_table(const nlohmann::json& golden, const std::vector<ParityRecord>& parity = default_parity_table()) {
  return compare_table(generate_table(parity), golden);
}

inline nlohmann::json to_json(const TableReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json inst = nlohmann::json::array();
    for (const auto& x : r.instances)
      inst.push_back({{"instance", x.name}, {"wtX", weight_to_json(x.wt_x)}, {"wtXG", weight_to_json(x.wt_xg)}});
    rows.push_back({{"row", r.key}, {"action", r.action}, {"parity", r.parity}, {"instances", inst}});
  }
  nlohmann::json mm = nlohmann::json::array();
  for (const auto& m : rep.mismatches)
    mm.push_back({{"row", m.row}, {"instance", m.instance}, {"field", m.field}, {"expected", m.expected}, {"actual", m.actual}});
  return {{"matches", rep.matches()}, {"mismatches", mm}, {"rows", rows}};
}

}  // namespace formalis
