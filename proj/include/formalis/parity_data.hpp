#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "formalis/error.hpp"
#include "formalis/kl.hpp"
#include "json.hpp"

namespace formalis {

// Modular IC-parity facts per family, as listed in the weight table. Families without a
// Cartan type use rank 0: "point" (parabolic acting on a point), "Grassmannian" (Borel of GL_n
// acting on Gr(k,n)) and "reductive" (G/B for a general connected reductive G, unknown).
inline std::vector<ParityRecord> builtin_parity_table() {
  std::vector<ParityRecord> out;
  for (int k = 1; k <= 6; ++k) out.push_back({"A", k, {}, true, "curated-table"});
  out.push_back({"A", 7, {2}, true, "curated-table"});
  out.push_back({"B", 2, {2}, true, "curated-table"});
  out.push_back({"D", 4, {2}, true, "curated-table"});
  out.push_back({"G", 2, {}, true, "curated-table"});
  out.push_back({"point", 0, {}, true, "curated-table"});
  out.push_back({"Grassmannian", 0, {}, true, "curated-table"});
  out.push_back({"reductive", 0, {}, false, "curated-table"});
  return out;
}

inline nlohmann::json parity_table_to_json(const std::vector<ParityRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j{{"cartanType", r.cartan_type}, {"rank", r.rank}, {"excludedPrimes", r.excluded_primes},
                     {"source", r.source}};
    if (!r.known) j["known"] = false;
    out.push_back(std::move(j));
  }
  return out;
}

inline std::vector<ParityRecord> parity_table_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInput("parity table must be a JSON array");
  std::vector<ParityRecord> out;
  for (const auto& row : j) {
    if (!row.is_object() || !row.contains("cartanType") || !row.contains("rank") || !row.contains("excludedPrimes") ||
        !row.contains("source"))
      throw InvalidInput("parity record needs cartanType, rank, excludedPrimes and source");
    ParityRecord r;
    try {
      r.cartan_type = row.at("cartanType").get<std::string>();
      r.rank = row.at("rank").get<int>();
      r.excluded_primes = row.at("excludedPrimes").get<std::vector<std::uint64_t>>();
      r.source = row.at("source").get<std::string>();
      r.known = row.value("known", true);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("malformed parity record: ") + e.what());
    }
    for (auto l : r.excluded_primes)
      if (!is_prime(l)) throw InvalidInput("excluded prime " + std::to_string(l) + " is not prime");
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ParityRecord> load_parity_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open parity table " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("parity table " + path + " is not valid JSON: " + e.what());
  }
  return parity_table_from_json(j);
}

// FORMALIS_PARITY_TABLE overrides the built-in records.
inline std::vector<ParityRecord> default_parity_table() {
  if (const char* path = std::getenv("FORMALIS_PARITY_TABLE"); path && *path) return load_parity_table(path);
  return builtin_parity_table();
}

inline std::optional<ParityRecord> find_parity(const std::vector<ParityRecord>& table, const std::string& type,
                                               int rank) {
  for (const auto& r : table)
    if (r.cartan_type == type && r.rank == rank) return r;
  return std::nullopt;
}

}  // namespace formalis
