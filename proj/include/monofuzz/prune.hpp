#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monofuzz/bounds.hpp"
#include "monofuzz/search.hpp"

namespace monofuzz {

// Impl ids justifying each bound of `api` under `s`. Bounds accepted only
// permissively contribute a synthetic "assumed:<trait>:<type>" token.
std::set<std::string> impls_set(const ApiSignature& api, const MonoSolution& s, const ImplIndex& idx,
                                unsigned fuel = kDefaultBoundsFuel);

struct CoverOptions {
  // 0 selects the lexicographically smallest solution when nothing needs
  // covering; any other value picks one with a seeded generator.
  std::uint64_t seed = 0;
};

// Greedy set cover over the impl sets of `solutions` (catalog order).
// Returns the chosen solutions in selection order.
std::vector<MonoSolution> minimal_cover(const ApiSignature& api, const std::vector<MonoSolution>& solutions,
                                        const ImplIndex& idx, unsigned fuel = kDefaultBoundsFuel,
                                        const CoverOptions& opts = {});
// Same greedy procedure over precomputed impl sets; returns indices.
std::vector<std::size_t> greedy_cover(const std::vector<std::set<std::string>>& impl_sets);

// A required argument: concrete type plus the declared input it instantiates.
struct Requirement {
  TypeExpr type;
  TypeExpr pattern;

  friend bool operator==(const Requirement&, const Requirement&) = default;
  friend auto operator<=>(const Requirement&, const Requirement&) = default;
};

struct ApiPruneReport {
  std::string api_id;
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  std::set<std::string> covered_impls;
};

struct ReservedSet {
  std::vector<std::string> reserved;  // instance ids in reservation order
  std::set<std::string> reserved_ids;
  std::set<Requirement> require;
  std::set<Requirement> produced;
  std::vector<Requirement> unsatisfiable;
  std::vector<ApiPruneReport> per_api;
  std::size_t mono_total = 0;
  std::size_t mono_reserved = 0;

  bool contains(std::string_view id) const { return reserved_ids.contains(std::string(id)); }
  double reduction_ratio() const;
  nlohmann::json to_json() const;
};

// Can a value of type `output` be turned into the required argument?
bool produces(const TypeExpr& output, const Requirement& req);

ReservedSet run_prune(const DependencyGraph& graph, const MonoCatalog& catalog, const Corpus& c,
                      const ImplIndex& idx, unsigned fuel = kDefaultBoundsFuel, const CoverOptions& opts = {});

}  // namespace monofuzz
