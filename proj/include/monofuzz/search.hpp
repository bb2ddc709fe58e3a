#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "monofuzz/bounds.hpp"
#include "monofuzz/corpus.hpp"
#include "monofuzz/graph.hpp"
#include "monofuzz/lattice.hpp"

namespace monofuzz {

inline constexpr unsigned kDefaultMaxDepth = 2;

// A callable API: a non-generic API or a monomorphized generic one.
struct ApiInstance {
  std::string id;       // API id, or "<api id>@<type args>" for monomorphic instances
  std::string api_id;   // id of the declaring API
  std::optional<MonoSolution> solution;
  ApiSignature signature;               // fully concrete
  std::vector<TypeExpr> input_patterns;  // inputs as declared (may contain Params)
  BoundsVerdict verdict = BoundsVerdict::Valid;
  std::size_t round = 0;
  std::size_t discovery = 0;

  bool is_mono() const { return solution.has_value(); }
};

ApiInstance make_instance(const ApiSignature& api, const std::optional<MonoSolution>& s = std::nullopt);

// Insertion-ordered set of concrete types with an index of unwrap payloads,
// so "is x obtainable from some member via transformation rules" is a lookup.
class ReachableSet {
 public:
  bool insert(const TypeExpr& t);
  bool contains(const TypeExpr& t) const { return members_.contains(t); }
  std::size_t size() const { return order_.size(); }
  const TypeExpr& operator[](std::size_t i) const { return order_[i]; }
  const std::vector<TypeExpr>& items() const { return order_; }
  // Members r with unwrap^depth(r) == t (depth 1 or 2).
  bool has_unwrap_source(const TypeExpr& t, int depth) const;

 private:
  std::vector<TypeExpr> order_;
  std::unordered_set<TypeExpr> members_;
  std::unordered_map<TypeExpr, int> payload1_;
  std::unordered_map<TypeExpr, int> payload2_;
};

// Primitive, or a primitive behind at most kMaxChainLength decorations.
bool is_primitive_input(const TypeExpr& t, const Corpus& c);

// Can an argument of concrete type `x`, declared as `pattern`, be supplied
// from the fuzzer or from a member of `reachable`?
bool input_reachable(const TypeExpr& x, const TypeExpr& pattern, const ReachableSet& reachable,
                     const Corpus& c);

// Reachability of a concrete API against a set of producible types. Throws
// std::invalid_argument if the signature still contains a Param.
bool is_reachable(const ApiSignature& api, const ReachableSet& reachable, const Corpus& c);
bool is_reachable(const ApiInstance& inst, const ReachableSet& reachable, const Corpus& c);

struct SearchOptions {
  unsigned max_depth = kDefaultMaxDepth;
  unsigned bounds_fuel = kDefaultBoundsFuel;
};

struct MonoCatalog {
  std::map<std::string, SolutionSet> mo;  // generic API id -> reachable, bounds-valid solutions
  ReachableSet reachable;
  std::vector<std::size_t> type_round;  // discovery round per reachable type (0 = seed)
  std::vector<ApiInstance> instances;   // reached APIs in discovery order
  BoundsCounters bounds;
  std::size_t rounds = 0;

  std::vector<const ApiInstance*> mono_apis() const;
  const ApiInstance* find(std::string_view instance_id) const;
  nlohmann::json to_json() const;
};

struct MergeTraceStep {
  std::size_t input_index;
  TypeExpr pattern;
  SolutionSet matched;  // union over the reachable types
  SolutionSet merged;   // running intersection after this input
};

// Union-then-merge over the generic inputs of `gapi`: the largest set of
// solutions under which every generic input is instantiable from `reachable`.
SolutionSet solve_generic_inputs(const ApiSignature& gapi, std::span<const TypeExpr> reachable,
                                 std::vector<MergeTraceStep>* trace = nullptr);

MonoCatalog run_search(DependencyGraph& graph, const Corpus& c, const ImplIndex& idx,
                       const SearchOptions& opts = {});

}  // namespace monofuzz
