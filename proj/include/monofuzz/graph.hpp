#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "monofuzz/corpus.hpp"
#include "monofuzz/type_expr.hpp"

namespace monofuzz {

using TypeId = std::uint32_t;

struct ConsumerEdge {
  TypeId type;
  std::string api;
  std::size_t input_index;
};

struct ProducerEdge {
  std::string api;
  TypeId type;
};

struct MatchEdge {
  TypeId concrete;
  TypeId generic;

  friend bool operator==(const MatchEdge&, const MatchEdge&) = default;
  friend auto operator<=>(const MatchEdge&, const MatchEdge&) = default;
};

// Generic API dependency graph. Type nodes are interned, so comparing two
// node ids is structural type equality. Nodes and edges are only appended.
class DependencyGraph {
 public:
  static DependencyGraph build(const Corpus& c);

  // Inserts a concrete type node (idempotent) and returns the match edges it
  // created. Throws std::invalid_argument if `t` contains a Param.
  std::vector<MatchEdge> add_concrete_type(const TypeExpr& t);

  // Throw std::out_of_range when `t` is not a node.
  std::set<std::string> producers_of(const TypeExpr& t) const;
  std::set<std::string> consumers_of(const TypeExpr& t) const;

  std::optional<TypeId> find(const TypeExpr& t) const;
  const TypeExpr& type(TypeId id) const { return types_[id]; }
  std::size_t type_count() const { return types_.size(); }

  const std::vector<std::string>& non_generic_apis() const { return non_generic_apis_; }
  const std::vector<std::string>& generic_apis() const { return generic_apis_; }
  std::vector<TypeId> concrete_types() const;
  std::vector<TypeId> generic_types() const;

  const std::vector<ConsumerEdge>& consumer_edges() const { return consumers_; }
  const std::vector<ProducerEdge>& producer_edges() const { return producers_; }
  const std::vector<MatchEdge>& match_edges() const { return matches_; }
  bool has_match_edge(const TypeExpr& concrete, const TypeExpr& generic) const;

  // Checks the edge-endpoint invariants; returns one message per violation.
  std::vector<std::string> audit() const;

  nlohmann::json to_json() const;
  std::string to_dot() const;

 private:
  TypeId intern(const TypeExpr& t);
  std::vector<MatchEdge> refresh_matches_for_concrete(TypeId id);

  std::vector<TypeExpr> types_;
  std::unordered_map<TypeExpr, TypeId> ids_;
  std::vector<std::string> non_generic_apis_;
  std::vector<std::string> generic_apis_;
  std::set<std::string> generic_api_set_;
  std::vector<ConsumerEdge> consumers_;
  std::vector<ProducerEdge> producers_;
  std::vector<MatchEdge> matches_;
  std::set<MatchEdge> match_set_;
};

// True when a value of concrete type `available` can serve as an instance of
// `pattern`, possibly through transformation rules.
bool can_match(const TypeExpr& available, const TypeExpr& pattern);

}  // namespace monofuzz
