#include "monofuzz/graph.hpp"

#include <sstream>
#include <stdexcept>

#include "monofuzz/lattice.hpp"

namespace monofuzz {

bool can_match(const TypeExpr& available, const TypeExpr& pattern) {
  return !apply_transformations(available, pattern).empty();
}

DependencyGraph DependencyGraph::build(const Corpus& c) {
  DependencyGraph g;
  for (const auto& api : c.apis) {
    (api.is_generic() ? g.generic_apis_ : g.non_generic_apis_).push_back(api.id);
    if (api.is_generic()) g.generic_api_set_.insert(api.id);
    for (std::size_t i = 0; i < api.inputs.size(); ++i) {
      g.consumers_.push_back(ConsumerEdge{g.intern(api.inputs[i]), api.id, i});
    }
    if (api.output) g.producers_.push_back(ProducerEdge{api.id, g.intern(*api.output)});
  }
  for (TypeId id = 0; id < g.types_.size(); ++id) {
    if (!g.types_[id].has_params()) g.refresh_matches_for_concrete(id);
  }
  return g;
}

TypeId DependencyGraph::intern(const TypeExpr& t) {
  auto [it, inserted] = ids_.try_emplace(t, static_cast<TypeId>(types_.size()));
  if (inserted) types_.push_back(t);
  return it->second;
}

std::vector<MatchEdge> DependencyGraph::refresh_matches_for_concrete(TypeId id) {
  std::vector<MatchEdge> delta;
  for (TypeId g = 0; g < types_.size(); ++g) {
    if (!types_[g].has_params()) continue;
    MatchEdge e{id, g};
    if (match_set_.contains(e) || !can_match(types_[id], types_[g])) continue;
    match_set_.insert(e);
    matches_.push_back(e);
    delta.push_back(e);
  }
  return delta;
}

std::vector<MatchEdge> DependencyGraph::add_concrete_type(const TypeExpr& t) {
  if (t.has_params()) {
    throw std::invalid_argument("add_concrete_type: '" + t.str() + "' contains a type parameter");
  }
  if (ids_.contains(t)) return {};
  return refresh_matches_for_concrete(intern(t));
}

std::optional<TypeId> DependencyGraph::find(const TypeExpr& t) const {
  auto it = ids_.find(t);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> DependencyGraph::producers_of(const TypeExpr& t) const {
  auto id = find(t);
  if (!id) throw std::out_of_range("producers_of: '" + t.str() + "' is not a type node");
  std::set<std::string> out;
  for (const auto& e : producers_) {
    if (e.type == *id) out.insert(e.api);
  }
  return out;
}

std::set<std::string> DependencyGraph::consumers_of(const TypeExpr& t) const {
  auto id = find(t);
  if (!id) throw std::out_of_range("consumers_of: '" + t.str() + "' is not a type node");
  std::set<std::string> out;
  for (const auto& e : consumers_) {
    if (e.type == *id) out.insert(e.api);
  }
  return out;
}

std::vector<TypeId> DependencyGraph::concrete_types() const {
  std::vector<TypeId> out;
  for (TypeId id = 0; id < types_.size(); ++id) {
    if (!types_[id].has_params()) out.push_back(id);
  }
  return out;
}

std::vector<TypeId> DependencyGraph::generic_types() const {
  std::vector<TypeId> out;
  for (TypeId id = 0; id < types_.size(); ++id) {
    if (types_[id].has_params()) out.push_back(id);
  }
  return out;
}

bool DependencyGraph::has_match_edge(const TypeExpr& concrete, const TypeExpr& generic) const {
  auto a = find(concrete);
  auto b = find(generic);
  return a && b && match_set_.contains(MatchEdge{*a, *b});
}

std::vector<std::string> DependencyGraph::audit() const {
  std::vector<std::string> problems;
  auto endpoint_ok = [&](const std::string& api, TypeId t) {
    return generic_api_set_.contains(api) || !types_[t].has_params();
  };
  for (const auto& e : consumers_) {
    if (!endpoint_ok(e.api, e.type)) {
      problems.push_back("consumer edge " + types_[e.type].str() + " -> " + e.api +
                         ": non-generic API touches a generic type");
    }
  }
  for (const auto& e : producers_) {
    if (!endpoint_ok(e.api, e.type)) {
      problems.push_back("producer edge " + e.api + " -> " + types_[e.type].str() +
                         ": non-generic API touches a generic type");
    }
  }
  for (const auto& e : matches_) {
    const auto& c = types_[e.concrete];
    const auto& g = types_[e.generic];
    if (c.has_params() || !g.has_params() || !can_match(c, g)) {
      problems.push_back("match edge " + c.str() + " -> " + g.str() + " is ill-formed");
    }
  }
  // Every concrete/generic pair that matches must be recorded.
  for (TypeId c = 0; c < types_.size(); ++c) {
    if (types_[c].has_params()) continue;
    for (TypeId g = 0; g < types_.size(); ++g) {
      if (types_[g].has_params() && can_match(types_[c], types_[g]) &&
          !match_set_.contains(MatchEdge{c, g})) {
        problems.push_back("missing match edge " + types_[c].str() + " -> " + types_[g].str());
      }
    }
  }
  return problems;
}

nlohmann::json DependencyGraph::to_json() const {
  using nlohmann::json;
  json j;
  j["api_nodes"] = {{"non_generic", non_generic_apis_}, {"generic", generic_apis_}};
  json types = json::array();
  for (TypeId id = 0; id < types_.size(); ++id) {
    types.push_back({{"id", id}, {"type", types_[id].str()}, {"generic", types_[id].has_params()}});
  }
  j["type_nodes"] = std::move(types);
  json cons = json::array();
  for (const auto& e : consumers_) cons.push_back({{"type", e.type}, {"api", e.api}, {"input", e.input_index}});
  json prods = json::array();
  for (const auto& e : producers_) prods.push_back({{"api", e.api}, {"type", e.type}});
  json matches = json::array();
  for (const auto& e : matches_) matches.push_back({{"concrete", e.concrete}, {"generic", e.generic}});
  j["edges"] = {{"consumer", std::move(cons)}, {"producer", std::move(prods)}, {"match", std::move(matches)}};
  return j;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace

std::string DependencyGraph::to_dot() const {
  std::ostringstream os;
  os << "digraph api_dependencies {\n";
  for (const auto& a : non_generic_apis_) os << "  \"api:" << dot_escape(a) << "\" [shape=box];\n";
  for (const auto& a : generic_apis_) os << "  \"api:" << dot_escape(a) << "\" [shape=box, style=dashed];\n";
  for (TypeId id = 0; id < types_.size(); ++id) {
    os << "  \"ty:" << id << "\" [label=\"" << dot_escape(types_[id].str()) << "\", shape=ellipse"
       << (types_[id].has_params() ? ", style=dashed" : "") << "];\n";
  }
  for (const auto& e : consumers_) os << "  \"ty:" << e.type << "\" -> \"api:" << dot_escape(e.api) << "\";\n";
  for (const auto& e : producers_) os << "  \"api:" << dot_escape(e.api) << "\" -> \"ty:" << e.type << "\";\n";
  for (const auto& e : matches_) {
    os << "  \"ty:" << e.concrete << "\" -> \"ty:" << e.generic << "\" [style=dotted, label=match];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace monofuzz
