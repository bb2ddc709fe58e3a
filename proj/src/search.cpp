#include "monofuzz/search.hpp"

#include <stdexcept>

namespace monofuzz {

ApiInstance make_instance(const ApiSignature& api, const std::optional<MonoSolution>& s) {
  ApiInstance inst;
  inst.api_id = api.id;
  inst.input_patterns = api.inputs;
  if (s) {
    inst.solution = s;
    inst.signature = materialize(api, *s);
  } else {
    inst.signature = api;
  }
  inst.id = inst.signature.id;
  return inst;
}

namespace {

std::optional<TypeExpr> unwrap_once(const TypeExpr& t) {
  if (auto v = apply_rule(Rule::UnwrapOption, t)) return v;
  return apply_rule(Rule::UnwrapResult, t);
}

}  // namespace

bool ReachableSet::insert(const TypeExpr& t) {
  if (!members_.insert(t).second) return false;
  order_.push_back(t);
  if (auto p1 = unwrap_once(t)) {
    ++payload1_[*p1];
    if (auto p2 = unwrap_once(*p1)) ++payload2_[*p2];
  }
  return true;
}

bool ReachableSet::has_unwrap_source(const TypeExpr& t, int depth) const {
  const auto& index = depth == 1 ? payload1_ : payload2_;
  return index.contains(t);
}

bool is_primitive_input(const TypeExpr& t, const Corpus& c) {
  const TypeExpr* p = &t;
  for (std::size_t i = 0; i < kMaxChainLength && p->is_deco(); ++i) p = &p->inner();
  return p->is_prim() && c.is_primitive(p->name());
}

bool input_reachable(const TypeExpr& x, const TypeExpr& pattern, const ReachableSet& reachable,
                     const Corpus& c) {
  if (is_primitive_input(x, c)) return true;
  const TypeExpr* core = &x;
  const TypeExpr* pat = &pattern;
  for (std::size_t decos = 0; decos <= kMaxChainLength; ++decos) {
    std::size_t budget = kMaxChainLength - decos;
    if (reachable.contains(*core)) return true;
    if (budget >= 1 && reachable.has_unwrap_source(*core, 1)) return true;
    if (budget >= 2 && reachable.has_unwrap_source(*core, 2)) return true;
    // Peel one decoration the declared input itself carries; it can be added by a borrow rule.
    if (!pat->is_deco() || !core->is_deco() || pat->decoration() != core->decoration()) break;
    core = &core->inner();
    pat = &pat->inner();
  }
  return false;
}

bool is_reachable(const ApiSignature& api, const ReachableSet& reachable, const Corpus& c) {
  for (const auto& in : api.inputs) {
    if (in.has_params()) throw std::invalid_argument("is_reachable: " + api.id + " is not fully concrete");
    if (!input_reachable(in, in, reachable, c)) return false;
  }
  return true;
}

bool is_reachable(const ApiInstance& inst, const ReachableSet& reachable, const Corpus& c) {
  const auto& inputs = inst.signature.inputs;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].has_params()) throw std::invalid_argument("is_reachable: " + inst.id + " is not fully concrete");
    if (!input_reachable(inputs[i], inst.input_patterns[i], reachable, c)) return false;
  }
  return true;
}

std::vector<const ApiInstance*> MonoCatalog::mono_apis() const {
  std::vector<const ApiInstance*> out;
  for (const auto& i : instances) {
    if (i.is_mono()) out.push_back(&i);
  }
  return out;
}

const ApiInstance* MonoCatalog::find(std::string_view instance_id) const {
  for (const auto& i : instances) {
    if (i.id == instance_id) return &i;
  }
  return nullptr;
}

nlohmann::json MonoCatalog::to_json() const {
  using nlohmann::json;
  json j;
  j["rounds"] = rounds;
  json types = json::array();
  for (std::size_t i = 0; i < reachable.size(); ++i) {
    types.push_back({{"type", reachable[i].str()}, {"round", type_round[i]}});
  }
  j["reachable_types"] = std::move(types);
  json per_api = json::object();
  for (const auto& [api, set] : mo) {
    json sols = json::array();
    for (const auto& inst : instances) {
      if (inst.api_id != api || !inst.is_mono()) continue;
      sols.push_back({{"solution", inst.solution->str()},
                      {"instance", inst.id},
                      {"bounds", std::string(verdict_name(inst.verdict))},
                      {"round", inst.round}});
    }
    per_api[api] = std::move(sols);
  }
  j["solutions"] = std::move(per_api);
  json reached = json::array();
  for (const auto& inst : instances) {
    if (!inst.is_mono()) reached.push_back({{"api", inst.id}, {"round", inst.round}});
  }
  j["reachable_non_generic"] = std::move(reached);
  j["bounds"] = bounds.to_json();
  return j;
}

SolutionSet solve_generic_inputs(const ApiSignature& gapi, std::span<const TypeExpr> reachable,
                                 std::vector<MergeTraceStep>* trace) {
  const std::size_t arity = gapi.type_params.size();
  SolutionSet s = SolutionSet::top(arity);
  for (std::size_t i = 0; i < gapi.inputs.size(); ++i) {
    const TypeExpr& p = gapi.inputs[i];
    if (!p.has_params()) continue;
    SolutionSet mo(arity);
    for (const auto& ty : reachable) {
      for (const auto& m : match_type_all(ty, p, gapi)) mo.insert(m.solution);
    }
    s = merge_sets(s, mo);
    if (trace) trace->push_back(MergeTraceStep{i, p, mo, s});
  }
  return s;
}

namespace {

// Replaces top slots with every member of `reachable` (within the depth cap).
void expand_tops(const MonoSolution& s, const ReachableSet& reachable, unsigned max_depth,
                 std::vector<MonoSolution>& out) {
  std::vector<Slot> slots(s.slots().begin(), s.slots().end());
  std::size_t first_top = slots.size();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) {
      first_top = i;
      break;
    }
  }
  if (first_top == slots.size()) {
    out.push_back(s);
    return;
  }
  for (const auto& r : reachable.items()) {
    if (type_depth(r) > static_cast<int>(max_depth)) continue;
    slots[first_top] = r;
    expand_tops(MonoSolution(slots), reachable, max_depth, out);
  }
}

bool within_depth(const MonoSolution& s, unsigned max_depth) {
  for (const auto& slot : s.slots()) {
    if (slot && type_depth(*slot) > static_cast<int>(max_depth)) return false;
  }
  return true;
}

class Search {
 public:
  Search(DependencyGraph& g, const Corpus& c, const ImplIndex& idx, const SearchOptions& opts)
      : graph_(g), corpus_(c), idx_(idx), opts_(opts) {}

  MonoCatalog run() {
    if (opts_.max_depth < 1) throw std::invalid_argument("run_search: maxDepth must be >= 1");
    for (const auto& p : corpus_.primitives) add_type(TypeExpr::prim(p), 0);
    for (const auto& api : corpus_.apis) {
      if (api.is_generic()) cat_.mo.emplace(api.id, SolutionSet(api.type_params.size()));
    }
    bool changed = true;
    while (changed) {
      ++round_;
      std::size_t before = cat_.reachable.size();
      for (const auto& api : corpus_.apis) {
        if (api.is_generic()) {
          visit_generic(api);
        } else {
          visit_non_generic(api);
        }
      }
      changed = cat_.reachable.size() != before;
    }
    cat_.rounds = round_;
    return std::move(cat_);
  }

 private:
  void add_type(const TypeExpr& t, std::size_t round) {
    if (type_depth(t) > static_cast<int>(opts_.max_depth)) return;
    if (cat_.reachable.insert(t)) {
      cat_.type_round.push_back(round);
      graph_.add_concrete_type(t);
    }
  }

  void record(ApiInstance inst) {
    inst.round = round_;
    inst.discovery = cat_.instances.size();
    if (inst.signature.output) add_type(*inst.signature.output, round_);
    cat_.instances.push_back(std::move(inst));
  }

  void visit_non_generic(const ApiSignature& api) {
    if (reached_.contains(api.id)) return;
    if (!is_reachable(api, cat_.reachable, corpus_)) return;
    reached_.insert(api.id);
    record(make_instance(api));
  }

  void visit_generic(const ApiSignature& api) {
    SolutionSet s = solve_generic_inputs(api, cat_.reachable.items());
    std::vector<MonoSolution> candidates;
    for (const auto& sol : s) expand_tops(sol, cat_.reachable, opts_.max_depth, candidates);

    auto& verdicts = verdicts_[api.id];
    SolutionSet& mo = cat_.mo.at(api.id);
    for (const auto& sol : candidates) {
      if (mo.contains(sol) || !within_depth(sol, opts_.max_depth)) continue;
      auto [it, fresh] = verdicts.try_emplace(sol, BoundsVerdict::Invalid);
      if (fresh) {
        it->second = satisfies_bounds(sol, api, idx_, opts_.bounds_fuel);
        cat_.bounds.record(it->second);
      }
      if (it->second == BoundsVerdict::Invalid) continue;
      ApiInstance inst = make_instance(api, sol);
      inst.verdict = it->second;
      if (!is_reachable(inst, cat_.reachable, corpus_)) continue;
      mo.insert(sol);
      record(std::move(inst));
    }
  }

  DependencyGraph& graph_;
  const Corpus& corpus_;
  const ImplIndex& idx_;
  SearchOptions opts_;
  MonoCatalog cat_;
  std::size_t round_ = 0;
  std::unordered_set<std::string> reached_;
  std::map<std::string, std::map<MonoSolution, BoundsVerdict>> verdicts_;
};

}  // namespace

MonoCatalog run_search(DependencyGraph& graph, const Corpus& c, const ImplIndex& idx,
                       const SearchOptions& opts) {
  return Search(graph, c, idx, opts).run();
}

}  // namespace monofuzz
