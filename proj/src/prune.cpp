#include "monofuzz/prune.hpp"

#include <algorithm>
#include <random>

namespace monofuzz {

std::set<std::string> impls_set(const ApiSignature& api, const MonoSolution& s, const ImplIndex& idx,
                                unsigned fuel) {
  std::set<std::string> out;
  BoundsCheck check = check_bounds(s, api, idx, fuel);
  for (std::size_t i = 0; i < api.bounds.size(); ++i) {
    const HoldsResult& r = check.per_bound[i];
    if (r.outcome == Outcome::Holds) {
      out.insert(r.impl_id);
    } else if (r.outcome == Outcome::Assumed) {
      out.insert("assumed:" + substitute(s, api.bounds[i].bound, api).str() + ":" +
                 substitute(s, api.bounds[i].subject, api).str());
    }
  }
  return out;
}

std::vector<std::size_t> greedy_cover(const std::vector<std::set<std::string>>& impl_sets) {
  std::set<std::string> covered;
  std::vector<std::size_t> selected;
  std::vector<bool> taken(impl_sets.size(), false);
  while (true) {
    std::size_t best = impl_sets.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < impl_sets.size(); ++i) {
      if (taken[i]) continue;
      std::size_t gain = 0;
      for (const auto& id : impl_sets[i]) gain += covered.contains(id) ? 0 : 1;
      if (gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    if (best == impl_sets.size()) break;
    taken[best] = true;
    selected.push_back(best);
    covered.insert(impl_sets[best].begin(), impl_sets[best].end());
  }
  return selected;
}

namespace {

std::size_t select_one(const std::vector<MonoSolution>& solutions, std::uint64_t seed) {
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    return static_cast<std::size_t>(rng() % solutions.size());
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < solutions.size(); ++i) {
    if (solutions[i].type_args() < solutions[best].type_args()) best = i;
  }
  return best;
}

}  // namespace

std::vector<MonoSolution> minimal_cover(const ApiSignature& api, const std::vector<MonoSolution>& solutions,
                                        const ImplIndex& idx, unsigned fuel, const CoverOptions& opts) {
  if (solutions.empty()) return {};
  std::vector<std::set<std::string>> sets;
  sets.reserve(solutions.size());
  for (const auto& s : solutions) sets.push_back(impls_set(api, s, idx, fuel));
  std::vector<std::size_t> chosen = greedy_cover(sets);
  if (chosen.empty()) chosen.push_back(select_one(solutions, opts.seed));
  std::vector<MonoSolution> out;
  for (std::size_t i : chosen) out.push_back(solutions[i]);
  return out;
}

bool produces(const TypeExpr& output, const Requirement& req) {
  for (const auto& b : apply_transformations(output, req.pattern)) {
    if (b.transformed == req.type) return true;
  }
  return false;
}

double ReservedSet::reduction_ratio() const {
  if (mono_total == 0) return 1.0;
  return static_cast<double>(mono_reserved) / static_cast<double>(mono_total);
}

nlohmann::json ReservedSet::to_json() const {
  using nlohmann::json;
  json j;
  j["reserved"] = reserved;
  json apis = json::array();
  for (const auto& r : per_api) {
    apis.push_back({{"api", r.api_id},
                    {"kept", r.kept},
                    {"dropped", r.dropped},
                    {"covered_impls", std::vector<std::string>(r.covered_impls.begin(), r.covered_impls.end())}});
  }
  j["per_api"] = std::move(apis);
  auto req_json = [](const Requirement& r) { return json{{"type", r.type.str()}, {"declared", r.pattern.str()}}; };
  json unsat = json::array();
  for (const auto& r : unsatisfiable) unsat.push_back(req_json(r));
  j["unsatisfiable"] = std::move(unsat);
  json req = json::array();
  for (const auto& r : require) req.push_back(req_json(r));
  j["require_types"] = std::move(req);
  j["mono_apis"] = mono_total;
  j["reserved_mono_apis"] = mono_reserved;
  j["reduction_ratio"] = reduction_ratio();
  return j;
}

namespace {

class Pruner {
 public:
  Pruner(const MonoCatalog& cat, const Corpus& c, const ImplIndex& idx, unsigned fuel, const CoverOptions& opts)
      : cat_(cat), corpus_(c), idx_(idx), fuel_(fuel), opts_(opts) {}

  ReservedSet run() {
    for (const auto& api : corpus_.apis) {
      if (api.is_generic()) init_cover(api);
    }
    bool changed = true;
    while (changed) {
      changed = false;
      // Requirements added during a pass wait for the next one, so the
      // earliest-discovered producer always wins.
      std::vector<Requirement> pending;
      std::set_difference(out_.require.begin(), out_.require.end(), out_.produced.begin(),
                          out_.produced.end(), std::back_inserter(pending));
      for (const auto& inst : cat_.instances) {
        if (!inst.signature.output) continue;
        bool success = false;
        for (const auto& req : pending) {
          if (out_.produced.contains(req)) continue;
          if (produces(*inst.signature.output, req)) {
            out_.produced.insert(req);
            success = true;
            changed = true;
          }
        }
        if (success && !out_.contains(inst.id)) reserve(inst);
      }
    }
    std::set_difference(out_.require.begin(), out_.require.end(), out_.produced.begin(),
                        out_.produced.end(), std::back_inserter(out_.unsatisfiable));
    for (const auto& inst : cat_.instances) {
      if (!inst.is_mono()) continue;
      ++out_.mono_total;
      if (out_.contains(inst.id)) ++out_.mono_reserved;
    }
    return std::move(out_);
  }

 private:
  void init_cover(const ApiSignature& api) {
    std::vector<const ApiInstance*> insts;
    for (const auto& inst : cat_.instances) {
      if (inst.api_id == api.id && inst.is_mono()) insts.push_back(&inst);
    }
    if (insts.empty()) return;
    std::vector<MonoSolution> sols;
    for (const auto* i : insts) sols.push_back(*i->solution);
    std::vector<MonoSolution> chosen = minimal_cover(api, sols, idx_, fuel_, opts_);

    ApiPruneReport report;
    report.api_id = api.id;
    for (const auto& s : chosen) {
      const ApiInstance* inst = *std::find_if(insts.begin(), insts.end(),
                                              [&](const ApiInstance* i) { return *i->solution == s; });
      auto impls = impls_set(api, s, idx_, fuel_);
      report.covered_impls.insert(impls.begin(), impls.end());
      reserve(*inst);
    }
    for (const auto* i : insts) {
      bool kept = std::find(chosen.begin(), chosen.end(), *i->solution) != chosen.end();
      (kept ? report.kept : report.dropped).push_back(i->id);
    }
    out_.per_api.push_back(std::move(report));
  }

  void reserve(const ApiInstance& inst) {
    if (!out_.reserved_ids.insert(inst.id).second) return;
    out_.reserved.push_back(inst.id);
    for (std::size_t i = 0; i < inst.signature.inputs.size(); ++i) {
      const TypeExpr& in = inst.signature.inputs[i];
      if (is_primitive_input(in, corpus_)) continue;
      out_.require.insert(Requirement{in, inst.input_patterns[i]});
    }
  }

  const MonoCatalog& cat_;
  const Corpus& corpus_;
  const ImplIndex& idx_;
  unsigned fuel_;
  CoverOptions opts_;
  ReservedSet out_;
};

}  // namespace

ReservedSet run_prune(const DependencyGraph& /*graph*/, const MonoCatalog& catalog, const Corpus& c,
                      const ImplIndex& idx, unsigned fuel, const CoverOptions& opts) {
  return Pruner(catalog, c, idx, fuel, opts).run();
}

}  // namespace monofuzz
