#include "monofuzz/sequence.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace monofuzz {

std::optional<TypeExpr> apply_chain(const TypeExpr& value, const RuleChain& chain) {
  std::optional<TypeExpr> cur = value;
  for (Rule r : chain) {
    cur = apply_rule(r, *cur);
    if (!cur) return std::nullopt;
  }
  return cur;
}

bool chain_moves(const RuleChain& chain) {
  return chain.empty() || std::any_of(chain.begin(), chain.end(), is_unwrap);
}

namespace {

nlohmann::json chain_json(const RuleChain& chain) {
  nlohmann::json out = nlohmann::json::array();
  for (Rule r : chain) out.push_back(std::string(rule_name(r)));
  return out;
}

// Decoded-primitive binding for an input that is a primitive behind decorations.
PrimitiveSlot primitive_binding(const TypeExpr& x, std::size_t index) {
  std::vector<Decoration> decos;
  const TypeExpr* p = &x;
  while (p->is_deco()) {
    decos.push_back(p->decoration());
    p = &p->inner();
  }
  RuleChain chain;
  for (auto it = decos.rbegin(); it != decos.rend(); ++it) {
    switch (*it) {
      case Decoration::SharedBorrow: chain.push_back(Rule::SharedBorrow); break;
      case Decoration::ExclusiveBorrow: chain.push_back(Rule::ExclusiveBorrow); break;
      case Decoration::ConstRaw: chain.push_back(Rule::ConstRaw); break;
      case Decoration::MutRaw: chain.push_back(Rule::MutRaw); break;
    }
  }
  return PrimitiveSlot{index, *p, std::move(chain)};
}

// Chain turning a value of type `output` into argument `x` declared as `pattern`.
std::optional<RuleChain> bridge_chain(const TypeExpr& output, const TypeExpr& x, const TypeExpr& pattern) {
  for (auto& b : apply_transformations(output, pattern)) {
    if (b.transformed == x) return std::move(b.chain);
  }
  return std::nullopt;
}

constexpr std::size_t kInfinite = std::numeric_limits<std::size_t>::max();

struct Producer {
  const ApiInstance* inst;
  std::size_t cost = kInfinite;
};

class SequenceBuilder {
 public:
  SequenceBuilder(const std::vector<const ApiInstance*>& pool, const Corpus& c, std::size_t max_length)
      : corpus_(c), max_length_(max_length) {
    for (const auto* i : pool) producers_.push_back(Producer{i});
    compute_costs();
  }

  struct Attempt {
    std::optional<ApiSequence> seq;
    std::string reason;
  };

  Attempt build(const ApiInstance& target, const ApiInstance* prefix = nullptr) {
    reset();
    std::optional<std::size_t> prefix_call;
    if (prefix) {
      prefix_call = emit(*prefix);
      if (!prefix_call) return {std::nullopt, reason_};
    }
    auto last = emit(target);
    if (!last) return {std::nullopt, reason_};
    if (prefix_call && !values_[*prefix_call].used) {
      return {std::nullopt, "prefix value of " + prefix->id + " unused by " + target.id};
    }
    return {seq_, {}};
  }

  std::size_t cost_of(const ApiInstance& inst) const { return instance_cost(inst); }

 private:
  struct Value {
    std::optional<TypeExpr> type;
    bool moved = false;
    bool used = false;
    std::size_t pins = 0;  // borrows held by calls still being assembled
  };

  void reset() {
    seq_ = ApiSequence{};
    values_.clear();
    reason_.clear();
  }

  // need cost of one argument: cheapest producer whose output bridges to it
  std::size_t need_cost(const TypeExpr& x, const TypeExpr& pattern) const {
    if (is_primitive_input(x, corpus_)) return 0;
    std::size_t best = kInfinite;
    for (const auto& p : producers_) {
      if (p.cost < best && bridge_chain(*p.inst->signature.output, x, pattern)) best = p.cost;
    }
    return best;
  }

  std::size_t instance_cost(const ApiInstance& inst) const {
    std::size_t total = 1;
    for (std::size_t i = 0; i < inst.signature.inputs.size(); ++i) {
      std::size_t c = need_cost(inst.signature.inputs[i], inst.input_patterns[i]);
      if (c == kInfinite) return kInfinite;
      total += c;
    }
    return total;
  }

  void compute_costs() {
    std::erase_if(producers_, [](const Producer& p) { return !p.inst->signature.output; });
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& p : producers_) {
        std::size_t c = instance_cost(*p.inst);
        if (c < p.cost) {
          p.cost = c;
          changed = true;
        }
      }
    }
  }

  std::optional<std::size_t> reuse(const TypeExpr& x, const TypeExpr& pattern, RuleChain& chain) const {
    for (std::size_t k = 0; k < values_.size(); ++k) {
      const auto& v = values_[k];
      if (!v.type || v.moved) continue;
      for (auto& b : apply_transformations(*v.type, pattern)) {
        if (b.transformed != x || (v.pins > 0 && chain_moves(b.chain))) continue;
        chain = std::move(b.chain);
        return k;
      }
    }
    return std::nullopt;
  }

  std::size_t unmet_inputs(const ApiInstance& inst) const {
    std::size_t n = 0;
    RuleChain scratch;
    for (std::size_t i = 0; i < inst.signature.inputs.size(); ++i) {
      const auto& x = inst.signature.inputs[i];
      if (is_primitive_input(x, corpus_)) continue;
      if (!reuse(x, inst.input_patterns[i], scratch)) ++n;
    }
    return n;
  }

  std::optional<InputBinding> bind(const TypeExpr& x, const TypeExpr& pattern) {
    if (is_primitive_input(x, corpus_)) return primitive_binding(x, seq_.slot_count++);
    RuleChain chain;
    if (auto k = reuse(x, pattern, chain)) return consume(*k, std::move(chain));

    std::size_t budget = need_cost(x, pattern);
    if (budget == kInfinite) {
      reason_ = "no producer for " + x.str();
      return std::nullopt;
    }
    // Candidates whose own arguments are strictly cheaper than this one.
    const Producer* best = nullptr;
    std::size_t best_unmet = 0;
    for (const auto& p : producers_) {
      if (p.cost == kInfinite || !bridge_chain(*p.inst->signature.output, x, pattern)) continue;
      bool smaller = true;
      for (std::size_t i = 0; i < p.inst->signature.inputs.size() && smaller; ++i) {
        smaller = need_cost(p.inst->signature.inputs[i], p.inst->input_patterns[i]) < budget;
      }
      if (!smaller) continue;
      std::size_t unmet = unmet_inputs(*p.inst);
      if (!best || unmet < best_unmet ||
          (unmet == best_unmet && (p.cost < best->cost || (p.cost == best->cost && p.inst->id < best->inst->id)))) {
        best = &p;
        best_unmet = unmet;
      }
    }
    if (!best) {
      reason_ = "no well-founded producer for " + x.str();
      return std::nullopt;
    }
    auto k = emit(*best->inst);
    if (!k) return std::nullopt;
    chain = *bridge_chain(*best->inst->signature.output, x, pattern);
    return consume(*k, std::move(chain));
  }

  InputBinding consume(std::size_t k, RuleChain chain) {
    values_[k].used = true;
    if (chain_moves(chain)) values_[k].moved = true;
    return ValueFrom{k, std::move(chain)};
  }

  std::optional<std::size_t> emit(const ApiInstance& inst) {
    SequenceCall call{inst.id, {}};
    std::vector<std::size_t> pinned;
    for (std::size_t i = 0; i < inst.signature.inputs.size(); ++i) {
      auto b = bind(inst.signature.inputs[i], inst.input_patterns[i]);
      if (!b) return std::nullopt;
      if (const auto* v = std::get_if<ValueFrom>(&*b); v && !values_[v->call].moved) {
        ++values_[v->call].pins;
        pinned.push_back(v->call);
      }
      call.inputs.push_back(std::move(*b));
    }
    for (std::size_t k : pinned) --values_[k].pins;
    if (seq_.calls.size() >= max_length_) {
      reason_ = "sequence for " + inst.id + " exceeds " + std::to_string(max_length_) + " calls";
      return std::nullopt;
    }
    seq_.calls.push_back(std::move(call));
    values_.push_back(Value{inst.signature.output});
    return seq_.calls.size() - 1;
  }

  const Corpus& corpus_;
  std::size_t max_length_;
  std::vector<Producer> producers_;
  ApiSequence seq_;
  std::vector<Value> values_;
  std::string reason_;
};

}  // namespace

nlohmann::json ApiSequence::to_json() const {
  using nlohmann::json;
  json calls_json = json::array();
  for (const auto& call : calls) {
    json inputs = json::array();
    for (const auto& b : call.inputs) {
      if (const auto* p = std::get_if<PrimitiveSlot>(&b)) {
        inputs.push_back({{"slot", p->index}, {"type", p->type.str()}, {"chain", chain_json(p->chain)}});
      } else {
        const auto& v = std::get<ValueFrom>(b);
        inputs.push_back({{"from", v.call}, {"chain", chain_json(v.chain)}});
      }
    }
    calls_json.push_back({{"api", call.instance}, {"inputs", std::move(inputs)}});
  }
  return {{"calls", std::move(calls_json)}, {"slots", slot_count}};
}

nlohmann::json SequenceResult::to_json() const {
  using nlohmann::json;
  json seqs = json::array();
  for (const auto& s : sequences) seqs.push_back(s.to_json());
  json fails = json::array();
  for (const auto& f : failures) fails.push_back({{"target", f.target}, {"reason", f.reason}});
  return {{"sequences", std::move(seqs)}, {"dropped", dropped}, {"failures", std::move(fails)}, {"uncovered", uncovered}};
}

bool has_mono_call(const ApiSequence& seq, const MonoCatalog& catalog) {
  return std::any_of(seq.calls.begin(), seq.calls.end(), [&](const SequenceCall& c) {
    const ApiInstance* i = catalog.find(c.instance);
    return i && i->is_mono();
  });
}

SequenceResult generate_sequences(const ReservedSet& reserved, const MonoCatalog& catalog, const Corpus& c,
                                  const SequenceLimits& limits) {
  SequenceResult out;
  std::vector<const ApiInstance*> pool;
  for (const auto& inst : catalog.instances) {
    if (reserved.contains(inst.id)) pool.push_back(&inst);
  }
  SequenceBuilder builder(pool, c, limits.max_length);

  // Targets: one monomorphic instance per generic API first, then the rest
  // of the monomorphic instances, then non-generic ones.
  std::vector<const ApiInstance*> first, rest, plain;
  std::set<std::string> seen_generic;
  for (const auto& id : reserved.reserved) {
    const ApiInstance* inst = catalog.find(id);
    if (!inst) continue;
    if (!inst->is_mono()) {
      plain.push_back(inst);
    } else if (seen_generic.insert(inst->api_id).second) {
      first.push_back(inst);
    } else {
      rest.push_back(inst);
    }
  }
  std::vector<const ApiInstance*> mono_targets = first;
  mono_targets.insert(mono_targets.end(), rest.begin(), rest.end());

  std::set<std::string> covered;
  auto accept = [&](ApiSequence seq) {
    for (const auto& call : seq.calls) covered.insert(call.instance);
    out.sequences.push_back(std::move(seq));
  };
  auto full = [&] { return out.sequences.size() >= limits.max_sequences; };

  for (const auto* t : mono_targets) {
    if (full()) {
      out.dropped.push_back(t->id);
      continue;
    }
    auto attempt = builder.build(*t);
    if (attempt.seq) {
      accept(std::move(*attempt.seq));
    } else {
      out.failures.push_back({t->id, attempt.reason});
    }
  }

  for (const auto* t : plain) {
    if (limits.require_mono) {
      if (covered.contains(t->id)) continue;
      if (full()) {
        out.dropped.push_back(t->id);
        continue;
      }
      // Attach the producer to a monomorphic consumer of its value.
      bool done = false;
      std::string last_reason = "no monomorphic consumer";
      for (const auto* m : mono_targets) {
        auto attempt = builder.build(*m, t);
        if (attempt.seq) {
          accept(std::move(*attempt.seq));
          done = true;
          break;
        }
        last_reason = attempt.reason;
      }
      if (!done) out.failures.push_back({t->id, last_reason});
      continue;
    }
    if (full()) {
      out.dropped.push_back(t->id);
      continue;
    }
    auto attempt = builder.build(*t);
    if (attempt.seq) {
      accept(std::move(*attempt.seq));
    } else {
      out.failures.push_back({t->id, attempt.reason});
    }
  }

  for (const auto& id : reserved.reserved) {
    if (!covered.contains(id)) out.uncovered.push_back(id);
  }
  return out;
}

SequenceValidation validate_sequence(const ApiSequence& seq, const MonoCatalog& catalog, const Corpus& c) {
  if (seq.calls.empty()) return {false, "empty sequence"};
  std::vector<std::optional<TypeExpr>> outputs;
  std::vector<bool> moved;
  std::set<std::size_t> slots;
  for (std::size_t k = 0; k < seq.calls.size(); ++k) {
    const auto& call = seq.calls[k];
    const ApiInstance* inst = catalog.find(call.instance);
    std::string where = "call " + std::to_string(k) + " (" + call.instance + ")";
    if (!inst) return {false, where + ": unknown API instance"};
    if (call.inputs.size() != inst->signature.inputs.size()) return {false, where + ": argument count mismatch"};
    for (std::size_t i = 0; i < call.inputs.size(); ++i) {
      const TypeExpr& x = inst->signature.inputs[i];
      std::string arg = where + " argument " + std::to_string(i);
      if (const auto* p = std::get_if<PrimitiveSlot>(&call.inputs[i])) {
        if (!p->type.is_prim() || !c.is_primitive(p->type.name())) return {false, arg + ": slot type is not a primitive"};
        if (p->index >= seq.slot_count || !slots.insert(p->index).second) return {false, arg + ": bad slot index"};
        if (std::any_of(p->chain.begin(), p->chain.end(), is_unwrap)) return {false, arg + ": unwrap on a primitive"};
        auto v = apply_chain(p->type, p->chain);
        if (!v || *v != x) return {false, arg + ": primitive does not produce " + x.str()};
        continue;
      }
      const auto& from = std::get<ValueFrom>(call.inputs[i]);
      if (from.call >= k) return {false, arg + ": value taken from a later or same call"};
      if (!outputs[from.call]) return {false, arg + ": source call returns nothing"};
      if (moved[from.call]) return {false, arg + ": value used after move"};
      bool ok = false;
      for (const auto& b : apply_transformations(*outputs[from.call], inst->input_patterns[i])) {
        ok = ok || (b.chain == from.chain && b.transformed == x);
      }
      if (!ok) return {false, arg + ": " + outputs[from.call]->str() + " does not bridge to " + x.str()};
      if (chain_moves(from.chain)) moved[from.call] = true;
    }
    outputs.push_back(inst->signature.output);
    moved.push_back(false);
  }
  return {true, {}};
}

}  // namespace monofuzz
