#include "monofuzz/bounds.hpp"

namespace monofuzz {

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Holds: return "holds";
    case Outcome::Fails: return "fails";
    case Outcome::Assumed: return "assumed";
  }
  return "?";
}

std::string_view verdict_name(BoundsVerdict v) {
  switch (v) {
    case BoundsVerdict::Valid: return "valid";
    case BoundsVerdict::Invalid: return "invalid";
    case BoundsVerdict::AssumedValid: return "assumed";
  }
  return "?";
}

ImplIndex::ImplIndex(const Corpus& c, bool memoize) : memoize_(memoize) {
  for (const auto& r : c.impls) by_trait_[r.implemented.name].push_back(r);
}

const std::vector<TraitImplRecord>& ImplIndex::impls_of(std::string_view trait) const {
  static const std::vector<TraitImplRecord> none;
  auto it = by_trait_.find(trait);
  return it == by_trait_.end() ? none : it->second;
}

std::size_t ImplIndex::memo_size() const {
  std::lock_guard lock(memo_mutex_);
  return memo_.size();
}

HoldsResult ImplIndex::holds(const TypeExpr& t, const TraitRef& tr, unsigned fuel) const {
  if (!memoize_) return compute(t, tr, fuel);
  auto key = std::make_tuple(t, tr.name, tr.args, fuel);
  {
    std::lock_guard lock(memo_mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  HoldsResult r = compute(t, tr, fuel);
  std::lock_guard lock(memo_mutex_);
  memo_.emplace(std::move(key), r);
  return r;
}

HoldsResult ImplIndex::compute(const TypeExpr& t, const TraitRef& tr, unsigned fuel) const {
  const auto& candidates = impls_of(tr.name);
  // Nothing is known about this trait: accept.
  if (candidates.empty()) return {Outcome::Assumed, {}};

  bool any_assumed = false;
  for (const auto& impl : candidates) {
    Bindings b;
    if (!unify(impl.subject, t, b)) continue;
    if (impl.implemented.args.size() != tr.args.size()) continue;
    bool head = true;
    for (std::size_t i = 0; i < tr.args.size() && head; ++i) {
      head = unify(impl.implemented.args[i], tr.args[i], b);
    }
    if (!head) continue;
    if (impl.conditions.empty()) return {Outcome::Holds, impl.impl_id};
    if (fuel == 0) {
      any_assumed = true;
      continue;
    }
    bool refuted = false;
    bool assumed = false;
    for (const auto& cond : impl.conditions) {
      TypeExpr subject = substitute(b, cond.subject);
      TraitRef bound{cond.bound.name, {}};
      bool open = subject.has_params();
      for (const auto& a : cond.bound.args) {
        bound.args.push_back(substitute(b, a));
        open = open || bound.args.back().has_params();
      }
      if (open) {
        // Impl parameter not fixed by the head; cannot decide.
        assumed = true;
        continue;
      }
      HoldsResult sub = holds(subject, bound, fuel - 1);
      if (sub.outcome == Outcome::Fails) {
        refuted = true;
        break;
      }
      if (sub.outcome == Outcome::Assumed) assumed = true;
    }
    if (refuted) continue;
    if (!assumed) return {Outcome::Holds, impl.impl_id};
    any_assumed = true;
  }
  return {any_assumed ? Outcome::Assumed : Outcome::Fails, {}};
}

BoundsCheck check_bounds(const MonoSolution& s, const ApiSignature& api, const ImplIndex& idx,
                         unsigned fuel) {
  BoundsCheck out;
  bool assumed = false;
  for (const auto& b : api.bounds) {
    TypeExpr subject = substitute(s, b.subject, api);
    TraitRef bound = substitute(s, b.bound, api);
    HoldsResult r = idx.holds(subject, bound, fuel);
    if (r.outcome == Outcome::Fails) out.verdict = BoundsVerdict::Invalid;
    if (r.outcome == Outcome::Assumed) assumed = true;
    out.per_bound.push_back(std::move(r));
  }
  if (out.verdict != BoundsVerdict::Invalid && assumed) out.verdict = BoundsVerdict::AssumedValid;
  return out;
}

BoundsVerdict satisfies_bounds(const MonoSolution& s, const ApiSignature& api, const ImplIndex& idx,
                               unsigned fuel) {
  return check_bounds(s, api, idx, fuel).verdict;
}

void BoundsCounters::record(BoundsVerdict v) {
  ++checked;
  switch (v) {
    case BoundsVerdict::Valid: ++valid; break;
    case BoundsVerdict::Invalid: ++invalid; break;
    case BoundsVerdict::AssumedValid: ++assumed; break;
  }
}

nlohmann::json BoundsCounters::to_json() const {
  return {{"bounds_checked", checked}, {"valid", valid}, {"invalid", invalid}, {"assumed", assumed}};
}

}  // namespace monofuzz
