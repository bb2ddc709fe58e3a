#include "monofuzz/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace monofuzz {

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::SharedBorrow: return "shared-borrow";
    case Rule::ExclusiveBorrow: return "exclusive-borrow";
    case Rule::ConstRaw: return "const-raw-address";
    case Rule::MutRaw: return "mut-raw-address";
    case Rule::UnwrapResult: return "result-unwrap";
    case Rule::UnwrapOption: return "option-unwrap";
  }
  return "?";
}

Rule rule_from_name(std::string_view name) {
  for (auto r : {Rule::SharedBorrow, Rule::ExclusiveBorrow, Rule::ConstRaw, Rule::MutRaw,
                 Rule::UnwrapResult, Rule::UnwrapOption}) {
    if (rule_name(r) == name) return r;
  }
  throw std::invalid_argument("unknown transformation rule '" + std::string(name) + "'");
}

bool is_unwrap(Rule r) { return r == Rule::UnwrapResult || r == Rule::UnwrapOption; }

namespace {

constexpr Rule kAllRules[] = {Rule::SharedBorrow, Rule::ExclusiveBorrow, Rule::ConstRaw,
                              Rule::MutRaw,       Rule::UnwrapResult,    Rule::UnwrapOption};

Decoration rule_decoration(Rule r) {
  switch (r) {
    case Rule::SharedBorrow: return Decoration::SharedBorrow;
    case Rule::ExclusiveBorrow: return Decoration::ExclusiveBorrow;
    case Rule::ConstRaw: return Decoration::ConstRaw;
    case Rule::MutRaw: return Decoration::MutRaw;
    default: throw std::logic_error("not a decoration rule");
  }
}

// The outer `layers` levels of `pattern` are decorations (not parameters).
bool decorated_layers(const TypeExpr& pattern, std::size_t layers) {
  const TypeExpr* p = &pattern;
  for (std::size_t i = 0; i < layers; ++i) {
    if (!p->is_deco()) return false;
    p = &p->inner();
  }
  return true;
}

void enumerate_chains(const TypeExpr& value, RuleChain& chain, std::size_t decos,
                      const TypeExpr& needed, std::vector<Bridge>& out) {
  if (decorated_layers(needed, decos)) {
    Bindings b;
    if (unify(needed, value, b)) out.push_back(Bridge{chain, value, std::move(b)});
  }
  if (chain.size() == kMaxChainLength) return;
  for (Rule r : kAllRules) {
    // Unwrapping a freshly borrowed value is never possible.
    if (is_unwrap(r) && decos > 0) continue;
    auto next = apply_rule(r, value);
    if (!next) continue;
    chain.push_back(r);
    enumerate_chains(*next, chain, decos + (is_unwrap(r) ? 0 : 1), needed, out);
    chain.pop_back();
  }
}

}  // namespace

std::optional<TypeExpr> apply_rule(Rule r, const TypeExpr& value) {
  switch (r) {
    case Rule::UnwrapOption:
      if (value.is_con() && value.name() == "Option" && value.args().size() == 1) return value.args()[0];
      return std::nullopt;
    case Rule::UnwrapResult:
      if (value.is_con() && value.name() == "Result" && value.args().size() == 2) return value.args()[0];
      return std::nullopt;
    default:
      return TypeExpr::deco(rule_decoration(r), value);
  }
}

bool unify(const TypeExpr& pattern, const TypeExpr& concrete, Bindings& b) {
  switch (pattern.kind()) {
    case TypeExpr::Kind::Param: {
      auto [it, inserted] = b.try_emplace(pattern.name(), concrete);
      return inserted || it->second == concrete;
    }
    case TypeExpr::Kind::Primitive:
      return concrete.is_prim() && concrete.name() == pattern.name();
    case TypeExpr::Kind::Decorated:
      return concrete.is_deco() && concrete.decoration() == pattern.decoration() &&
             unify(pattern.inner(), concrete.inner(), b);
    case TypeExpr::Kind::Concrete: {
      if (!concrete.is_con() || concrete.name() != pattern.name() ||
          concrete.args().size() != pattern.args().size()) {
        return false;
      }
      if (!pattern.has_params()) return pattern == concrete;
      for (std::size_t i = 0; i < pattern.args().size(); ++i) {
        if (!unify(pattern.args()[i], concrete.args()[i], b)) return false;
      }
      return true;
    }
  }
  return false;
}

std::vector<Bridge> apply_transformations(const TypeExpr& available, const TypeExpr& needed) {
  std::vector<Bridge> out;
  RuleChain chain;
  enumerate_chains(available, chain, 0, needed, out);
  std::stable_sort(out.begin(), out.end(), [](const Bridge& a, const Bridge& b) {
    if (a.chain.size() != b.chain.size()) return a.chain.size() < b.chain.size();
    return a.chain < b.chain;
  });
  return out;
}

// ---- solutions ----

bool MonoSolution::complete() const {
  return std::all_of(slots_.begin(), slots_.end(), [](const Slot& s) { return s.has_value(); });
}

bool MonoSolution::subsumes(const MonoSolution& other) const {
  if (arity() != other.arity()) return false;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i] && slots_[i] != other.slots_[i]) return false;
  }
  return true;
}

std::string MonoSolution::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (i) s += ", ";
    s += slots_[i] ? slots_[i]->str() : "⊤";
  }
  return s + ")";
}

std::string MonoSolution::type_args() const {
  std::string s = "<";
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i]) throw std::logic_error("type_args on incomplete solution " + str());
    if (i) s += ", ";
    s += slots_[i]->str();
  }
  return s + ">";
}

std::strong_ordering operator<=>(const MonoSolution& a, const MonoSolution& b) {
  return std::lexicographical_compare_three_way(a.slots_.begin(), a.slots_.end(), b.slots_.begin(),
                                                b.slots_.end());
}

SolutionSet::SolutionSet(std::size_t arity, std::vector<MonoSolution> items)
    : arity_(arity), items_(std::move(items)) {
  for (const auto& s : items_) {
    if (s.arity() != arity_) throw std::invalid_argument("solution arity mismatch");
  }
  normalize();
}

SolutionSet SolutionSet::top(std::size_t arity) {
  return SolutionSet(arity, {MonoSolution::top(arity)});
}

bool SolutionSet::contains(const MonoSolution& s) const {
  return std::binary_search(items_.begin(), items_.end(), s);
}

void SolutionSet::insert(const MonoSolution& s) {
  if (s.arity() != arity_) throw std::invalid_argument("solution arity mismatch");
  for (const auto& e : items_) {
    if (e.subsumes(s)) return;
  }
  std::erase_if(items_, [&](const MonoSolution& e) { return s.subsumes(e); });
  items_.insert(std::upper_bound(items_.begin(), items_.end(), s), s);
}

void SolutionSet::normalize() {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  std::vector<MonoSolution> kept;
  kept.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < items_.size() && !dominated; ++j) {
      dominated = i != j && items_[j].subsumes(items_[i]);
    }
    if (!dominated) kept.push_back(items_[i]);
  }
  items_ = std::move(kept);
}

std::string SolutionSet::str() const {
  std::string s = "{";
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) s += ", ";
    s += items_[i].str();
  }
  return s + "}";
}

namespace {

MonoSolution solution_from_bindings(const Bindings& b, const ApiSignature& owner) {
  std::vector<Slot> slots(owner.type_params.size());
  for (const auto& [name, type] : b) {
    int idx = owner.param_index(name);
    if (idx < 0) throw std::invalid_argument("parameter '" + name + "' not declared by " + owner.id);
    slots[static_cast<std::size_t>(idx)] = type;
  }
  return MonoSolution(std::move(slots));
}

}  // namespace

std::vector<MatchResult> match_type_all(const TypeExpr& concrete, const TypeExpr& generic_arg,
                                        const ApiSignature& owner) {
  std::vector<MatchResult> out;
  for (auto& bridge : apply_transformations(concrete, generic_arg)) {
    out.push_back(MatchResult{solution_from_bindings(bridge.bindings, owner), std::move(bridge.chain)});
  }
  return out;
}

std::optional<MatchResult> match_type(const TypeExpr& concrete, const TypeExpr& generic_arg,
                                      const ApiSignature& owner) {
  auto all = match_type_all(concrete, generic_arg, owner);
  if (all.empty()) return std::nullopt;
  return std::move(all.front());
}

SolutionSet union_sets(const SolutionSet& a, const SolutionSet& b) {
  if (a.arity() != b.arity()) throw std::invalid_argument("union_sets: arity mismatch");
  std::vector<MonoSolution> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return SolutionSet(a.arity(), std::move(all));
}

SolutionSet merge_sets(const SolutionSet& a, const SolutionSet& b) {
  if (a.arity() != b.arity()) throw std::invalid_argument("merge_sets: arity mismatch");
  std::vector<MonoSolution> out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      std::vector<Slot> slots(a.arity());
      bool ok = true;
      for (std::size_t i = 0; i < a.arity() && ok; ++i) {
        if (!x[i]) {
          slots[i] = y[i];
        } else if (!y[i] || *x[i] == *y[i]) {
          slots[i] = x[i];
        } else {
          ok = false;
        }
      }
      if (ok) out.emplace_back(std::move(slots));
    }
  }
  return SolutionSet(a.arity(), std::move(out));
}

TypeExpr substitute(const MonoSolution& s, const TypeExpr& t, const ApiSignature& owner) {
  if (!t.has_params()) return t;
  switch (t.kind()) {
    case TypeExpr::Kind::Param: {
      int idx = owner.param_index(t.name());
      if (idx < 0) throw std::invalid_argument("substitute: '" + t.name() + "' is not a parameter of " + owner.id);
      if (static_cast<std::size_t>(idx) >= s.arity() || !s[static_cast<std::size_t>(idx)]) {
        throw std::invalid_argument("substitute: parameter '" + t.name() + "' is unassigned (⊤) in " + s.str());
      }
      return *s[static_cast<std::size_t>(idx)];
    }
    case TypeExpr::Kind::Decorated:
      return TypeExpr::deco(t.decoration(), substitute(s, t.inner(), owner));
    case TypeExpr::Kind::Concrete: {
      std::vector<TypeExpr> args;
      for (const auto& a : t.args()) args.push_back(substitute(s, a, owner));
      return TypeExpr::con(t.name(), std::move(args));
    }
    case TypeExpr::Kind::Primitive:
      return t;
  }
  return t;
}

TraitRef substitute(const MonoSolution& s, const TraitRef& r, const ApiSignature& owner) {
  TraitRef out{r.name, {}};
  for (const auto& a : r.args) out.args.push_back(substitute(s, a, owner));
  return out;
}

TypeExpr substitute(const Bindings& b, const TypeExpr& t) {
  if (!t.has_params()) return t;
  switch (t.kind()) {
    case TypeExpr::Kind::Param: {
      auto it = b.find(t.name());
      return it == b.end() ? t : it->second;
    }
    case TypeExpr::Kind::Decorated:
      return TypeExpr::deco(t.decoration(), substitute(b, t.inner()));
    case TypeExpr::Kind::Concrete: {
      std::vector<TypeExpr> args;
      for (const auto& a : t.args()) args.push_back(substitute(b, a));
      return TypeExpr::con(t.name(), std::move(args));
    }
    case TypeExpr::Kind::Primitive:
      return t;
  }
  return t;
}

ApiSignature materialize(const ApiSignature& gapi, const MonoSolution& s) {
  ApiSignature m;
  m.id = gapi.id + "@" + s.type_args();
  m.name = gapi.name;
  m.origin = gapi.origin;
  for (const auto& in : gapi.inputs) m.inputs.push_back(substitute(s, in, gapi));
  if (gapi.output) m.output = substitute(s, *gapi.output, gapi);
  return m;
}

}  // namespace monofuzz
