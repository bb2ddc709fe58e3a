#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monofuzz/corpus.hpp"
#include "monofuzz/type_expr.hpp"

namespace monofuzz {

// ---- transformation rules ----

enum class Rule { SharedBorrow, ExclusiveBorrow, ConstRaw, MutRaw, UnwrapResult, UnwrapOption };
using RuleChain = std::vector<Rule>;

inline constexpr std::size_t kMaxChainLength = 2;

std::string_view rule_name(Rule r);
Rule rule_from_name(std::string_view name);
bool is_unwrap(Rule r);

// Applies a single rule to a concrete value type; nullopt when it does not apply.
std::optional<TypeExpr> apply_rule(Rule r, const TypeExpr& value);

using Bindings = std::map<std::string, TypeExpr>;

// Structural unification of a pattern (may contain Params) against a type
// without Params. Extends `b`; returns false on constructor clash or on a
// parameter bound inconsistently.
bool unify(const TypeExpr& pattern, const TypeExpr& concrete, Bindings& b);

struct Bridge {
  RuleChain chain;
  TypeExpr transformed;
  Bindings bindings;
};

// Every way (chain of at most two rules) to turn `available` into a value
// that unifies with `needed`. Borrow and raw-address rules are only used
// where `needed` carries that decoration itself; unwrap rules always apply.
// Ordered by chain length, then rule order; the identity comes first.
std::vector<Bridge> apply_transformations(const TypeExpr& available, const TypeExpr& needed);

// ---- monomorphic solutions ----

// One slot per type parameter; nullopt stands for the wildcard (top).
using Slot = std::optional<TypeExpr>;

class MonoSolution {
 public:
  explicit MonoSolution(std::vector<Slot> slots) : slots_(std::move(slots)) {}
  static MonoSolution top(std::size_t arity) { return MonoSolution(std::vector<Slot>(arity)); }

  std::size_t arity() const { return slots_.size(); }
  const Slot& operator[](std::size_t i) const { return slots_[i]; }
  std::span<const Slot> slots() const { return slots_; }
  bool complete() const;
  // Every slot is top or equal to the corresponding slot of `other`.
  bool subsumes(const MonoSolution& other) const;
  // "(i32, ⊤)"
  std::string str() const;
  // "<u8, i32>"; requires a complete solution.
  std::string type_args() const;

  friend bool operator==(const MonoSolution&, const MonoSolution&) = default;
  friend std::strong_ordering operator<=>(const MonoSolution& a, const MonoSolution& b);

 private:
  std::vector<Slot> slots_;
};

// Normalized finite set of solutions for one API: sorted, no element
// subsumed by a different element.
class SolutionSet {
 public:
  explicit SolutionSet(std::size_t arity) : arity_(arity) {}
  SolutionSet(std::size_t arity, std::vector<MonoSolution> items);
  static SolutionSet top(std::size_t arity);

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool contains(const MonoSolution& s) const;
  void insert(const MonoSolution& s);
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<MonoSolution>& items() const { return items_; }
  std::string str() const;

  friend bool operator==(const SolutionSet&, const SolutionSet&) = default;

 private:
  void normalize();
  std::size_t arity_;
  std::vector<MonoSolution> items_;
};

struct MatchResult {
  MonoSolution solution;
  RuleChain chain;
};

// First match of `concrete` against the generic argument of `owner`.
std::optional<MatchResult> match_type(const TypeExpr& concrete, const TypeExpr& generic_arg,
                                      const ApiSignature& owner);
// All matches, one per admissible transformation chain.
std::vector<MatchResult> match_type_all(const TypeExpr& concrete, const TypeExpr& generic_arg,
                                        const ApiSignature& owner);

SolutionSet union_sets(const SolutionSet& a, const SolutionSet& b);
SolutionSet merge_sets(const SolutionSet& a, const SolutionSet& b);

// Replaces every Param of `t` with its slot in `s`. Throws
// std::invalid_argument when a needed slot is top or the parameter is unknown.
TypeExpr substitute(const MonoSolution& s, const TypeExpr& t, const ApiSignature& owner);
TraitRef substitute(const MonoSolution& s, const TraitRef& r, const ApiSignature& owner);
TypeExpr substitute(const Bindings& b, const TypeExpr& t);

// The monomorphic API obtained from a complete solution.
ApiSignature materialize(const ApiSignature& gapi, const MonoSolution& s);

}  // namespace monofuzz
