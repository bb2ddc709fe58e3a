#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "monofuzz/corpus.hpp"
#include "monofuzz/lattice.hpp"

namespace monofuzz {

inline constexpr unsigned kDefaultBoundsFuel = 4;

enum class Outcome { Holds, Fails, Assumed };
std::string_view outcome_name(Outcome o);

struct HoldsResult {
  Outcome outcome = Outcome::Fails;
  std::string impl_id;  // set when outcome == Holds

  friend bool operator==(const HoldsResult&, const HoldsResult&) = default;
};

// Trait-implementation lookup over the corpus impl records. Deliberately
// permissive: missing information and exhausted fuel yield Assumed, never
// Fails. Queries are thread-safe.
class ImplIndex {
 public:
  explicit ImplIndex(const Corpus& c, bool memoize = true);

  HoldsResult holds(const TypeExpr& t, const TraitRef& tr, unsigned fuel = kDefaultBoundsFuel) const;

  const std::vector<TraitImplRecord>& impls_of(std::string_view trait) const;
  std::size_t memo_size() const;

 private:
  HoldsResult compute(const TypeExpr& t, const TraitRef& tr, unsigned fuel) const;

  std::map<std::string, std::vector<TraitImplRecord>, std::less<>> by_trait_;
  bool memoize_;
  mutable std::mutex memo_mutex_;
  mutable std::map<std::tuple<TypeExpr, std::string, std::vector<TypeExpr>, unsigned>, HoldsResult> memo_;
};

enum class BoundsVerdict { Valid, Invalid, AssumedValid };
std::string_view verdict_name(BoundsVerdict v);

struct BoundsCheck {
  BoundsVerdict verdict = BoundsVerdict::Valid;
  // Per bound of the API, in declaration order.
  std::vector<HoldsResult> per_bound;
};

// Substitutes `s` into every bound of `api` and conjoins the results.
// Throws std::invalid_argument when a bound needs a top slot.
BoundsCheck check_bounds(const MonoSolution& s, const ApiSignature& api, const ImplIndex& idx,
                         unsigned fuel = kDefaultBoundsFuel);
BoundsVerdict satisfies_bounds(const MonoSolution& s, const ApiSignature& api, const ImplIndex& idx,
                               unsigned fuel = kDefaultBoundsFuel);

struct BoundsCounters {
  std::size_t checked = 0;
  std::size_t valid = 0;
  std::size_t invalid = 0;
  std::size_t assumed = 0;

  void record(BoundsVerdict v);
  nlohmann::json to_json() const;
};

}  // namespace monofuzz
