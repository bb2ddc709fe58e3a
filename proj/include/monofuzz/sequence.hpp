#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "monofuzz/prune.hpp"
#include "monofuzz/search.hpp"

namespace monofuzz {

// Argument decoded from the fuzz input. `chain` holds the borrow/raw rules
// applied to the decoded primitive value.
struct PrimitiveSlot {
  std::size_t index;
  TypeExpr type;
  RuleChain chain;
};

// Argument taken from the result of an earlier call.
struct ValueFrom {
  std::size_t call;
  RuleChain chain;
};

using InputBinding = std::variant<PrimitiveSlot, ValueFrom>;

struct SequenceCall {
  std::string instance;
  std::vector<InputBinding> inputs;
};

struct ApiSequence {
  std::vector<SequenceCall> calls;
  std::size_t slot_count = 0;

  const std::string& target() const { return calls.back().instance; }
  nlohmann::json to_json() const;
};

struct SequenceLimits {
  std::size_t max_sequences = 300;
  std::size_t max_length = 8;
  bool require_mono = true;
};

struct SequenceFailure {
  std::string target;
  std::string reason;
};

struct SequenceResult {
  std::vector<ApiSequence> sequences;
  std::vector<std::string> dropped;  // targets cut by the sequence cap
  std::vector<SequenceFailure> failures;
  std::vector<std::string> uncovered;  // reserved instances in no sequence

  nlohmann::json to_json() const;
};

// Does a call to `inst` appear in `seq` as a monomorphic instance?
bool has_mono_call(const ApiSequence& seq, const MonoCatalog& catalog);

SequenceResult generate_sequences(const ReservedSet& reserved, const MonoCatalog& catalog, const Corpus& c,
                                  const SequenceLimits& limits = {});

struct SequenceValidation {
  bool valid = true;
  std::string reason;
};

// Re-checks every call against its prefix: argument sources precede their
// consumer, types line up through the recorded rule chains, primitive slots
// decode to the declared type and no value is used after being moved.
SequenceValidation validate_sequence(const ApiSequence& seq, const MonoCatalog& catalog, const Corpus& c);

// Applies a rule chain to a value type; nullopt when a rule does not apply.
std::optional<TypeExpr> apply_chain(const TypeExpr& value, const RuleChain& chain);
// True when passing a value through `chain` consumes it.
bool chain_moves(const RuleChain& chain);

}  // namespace monofuzz
