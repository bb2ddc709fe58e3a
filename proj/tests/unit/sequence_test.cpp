#include <gtest/gtest.h>

#include <random>

#include "../oracle/oracle.hpp"
#include "../support.hpp"
#include "monofuzz/sequence.hpp"

using namespace monofuzz;
using testsupport::ty;

namespace {

ReservedSet reserve(std::vector<std::string> ids) {
  ReservedSet r;
  for (const auto& id : ids) {
    r.reserved.push_back(id);
    r.reserved_ids.insert(id);
  }
  return r;
}

ReservedSet prune(const testsupport::Run& run) {
  return run_prune(run.graph, run.catalog, run.corpus, *run.index);
}

ApiSequence f1_f4() {
  ApiSequence s;
  s.calls.push_back(SequenceCall{"f1", {}});
  s.calls.push_back(SequenceCall{"f4@<Ty1>", {ValueFrom{0, {}}}});
  return s;
}

void check_result(const testsupport::Run& run, const ReservedSet& reserved, const SequenceResult& res,
                  const SequenceLimits& limits, const std::string& label) {
  for (const auto& seq : res.sequences) {
    auto v = validate_sequence(seq, run.catalog, run.corpus);
    ASSERT_TRUE(v.valid) << label << ": " << v.reason << "\n" << seq.to_json().dump();
    ASSERT_LE(seq.calls.size(), limits.max_length) << label;
    if (limits.require_mono) ASSERT_TRUE(has_mono_call(seq, run.catalog)) << label;
    for (const auto& call : seq.calls) ASSERT_TRUE(reserved.contains(call.instance)) << label;
  }
  ASSERT_LE(res.sequences.size(), limits.max_sequences);
  if (reserved.reserved.size() <= limits.max_sequences) {
    ASSERT_TRUE(res.uncovered.empty()) << label << ": " << res.to_json().dump();
    ASSERT_TRUE(res.dropped.empty()) << label;
  }
}

}  // namespace

TEST(Validate, ProducerThenConsumer) {
  auto run = testsupport::search_fixture("fig2.json", false);
  EXPECT_TRUE(validate_sequence(f1_f4(), run->catalog, run->corpus).valid);
}

TEST(Validate, UnproducedInput) {
  auto run = testsupport::search_fixture("fig2.json", false);
  ApiSequence s;
  s.calls.push_back(SequenceCall{"f4@<Ty1>", {ValueFrom{0, {}}}});
  auto v = validate_sequence(s, run->catalog, run->corpus);
  EXPECT_FALSE(v.valid);
  EXPECT_FALSE(v.reason.empty());
}

TEST(Validate, LaterIndex) {
  auto run = testsupport::search_fixture("fig2.json", false);
  ApiSequence s;
  s.calls.push_back(SequenceCall{"f4@<Ty1>", {ValueFrom{1, {}}}});
  s.calls.push_back(SequenceCall{"f1", {}});
  EXPECT_FALSE(validate_sequence(s, run->catalog, run->corpus).valid);
}

TEST(Validate, MisuseCases) {
  auto run = testsupport::search_fixture("fig2.json", false);
  ApiSequence wrong_type;
  wrong_type.calls.push_back(SequenceCall{"f2", {}});
  wrong_type.calls.push_back(SequenceCall{"f4@<Ty1>", {ValueFrom{0, {}}}});
  EXPECT_FALSE(validate_sequence(wrong_type, run->catalog, run->corpus).valid);

  ApiSequence moved = f1_f4();
  moved.calls.push_back(SequenceCall{"f3@<Ty1>", {ValueFrom{0, {}}}});
  EXPECT_FALSE(validate_sequence(moved, run->catalog, run->corpus).valid);

  ApiSequence slots;
  slots.slot_count = 1;
  slots.calls.push_back(SequenceCall{"f4@<u8>", {PrimitiveSlot{0, ty("u8"), {}}}});
  EXPECT_TRUE(validate_sequence(slots, run->catalog, run->corpus).valid);
  slots.calls.push_back(SequenceCall{"f4@<u8>", {PrimitiveSlot{0, ty("u8"), {}}}});
  EXPECT_FALSE(validate_sequence(slots, run->catalog, run->corpus).valid);

  EXPECT_FALSE(validate_sequence(ApiSequence{}, run->catalog, run->corpus).valid);
}

TEST(Chains, MoveSemantics) {
  EXPECT_TRUE(chain_moves({}));
  EXPECT_TRUE(chain_moves({Rule::UnwrapOption}));
  EXPECT_TRUE(chain_moves({Rule::UnwrapResult, Rule::SharedBorrow}));
  EXPECT_FALSE(chain_moves({Rule::SharedBorrow}));
  EXPECT_FALSE(chain_moves({Rule::ExclusiveBorrow, Rule::MutRaw}));
  EXPECT_EQ(apply_chain(ty("Option<u8>"), {Rule::UnwrapOption, Rule::SharedBorrow}), ty("&u8"));
  EXPECT_FALSE(apply_chain(ty("u8"), {Rule::UnwrapOption}));
}

TEST(Generate, Fig2ProducerChain) {
  auto run = testsupport::search_fixture("fig2.json", false);
  SequenceResult res = generate_sequences(reserve({"f4@<Ty1>", "f1"}), run->catalog, run->corpus);
  ASSERT_EQ(res.sequences.size(), 1u);
  const ApiSequence& s = res.sequences[0];
  ASSERT_EQ(s.calls.size(), 2u);
  EXPECT_EQ(s.calls[0].instance, "f1");
  EXPECT_EQ(s.calls[1].instance, "f4@<Ty1>");
  ASSERT_EQ(s.calls[1].inputs.size(), 1u);
  const auto* from = std::get_if<ValueFrom>(&s.calls[1].inputs[0]);
  ASSERT_NE(from, nullptr);
  EXPECT_EQ(from->call, 0u);
  EXPECT_TRUE(res.uncovered.empty());
}

TEST(Generate, PrimitiveOnlyTargetIsSingleton) {
  auto run = testsupport::search_fixture("fig2.json", false);
  SequenceResult res = generate_sequences(reserve({"f4@<u8>"}), run->catalog, run->corpus);
  ASSERT_EQ(res.sequences.size(), 1u);
  ASSERT_EQ(res.sequences[0].calls.size(), 1u);
  EXPECT_EQ(res.sequences[0].slot_count, 1u);
}

TEST(Generate, MissingProducerIsReported) {
  auto run = testsupport::search_fixture("fig2.json", false);
  SequenceResult res = generate_sequences(reserve({"f4@<Ty1>"}), run->catalog, run->corpus);
  EXPECT_TRUE(res.sequences.empty());
  ASSERT_EQ(res.failures.size(), 1u);
  EXPECT_EQ(res.uncovered, (std::vector<std::string>{"f4@<Ty1>"}));
}

TEST(Generate, CapAtThreeHundred) {
  nlohmann::json doc = {{"types", nlohmann::json::array()},
                        {"traits", nlohmann::json::array()},
                        {"impls", nlohmann::json::array()},
                        {"primitives", {"u8"}},
                        {"apis", nlohmann::json::array()}};
  for (int i = 0; i < 301; ++i) {
    doc["apis"].push_back({{"id", "g" + std::to_string(i)},
                           {"name", "g" + std::to_string(i)},
                           {"generics", {"T"}},
                           {"inputs", {{{"param", "T"}}}},
                           {"output", nullptr}});
  }
  auto run = testsupport::search(load_corpus(doc, LoadOptions{false}));
  ReservedSet reserved = prune(*run);
  ASSERT_EQ(reserved.reserved.size(), 301u);
  SequenceResult res = generate_sequences(reserved, run->catalog, run->corpus);
  EXPECT_EQ(res.sequences.size(), 300u);
  EXPECT_EQ(res.dropped, (std::vector<std::string>{"g300@<u8>"}));
  std::map<std::string, int> per_target;
  for (const auto& s : res.sequences) ++per_target[s.target()];
  for (const auto& [t, n] : per_target) EXPECT_EQ(n, 1) << t;
  EXPECT_EQ(res.uncovered, (std::vector<std::string>{"g300@<u8>"}));
}

TEST(Generate, FixturesAreValidAndCovered) {
  for (const char* name : {"fig1.json", "fig2.json", "fig5.json", "codec.json", "two_producers.json"}) {
    auto run = testsupport::search_fixture(name);
    ReservedSet reserved = prune(*run);
    SequenceLimits limits;
    check_result(*run, reserved, generate_sequences(reserved, run->catalog, run->corpus, limits), limits, name);
    limits.require_mono = false;
    check_result(*run, reserved, generate_sequences(reserved, run->catalog, run->corpus, limits), limits, name);
  }
}

TEST(Generate, RandomCorporaAreValidAndCovered) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 80; ++i) {
    Corpus c = load_corpus(oracle::random_corpus(rng), LoadOptions{false});
    auto run = testsupport::search(c);
    ReservedSet reserved = prune(*run);
    SequenceResult res = generate_sequences(reserved, run->catalog, run->corpus);
    // Non-generic producers without any monomorphic consumer cannot appear
    // under the default flag.
    bool has_mono = reserved.mono_reserved > 0;
    if (!has_mono) {
      EXPECT_TRUE(res.sequences.empty());
      continue;
    }
    check_result(*run, reserved, res, SequenceLimits{}, "random " + std::to_string(i) + " " + corpus_to_json(c).dump());
  }
}

TEST(Generate, Deterministic) {
  auto a = testsupport::search_fixture("codec.json");
  auto b = testsupport::search_fixture("codec.json");
  auto ra = generate_sequences(prune(*a), a->catalog, a->corpus);
  auto rb = generate_sequences(prune(*b), b->catalog, b->corpus);
  EXPECT_EQ(ra.to_json().dump(), rb.to_json().dump());
}

TEST(Generate, UnwrapGlueIsRecorded) {
  auto run = testsupport::search_fixture("codec.json");
  SequenceResult res = generate_sequences(prune(*run), run->catalog, run->corpus);
  bool unwrap = false, exclusive = false;
  for (const auto& s : res.sequences) {
    for (const auto& call : s.calls) {
      for (const auto& b : call.inputs) {
        const RuleChain& chain = std::holds_alternative<ValueFrom>(b) ? std::get<ValueFrom>(b).chain
                                                                      : std::get<PrimitiveSlot>(b).chain;
        for (Rule r : chain) {
          unwrap = unwrap || is_unwrap(r);
          exclusive = exclusive || r == Rule::ExclusiveBorrow;
        }
      }
    }
  }
  EXPECT_TRUE(unwrap);
  EXPECT_TRUE(exclusive);
}

TEST(Generate, BorrowedArgumentIsNotMovedByLaterProducer) {
  Corpus c = load_corpus_text(R"({
    "types": [{"name": "Ty1", "arity": 0}, {"name": "Ty2", "arity": 0}],
    "traits": [], "impls": [],
    "apis": [
      {"id": "mk", "name": "mk", "inputs": [], "output": {"con": "Ty1"}},
      {"id": "seal", "name": "seal", "inputs": [{"con": "Ty1"}], "output": {"con": "Ty2"}},
      {"id": "peek", "name": "peek", "generics": ["T"],
       "inputs": [{"deco": "shared-borrow", "inner": {"con": "Ty1"}}, {"con": "Ty2"}, {"param": "T"}],
       "output": null}
    ]})",
                              LoadOptions{false});
  auto run = testsupport::search(c);
  ReservedSet reserved = prune(*run);
  SequenceResult res = generate_sequences(reserved, run->catalog, run->corpus);
  ASSERT_FALSE(res.sequences.empty());
  check_result(*run, reserved, res, SequenceLimits{}, "borrow");
  EXPECT_EQ(res.sequences.front().calls.size(), 4u);
}
