#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "../oracle/oracle.hpp"
#include "../support.hpp"
#include "monofuzz/corpus.hpp"

using namespace monofuzz;
using testsupport::fixture;
using testsupport::ty;

namespace {

int depth_oracle(const TypeExpr& t) {
  if (t.is_deco()) return depth_oracle(t.inner());
  int d = 0;
  for (const auto& a : t.args()) d = std::max(d, depth_oracle(a));
  return d + 1;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(TypeDepth, BareNamedType) { EXPECT_EQ(type_depth(ty("Ty1")), 1); }

TEST(TypeDepth, NestedOnce) { EXPECT_EQ(type_depth(ty("Vec<Ty1>")), 2); }

TEST(TypeDepth, NestedTwice) {
  TypeExpr t = ty("Vec<Vec<Ty1>>");
  EXPECT_EQ(type_depth(t), 3);
  EXPECT_EQ(type_depth(t), depth_oracle(t));
}

TEST(TypeDepth, DecorationsAndPrimitives) {
  EXPECT_EQ(type_depth(ty("u8")), 1);
  EXPECT_EQ(type_depth(ty("&mut Vec<u8>")), 2);
  EXPECT_EQ(type_depth(ty("Pair<u8, Vec<Option<i32>>>")), 4);
}

TEST(TypeDepth, ParamIsRejected) { EXPECT_THROW(type_depth(ty("Vec<T>")), std::logic_error); }

TEST(TypeDepth, WrappingAddsOneProperty) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    Corpus c = load_corpus(oracle::random_corpus(rng), LoadOptions{false});
    for (const auto& t : oracle::universe(c, 3)) {
      ASSERT_GE(type_depth(t), 1);
      ASSERT_EQ(type_depth(TypeExpr::con("Vec", {t})), type_depth(t) + 1);
      ASSERT_EQ(type_depth(t), depth_oracle(t));
    }
  }
}

TEST(TypeExpr, RendersRustSyntax) {
  EXPECT_EQ(ty("Vec<Ty1>").str(), "Vec<Ty1>");
  EXPECT_EQ(ty("&mut T").str(), "&mut T");
  EXPECT_EQ(ty("*const u8").str(), "*const u8");
  EXPECT_EQ(ty("Result<&str, Pair<u8,i32>>").str(), "Result<&str, Pair<u8, i32>>");
  EXPECT_TRUE(ty("&str").is_prim());
  EXPECT_TRUE(ty("&[u8]").is_prim());
}

TEST(TypeExpr, StructuralEquality) {
  EXPECT_EQ(ty("Vec<Ty1>"), TypeExpr::con("Vec", {TypeExpr::con("Ty1")}));
  EXPECT_NE(ty("Vec<Ty1>"), ty("Vec<Ty2>"));
  EXPECT_NE(ty("&T"), ty("&mut T"));
  EXPECT_EQ(TypeExprHash{}(ty("Option<u8>")), TypeExprHash{}(ty("Option<u8>")));
}

TEST(TypeExpr, ParseErrors) {
  EXPECT_THROW(ty("Vec<"), std::invalid_argument);
  EXPECT_THROW(ty(""), std::invalid_argument);
  EXPECT_THROW(ty("Vec<u8>>"), std::invalid_argument);
}

TEST(Corpus, Fig2FixtureShape) {
  Corpus c = load_corpus_file(fixture("fig2.json"), LoadOptions{false});
  EXPECT_EQ(c.apis.size(), 4u);
  int nominal = 0;
  for (const auto& t : c.types) nominal += t.arity == 0 ? 1 : 0;
  EXPECT_EQ(nominal, 2);
  EXPECT_EQ(c.crate_name, "fig2");
}

TEST(Corpus, EmptyDocument) {
  Corpus c = load_corpus_text(R"({"types":[],"traits":[],"impls":[],"apis":[]})", LoadOptions{false});
  EXPECT_TRUE(c.types.empty());
  EXPECT_TRUE(c.traits.empty());
  EXPECT_TRUE(c.impls.empty());
  EXPECT_TRUE(c.apis.empty());
  EXPECT_EQ(c.primitives, default_primitives());
}

TEST(Corpus, DenylistedImplsAreDropped) {
  Corpus c = load_corpus_file(fixture("denylist.json"), LoadOptions{false});
  ASSERT_EQ(c.impls.size(), 1u);
  EXPECT_EQ(c.impls[0].impl_id, "hash_ty1");
  EXPECT_NE(c.find_trait("Debug"), nullptr);
}

TEST(Corpus, DenylistOverride) {
  auto doc = nlohmann::json::parse(read_file(fixture("denylist.json")));
  doc["trait_denylist"] = nlohmann::json::array({"Hash"});
  Corpus c = load_corpus(doc, LoadOptions{false});
  ASSERT_EQ(c.impls.size(), 1u);
  EXPECT_EQ(c.impls[0].impl_id, "debug_ty1");
}

TEST(Corpus, DanglingTraitIsAnError) {
  try {
    load_corpus_file(fixture("dangling_trait.json"));
    FAIL() << "expected CorpusError";
  } catch (const CorpusError& e) {
    EXPECT_NE(std::string(e.what()).find("Missing"), std::string::npos);
    EXPECT_EQ(e.path().rfind("/apis/0", 0), 0u);
  }
}

TEST(Corpus, ValidationErrors) {
  auto bad = [](const std::string& text) { return load_corpus_text(text, LoadOptions{false}); };
  EXPECT_THROW(bad(R"({"types":[{"name":"A"},{"name":"A"}],"traits":[],"impls":[],"apis":[]})"), CorpusError);
  EXPECT_THROW(bad(R"({"types":[],"traits":[],"impls":[],"apis":[],"extra":1})"), CorpusError);
  EXPECT_THROW(bad(R"({"types":[],"traits":[],"impls":[]})"), CorpusError);
  EXPECT_THROW(bad(R"({"types":[],"traits":[],"impls":[],"apis":[
      {"id":"f","name":"f","inputs":[{"con":"Nope"}],"output":null}]})"),
               CorpusError);
  EXPECT_THROW(bad(R"({"types":[],"traits":[],"impls":[],"apis":[
      {"id":"f","name":"f","inputs":[{"param":"T"}],"output":null}]})"),
               CorpusError);
  EXPECT_THROW(bad(R"({"types":[{"name":"Vec","arity":1}],"traits":[],"impls":[],"apis":[
      {"id":"f","name":"f","inputs":[{"con":"Vec"}],"output":null}]})"),
               CorpusError);
  EXPECT_THROW(bad(R"({"types":[],"traits":[],"impls":[],"apis":[
      {"id":"f","name":"f","inputs":[{"prim":"u128"}],"output":null}]})"),
               CorpusError);
  EXPECT_THROW(bad("not json"), CorpusError);
}

TEST(Corpus, PreludeAddsContainersAndConversions) {
  Corpus c = load_corpus_file(fixture("fig1.json"));
  EXPECT_NE(c.find_type("Vec"), nullptr);
  EXPECT_NE(c.find_type("Result"), nullptr);
  EXPECT_NE(c.find_api("std::vec_new"), nullptr);
  EXPECT_EQ(c.find_api("std::vec_new")->origin, Origin::Prelude);
  EXPECT_EQ(c.find_api("map_vec")->origin, Origin::Library);
  bool widening = false;
  for (const auto& i : c.impls) widening = widening || i.impl_id == "std::from_u8_for_i32";
  EXPECT_TRUE(widening);
  for (const auto& i : c.impls) EXPECT_NE(i.implemented.name, "Debug");
}

TEST(Corpus, PreludeDisabled) {
  EXPECT_THROW(load_corpus_file(fixture("fig1.json"), LoadOptions{false}), CorpusError);
}

TEST(Corpus, LoadIsDeterministic) {
  std::string text = read_file(fixture("codec.json"));
  EXPECT_EQ(load_corpus_text(text), load_corpus_text(text));
}

TEST(Corpus, RoundTripFixtures) {
  for (const char* name : {"fig1.json", "fig2.json", "fig5.json", "codec.json", "two_producers.json"}) {
    Corpus c = load_corpus_file(fixture(name));
    Corpus again = load_corpus(corpus_to_json(c), LoadOptions{false});
    EXPECT_EQ(c, again) << name;
  }
}

TEST(Corpus, RoundTripRandom) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Corpus c = load_corpus(oracle::random_corpus(rng), LoadOptions{false});
    ASSERT_EQ(c, load_corpus(corpus_to_json(c), LoadOptions{false}));
  }
}

TEST(Corpus, NonGenericApisHaveNoParams) {
  Corpus c = load_corpus_file(fixture("codec.json"));
  for (const auto& api : c.apis) {
    if (api.is_generic()) continue;
    for (const auto& in : api.inputs) EXPECT_FALSE(in.has_params()) << api.id;
    if (api.output) EXPECT_FALSE(api.output->has_params()) << api.id;
  }
}
