#include <gtest/gtest.h>

#include <random>

#include "../oracle/oracle.hpp"
#include "../support.hpp"
#include "monofuzz/search.hpp"

using namespace monofuzz;
using testsupport::sol;
using testsupport::ty;

namespace {

ReachableSet reach(std::initializer_list<const char*> types) {
  ReachableSet r;
  for (const char* t : types) r.insert(ty(t));
  return r;
}

ApiSignature needs(const char* t) {
  ApiSignature a;
  a.id = "g";
  a.name = "g";
  a.inputs = {ty(t)};
  return a;
}

Corpus fig2() { return load_corpus_file(testsupport::fixture("fig2.json"), LoadOptions{false}); }

}  // namespace

TEST(Reachable, NoInputs) {
  Corpus c = fig2();
  EXPECT_TRUE(is_reachable(*c.find_api("f2"), ReachableSet{}, c));
}

TEST(Reachable, DirectType) {
  Corpus c = fig2();
  EXPECT_TRUE(is_reachable(needs("Ty1"), reach({"Ty1"}), c));
}

TEST(Reachable, NestedTypeNotProduced) {
  Corpus c = fig2();
  EXPECT_FALSE(is_reachable(needs("Vec<Ty1>"), reach({"Ty1"}), c));
}

TEST(Reachable, PrimitivesAndTransforms) {
  Corpus c = load_corpus_file(testsupport::fixture("codec.json"));
  EXPECT_TRUE(is_reachable(needs("&str"), ReachableSet{}, c));
  EXPECT_TRUE(is_reachable(needs("&mut u8"), ReachableSet{}, c));
  EXPECT_TRUE(is_reachable(needs("&Ty1"), reach({"Option<Ty1>"}), c));
  EXPECT_TRUE(is_reachable(needs("Ty1"), reach({"Result<Option<Ty1>, u8>"}), c));
  EXPECT_FALSE(is_reachable(needs("&Ty1"), reach({"Result<Option<Ty1>, u8>"}), c));
  EXPECT_THROW(is_reachable(needs("Vec<T>"), ReachableSet{}, c), std::invalid_argument);
}

TEST(Search, Fig2DepthTwo) {
  auto run = testsupport::search_fixture("fig2.json", false, 2);
  const auto& r = run->catalog.reachable;
  EXPECT_TRUE(r.contains(ty("Vec<Ty1>")));
  EXPECT_FALSE(r.contains(ty("Vec<Vec<Ty1>>")));
  EXPECT_TRUE(run->catalog.mo.at("f4").contains(sol({"Ty1"})));
  EXPECT_NE(run->catalog.find("f4@<Ty1>"), nullptr);
  EXPECT_NE(run->catalog.find("f1"), nullptr);
}

TEST(Search, Fig2DepthThree) {
  auto run = testsupport::search_fixture("fig2.json", false, 3);
  EXPECT_TRUE(run->catalog.reachable.contains(ty("Vec<Vec<Ty1>>")));
  EXPECT_FALSE(run->catalog.reachable.contains(ty("Vec<Vec<Vec<Ty1>>>")));
}

TEST(Search, Fig1MapVec) {
  auto run = testsupport::search_fixture("fig1.json");
  const SolutionSet& mo = run->catalog.mo.at("map_vec");
  EXPECT_TRUE(mo.contains(sol({"u8", "i32"})));
  EXPECT_FALSE(mo.contains(sol({"i32", "u8"})));
  EXPECT_TRUE(mo.contains(sol({"i32", "i32"})));
}

TEST(Search, Fig5MergeTrace) {
  Corpus c = load_corpus_file(testsupport::fixture("fig5.json"), LoadOptions{false});
  auto run = testsupport::search(c);
  std::vector<MergeTraceStep> trace;
  SolutionSet s = solve_generic_inputs(*c.find_api("foo"), run->catalog.reachable.items(), &trace);
  ASSERT_EQ(trace.size(), 3u);
  EXPECT_EQ(trace[0].matched, SolutionSet(2, {sol({"u8", "*"}), sol({"f32", "*"})}));
  EXPECT_EQ(trace[1].matched, SolutionSet(2, {sol({"*", "i32"}), sol({"*", "u8"})}));
  EXPECT_EQ(trace[1].merged.size(), 4u);
  EXPECT_EQ(trace[2].merged, SolutionSet(2, {sol({"u8", "i32"})}));
  EXPECT_EQ(s, SolutionSet(2, {sol({"u8", "i32"})}));
  EXPECT_EQ(run->catalog.mo.at("foo"), s);
}

TEST(Search, RejectsZeroDepth) {
  Corpus c = fig2();
  DependencyGraph g = DependencyGraph::build(c);
  ImplIndex idx(c);
  EXPECT_THROW(run_search(g, c, idx, SearchOptions{0}), std::invalid_argument);
}

TEST(Search, CatalogInvariants) {
  for (const char* name : {"fig1.json", "fig2.json", "fig5.json", "codec.json", "two_producers.json"}) {
    auto run = testsupport::search_fixture(name);
    const auto& cat = run->catalog;
    for (const auto& inst : cat.instances) {
      EXPECT_TRUE(is_reachable(inst, cat.reachable, run->corpus)) << inst.id;
      EXPECT_NE(inst.verdict, BoundsVerdict::Invalid) << inst.id;
      for (const auto& in : inst.signature.inputs) EXPECT_LE(type_depth(in), 2) << inst.id;
      if (!inst.is_mono()) continue;
      EXPECT_TRUE(inst.solution->complete());
      for (const auto& s : inst.solution->slots()) EXPECT_LE(type_depth(*s), 2) << inst.id;
      EXPECT_NE(satisfies_bounds(*inst.solution, *run->corpus.find_api(inst.api_id), *run->index),
                BoundsVerdict::Invalid);
    }
    for (const auto& t : cat.reachable.items()) EXPECT_LE(type_depth(t), 2);
    for (const auto& [api, set] : cat.mo) {
      for (const auto& s : set) EXPECT_TRUE(s.complete()) << api;
    }
  }
}

TEST(Search, RoundsAreMonotone) {
  auto run = testsupport::search_fixture("codec.json");
  const auto& cat = run->catalog;
  for (std::size_t i = 1; i < cat.type_round.size(); ++i) EXPECT_LE(cat.type_round[i - 1], cat.type_round[i]);
  for (std::size_t i = 1; i < cat.instances.size(); ++i) {
    EXPECT_LE(cat.instances[i - 1].round, cat.instances[i].round);
    EXPECT_EQ(cat.instances[i].discovery, i);
  }
}

TEST(Search, AgreesWithBruteForce) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 60; ++i) {
    auto doc = oracle::random_corpus(rng);
    Corpus c = load_corpus(doc, LoadOptions{false});
    for (unsigned depth : {1u, 2u}) {
      auto run = testsupport::search(c, depth);
      oracle::Result expected = oracle::brute_force(c, *run->index, depth);
      ASSERT_EQ(oracle::diff(expected, oracle::from_catalog(run->catalog)), "")
          << "depth " << depth << "\n" << doc.dump(2);
    }
  }
}

TEST(Search, CatalogDumpIsDeterministic) {
  auto a = testsupport::search_fixture("fig1.json");
  auto b = testsupport::search_fixture("fig1.json");
  EXPECT_EQ(a->catalog.to_json().dump(), b->catalog.to_json().dump());
}
