#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "monofuzz/bounds.hpp"
#include "monofuzz/corpus.hpp"
#include "monofuzz/graph.hpp"
#include "monofuzz/search.hpp"

namespace testsupport {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(MONOFUZZ_FIXTURES) / name;
}

// Parses surface syntax; T, U, V are parameters.
inline monofuzz::TypeExpr ty(std::string_view text) {
  static const std::vector<std::string> params = {"T", "U", "V"};
  return monofuzz::parse_type(text, monofuzz::default_primitives(), params);
}

inline monofuzz::MonoSolution sol(std::vector<std::string> slots) {
  std::vector<monofuzz::Slot> out;
  for (const auto& s : slots) {
    if (s == "*") {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(ty(s));
    }
  }
  return monofuzz::MonoSolution(std::move(out));
}

struct Run {
  monofuzz::Corpus corpus;
  monofuzz::DependencyGraph graph;
  std::unique_ptr<monofuzz::ImplIndex> index;
  monofuzz::MonoCatalog catalog;
};

inline std::unique_ptr<Run> search(monofuzz::Corpus c, unsigned max_depth = monofuzz::kDefaultMaxDepth) {
  auto r = std::make_unique<Run>(Run{std::move(c), {}, nullptr, {}});
  r->graph = monofuzz::DependencyGraph::build(r->corpus);
  r->index = std::make_unique<monofuzz::ImplIndex>(r->corpus);
  r->catalog = monofuzz::run_search(r->graph, r->corpus, *r->index, monofuzz::SearchOptions{max_depth});
  return r;
}

inline std::unique_ptr<Run> search_fixture(const std::string& name, bool prelude = true,
                                           unsigned max_depth = monofuzz::kDefaultMaxDepth) {
  return search(monofuzz::load_corpus_file(fixture(name), monofuzz::LoadOptions{prelude}), max_depth);
}

}  // namespace testsupport
