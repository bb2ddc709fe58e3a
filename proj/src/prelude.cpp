#include <string>
#include <utility>
#include <vector>

#include "monofuzz/corpus.hpp"

namespace monofuzz {

namespace {

using nlohmann::json;

json prim(const std::string& n) { return {{"prim", n}}; }
json param(const std::string& n) { return {{"param", n}}; }
json con(const std::string& n, json args) { return {{"con", n}, {"args", std::move(args)}}; }

json build_prelude() {
  json doc;
  doc["types"] = json::array({
      {{"name", "Vec"}, {"arity", 1}},
      {{"name", "Box"}, {"arity", 1}},
      {{"name", "Option"}, {"arity", 1}},
      {{"name", "Result"}, {"arity", 2}},
  });
  doc["traits"] = json::array({
      {{"name", "From"}, {"arity", 1}},
      {{"name", "Clone"}, {"arity", 0}},
      {{"name", "Debug"}, {"arity", 0}},
      {{"name", "Display"}, {"arity", 0}},
  });

  json impls = json::array();
  impls.push_back({{"impl_id", "std::from_reflexive"},
                   {"subject", param("T")},
                   {"trait", {{"name", "From"}, {"args", json::array({param("T")})}}},
                   {"conditions", json::array()},
                   {"provenance", "blanket"}});

  // Lossless conversions among numeric primitives, as in the standard library.
  const std::vector<std::pair<std::string, std::vector<std::string>>> widening = {
      {"u16", {"u8"}},
      {"u32", {"u8", "u16"}},
      {"u64", {"u8", "u16", "u32"}},
      {"i16", {"u8", "i8"}},
      {"i32", {"u8", "i8", "u16", "i16"}},
      {"i64", {"u8", "i8", "u16", "i16", "u32", "i32"}},
      {"f32", {"u8", "i8", "u16", "i16"}},
      {"f64", {"u8", "i8", "u16", "i16", "u32", "i32", "f32"}},
      {"char", {"u8"}},
  };
  for (const auto& [to, froms] : widening) {
    for (const auto& from : froms) {
      impls.push_back({{"impl_id", "std::from_" + from + "_for_" + to},
                       {"subject", prim(to)},
                       {"trait", {{"name", "From"}, {"args", json::array({prim(from)})}}},
                       {"conditions", json::array()}});
    }
  }

  const std::vector<std::pair<std::string, std::string>> cloneable = {
      {"i8", "i8"},   {"i16", "i16"},   {"i32", "i32"},   {"i64", "i64"},
      {"u8", "u8"},   {"u16", "u16"},   {"u32", "u32"},   {"u64", "u64"},
      {"f32", "f32"}, {"f64", "f64"},   {"bool", "bool"}, {"char", "char"},
      {"&str", "str_ref"}, {"&[u8]", "bytes_ref"},
  };
  for (const auto& [p, tag] : cloneable) {
    impls.push_back({{"impl_id", "std::clone_" + tag},
                     {"subject", prim(p)},
                     {"trait", {{"name", "Clone"}, {"args", json::array()}}},
                     {"conditions", json::array()}});
  }
  for (const std::string c : {"Vec", "Box", "Option"}) {
    impls.push_back(
        {{"impl_id", "std::clone_" + c},
         {"subject", con(c, json::array({param("T")}))},
         {"trait", {{"name", "Clone"}, {"args", json::array()}}},
         {"conditions", json::array({{{"subject", param("T")},
                                      {"trait", {{"name", "Clone"}, {"args", json::array()}}}}})}});
  }
  impls.push_back(
      {{"impl_id", "std::clone_Result"},
       {"subject", con("Result", json::array({param("T"), param("E")}))},
       {"trait", {{"name", "Clone"}, {"args", json::array()}}},
       {"conditions",
        json::array({{{"subject", param("T")}, {"trait", {{"name", "Clone"}, {"args", json::array()}}}},
                     {{"subject", param("E")},
                      {"trait", {{"name", "Clone"}, {"args", json::array()}}}}})}});
  // Formatting impls exist in the standard library but are denylisted by default.
  for (const std::string p : {"i32", "u8"}) {
    impls.push_back({{"impl_id", "std::debug_" + p},
                     {"subject", prim(p)},
                     {"trait", {{"name", "Debug"}, {"args", json::array()}}},
                     {"conditions", json::array()}});
    impls.push_back({{"impl_id", "std::display_" + p},
                     {"subject", prim(p)},
                     {"trait", {{"name", "Display"}, {"args", json::array()}}},
                     {"conditions", json::array()}});
  }
  doc["impls"] = std::move(impls);

  doc["apis"] = json::array({
      {{"id", "std::vec_new"},
       {"name", "Vec::<>::new"},
       {"generics", {"T"}},
       {"bounds", json::array()},
       {"inputs", json::array()},
       {"output", con("Vec", json::array({param("T")}))}},
      {{"id", "std::vec_from_bytes"},
       {"name", "Vec::<u8>::from"},
       {"generics", json::array()},
       {"bounds", json::array()},
       {"inputs", json::array({prim("&[u8]")})},
       {"output", con("Vec", json::array({prim("u8")}))}},
      {{"id", "std::box_new"},
       {"name", "Box::<>::new"},
       {"generics", {"T"}},
       {"bounds", json::array()},
       {"inputs", json::array({param("T")})},
       {"output", con("Box", json::array({param("T")}))}},
      {{"id", "std::option_some"},
       {"name", "Option::<>::Some"},
       {"generics", {"T"}},
       {"bounds", json::array()},
       {"inputs", json::array({param("T")})},
       {"output", con("Option", json::array({param("T")}))}},
  });
  return doc;
}

}  // namespace

const nlohmann::json& prelude_document() {
  static const nlohmann::json doc = build_prelude();
  return doc;
}

}  // namespace monofuzz
