#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monofuzz/type_expr.hpp"

namespace monofuzz {

struct TraitRef {
  std::string name;
  std::vector<TypeExpr> args;

  std::string str() const;
  friend bool operator==(const TraitRef&, const TraitRef&) = default;
};

struct TraitBound {
  TypeExpr subject;
  TraitRef bound;

  friend bool operator==(const TraitBound&, const TraitBound&) = default;
};

enum class Origin { Library, Prelude };

struct ApiSignature {
  std::string id;
  std::string name;
  std::vector<std::string> type_params;
  std::vector<TraitBound> bounds;
  std::vector<TypeExpr> inputs;
  std::optional<TypeExpr> output;
  Origin origin = Origin::Library;

  bool is_generic() const { return !type_params.empty(); }
  // Index of a type parameter in declaration order, or -1.
  int param_index(std::string_view param) const;
  std::string str() const;

  friend bool operator==(const ApiSignature&, const ApiSignature&) = default;
};

enum class ImplProvenance { Explicit, Blanket, DefaultMethod };

struct TraitImplRecord {
  std::string impl_id;
  TypeExpr subject;  // may contain impl-local Params
  TraitRef implemented;
  std::vector<TraitBound> conditions;
  ImplProvenance provenance = ImplProvenance::Explicit;

  friend bool operator==(const TraitImplRecord&, const TraitImplRecord&) = default;
};

struct TypeDecl {
  std::string name;
  int arity = 0;
  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct TraitDecl {
  std::string name;
  int arity = 0;
  friend bool operator==(const TraitDecl&, const TraitDecl&) = default;
};

struct Corpus {
  std::string crate_name = "target_lib";
  std::vector<TypeDecl> types;
  std::vector<TraitDecl> traits;
  std::vector<TraitImplRecord> impls;
  std::vector<ApiSignature> apis;
  std::vector<std::string> primitives;
  std::vector<std::string> trait_denylist;

  const ApiSignature* find_api(std::string_view id) const;
  const TypeDecl* find_type(std::string_view name) const;
  const TraitDecl* find_trait(std::string_view name) const;
  bool is_primitive(std::string_view name) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Error raised while loading a corpus; `path` points into the document
// (JSON-pointer style, e.g. /apis/2/inputs/0).
class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct LoadOptions {
  bool with_prelude = true;
};

const std::vector<std::string>& default_primitives();
const std::vector<std::string>& default_trait_denylist();

Corpus load_corpus(const nlohmann::json& doc, const LoadOptions& opts = {});
Corpus load_corpus_text(std::string_view text, const LoadOptions& opts = {});
Corpus load_corpus_file(const std::filesystem::path& path, const LoadOptions& opts = {});

// Serializes a loaded corpus. The result carries `"prelude": false` semantics:
// reloading it with the prelude disabled reproduces the same Corpus.
nlohmann::json corpus_to_json(const Corpus& c);

nlohmann::json type_to_json(const TypeExpr& t);
TypeExpr type_from_json(const nlohmann::json& j, const std::string& path = "");
nlohmann::json trait_ref_to_json(const TraitRef& r);
nlohmann::json api_to_json(const ApiSignature& api);

// Bundled standard-library surface (containers, conversions).
const nlohmann::json& prelude_document();

}  // namespace monofuzz
