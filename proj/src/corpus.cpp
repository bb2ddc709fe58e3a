#include "monofuzz/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace monofuzz {

using nlohmann::json;

std::string TraitRef::str() const {
  if (args.empty()) return name;
  std::string s = name + "<";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += args[i].str();
  }
  return s + ">";
}

int ApiSignature::param_index(std::string_view param) const {
  for (std::size_t i = 0; i < type_params.size(); ++i) {
    if (type_params[i] == param) return static_cast<int>(i);
  }
  return -1;
}

std::string ApiSignature::str() const {
  std::string s = name;
  if (!type_params.empty()) {
    s += "<";
    for (std::size_t i = 0; i < type_params.size(); ++i) {
      if (i) s += ", ";
      s += type_params[i];
    }
    s += ">";
  }
  s += "(";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) s += ", ";
    s += inputs[i].str();
  }
  s += ")";
  if (output) s += " -> " + output->str();
  return s;
}

const ApiSignature* Corpus::find_api(std::string_view id) const {
  for (const auto& a : apis) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

const TypeDecl* Corpus::find_type(std::string_view name) const {
  for (const auto& t : types) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const TraitDecl* Corpus::find_trait(std::string_view name) const {
  for (const auto& t : traits) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

bool Corpus::is_primitive(std::string_view name) const {
  return std::find(primitives.begin(), primitives.end(), name) != primitives.end();
}

const std::vector<std::string>& default_primitives() {
  static const std::vector<std::string> prims = {"i8",  "i16", "i32",  "i64",  "u8",  "u16",  "u32",
                                                 "u64", "f32", "f64",  "bool", "char", "&[u8]", "&str"};
  return prims;
}

const std::vector<std::string>& default_trait_denylist() {
  static const std::vector<std::string> deny = {"Debug", "Display"};
  return deny;
}

namespace {

// ---- reading ----

const json& member(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw CorpusError(path, std::string("missing key '") + key + "'");
  return *it;
}

void expect_object(const json& j, const std::string& path,
                   std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw CorpusError(path, "expected object");
  for (const auto& [k, v] : j.items()) {
    bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; });
    if (!ok) throw CorpusError(path, "unexpected key '" + k + "'");
  }
}

const json& array_member(const json& obj, const char* key, const std::string& path) {
  const json& a = member(obj, key, path);
  if (!a.is_array()) throw CorpusError(path + "/" + key, "expected array");
  return a;
}

std::string string_member(const json& obj, const char* key, const std::string& path) {
  const json& s = member(obj, key, path);
  if (!s.is_string()) throw CorpusError(path + "/" + key, "expected string");
  std::string v = s.get<std::string>();
  if (v.empty()) throw CorpusError(path + "/" + key, "empty string");
  return v;
}

std::vector<std::string> string_list(const json& a, const std::string& path) {
  if (!a.is_array()) throw CorpusError(path, "expected array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_string()) throw CorpusError(path + "/" + std::to_string(i), "expected string");
    out.push_back(a[i].get<std::string>());
  }
  return out;
}

TraitRef trait_ref_from_json(const json& j, const std::string& path) {
  expect_object(j, path, {"name", "args"});
  TraitRef r;
  r.name = string_member(j, "name", path);
  if (j.contains("args")) {
    const json& args = array_member(j, "args", path);
    for (std::size_t i = 0; i < args.size(); ++i) {
      r.args.push_back(type_from_json(args[i], path + "/args/" + std::to_string(i)));
    }
  }
  return r;
}

TraitBound bound_from_json(const json& j, const std::string& path) {
  expect_object(j, path, {"subject", "trait"});
  return TraitBound{type_from_json(member(j, "subject", path), path + "/subject"),
                    trait_ref_from_json(member(j, "trait", path), path + "/trait")};
}

std::vector<TraitBound> bounds_from_json(const json& a, const std::string& path) {
  if (!a.is_array()) throw CorpusError(path, "expected array");
  std::vector<TraitBound> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back(bound_from_json(a[i], path + "/" + std::to_string(i)));
  }
  return out;
}

ApiSignature api_from_json(const json& j, const std::string& path, Origin default_origin) {
  expect_object(j, path, {"id", "name", "generics", "bounds", "inputs", "output", "origin"});
  ApiSignature api;
  api.id = string_member(j, "id", path);
  api.name = string_member(j, "name", path);
  api.type_params = j.contains("generics") ? string_list(j["generics"], path + "/generics")
                                           : std::vector<std::string>{};
  if (j.contains("bounds")) api.bounds = bounds_from_json(j["bounds"], path + "/bounds");
  const json& inputs = array_member(j, "inputs", path);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    api.inputs.push_back(type_from_json(inputs[i], path + "/inputs/" + std::to_string(i)));
  }
  if (j.contains("output") && !j["output"].is_null()) {
    api.output = type_from_json(j["output"], path + "/output");
  }
  api.origin = default_origin;
  if (j.contains("origin")) {
    std::string o = string_member(j, "origin", path);
    if (o == "library") {
      api.origin = Origin::Library;
    } else if (o == "prelude") {
      api.origin = Origin::Prelude;
    } else {
      throw CorpusError(path + "/origin", "expected 'library' or 'prelude'");
    }
  }
  return api;
}

TraitImplRecord impl_from_json(const json& j, const std::string& path) {
  expect_object(j, path, {"impl_id", "subject", "trait", "conditions", "provenance"});
  TraitImplRecord r{string_member(j, "impl_id", path),
                    type_from_json(member(j, "subject", path), path + "/subject"),
                    trait_ref_from_json(member(j, "trait", path), path + "/trait"),
                    {},
                    ImplProvenance::Explicit};
  if (j.contains("conditions")) r.conditions = bounds_from_json(j["conditions"], path + "/conditions");
  if (j.contains("provenance")) {
    std::string p = string_member(j, "provenance", path);
    if (p == "explicit") {
      r.provenance = ImplProvenance::Explicit;
    } else if (p == "blanket") {
      r.provenance = ImplProvenance::Blanket;
    } else if (p == "default-method") {
      r.provenance = ImplProvenance::DefaultMethod;
    } else {
      throw CorpusError(path + "/provenance", "unknown provenance '" + p + "'");
    }
  } else if (r.subject.is_param()) {
    r.provenance = ImplProvenance::Blanket;
  }
  return r;
}

template <typename Decl>
std::vector<Decl> decls_from_json(const json& a, const std::string& path) {
  std::vector<Decl> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::string p = path + "/" + std::to_string(i);
    expect_object(a[i], p, {"name", "arity"});
    Decl d;
    d.name = string_member(a[i], "name", p);
    if (a[i].contains("arity")) {
      if (!a[i]["arity"].is_number_integer() || a[i]["arity"].get<long long>() < 0) throw CorpusError(p + "/arity", "expected non-negative integer");
      d.arity = a[i]["arity"].get<int>();
    }
    out.push_back(std::move(d));
  }
  return out;
}

// Parses the four item lists of a document into `c` without validation.
void read_items(const json& doc, const std::string& root, Origin origin, Corpus& c) {
  c.types = decls_from_json<TypeDecl>(array_member(doc, "types", root), root + "/types");
  c.traits = decls_from_json<TraitDecl>(array_member(doc, "traits", root), root + "/traits");
  const json& impls = array_member(doc, "impls", root);
  for (std::size_t i = 0; i < impls.size(); ++i) {
    c.impls.push_back(impl_from_json(impls[i], root + "/impls/" + std::to_string(i)));
  }
  const json& apis = array_member(doc, "apis", root);
  for (std::size_t i = 0; i < apis.size(); ++i) {
    c.apis.push_back(api_from_json(apis[i], root + "/apis/" + std::to_string(i), origin));
  }
}

// ---- validation ----

class Validator {
 public:
  explicit Validator(const Corpus& c) : c_(c) {}

  void check_type(const TypeExpr& t, const std::string& path,
                  const std::vector<std::string>* allowed_params) const {
    switch (t.kind()) {
      case TypeExpr::Kind::Primitive:
        if (!c_.is_primitive(t.name())) throw CorpusError(path, "unknown primitive '" + t.name() + "'");
        return;
      case TypeExpr::Kind::Param:
        if (allowed_params && std::find(allowed_params->begin(), allowed_params->end(), t.name()) ==
                                  allowed_params->end()) {
          throw CorpusError(path, "undeclared type parameter '" + t.name() + "'");
        }
        return;
      case TypeExpr::Kind::Decorated:
        check_type(t.inner(), path + "/inner", allowed_params);
        return;
      case TypeExpr::Kind::Concrete: {
        const TypeDecl* d = c_.find_type(t.name());
        if (!d) throw CorpusError(path, "unknown type constructor '" + t.name() + "'");
        if (static_cast<std::size_t>(d->arity) != t.args().size()) {
          throw CorpusError(path, "constructor '" + t.name() + "' expects " +
                                      std::to_string(d->arity) + " arguments, got " +
                                      std::to_string(t.args().size()));
        }
        for (std::size_t i = 0; i < t.args().size(); ++i) {
          check_type(t.args()[i], path + "/args/" + std::to_string(i), allowed_params);
        }
        return;
      }
    }
  }

  void check_trait(const TraitRef& r, const std::string& path,
                   const std::vector<std::string>* allowed_params) const {
    const TraitDecl* d = c_.find_trait(r.name);
    if (!d) throw CorpusError(path, "unknown trait '" + r.name + "'");
    if (static_cast<std::size_t>(d->arity) != r.args.size()) {
      throw CorpusError(path, "trait '" + r.name + "' expects " + std::to_string(d->arity) +
                                  " arguments, got " + std::to_string(r.args.size()));
    }
    for (std::size_t i = 0; i < r.args.size(); ++i) {
      check_type(r.args[i], path + "/args/" + std::to_string(i), allowed_params);
    }
  }

  void run() const {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < c_.types.size(); ++i) {
      if (!seen.insert("type:" + c_.types[i].name).second) {
        throw CorpusError("/types/" + std::to_string(i), "duplicate type '" + c_.types[i].name + "'");
      }
      if (c_.is_primitive(c_.types[i].name)) {
        throw CorpusError("/types/" + std::to_string(i), "type shadows primitive '" + c_.types[i].name + "'");
      }
    }
    for (std::size_t i = 0; i < c_.traits.size(); ++i) {
      if (!seen.insert("trait:" + c_.traits[i].name).second) {
        throw CorpusError("/traits/" + std::to_string(i), "duplicate trait '" + c_.traits[i].name + "'");
      }
    }
    for (std::size_t i = 0; i < c_.impls.size(); ++i) {
      const auto& r = c_.impls[i];
      std::string p = "/impls/" + std::to_string(i);
      if (!seen.insert("impl:" + r.impl_id).second) throw CorpusError(p + "/impl_id", "duplicate impl id '" + r.impl_id + "'");
      check_type(r.subject, p + "/subject", nullptr);
      check_trait(r.implemented, p + "/trait", nullptr);
      for (std::size_t k = 0; k < r.conditions.size(); ++k) {
        std::string cp = p + "/conditions/" + std::to_string(k);
        check_type(r.conditions[k].subject, cp + "/subject", nullptr);
        check_trait(r.conditions[k].bound, cp + "/trait", nullptr);
      }
    }
    for (std::size_t i = 0; i < c_.apis.size(); ++i) {
      const auto& a = c_.apis[i];
      std::string p = "/apis/" + std::to_string(i);
      if (!seen.insert("api:" + a.id).second) throw CorpusError(p + "/id", "duplicate api id '" + a.id + "'");
      std::set<std::string> uniq(a.type_params.begin(), a.type_params.end());
      if (uniq.size() != a.type_params.size()) throw CorpusError(p + "/generics", "duplicate type parameter");
      for (std::size_t k = 0; k < a.inputs.size(); ++k) {
        check_type(a.inputs[k], p + "/inputs/" + std::to_string(k), &a.type_params);
      }
      if (a.output) check_type(*a.output, p + "/output", &a.type_params);
      for (std::size_t k = 0; k < a.bounds.size(); ++k) {
        std::string bp = p + "/bounds/" + std::to_string(k);
        check_type(a.bounds[k].subject, bp + "/subject", &a.type_params);
        check_trait(a.bounds[k].bound, bp + "/trait", &a.type_params);
        if (!a.bounds[k].subject.has_params()) {
          throw CorpusError(bp + "/subject", "bound subject mentions no type parameter");
        }
      }
    }
  }

 private:
  const Corpus& c_;
};

bool uses_only_prims(const TypeExpr& t, const Corpus& c) {
  switch (t.kind()) {
    case TypeExpr::Kind::Primitive: return c.is_primitive(t.name());
    case TypeExpr::Kind::Param: return true;
    case TypeExpr::Kind::Decorated: return uses_only_prims(t.inner(), c);
    case TypeExpr::Kind::Concrete:
      return std::all_of(t.args().begin(), t.args().end(),
                         [&](const TypeExpr& a) { return uses_only_prims(a, c); });
  }
  return true;
}

bool trait_uses_only_prims(const TraitRef& r, const Corpus& c) {
  return std::all_of(r.args.begin(), r.args.end(),
                     [&](const TypeExpr& a) { return uses_only_prims(a, c); });
}

void merge_prelude(Corpus& c) {
  Corpus pre;
  pre.primitives = c.primitives;
  read_items(prelude_document(), "/<prelude>", Origin::Prelude, pre);

  for (const auto& t : pre.types) {
    if (const TypeDecl* mine = c.find_type(t.name)) {
      if (mine->arity != t.arity) {
        throw CorpusError("/types", "type '" + t.name + "' conflicts with the prelude declaration");
      }
      continue;
    }
    c.types.push_back(t);
  }
  for (const auto& t : pre.traits) {
    if (const TraitDecl* mine = c.find_trait(t.name)) {
      if (mine->arity != t.arity) {
        throw CorpusError("/traits", "trait '" + t.name + "' conflicts with the prelude declaration");
      }
      continue;
    }
    c.traits.push_back(t);
  }
  // Prelude items that mention primitives outside the configured set are skipped.
  for (auto& r : pre.impls) {
    bool ok = uses_only_prims(r.subject, c) && trait_uses_only_prims(r.implemented, c);
    for (const auto& cond : r.conditions) {
      ok = ok && uses_only_prims(cond.subject, c) && trait_uses_only_prims(cond.bound, c);
    }
    if (ok) c.impls.push_back(std::move(r));
  }
  for (auto& a : pre.apis) {
    bool ok = std::all_of(a.inputs.begin(), a.inputs.end(),
                          [&](const TypeExpr& t) { return uses_only_prims(t, c); }) &&
              (!a.output || uses_only_prims(*a.output, c));
    if (ok) c.apis.push_back(std::move(a));
  }
}

}  // namespace

TypeExpr type_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw CorpusError(path, "expected type object");
  if (j.contains("prim")) {
    expect_object(j, path, {"prim"});
    return TypeExpr::prim(string_member(j, "prim", path));
  }
  if (j.contains("param")) {
    expect_object(j, path, {"param"});
    return TypeExpr::param(string_member(j, "param", path));
  }
  if (j.contains("con")) {
    expect_object(j, path, {"con", "args"});
    std::vector<TypeExpr> args;
    if (j.contains("args")) {
      const json& a = array_member(j, "args", path);
      for (std::size_t i = 0; i < a.size(); ++i) {
        args.push_back(type_from_json(a[i], path + "/args/" + std::to_string(i)));
      }
    }
    return TypeExpr::con(string_member(j, "con", path), std::move(args));
  }
  if (j.contains("deco")) {
    expect_object(j, path, {"deco", "inner"});
    Decoration d;
    try {
      d = decoration_from_name(string_member(j, "deco", path));
    } catch (const std::invalid_argument& e) {
      throw CorpusError(path + "/deco", e.what());
    }
    return TypeExpr::deco(d, type_from_json(member(j, "inner", path), path + "/inner"));
  }
  throw CorpusError(path, "type object needs one of prim/con/param/deco");
}

json type_to_json(const TypeExpr& t) {
  switch (t.kind()) {
    case TypeExpr::Kind::Primitive: return {{"prim", t.name()}};
    case TypeExpr::Kind::Param: return {{"param", t.name()}};
    case TypeExpr::Kind::Decorated:
      return {{"deco", std::string(decoration_name(t.decoration()))}, {"inner", type_to_json(t.inner())}};
    case TypeExpr::Kind::Concrete: {
      json args = json::array();
      for (const auto& a : t.args()) args.push_back(type_to_json(a));
      return {{"con", t.name()}, {"args", std::move(args)}};
    }
  }
  return nullptr;
}

json trait_ref_to_json(const TraitRef& r) {
  json args = json::array();
  for (const auto& a : r.args) args.push_back(type_to_json(a));
  return {{"name", r.name}, {"args", std::move(args)}};
}

namespace {

json bounds_to_json(const std::vector<TraitBound>& bs) {
  json out = json::array();
  for (const auto& b : bs) out.push_back({{"subject", type_to_json(b.subject)}, {"trait", trait_ref_to_json(b.bound)}});
  return out;
}

}  // namespace

json api_to_json(const ApiSignature& api) {
  json inputs = json::array();
  for (const auto& t : api.inputs) inputs.push_back(type_to_json(t));
  return {{"id", api.id},
          {"name", api.name},
          {"generics", api.type_params},
          {"bounds", bounds_to_json(api.bounds)},
          {"inputs", std::move(inputs)},
          {"output", api.output ? type_to_json(*api.output) : json(nullptr)},
          {"origin", api.origin == Origin::Library ? "library" : "prelude"}};
}

json corpus_to_json(const Corpus& c) {
  json doc;
  doc["crate"] = c.crate_name;
  doc["types"] = json::array();
  for (const auto& t : c.types) doc["types"].push_back({{"name", t.name}, {"arity", t.arity}});
  doc["traits"] = json::array();
  for (const auto& t : c.traits) doc["traits"].push_back({{"name", t.name}, {"arity", t.arity}});
  doc["impls"] = json::array();
  for (const auto& r : c.impls) {
    const char* prov = r.provenance == ImplProvenance::Explicit  ? "explicit"
                       : r.provenance == ImplProvenance::Blanket ? "blanket"
                                                                 : "default-method";
    doc["impls"].push_back({{"impl_id", r.impl_id},
                            {"subject", type_to_json(r.subject)},
                            {"trait", trait_ref_to_json(r.implemented)},
                            {"conditions", bounds_to_json(r.conditions)},
                            {"provenance", prov}});
  }
  doc["apis"] = json::array();
  for (const auto& a : c.apis) doc["apis"].push_back(api_to_json(a));
  doc["primitives"] = c.primitives;
  doc["trait_denylist"] = c.trait_denylist;
  return doc;
}

Corpus load_corpus(const json& doc, const LoadOptions& opts) {
  expect_object(doc, "", {"crate", "types", "traits", "impls", "apis", "primitives", "trait_denylist"});
  Corpus c;
  if (doc.contains("crate")) c.crate_name = string_member(doc, "crate", "");
  c.primitives = doc.contains("primitives") ? string_list(doc["primitives"], "/primitives")
                                            : default_primitives();
  c.trait_denylist = doc.contains("trait_denylist")
                         ? string_list(doc["trait_denylist"], "/trait_denylist")
                         : default_trait_denylist();
  read_items(doc, "", Origin::Library, c);
  if (opts.with_prelude) merge_prelude(c);
  Validator(c).run();
  std::erase_if(c.impls, [&](const TraitImplRecord& r) {
    return std::find(c.trait_denylist.begin(), c.trait_denylist.end(), r.implemented.name) !=
           c.trait_denylist.end();
  });
  return c;
}

Corpus load_corpus_text(std::string_view text, const LoadOptions& opts) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CorpusError("", std::string("malformed JSON: ") + e.what());
  }
  return load_corpus(doc, opts);
}

Corpus load_corpus_file(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("", "cannot open corpus file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_corpus_text(ss.str(), opts);
}

}  // namespace monofuzz
