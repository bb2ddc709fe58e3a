#include "monofuzz/synth.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "monofuzz/bounds.hpp"
#include "monofuzz/graph.hpp"
#include "monofuzz/prune.hpp"
#include "monofuzz/search.hpp"

namespace monofuzz {

namespace fs = std::filesystem;
using nlohmann::json;

nlohmann::json SlotLayout::to_json() const {
  json j = {{"slot", slot}, {"offset", offset}, {"type", type}};
  if (width) {
    j["width"] = *width;
  } else {
    j["width"] = "rest";
    j["part"] = part;
    j["parts"] = parts;
  }
  return j;
}

std::optional<std::size_t> primitive_width(const std::string& prim) {
  static const std::map<std::string, std::size_t, std::less<>> widths = {
      {"i8", 1},  {"u8", 1},  {"bool", 1}, {"i16", 2}, {"u16", 2}, {"i32", 4}, {"u32", 4},
      {"f32", 4}, {"char", 4}, {"i64", 8}, {"u64", 8}, {"f64", 8}, {"isize", 8}, {"usize", 8},
  };
  if (auto it = widths.find(prim); it != widths.end()) return it->second;
  if (prim == "&[u8]" || prim == "&str") return std::nullopt;
  throw std::invalid_argument("no decoding rule for primitive " + prim);
}

std::vector<SlotLayout> layout_slots(const ApiSequence& seq) {
  std::vector<const PrimitiveSlot*> slots(seq.slot_count, nullptr);
  for (const auto& call : seq.calls) {
    for (const auto& b : call.inputs) {
      if (const auto* p = std::get_if<PrimitiveSlot>(&b)) {
        if (p->index >= slots.size() || slots[p->index]) {
          throw std::invalid_argument("primitive slot " + std::to_string(p->index) + " is not unique");
        }
        slots[p->index] = p;
      }
    }
  }
  std::vector<SlotLayout> fixed, rest;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) throw std::invalid_argument("primitive slot " + std::to_string(i) + " is never used");
    const std::string& prim = slots[i]->type.name();
    if (auto w = primitive_width(prim)) {
      fixed.push_back({i, offset, w, prim});
      offset += *w;
    } else {
      rest.push_back({i, 0, std::nullopt, prim});
    }
  }
  for (std::size_t k = 0; k < rest.size(); ++k) {
    rest[k].offset = offset;
    rest[k].part = k;
    rest[k].parts = rest.size();
  }
  fixed.insert(fixed.end(), rest.begin(), rest.end());
  return fixed;
}

std::string call_path(const ApiInstance& inst) {
  const std::string& name = inst.signature.name;
  if (!inst.solution) return name;
  std::string args = inst.solution->type_args();
  if (auto pos = name.find("::<>"); pos != std::string::npos) {
    return name.substr(0, pos + 2) + args + name.substr(pos + 4);
  }
  return name + "::" + args;
}

namespace {

std::string le_bytes(std::size_t offset, std::size_t width) {
  std::string out = "[";
  for (std::size_t i = 0; i < width; ++i) {
    if (i) out += ", ";
    out += "data[" + std::to_string(offset + i) + "]";
  }
  return out + "]";
}

std::string decode_expr(const SlotLayout& s) {
  if (!s.width) {
    std::string lo = std::to_string(s.part) + " * _part";
    std::string hi = std::to_string(s.part + 1) + " * _part";
    std::string bytes = "&_rest[" + lo + ".." + hi + "]";
    if (s.type == "&str") return "std::str::from_utf8(" + bytes + ").unwrap_or(\"\")";
    return bytes;
  }
  std::string at = "data[" + std::to_string(s.offset) + "]";
  if (s.type == "u8") return at;
  if (s.type == "i8") return at + " as i8";
  if (s.type == "bool") return "(" + at + " & 1) == 1";
  if (s.type == "char") {
    return "char::from_u32(u32::from_le_bytes(" + le_bytes(s.offset, 4) + ")).unwrap_or('\\0')";
  }
  return s.type + "::from_le_bytes(" + le_bytes(s.offset, *s.width) + ")";
}

class RustWriter {
 public:
  explicit RustWriter(std::ostringstream& out) : out_(out) {}

  void line(const std::string& text) { out_ << "    " << text << "\n"; }

  // Expression for `base` (of type `type`) passed through `chain`; unwraps
  // get their own bindings.
  std::string argument(std::string base, TypeExpr type, const RuleChain& chain) {
    for (Rule r : chain) {
      switch (r) {
        case Rule::UnwrapOption:
        case Rule::UnwrapResult: {
          std::string var = "_u" + std::to_string(unwraps_++);
          std::string arm = r == Rule::UnwrapOption ? "Some(v) => v, None => return" : "Ok(v) => v, Err(_) => return";
          line("let mut " + var + " = match " + base + " { " + arm + " };");
          base = var;
          break;
        }
        case Rule::SharedBorrow: base = "&" + base; break;
        case Rule::ExclusiveBorrow: base = "&mut " + base; break;
        case Rule::ConstRaw: base = "(&" + base + " as *const " + type.str() + ")"; break;
        case Rule::MutRaw: base = "(&mut " + base + " as *mut " + type.str() + ")"; break;
      }
      type = *apply_rule(r, type);
    }
    return base;
  }

 private:
  std::ostringstream& out_;
  std::size_t unwraps_ = 0;
};

std::string crate_ident(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  return name;
}

}  // namespace

std::string RustProfile::render(const ApiSequence& seq, const std::vector<SlotLayout>& layout,
                                std::size_t byte_budget, const MonoCatalog& catalog, const Corpus& c) const {
  std::ostringstream out;
  out << "#![allow(unused)]\n";
  out << "use " << crate_ident(c.crate_name) << "::*;\n\n";
  out << "fn fuzz_one(data: &[u8]) {\n";
  RustWriter w(out);
  if (byte_budget > 0) {
    w.line("if data.len() < " + std::to_string(byte_budget) + " {");
    w.line("    return;");
    w.line("}");
  }
  std::vector<const SlotLayout*> by_slot(layout.size());
  bool has_rest = false;
  for (const auto& s : layout) {
    by_slot.at(s.slot) = &s;
    has_rest = has_rest || !s.width;
  }
  if (has_rest) {
    const SlotLayout& first = *std::find_if(layout.begin(), layout.end(), [](auto& s) { return !s.width; });
    w.line("let _rest = &data[" + std::to_string(byte_budget) + "..];");
    w.line("let _part = _rest.len() / " + std::to_string(first.parts) + ";");
  }
  for (const auto* s : by_slot) {
    w.line("let mut _p" + std::to_string(s->slot) + ": " + s->type + " = " + decode_expr(*s) + ";");
  }

  std::vector<std::optional<TypeExpr>> outputs;
  for (std::size_t k = 0; k < seq.calls.size(); ++k) {
    const auto& call = seq.calls[k];
    const ApiInstance* inst = catalog.find(call.instance);
    if (!inst) throw std::invalid_argument("unknown API instance " + call.instance);
    std::vector<std::string> args;
    for (const auto& b : call.inputs) {
      if (const auto* p = std::get_if<PrimitiveSlot>(&b)) {
        args.push_back(w.argument("_p" + std::to_string(p->index), p->type, p->chain));
      } else {
        const auto& v = std::get<ValueFrom>(b);
        args.push_back(w.argument("_v" + std::to_string(v.call), *outputs.at(v.call), v.chain));
      }
    }
    std::string text = call_path(*inst) + "(";
    for (std::size_t i = 0; i < args.size(); ++i) text += (i ? ", " : "") + args[i];
    text += ")";
    if (inst->signature.output) {
      w.line("let mut _v" + std::to_string(k) + " = " + text + ";");
    } else {
      w.line(text + ";");
    }
    outputs.push_back(inst->signature.output);
  }
  out << "}\n\n";
  out << "#[cfg(feature = \"afl\")]\n"
         "fn main() {\n"
         "    afl::fuzz!(|data: &[u8]| {\n"
         "        fuzz_one(data);\n"
         "    });\n"
         "}\n\n"
         "#[cfg(not(feature = \"afl\"))]\n"
         "fn main() {\n"
         "    use std::io::Read;\n"
         "    let mut data = Vec::new();\n"
         "    std::io::stdin().read_to_end(&mut data).unwrap();\n"
         "    fuzz_one(&data);\n"
         "}\n";
  return out.str();
}

std::string RustProfile::self_check(const std::string& source) const {
  std::vector<char> stack;
  std::size_t line = 1;
  for (std::size_t i = 0; i < source.size(); ++i) {
    char ch = source[i];
    if (ch == '\n') ++line;
    if (ch == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      while (i < source.size() && source[i] != '\n') ++i;
      ++line;
      continue;
    }
    if (ch == '"') {
      for (++i; i < source.size() && source[i] != '"'; ++i) {
        if (source[i] == '\\') ++i;
      }
      if (i >= source.size()) return "unterminated string literal";
      continue;
    }
    if (ch == '\'') {
      std::size_t j = i + 1;
      if (j < source.size() && source[j] == '\\') ++j;
      if (j + 1 < source.size() && source[j + 1] == '\'') {
        i = j + 1;
        continue;
      }
    }
    if (ch == '(' || ch == '[' || ch == '{') {
      stack.push_back(ch);
    } else if (ch == ')' || ch == ']' || ch == '}') {
      char open = ch == ')' ? '(' : ch == ']' ? '[' : '{';
      if (stack.empty() || stack.back() != open) {
        return "unbalanced '" + std::string(1, ch) + "' on line " + std::to_string(line);
      }
      stack.pop_back();
    }
  }
  if (!stack.empty()) return "unclosed '" + std::string(1, stack.back()) + "'";
  if (source.find("fn fuzz_one(data: &[u8])") == std::string::npos) return "missing entry point";
  return {};
}

DriverArtifact render_driver(const ApiSequence& seq, const MonoCatalog& catalog, const Corpus& c,
                             const std::string& driver_id, const RenderProfile& profile) {
  if (seq.calls.empty()) throw std::invalid_argument("cannot render an empty sequence");
  DriverArtifact a;
  a.driver_id = driver_id;
  a.file_name = "driver_" + driver_id + "." + profile.extension();
  a.slot_layout = layout_slots(seq);
  for (const auto& s : a.slot_layout) a.byte_budget += s.width.value_or(0);
  a.target_api = seq.target();
  for (const auto& call : seq.calls) {
    a.calls.push_back(call.instance);
    const ApiInstance* inst = catalog.find(call.instance);
    if (inst && inst->verdict == BoundsVerdict::AssumedValid) a.assumed = true;
  }
  a.source = profile.render(seq, a.slot_layout, a.byte_budget, catalog, c);
  if (auto err = profile.self_check(a.source); !err.empty()) {
    throw std::logic_error("driver " + driver_id + " failed the " + profile.name() + " self-check: " + err);
  }
  return a;
}

void RunConfig::validate() const {
  if (max_depth < 1) throw std::invalid_argument("max-depth must be at least 1");
  if (max_sequences < 1) throw std::invalid_argument("max-sequences must be at least 1");
  if (max_seq_length < 1) throw std::invalid_argument("max-seq-len must be at least 1");
  if (corpus_path.empty()) throw std::invalid_argument("corpus path is required");
  if (output_dir.empty()) throw std::invalid_argument("output directory is required");
}

nlohmann::json RunConfig::to_json() const {
  return {{"corpus", corpus_path.filename().string()},
          {"max_depth", max_depth},
          {"max_sequences", max_sequences},
          {"max_seq_len", max_seq_length},
          {"seed", seed},
          {"prelude", prelude},
          {"require_mono", require_mono},
          {"bounds_fuel", bounds_fuel}};
}

nlohmann::json manifest_json(const std::vector<DriverArtifact>& artifacts, const PipelineStats& stats,
                             const RunConfig& cfg) {
  json drivers = json::array();
  std::size_t assumed = 0;
  for (const auto& a : artifacts) {
    json layout = json::array();
    for (const auto& s : a.slot_layout) layout.push_back(s.to_json());
    drivers.push_back({{"id", a.driver_id},
                       {"file", a.file_name},
                       {"target", a.target_api},
                       {"calls", a.calls},
                       {"byte_budget", a.byte_budget},
                       {"slot_layout", std::move(layout)},
                       {"assumed_bounds", a.assumed}});
    if (a.assumed) ++assumed;
  }
  json statistics = {{"library_apis", stats.library_apis},
                     {"generic_apis", stats.generic_apis},
                     {"non_generic_apis", stats.non_generic_apis},
                     {"prelude_apis", stats.prelude_apis},
                     {"reachable_types", stats.reachable_types},
                     {"mono_apis", stats.mono_apis},
                     {"reserved", stats.reserved},
                     {"reserved_mono", stats.reserved_mono},
                     {"sequences", stats.sequences},
                     {"dropped_targets", stats.dropped_targets},
                     {"uncovered", stats.uncovered},
                     {"bounds", stats.bounds.to_json()},
                     {"assumed_drivers", assumed}};
  return {{"config", cfg.to_json()}, {"statistics", std::move(statistics)}, {"drivers", std::move(drivers)}};
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace

fs::path emit_manifest(const std::vector<DriverArtifact>& artifacts, const PipelineStats& stats,
                       const RunConfig& cfg) {
  fs::path path = cfg.output_dir / "manifest.json";
  write_json(path, manifest_json(artifacts, stats, cfg));
  return path;
}

PipelineOutput run_stages(const RunConfig& cfg, Stage last) {
  std::string stage = "config";
  PipelineOutput out;
  try {
    cfg.validate();
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + cfg.output_dir.string() + ": " + ec.message());

    stage = "corpus";
    Corpus corpus = load_corpus_file(cfg.corpus_path, LoadOptions{cfg.prelude});
    for (const auto& api : corpus.apis) {
      if (api.origin == Origin::Prelude) {
        ++out.stats.prelude_apis;
        continue;
      }
      ++out.stats.library_apis;
      ++(api.is_generic() ? out.stats.generic_apis : out.stats.non_generic_apis);
    }

    stage = "graph";
    DependencyGraph graph = DependencyGraph::build(corpus);
    auto record = [&](const std::string& name, const json& j) {
      write_json(cfg.output_dir / name, j);
      out.written.push_back(cfg.output_dir / name);
    };
    record("graph.json", graph.to_json());
    write_text(cfg.output_dir / "graph.dot", graph.to_dot());
    if (last == Stage::Graph) return out;

    stage = "search";
    ImplIndex index(corpus);
    MonoCatalog catalog = run_search(graph, corpus, index, SearchOptions{cfg.max_depth, cfg.bounds_fuel});
    record("catalog.json", catalog.to_json());
    out.stats.reachable_types = catalog.reachable.size();
    out.stats.mono_apis = catalog.mono_apis().size();
    out.stats.bounds = catalog.bounds;
    if (last == Stage::Solve) return out;

    stage = "prune";
    ReservedSet reserved = run_prune(graph, catalog, corpus, index, cfg.bounds_fuel, CoverOptions{cfg.seed});
    record("prune.json", reserved.to_json());
    out.stats.reserved = reserved.reserved.size();
    out.stats.reserved_mono = reserved.mono_reserved;
    if (last == Stage::Prune) return out;

    stage = "sequences";
    SequenceResult seqs = generate_sequences(reserved, catalog, corpus,
                                             SequenceLimits{cfg.max_sequences, cfg.max_seq_length, cfg.require_mono});
    for (std::size_t i = 0; i < seqs.sequences.size(); ++i) {
      auto v = validate_sequence(seqs.sequences[i], catalog, corpus);
      if (!v.valid) throw std::logic_error("sequence " + std::to_string(i) + " is invalid: " + v.reason);
    }
    record("sequences.json", seqs.to_json());
    out.stats.sequences = seqs.sequences.size();
    out.stats.dropped_targets = seqs.dropped.size();
    out.stats.uncovered = seqs.uncovered.size();
    if (last == Stage::Sequences) return out;

    stage = "synth";
    RustProfile profile;
    for (const auto& entry : fs::directory_iterator(cfg.output_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("driver_") && entry.path().extension() == "." + profile.extension()) {
        fs::remove(entry.path());
      }
    }
    for (std::size_t i = 0; i < seqs.sequences.size(); ++i) {
      auto a = render_driver(seqs.sequences[i], catalog, corpus, std::to_string(i), profile);
      write_text(cfg.output_dir / a.file_name, a.source);
      out.written.push_back(cfg.output_dir / a.file_name);
      out.drivers.push_back(std::move(a));
    }

    stage = "manifest";
    out.written.push_back(emit_manifest(out.drivers, out.stats, cfg));
    return out;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

int run_pipeline(const RunConfig& cfg, std::ostream& diag, Stage last) {
  try {
    run_stages(cfg, last);
    return 0;
  } catch (const StageError& e) {
    diag << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace monofuzz
