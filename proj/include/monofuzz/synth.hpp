#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monofuzz/sequence.hpp"

namespace monofuzz {

// One primitive slot in the fuzz input. Fixed-width slots have a width;
// slice slots share the bytes after the fixed region, split into `parts`
// equal pieces of which this slot takes piece `part`.
struct SlotLayout {
  std::size_t slot;
  std::size_t offset;
  std::optional<std::size_t> width;
  std::string type;
  std::size_t part = 0;
  std::size_t parts = 0;

  nlohmann::json to_json() const;
};

struct DriverArtifact {
  std::string driver_id;
  std::string file_name;
  std::string source;
  std::size_t byte_budget = 0;
  std::vector<SlotLayout> slot_layout;
  std::string target_api;
  std::vector<std::string> calls;
  bool assumed = false;  // some call relies on an assumed trait bound
};

// Width in bytes of a fixed-width primitive; nullopt for slice primitives.
// Throws std::invalid_argument for primitives without a decoding rule.
std::optional<std::size_t> primitive_width(const std::string& prim);

std::vector<SlotLayout> layout_slots(const ApiSequence& seq);

class RenderProfile {
 public:
  virtual ~RenderProfile() = default;
  virtual std::string name() const = 0;
  virtual std::string extension() const = 0;
  virtual std::string render(const ApiSequence& seq, const std::vector<SlotLayout>& layout, std::size_t byte_budget,
                             const MonoCatalog& catalog, const Corpus& c) const = 0;
  // Grammar-level sanity check of rendered text; empty string when fine.
  virtual std::string self_check(const std::string& source) const = 0;
};

// libFuzzer/AFL-style Rust harness with an `afl` feature switch.
class RustProfile : public RenderProfile {
 public:
  std::string name() const override { return "rust"; }
  std::string extension() const override { return "rs"; }
  std::string render(const ApiSequence& seq, const std::vector<SlotLayout>& layout, std::size_t byte_budget,
                     const MonoCatalog& catalog, const Corpus& c) const override;
  std::string self_check(const std::string& source) const override;
};

// Call path with explicit type arguments for monomorphic instances:
// "map_vec" -> "map_vec::<u8, i32>", "Vec::<>::new" -> "Vec::<u8>::new".
std::string call_path(const ApiInstance& inst);

DriverArtifact render_driver(const ApiSequence& seq, const MonoCatalog& catalog, const Corpus& c,
                             const std::string& driver_id, const RenderProfile& profile = RustProfile{});

struct RunConfig {
  std::filesystem::path corpus_path;
  std::filesystem::path output_dir;
  unsigned max_depth = kDefaultMaxDepth;
  std::size_t max_sequences = 300;
  std::size_t max_seq_length = 8;
  std::uint64_t seed = 0;
  bool prelude = true;
  bool require_mono = true;
  unsigned bounds_fuel = kDefaultBoundsFuel;

  // Throws std::invalid_argument naming the first out-of-range field.
  void validate() const;
  nlohmann::json to_json() const;
};

struct PipelineStats {
  std::size_t library_apis = 0;
  std::size_t generic_apis = 0;
  std::size_t non_generic_apis = 0;
  std::size_t prelude_apis = 0;
  std::size_t reachable_types = 0;
  std::size_t mono_apis = 0;
  std::size_t reserved = 0;
  std::size_t reserved_mono = 0;
  std::size_t sequences = 0;
  std::size_t dropped_targets = 0;
  std::size_t uncovered = 0;
  BoundsCounters bounds;
};

nlohmann::json manifest_json(const std::vector<DriverArtifact>& artifacts, const PipelineStats& stats,
                             const RunConfig& cfg);
// Writes <output_dir>/manifest.json. Throws std::runtime_error on I/O failure.
std::filesystem::path emit_manifest(const std::vector<DriverArtifact>& artifacts, const PipelineStats& stats,
                                    const RunConfig& cfg);

enum class Stage { Graph, Solve, Prune, Sequences, Synth };

// Error carrying the pipeline stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineOutput {
  PipelineStats stats;
  std::vector<DriverArtifact> drivers;
  std::vector<std::filesystem::path> written;
};

// Runs the stages up to `last`, writing each stage dump into cfg.output_dir.
// Throws StageError.
PipelineOutput run_stages(const RunConfig& cfg, Stage last = Stage::Synth);

// Full pipeline; returns the process exit status and reports errors to `diag`.
int run_pipeline(const RunConfig& cfg, std::ostream& diag, Stage last = Stage::Synth);

}  // namespace monofuzz
