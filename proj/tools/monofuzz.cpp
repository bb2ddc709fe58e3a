#include <iostream>

#include "CLI11.hpp"
#include "monofuzz/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reachable monomorphization and fuzz-driver synthesis for generic library APIs"};
  app.require_subcommand(1);

  monofuzz::RunConfig cfg;
  std::string corpus, out;
  bool no_prelude = false;
  bool allow_nongeneric = false;

  struct Command {
    const char* name;
    const char* help;
    monofuzz::Stage last;
  };
  const Command commands[] = {
      {"graph", "build the API dependency graph (graph.json, graph.dot)", monofuzz::Stage::Graph},
      {"solve", "search reachable monomorphic APIs (catalog.json)", monofuzz::Stage::Solve},
      {"prune", "prune redundant solutions (prune.json)", monofuzz::Stage::Prune},
      {"sequences", "generate API sequences (sequences.json)", monofuzz::Stage::Sequences},
      {"synth", "render fuzz drivers and the manifest", monofuzz::Stage::Synth},
      {"run", "run the whole pipeline", monofuzz::Stage::Synth},
  };
  monofuzz::Stage last = monofuzz::Stage::Synth;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--corpus", corpus, "corpus JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--max-depth", cfg.max_depth, "type depth limit")->capture_default_str()->check(CLI::Range(1u, 16u));
    sub->add_option("--max-sequences", cfg.max_sequences, "sequence cap")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--max-seq-len", cfg.max_seq_length, "calls per sequence")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "tie-break seed for pruning")->capture_default_str();
    sub->add_option("--bounds-fuel", cfg.bounds_fuel, "impl resolution depth")->capture_default_str();
    sub->add_flag("--no-prelude", no_prelude, "do not merge the bundled std prelude");
    sub->add_flag("--allow-nongeneric", allow_nongeneric, "allow sequences without a monomorphic call");
    sub->callback([&last, stage = cmd.last] { last = stage; });
  }

  CLI11_PARSE(app, argc, argv);

  cfg.corpus_path = corpus;
  cfg.output_dir = out;
  cfg.prelude = !no_prelude;
  cfg.require_mono = !allow_nongeneric;
  return monofuzz::run_pipeline(cfg, std::cerr, last);
}
