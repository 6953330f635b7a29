#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "soccerforge/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Soccer clip dataset construction and evaluation pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> matches;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"ingest", "validate and normalize source annotations"},
      {"segment", "extract single-event clip specifications"},
      {"pair", "find consecutive-event pairs"},
      {"fuse", "attach captions and commentary to clips"},
      {"cut", "cut clip media with the external media tool"},
      {"generate", "generate QA records through the chat endpoint"},
      {"build-eval", "sample the classification evaluation manifest"},
      {"judge", "score candidate answers with the judge endpoint"},
      {"report", "write metric tables and score distributions"},
      {"all", "run every stage in order"},
      {"synth", "write a synthetic annotation corpus to data_root"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--match", matches, "restrict to these match keys (league/season/fixture)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  soccerforge::PipelineConfig cfg;
  try {
    cfg = soccerforge::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (seed) cfg.seed = *seed;
  if (!matches.empty()) cfg.matches = matches;
  return soccerforge::run(subcommand, cfg, std::cout);
}
