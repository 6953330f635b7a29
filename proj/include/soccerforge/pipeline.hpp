#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "soccerforge/clip_segmenter.hpp"
#include "soccerforge/event_pairer.hpp"
#include "soccerforge/eval_harness.hpp"
#include "soccerforge/media_budget.hpp"
#include "soccerforge/qa_factory.hpp"
#include "soccerforge/text_fusion.hpp"

namespace soccerforge {

namespace fs = std::filesystem;

struct SimulatedCandidate {
  std::string name;
  double accuracy = 0.5;  // chance of naming the true label
};

struct PipelineConfig {
  fs::path data_root = "data";
  fs::path work_dir = "work";
  /// Optional; per-half broadcast files at <video_root>/<match key>/<video_name>.
  fs::path video_root;
  std::string video_name = "{half}_224p.mkv";
  std::vector<std::string> labels = LabelSet::soccernet_v2().labels();

  SegmenterConfig segmenter;
  PairConfig pairer;
  FusionConfig fusion;
  MediaToolConfig media;
  int aspect_w = 16;
  int aspect_h = 9;
  int max_tokens = kMaxVisualTokens;

  LlmConfig generator;
  LlmConfig judge;

  std::string eval_class_set = "six";  // "six", "sixteen" or "custom"
  std::vector<std::string> eval_custom_labels;
  std::size_t eval_per_class = 100;
  /// JSON lines of {clip_id, model, answer}; empty to use simulated candidates.
  fs::path answers_path;
  std::vector<SimulatedCandidate> simulated_candidates;

  int synth_matches = 5;
  std::uint64_t seed = 0;
  int workers = 4;
  /// Match keys to restrict every stage to; empty means all.
  std::vector<std::string> matches;

  ClassSet eval_classes() const;
  void check() const;
};

json config_json(const PipelineConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected. Relative
/// paths are resolved against base_dir.
PipelineConfig config_from_json(const json& j, const fs::path& base_dir = {});
PipelineConfig load_config(const fs::path& path);

inline constexpr const char* kStages[] = {"ingest",     "segment", "pair",  "fuse",  "cut",
                                          "generate",   "build-eval", "judge", "report"};

/// Runs one subcommand ("ingest" ... "report", "all", "synth"). Progress goes
/// to `log`. Failures write <work_dir>/errors/<stage>.json and return 1.
int run(const std::string& subcommand, const PipelineConfig& cfg, std::ostream& log);

/// Paths of the main stage outputs under work_dir.
struct StagePaths {
  fs::path ingest_index, clips, pairs, fused, cuts, dataset, quarantine, eval_manifest, verdicts, report_dir,
      errors_dir, synth_books;
  explicit StagePaths(const fs::path& work_dir);
};

}  // namespace soccerforge
