#include "soccerforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "soccerforge/hashing.hpp"
#include "soccerforge/jsonl.hpp"
#include "soccerforge/mock_llm.hpp"
#include "soccerforge/synth_fixtures.hpp"

namespace soccerforge {
namespace {

constexpr int kStageVersion = 1;
constexpr const char* kMockEndpoint = "mock";

class StageFailed : public std::runtime_error {
 public:
  StageFailed(const std::string& what, json details) : std::runtime_error(what), details_(std::move(details)) {}
  const json& details() const { return details_; }

 private:
  json details_;
};

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const MissingFile*>(&e)) return "MissingFile";
  if (dynamic_cast<const SchemaViolation*>(&e)) return "SchemaViolation";
  if (dynamic_cast<const OverlapConflict*>(&e)) return "OverlapConflict";
  if (dynamic_cast<const ToolMissing*>(&e)) return "ToolMissing";
  if (dynamic_cast<const NonzeroExit*>(&e)) return "NonzeroExit";
  if (dynamic_cast<const DurationMismatch*>(&e)) return "DurationMismatch";
  if (dynamic_cast<const AuthError*>(&e)) return "AuthError";
  if (dynamic_cast<const RateLimited*>(&e)) return "RateLimited";
  if (dynamic_cast<const Timeout*>(&e)) return "Timeout";
  if (dynamic_cast<const MalformedResponse*>(&e)) return "MalformedResponse";
  if (dynamic_cast<const TransportError*>(&e)) return "TransportError";
  if (dynamic_cast<const InfeasibleParams*>(&e)) return "InfeasibleParams";
  if (dynamic_cast<const StageFailed*>(&e)) return "StageFailed";
  if (dynamic_cast<const json::exception*>(&e)) return "MalformedRecord";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
  return "Error";
}

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const int count = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  std::vector<std::jthread> pool;
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
}

std::string slug(std::string_view s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

// Settings that change outputs; paths and parallelism do not.
json stable_config(const PipelineConfig& cfg) {
  auto j = config_json(cfg);
  for (const char* k : {"data_root", "work_dir", "video_root", "workers"}) j.erase(k);
  j["media"].erase("workers");
  j["eval"].erase("answers_path");
  for (const char* llm : {"generator", "judge"}) {
    for (const char* k : {"max_inflight", "request_timeout_s", "api_key_env", "backoff_initial_ms", "max_retries"}) {
      j[llm].erase(k);
    }
  }
  return j;
}

struct Input {
  std::string name;
  std::string content;
};

std::string hash_inputs(const std::vector<Input>& inputs) {
  std::string acc;
  for (const auto& in : inputs) acc += in.name + '\0' + sha256_hex(in.content) + '\n';
  return sha256_hex(acc);
}

Input file_input(const std::string& name, const fs::path& path) {
  if (!fs::exists(path)) throw MissingFile(path);
  return {name, read_text(path)};
}

struct Context {
  const PipelineConfig& cfg;  // as written; manifests hash this
  LlmConfig generator;        // endpoints actually called
  LlmConfig judge;
  StagePaths paths;
  std::ostream& log;

  json manifest(const std::string& stage, const std::vector<Input>& inputs, json extra = json::object()) const {
    static const json defaults = stable_config(PipelineConfig{});
    const auto stable = stable_config(cfg);
    json m{{"stage", stage},
           {"stage_version", kStageVersion},
           {"config_hash", sha256_hex(stable.dump())},
           {"input_hash", hash_inputs(inputs)},
           {"overrides", json::diff(defaults, stable)}};
    m.update(extra);
    return json{{"manifest", m}};
  }
};

std::optional<json> existing_manifest(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  if (line.rfind("# manifest ", 0) == 0) line = line.substr(11);
  try {
    auto j = json::parse(line);
    if (is_manifest_line(j)) return j;
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

bool up_to_date(const Context& ctx, const std::string& stage, const fs::path& primary, const json& manifest) {
  auto existing = existing_manifest(primary);
  if (existing && *existing == manifest) {
    ctx.log << stage << ": up to date\n";
    return true;
  }
  return false;
}

void write_records(const fs::path& path, const json& manifest, std::vector<json> records) {
  records.insert(records.begin(), manifest);
  write_text(path, to_jsonl(records));
}

void write_csv(const fs::path& path, const json& manifest, const std::string& body) {
  write_text(path, "# manifest " + manifest.dump() + "\n" + body);
}

// --- match discovery ------------------------------------------------------------

std::vector<std::string> discover_matches(const PipelineConfig& cfg) {
  if (!fs::is_directory(cfg.data_root)) throw MissingFile(cfg.data_root);
  std::vector<std::string> keys;
  for (const auto& entry : fs::recursive_directory_iterator(cfg.data_root)) {
    if (!entry.is_regular_file() || entry.path().filename() != kJerseysFile) continue;
    auto key = fs::relative(entry.path().parent_path(), cfg.data_root).generic_string();
    if (!MatchId::from_key(key).valid()) continue;
    if (!cfg.matches.empty() && std::find(cfg.matches.begin(), cfg.matches.end(), key) == cfg.matches.end()) {
      continue;
    }
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  for (const auto& wanted : cfg.matches) {
    if (std::find(keys.begin(), keys.end(), wanted) == keys.end()) {
      throw MissingFile(cfg.data_root / wanted / kJerseysFile);
    }
  }
  return keys;
}

std::vector<std::string> ingested_keys(const Context& ctx) {
  std::vector<std::string> keys;
  for (const auto& r : read_jsonl(ctx.paths.ingest_index)) keys.push_back(r.at("match_id").get<std::string>());
  return keys;
}

MatchAnnotations load_ingested(const Context& ctx, const std::string& key) {
  return load_match(ctx.cfg.work_dir / "ingest" / key, LabelSet(ctx.cfg.labels));
}

std::vector<MatchAnnotations> load_all_ingested(const Context& ctx) {
  std::vector<MatchAnnotations> out;
  for (const auto& key : ingested_keys(ctx)) out.push_back(load_ingested(ctx, key));
  return out;
}

std::string media_path_for(const std::string& match_key, const std::string& clip_id,
                           const std::vector<std::string>& labels) {
  return match_key + "/" + clip_media_name(clip_id, labels);
}

// --- stages -----------------------------------------------------------------------

int stage_ingest(const Context& ctx) {
  const auto keys = discover_matches(ctx.cfg);
  std::vector<Input> inputs;
  for (const auto& key : keys) {
    for (auto name : {kEventsFile, kCameraFile, kCaptionsFile, kAsrFile, kJerseysFile, kRosterFile}) {
      auto path = ctx.cfg.data_root / key / name;
      if (fs::exists(path)) inputs.push_back({key + "/" + std::string(name), read_text(path)});
    }
  }
  const auto manifest = ctx.manifest("ingest", inputs);
  if (up_to_date(ctx, "ingest", ctx.paths.ingest_index, manifest)) return 0;

  std::vector<json> records;
  const LabelSet labels(ctx.cfg.labels);
  for (const auto& key : keys) {
    auto a = load_match(ctx.cfg.data_root / key, labels);
    json issues = json::array();
    for (const auto& issue : validate(a)) issues.push_back(issue);
    save_match(ctx.cfg.work_dir / "ingest" / key, a);
    records.push_back({{"match_id", key},
                       {"events", a.events.size()},
                       {"camera", a.camera.size()},
                       {"captions", a.captions.size()},
                       {"asr", a.asr.size()},
                       {"roster", a.roster.has_value()},
                       {"issues", issues}});
  }
  write_records(ctx.paths.ingest_index, manifest, std::move(records));
  ctx.log << fmt::format("ingest: {} matches validated\n", keys.size());
  return 0;
}

int stage_segment(const Context& ctx) {
  const auto manifest = ctx.manifest("segment", {file_input("ingest/index.jsonl", ctx.paths.ingest_index)});
  if (up_to_date(ctx, "segment", ctx.paths.clips, manifest)) return 0;
  std::vector<json> records;
  for (const auto& a : load_all_ingested(ctx)) {
    for (const auto& clip : segment_match(a, ctx.cfg.segmenter)) records.push_back(clip_record(clip));
  }
  const auto n = records.size();
  write_records(ctx.paths.clips, manifest, std::move(records));
  ctx.log << fmt::format("segment: {} clips\n", n);
  return 0;
}

int stage_pair(const Context& ctx) {
  const auto manifest = ctx.manifest("pair", {file_input("ingest/index.jsonl", ctx.paths.ingest_index)});
  if (up_to_date(ctx, "pair", ctx.paths.pairs, manifest)) return 0;
  std::vector<json> records;
  for (const auto& a : load_all_ingested(ctx)) {
    for (const auto& pair : pair_match(a, ctx.cfg.pairer)) records.push_back(pair_record(pair));
  }
  const auto n = records.size();
  write_records(ctx.paths.pairs, manifest, std::move(records));
  ctx.log << fmt::format("pair: {} valid pairs\n", n);
  return 0;
}

int stage_fuse(const Context& ctx) {
  const auto manifest = ctx.manifest("fuse", {file_input("ingest/index.jsonl", ctx.paths.ingest_index),
                                              file_input("segment/clips.jsonl", ctx.paths.clips),
                                              file_input("pair/pairs.jsonl", ctx.paths.pairs)});
  if (up_to_date(ctx, "fuse", ctx.paths.fused, manifest)) return 0;

  std::map<std::string, std::vector<ClipVariant>> by_match;
  for (const auto& r : read_jsonl(ctx.paths.clips)) by_match[r.at("match_id").get<std::string>()].push_back(clip_from_record(r));
  for (const auto& r : read_jsonl(ctx.paths.pairs)) by_match[r.at("match_id").get<std::string>()].push_back(pair_from_record(r));

  std::vector<json> records;
  std::size_t singles = 0, pairs = 0;
  for (const auto& key : ingested_keys(ctx)) {
    const auto a = load_ingested(ctx, key);
    for (const auto& clip : by_match[key]) {
      if (auto fused = fuse(clip, a, ctx.cfg.fusion)) {
        (is_paired_event(clip) ? pairs : singles)++;
        records.push_back(fused_record(*fused));
      }
    }
  }
  write_records(ctx.paths.fused, manifest, std::move(records));
  ctx.log << fmt::format("fuse: {} single-event and {} paired-event clips with captions\n", singles, pairs);
  return 0;
}

int stage_cut(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.video_root.empty()) throw std::invalid_argument("video_root is not configured");
  if (!tool_available(cfg.media.tool)) throw ToolMissing(cfg.media.tool);
  if (!tool_available(cfg.media.probe)) throw ToolMissing(cfg.media.probe);

  struct Planned {
    CutJob job;
    std::string media_path;
  };
  std::vector<Planned> planned;
  auto video_for = [&](const std::string& key, int half) {
    auto name = cfg.video_name;
    if (auto pos = name.find("{half}"); pos != std::string::npos) name.replace(pos, 6, std::to_string(half));
    return cfg.video_root / key / name;
  };
  for (const auto& r : read_jsonl(ctx.paths.clips)) {
    auto c = clip_from_record(r);
    auto key = c.match.key();
    auto media = media_path_for(key, c.clip_id, {c.anchor_event.label});
    planned.push_back({{c.clip_id, video_for(key, c.half), c.span, cfg.work_dir / "cut" / media}, media});
  }
  for (const auto& r : read_jsonl(ctx.paths.pairs)) {
    auto p = pair_from_record(r);
    auto key = p.first.match.key();
    auto media = media_path_for(key, p.clip_id, {p.first.label, p.second.label});
    planned.push_back({{p.clip_id, video_for(key, p.first.half), p.span, cfg.work_dir / "cut" / media}, media});
  }

  std::vector<Input> inputs{file_input("segment/clips.jsonl", ctx.paths.clips),
                            file_input("pair/pairs.jsonl", ctx.paths.pairs)};
  std::set<fs::path> videos;
  for (const auto& p : planned) videos.insert(p.job.video);
  for (const auto& v : videos) {
    auto size = fs::exists(v) ? std::to_string(fs::file_size(v)) : std::string("missing");
    inputs.push_back({fs::relative(v, cfg.video_root).generic_string(), size});
  }
  const auto manifest = ctx.manifest("cut", inputs);
  if (up_to_date(ctx, "cut", ctx.paths.cuts, manifest)) return 0;

  std::vector<CutJob> jobs;
  for (const auto& p : planned) jobs.push_back(p.job);
  auto media_cfg = cfg.media;
  media_cfg.workers = std::max(1, media_cfg.workers);
  const auto outcomes = cut_all(jobs, media_cfg);
  const auto budget = patch_grid(cfg.aspect_w, cfg.aspect_h, cfg.max_tokens);

  std::vector<json> records;
  json failures = json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.result) {
      failures.push_back({{"clip_id", o.clip_id}, {"error", o.error}});
      continue;
    }
    const auto plan = plan_frames(jobs[i].span);
    records.push_back({{"clip_id", o.clip_id},
                       {"media_path", planned[i].media_path},
                       {"duration_s", o.result->output_duration_s},
                       {"frame_times_ms", plan.frame_times_ms},
                       {"effective_fps", plan.effective_fps},
                       {"grid", {budget.grid_w, budget.grid_h}},
                       {"tokens_per_frame", budget.tokens_per_frame},
                       {"total_tokens", budget.total_tokens}});
  }
  if (!failures.empty()) {
    throw StageFailed(fmt::format("{} of {} cuts failed", failures.size(), outcomes.size()),
                      json{{"failures", failures}});
  }
  write_records(ctx.paths.cuts, manifest, std::move(records));
  ctx.log << fmt::format("cut: {} clips written\n", outcomes.size());
  return 0;
}

int stage_generate(const Context& ctx) {
  const auto& g = ctx.generator;
  const auto manifest = ctx.manifest("generate", {file_input("fuse/fused.jsonl", ctx.paths.fused)},
                                     json{{"generator", {{"model_name", g.model_name}, {"temperature", g.temperature}}}});
  if (up_to_date(ctx, "generate", ctx.paths.dataset, manifest)) return 0;

  std::vector<FusedClip> fused;
  for (const auto& r : read_jsonl(ctx.paths.fused)) fused.push_back(fused_from_record(r));
  CompletionFn complete = [&](const PromptMessages& p) { return request_completion(p, g); };
  const auto results = generate_dataset(fused, complete, ctx.cfg.workers);

  std::vector<json> records, quarantined;
  for (const auto& r : results) {
    for (const auto& rec : r.records) records.push_back(qa_record_json(rec));
    if (r.quarantine) quarantined.push_back(quarantine_json(*r.quarantine));
  }
  const auto nr = records.size(), nq = quarantined.size();
  write_records(ctx.paths.quarantine, manifest, std::move(quarantined));
  write_records(ctx.paths.dataset, manifest, std::move(records));
  ctx.log << fmt::format("generate: {} QA records, {} clips quarantined\n", nr, nq);
  return 0;
}

int stage_build_eval(const Context& ctx) {
  const auto classes = ctx.cfg.eval_classes();
  const auto manifest =
      ctx.manifest("build-eval", {file_input("segment/clips.jsonl", ctx.paths.clips)},
                   json{{"class_set", classes.name}, {"labels", classes.labels},
                        {"query", build_classification_query(classes)}});
  if (up_to_date(ctx, "build-eval", ctx.paths.eval_manifest, manifest)) return 0;

  std::vector<EvalItem> items;
  for (const auto& r : read_jsonl(ctx.paths.clips)) {
    auto c = clip_from_record(r);
    if (c.kind != CameraKind::RealTime) continue;
    const auto key = c.match.key();
    items.push_back({c.clip_id, key, media_path_for(key, c.clip_id, {c.anchor_event.label}), c.anchor_event.label});
  }
  const auto sampled = sample_per_class(items, classes, ctx.cfg.eval_per_class, ctx.cfg.seed);
  std::vector<json> records;
  for (const auto& item : sampled) records.push_back(eval_item_json(item));
  write_records(ctx.paths.eval_manifest, manifest, std::move(records));
  ctx.log << fmt::format("build-eval: {} items over the {} class set\n", sampled.size(), classes.name);
  return 0;
}

std::map<std::string, std::map<std::string, std::string>> candidate_answers(const Context& ctx,
                                                                             const std::vector<EvalItem>& items,
                                                                             const ClassSet& classes) {
  std::map<std::string, std::map<std::string, std::string>> answers;
  if (!ctx.cfg.answers_path.empty()) {
    for (const auto& r : read_jsonl(ctx.cfg.answers_path)) {
      answers[r.at("clip_id").get<std::string>()][r.at("model").get<std::string>()] = r.at("answer").get<std::string>();
    }
    return answers;
  }
  for (const auto& item : items) {
    for (const auto& cand : ctx.cfg.simulated_candidates) {
      const auto h = sha256_hex(fmt::format("{}|{}|{}", ctx.cfg.seed, item.clip_id, cand.name));
      std::seed_seq seq(h.begin(), h.end());
      std::mt19937_64 gen(seq);
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      std::string answer;
      if (u < cand.accuracy) {
        answer = fmt::format("The clip shows a {} event, which is clear from the play.", item.label);
      } else if (u < cand.accuracy + (1.0 - cand.accuracy) * 0.2) {
        answer = "I cannot tell which event this clip shows.";
      } else {
        std::vector<std::string> others;
        for (const auto& l : classes.labels) {
          if (l != item.label) others.push_back(l);
        }
        const auto& pick = others.empty() ? item.label : others[gen() % others.size()];
        answer = fmt::format("The clip shows a {} event, judging by the players' movement.", pick);
      }
      answers[item.clip_id][cand.name] = answer;
    }
  }
  return answers;
}

int stage_judge(const Context& ctx) {
  const auto classes = ctx.cfg.eval_classes();
  std::vector<Input> inputs{file_input("eval/manifest.jsonl", ctx.paths.eval_manifest)};
  if (!ctx.cfg.answers_path.empty()) inputs.push_back(file_input("answers", ctx.cfg.answers_path));
  const auto manifest = ctx.manifest("judge", inputs, json{{"judge_model", ctx.cfg.judge.model_name}});
  if (up_to_date(ctx, "judge", ctx.paths.verdicts, manifest)) return 0;
  if (ctx.cfg.answers_path.empty() && ctx.cfg.simulated_candidates.empty()) {
    throw std::invalid_argument("judge needs answers_path or simulated candidates");
  }

  std::vector<EvalItem> items;
  for (const auto& r : read_jsonl(ctx.paths.eval_manifest)) items.push_back(eval_item_from_json(r));
  const auto answers = candidate_answers(ctx, items, classes);
  const auto query = build_classification_query(classes);

  // Previously judged records keyed by (clip, models, judge, prompt hash).
  std::map<std::string, json> previous;
  if (fs::exists(ctx.paths.verdicts)) {
    try {
      for (const auto& r : read_jsonl(ctx.paths.verdicts)) {
        if (r.contains("verdict")) previous[r.at("key").get<std::string>()] = r;
      }
    } catch (const std::exception&) {
      previous.clear();
    }
  }

  std::vector<std::optional<json>> out(items.size());
  std::atomic<int> reused{0};
  parallel_for(items.size(), ctx.cfg.workers, [&](std::size_t i) {
    const auto& item = items[i];
    auto it = answers.find(item.clip_id);
    if (it == answers.end() || it->second.empty()) return;
    const auto text = build_judge_prompt(query, item.label, it->second, classes);
    const PromptMessages prompt({{Role::System, "You are a careful evaluator of soccer video classification answers."},
                                 {Role::User, text}});
    std::set<std::string> models;
    for (const auto& [m, _] : it->second) models.insert(m);
    const auto hash = prompt_hash(prompt);
    const auto key = sha256_hex(json{item.clip_id, models, ctx.cfg.judge.model_name, hash}.dump());
    if (auto p = previous.find(key); p != previous.end()) {
      out[i] = p->second;
      ++reused;
      return;
    }
    json rec{{"key", key},       {"clip_id", item.clip_id}, {"label", item.label},
             {"models", models}, {"judge_model", ctx.cfg.judge.model_name}, {"prompt_hash", hash}};
    std::string raw;
    try {
      raw = request_completion(prompt, ctx.judge);
      rec["raw"] = raw;
      rec["verdict"] = verdict_json(parse_judge_output(raw, models, classes));
    } catch (const std::exception& e) {
      rec["raw"] = raw;
      rec["error"] = {{"kind", error_kind(e)}, {"message", e.what()}};
    }
    out[i] = std::move(rec);
  });

  std::vector<json> records;
  std::size_t failed = 0;
  for (auto& r : out) {
    if (!r) continue;
    if (r->contains("error")) ++failed;
    records.push_back(std::move(*r));
  }
  const auto n = records.size();
  write_records(ctx.paths.verdicts, manifest, std::move(records));
  ctx.log << fmt::format("judge: {} items judged ({} reused, {} unparseable)\n", n, reused.load(), failed);
  return 0;
}

std::size_t count_records(const fs::path& path) { return fs::exists(path) ? read_jsonl(path).size() : 0; }

int stage_report(const Context& ctx) {
  const auto classes = ctx.cfg.eval_classes();
  std::vector<Input> inputs{file_input("judge/verdicts.jsonl", ctx.paths.verdicts),
                            file_input("eval/manifest.jsonl", ctx.paths.eval_manifest)};
  for (const auto& [name, path] : std::vector<std::pair<std::string, fs::path>>{
           {"ingest/index.jsonl", ctx.paths.ingest_index}, {"segment/clips.jsonl", ctx.paths.clips},
           {"pair/pairs.jsonl", ctx.paths.pairs},         {"fuse/fused.jsonl", ctx.paths.fused},
           {"generate/dataset.jsonl", ctx.paths.dataset}, {"generate/quarantine.jsonl", ctx.paths.quarantine}}) {
    if (fs::exists(path)) inputs.push_back(file_input(name, path));
  }
  const auto manifest = ctx.manifest("report", inputs);
  const auto summary_path = ctx.paths.report_dir / "summary.csv";
  if (up_to_date(ctx, "report", summary_path, manifest)) return 0;

  std::map<std::string, std::vector<std::string>> truth, pred;
  std::map<std::string, std::vector<int>> scores;
  std::size_t judged = 0, unparseable = 0;
  for (const auto& r : read_jsonl(ctx.paths.verdicts)) {
    if (!r.contains("verdict")) {
      ++unparseable;
      continue;
    }
    ++judged;
    const auto v = verdict_from_json(r.at("verdict"));
    const auto label = r.at("label").get<std::string>();
    for (const auto& [model, score] : v.scores) {
      truth[model].push_back(label);
      pred[model].push_back(v.predicted_class.at(model));
      scores[model].push_back(score);
    }
  }

  std::vector<std::pair<std::string, MetricsReport>> summary;
  std::vector<ScoreDistribution> dists;
  for (const auto& [model, t] : truth) {
    const auto cm = confusion(t, pred[model], classes);
    auto m = metrics(cm);
    write_csv(ctx.paths.report_dir / fmt::format("per_class_{}.csv", slug(model)), manifest, per_class_csv(m));
    write_csv(ctx.paths.report_dir / fmt::format("confusion_{}.csv", slug(model)), manifest, confusion_csv(cm));
    summary.emplace_back(model, std::move(m));
    dists.push_back(score_stats(scores[model], model));
  }
  write_csv(ctx.paths.report_dir / "violin.csv", manifest, violin_csv(dists));

  std::size_t realtime = 0, replay = 0, fused_single = 0, fused_pair = 0;
  if (fs::exists(ctx.paths.clips)) {
    for (const auto& r : read_jsonl(ctx.paths.clips)) (r.at("kind") == "Replay" ? replay : realtime)++;
  }
  if (fs::exists(ctx.paths.fused)) {
    for (const auto& r : read_jsonl(ctx.paths.fused)) (r.at("clip_type") == "pair" ? fused_pair : fused_single)++;
  }
  std::map<std::string, std::size_t> by_kind;
  if (fs::exists(ctx.paths.dataset)) {
    for (const auto& r : read_jsonl(ctx.paths.dataset)) by_kind[r.at("kind").get<std::string>()]++;
  }
  json counts{{"matches", count_records(ctx.paths.ingest_index)},
              {"clips_realtime", realtime},
              {"clips_replay", replay},
              {"clips_total", realtime + replay},
              {"pairs", count_records(ctx.paths.pairs)},
              {"fused_single", fused_single},
              {"fused_pair", fused_pair},
              {"dataset_records", by_kind},
              {"quarantined_clips", count_records(ctx.paths.quarantine)},
              {"eval_items", count_records(ctx.paths.eval_manifest)},
              {"judged_items", judged},
              {"unparseable_verdicts", unparseable}};
  // Full-corpus figures for side-by-side reading; never compared automatically.
  json published{{"clips_total", 90834}, {"pairs", 12827}, {"fused_single", 10615}, {"fused_pair", 2982}};
  json counts_file = manifest;
  counts_file["counts"] = counts;
  counts_file["published_full_corpus"] = published;
  write_text(ctx.paths.report_dir / "counts.json", counts_file.dump(2) + "\n");
  write_csv(summary_path, manifest, summary_csv(summary));
  ctx.log << fmt::format("report: {} models over {} judged items\n", summary.size(), judged);
  return 0;
}

int stage_synth(const Context& ctx) {
  std::vector<json> books;
  for (int i = 0; i < ctx.cfg.synth_matches; ++i) {
    const std::uint64_t seed = ctx.cfg.seed * 1000 + static_cast<std::uint64_t>(i);
    auto params = corpus_params(seed);
    params.match_id = MatchId{"synth-league", "2024-2025", fmt::format("m{:03d}", i)};
    auto [a, book] = generate_match(seed, params);
    save_match(ctx.cfg.data_root / a.match_id.key(), a);
    books.push_back({{"match_id", a.match_id.key()}, {"seed", seed}, {"book", book_json(book)}});
  }
  write_records(ctx.paths.synth_books, ctx.manifest("synth", {}), std::move(books));
  ctx.log << fmt::format("synth: {} matches written to {}\n", ctx.cfg.synth_matches, ctx.cfg.data_root.string());
  return 0;
}

using StageFn = int (*)(const Context&);

StageFn stage_fn(const std::string& name) {
  static const std::map<std::string, StageFn> table{
      {"ingest", stage_ingest},   {"segment", stage_segment},       {"pair", stage_pair},
      {"fuse", stage_fuse},       {"cut", stage_cut},               {"generate", stage_generate},
      {"build-eval", stage_build_eval}, {"judge", stage_judge},     {"report", stage_report},
      {"synth", stage_synth}};
  auto it = table.find(name);
  return it == table.end() ? nullptr : it->second;
}

int run_stage(const std::string& name, const Context& ctx) {
  const auto error_path = ctx.paths.errors_dir / (name + ".json");
  try {
    const int rc = stage_fn(name)(ctx);
    if (rc == 0 && fs::exists(error_path)) fs::remove(error_path);
    return rc;
  } catch (const std::exception& e) {
    json err{{"stage", name}, {"error", error_kind(e)}, {"message", e.what()}};
    if (const auto* sf = dynamic_cast<const StageFailed*>(&e)) err["details"] = sf->details();
    if (const auto* sv = dynamic_cast<const SchemaViolation*>(&e)) {
      err["details"] = {{"path", sv->path().string()}, {"record", sv->record()}, {"reason", sv->reason()}};
    }
    if (const auto* mf = dynamic_cast<const MissingFile*>(&e)) err["details"] = {{"path", mf->path().string()}};
    try {
      write_text(error_path, err.dump(2) + "\n");
    } catch (const std::exception&) {
    }
    ctx.log << fmt::format("{}: failed ({}): {}\n", name, error_kind(e), e.what());
    return 1;
  }
}

}  // namespace

// --- config -----------------------------------------------------------------------

ClassSet PipelineConfig::eval_classes() const {
  if (eval_class_set == "six") return ClassSet::six();
  if (eval_class_set == "sixteen") return ClassSet::sixteen();
  if (eval_class_set == "custom") return ClassSet::custom("custom", eval_custom_labels);
  throw std::invalid_argument("unknown eval class set: " + eval_class_set);
}

void PipelineConfig::check() const {
  if (labels.empty()) throw std::invalid_argument("labels must not be empty");
  if (segmenter.event_window_ms <= 0 || segmenter.max_clip_ms <= 0) throw std::invalid_argument("bad windows");
  if (pairer.gap_min_ms > pairer.gap_max_ms) throw std::invalid_argument("pair_gap_min_ms exceeds pair_gap_max_ms");
  if (fusion.caption_lead_ms > fusion.caption_tail_ms) throw std::invalid_argument("caption lead exceeds tail");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (synth_matches < 0) throw std::invalid_argument("synth.matches must be >= 0");
  for (const auto& c : simulated_candidates) {
    if (c.name.empty() || c.accuracy < 0.0 || c.accuracy > 1.0) throw std::invalid_argument("bad simulated model");
  }
  (void)eval_classes();
  if (generator.endpoint_url != kMockEndpoint) generator.check();
  if (judge.endpoint_url != kMockEndpoint) judge.check();
}

json config_json(const PipelineConfig& c) {
  json sims = json::array();
  for (const auto& s : c.simulated_candidates) sims.push_back({{"name", s.name}, {"accuracy", s.accuracy}});
  return json{
      {"data_root", c.data_root.string()},
      {"work_dir", c.work_dir.string()},
      {"video_root", c.video_root.string()},
      {"video_name", c.video_name},
      {"labels", c.labels},
      {"windows",
       {{"event_window_ms", c.segmenter.event_window_ms},
        {"max_clip_ms", c.segmenter.max_clip_ms},
        {"replay_lookback_ms", c.segmenter.replay_lookback_ms},
        {"pair_gap_min_ms", c.pairer.gap_min_ms},
        {"pair_gap_max_ms", c.pairer.gap_max_ms},
        {"pair_lead_ms", c.pairer.lead_ms},
        {"pair_tail_ms", c.pairer.tail_ms},
        {"flag_ms", c.pairer.flag_ms},
        {"caption_lead_ms", c.fusion.caption_lead_ms},
        {"caption_tail_ms", c.fusion.caption_tail_ms}}},
      {"fusion", {{"filler_tokens", c.fusion.filler_tokens}, {"collapse_repeats", c.fusion.collapse_repeats}}},
      {"media",
       {{"tool", c.media.tool},
        {"probe", c.media.probe},
        {"encoder_args", c.media.encoder_args},
        {"extra_args", c.media.extra_args},
        {"tolerance_ms", c.media.tolerance_ms},
        {"workers", c.media.workers},
        {"aspect_w", c.aspect_w},
        {"aspect_h", c.aspect_h},
        {"max_tokens", c.max_tokens}}},
      {"generator", c.generator},
      {"judge", c.judge},
      {"eval",
       {{"class_set", c.eval_class_set},
        {"labels", c.eval_custom_labels},
        {"per_class", c.eval_per_class},
        {"answers_path", c.answers_path.string()},
        {"simulated_models", sims}}},
      {"synth", {{"matches", c.synth_matches}}},
      {"seed", c.seed},
      {"workers", c.workers},
      {"matches", c.matches}};
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const auto& [k, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; })) {
      throw std::invalid_argument(fmt::format("unknown config key {}{}", where.empty() ? "" : where + ".", k));
    }
  }
}

fs::path resolve(const json& j, const char* key, const fs::path& fallback, const fs::path& base) {
  if (!j.contains(key)) return fallback;
  fs::path p = j.at(key).get<std::string>();
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

PipelineConfig config_from_json(const json& j, const fs::path& base) {
  reject_unknown(j,
                 {"data_root", "work_dir", "video_root", "video_name", "labels", "windows", "fusion", "media",
                  "generator", "judge", "eval", "synth", "seed", "workers", "matches"},
                 "");
  PipelineConfig c;
  c.data_root = resolve(j, "data_root", base.empty() ? c.data_root : base / c.data_root, base);
  c.work_dir = resolve(j, "work_dir", base.empty() ? c.work_dir : base / c.work_dir, base);
  c.video_root = resolve(j, "video_root", c.video_root, base);
  c.video_name = j.value("video_name", c.video_name);
  c.labels = j.value("labels", c.labels);
  if (j.contains("windows")) {
    const auto& w = j["windows"];
    reject_unknown(w,
                   {"event_window_ms", "max_clip_ms", "replay_lookback_ms", "pair_gap_min_ms", "pair_gap_max_ms",
                    "pair_lead_ms", "pair_tail_ms", "flag_ms", "caption_lead_ms", "caption_tail_ms"},
                   "windows");
    c.segmenter.event_window_ms = w.value("event_window_ms", c.segmenter.event_window_ms);
    c.segmenter.max_clip_ms = w.value("max_clip_ms", c.segmenter.max_clip_ms);
    c.pairer.max_clip_ms = c.segmenter.max_clip_ms;
    c.segmenter.replay_lookback_ms = w.value("replay_lookback_ms", c.segmenter.replay_lookback_ms);
    c.pairer.gap_min_ms = w.value("pair_gap_min_ms", c.pairer.gap_min_ms);
    c.pairer.gap_max_ms = w.value("pair_gap_max_ms", c.pairer.gap_max_ms);
    c.pairer.lead_ms = w.value("pair_lead_ms", c.pairer.lead_ms);
    c.pairer.tail_ms = w.value("pair_tail_ms", c.pairer.tail_ms);
    c.pairer.flag_ms = w.value("flag_ms", c.pairer.flag_ms);
    c.fusion.caption_lead_ms = w.value("caption_lead_ms", c.fusion.caption_lead_ms);
    c.fusion.caption_tail_ms = w.value("caption_tail_ms", c.fusion.caption_tail_ms);
  }
  if (j.contains("fusion")) {
    const auto& f = j["fusion"];
    reject_unknown(f, {"filler_tokens", "collapse_repeats"}, "fusion");
    c.fusion.filler_tokens = f.value("filler_tokens", c.fusion.filler_tokens);
    c.fusion.collapse_repeats = f.value("collapse_repeats", c.fusion.collapse_repeats);
  }
  if (j.contains("media")) {
    const auto& m = j["media"];
    reject_unknown(m,
                   {"tool", "probe", "encoder_args", "extra_args", "tolerance_ms", "workers", "aspect_w", "aspect_h",
                    "max_tokens"},
                   "media");
    c.media.tool = m.value("tool", c.media.tool);
    c.media.probe = m.value("probe", c.media.probe);
    c.media.encoder_args = m.value("encoder_args", c.media.encoder_args);
    c.media.extra_args = m.value("extra_args", c.media.extra_args);
    c.media.tolerance_ms = m.value("tolerance_ms", c.media.tolerance_ms);
    c.media.workers = m.value("workers", c.media.workers);
    c.aspect_w = m.value("aspect_w", c.aspect_w);
    c.aspect_h = m.value("aspect_h", c.aspect_h);
    c.max_tokens = m.value("max_tokens", c.max_tokens);
  }
  auto llm = [](const json& src, LlmConfig& dst) {
    if (src.value("endpoint_url", std::string()) == kMockEndpoint) {
      json copy = src;
      copy["endpoint_url"] = "http://127.0.0.1:1/mock";
      from_json(copy, dst);
      dst.endpoint_url = kMockEndpoint;
    } else {
      from_json(src, dst);
    }
  };
  if (j.contains("generator")) llm(j["generator"], c.generator);
  if (j.contains("judge")) llm(j["judge"], c.judge);
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    reject_unknown(e, {"class_set", "labels", "per_class", "answers_path", "simulated_models"}, "eval");
    c.eval_class_set = e.value("class_set", c.eval_class_set);
    c.eval_custom_labels = e.value("labels", c.eval_custom_labels);
    c.eval_per_class = e.value("per_class", c.eval_per_class);
    c.answers_path = resolve(e, "answers_path", c.answers_path, base);
    for (const auto& s : e.value("simulated_models", json::array())) {
      c.simulated_candidates.push_back({s.at("name").get<std::string>(), s.value("accuracy", 0.5)});
    }
  }
  if (j.contains("synth")) {
    reject_unknown(j["synth"], {"matches"}, "synth");
    c.synth_matches = j["synth"].value("matches", c.synth_matches);
  }
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.matches = j.value("matches", c.matches);
  c.check();
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw MissingFile(path);
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

StagePaths::StagePaths(const fs::path& w)
    : ingest_index(w / "ingest" / "index.jsonl"),
      clips(w / "segment" / "clips.jsonl"),
      pairs(w / "pair" / "pairs.jsonl"),
      fused(w / "fuse" / "fused.jsonl"),
      cuts(w / "cut" / "cuts.jsonl"),
      dataset(w / "generate" / "dataset.jsonl"),
      quarantine(w / "generate" / "quarantine.jsonl"),
      eval_manifest(w / "eval" / "manifest.jsonl"),
      verdicts(w / "judge" / "verdicts.jsonl"),
      report_dir(w / "report"),
      errors_dir(w / "errors"),
      synth_books(w / "synth" / "books.jsonl") {}

int run(const std::string& subcommand, const PipelineConfig& cfg, std::ostream& log) {
  const bool all = subcommand == "all";
  if (!all && !stage_fn(subcommand)) {
    log << "unknown subcommand: " << subcommand << "\n";
    return 2;
  }

  // "mock" endpoints are served in-process for the duration of the run.
  Context ctx{cfg, cfg.generator, cfg.judge, StagePaths(cfg.work_dir), log};
  std::unique_ptr<MockLlmServer> mock;
  const bool needs_llm = all || subcommand == "generate" || subcommand == "judge";
  if (needs_llm && (cfg.generator.endpoint_url == kMockEndpoint || cfg.judge.endpoint_url == kMockEndpoint)) {
    mock = std::make_unique<MockLlmServer>();
    for (auto* llm : {&ctx.generator, &ctx.judge}) {
      if (llm->endpoint_url == kMockEndpoint) {
        llm->endpoint_url = mock->url();
        llm->api_key_env.clear();
      }
    }
  }
  auto run_one = [&](const std::string& name) { return run_stage(name, ctx); };

  if (!all) return run_one(subcommand);
  for (const char* stage : kStages) {
    const std::string name = stage;
    if (name == "cut" && cfg.video_root.empty()) {
      log << "cut: skipped (no video_root configured)\n";
      continue;
    }
    if ((name == "judge" || name == "report") && cfg.answers_path.empty() && cfg.simulated_candidates.empty()) {
      log << name << ": skipped (no candidate answers configured)\n";
      continue;
    }
    if (int rc = run_one(name); rc != 0) return rc;
  }
  return 0;
}

}  // namespace soccerforge
