#include <atomic>
#include <thread>

#include "soccerforge/media_budget.hpp"
#include "soccerforge/qa_factory.hpp"

namespace soccerforge {
namespace {

struct StepFailure {
  std::string error;
  std::vector<std::string> raw;
};

// One completion plus at most one corrective retry.
std::variant<std::vector<QaPart>, StepFailure> run_step(const PromptMessages& prompt, ExpectedShape shape,
                                                        const CompletionFn& complete) {
  StepFailure failure;
  auto current = prompt;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string raw;
    try {
      raw = complete(current);
    } catch (const std::exception& e) {
      failure.error = e.what();
      return failure;
    }
    try {
      return parse_qa_response(raw, shape);
    } catch (const ResponseError& e) {
      failure.error = e.what();
      failure.raw.push_back(raw);
    }
    current = prompt.with_appended({Role::User, std::string(kCorrectiveInstruction)});
  }
  return failure;
}

std::string media_path_of(const FusedClip& fused) {
  std::vector<std::string> labels;
  for (const auto& e : anchors_of(fused.clip)) labels.push_back(e.label);
  return match_of(fused.clip).key() + "/" + clip_media_name(clip_id_of(fused.clip), labels);
}

}  // namespace

std::string_view to_string(QaKind k) {
  switch (k) {
    case QaKind::LongDescription: return "LongDescription";
    case QaKind::OverviewQA: return "OverviewQA";
    case QaKind::DetailQA: return "DetailQA";
  }
  return "LongDescription";
}

json qa_record_json(const QARecord& r) {
  return json{{"clip_id", r.clip_id},   {"match_id", r.match_id}, {"media_path", r.media_path},
              {"kind", to_string(r.kind)}, {"question", r.question}, {"answer", r.answer},
              {"index", r.index}};
}

QARecord qa_record_from_json(const json& j) {
  QARecord r;
  r.clip_id = j.at("clip_id").get<std::string>();
  r.match_id = j.at("match_id").get<std::string>();
  r.media_path = j.at("media_path").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "LongDescription") {
    r.kind = QaKind::LongDescription;
  } else if (kind == "OverviewQA") {
    r.kind = QaKind::OverviewQA;
  } else if (kind == "DetailQA") {
    r.kind = QaKind::DetailQA;
  } else {
    throw std::invalid_argument("unknown QA kind: " + kind);
  }
  r.question = j.at("question").get<std::string>();
  r.answer = j.at("answer").get<std::string>();
  r.index = j.at("index").get<int>();
  return r;
}

json quarantine_json(const QuarantineEntry& q) {
  return json{{"clip_id", q.clip_id}, {"step", q.step}, {"error", q.error}, {"raw_responses", q.raw_responses}};
}

ClipGeneration generate_for_clip(const FusedClip& fused, const CompletionFn& complete) {
  ClipGeneration out;
  const std::string clip_id = clip_id_of(fused.clip);
  QARecord base;
  base.clip_id = clip_id;
  base.match_id = match_of(fused.clip).key();
  base.media_path = media_path_of(fused);

  auto quarantine = [&](std::string step, StepFailure f) {
    out.records.clear();
    out.quarantine = QuarantineEntry{clip_id, std::move(step), std::move(f.error), std::move(f.raw)};
    return out;
  };

  auto ld = run_step(build_long_description_prompt(fused), ExpectedShape::One, complete);
  if (auto* f = std::get_if<StepFailure>(&ld)) return quarantine("long_description", std::move(*f));
  const auto& ld_part = std::get<std::vector<QaPart>>(ld).front();
  QARecord ld_rec = base;
  ld_rec.kind = QaKind::LongDescription;
  ld_rec.question = ld_part.question;
  ld_rec.answer = ld_part.answer;
  out.records.push_back(ld_rec);

  if (is_paired_event(fused.clip)) {
    auto detail = run_step(build_detail_qa_prompt(ld_part.answer, describe_event_info(fused)), ExpectedShape::Three,
                           complete);
    if (auto* f = std::get_if<StepFailure>(&detail)) return quarantine("detail_qa", std::move(*f));
    int index = 1;
    for (const auto& part : std::get<std::vector<QaPart>>(detail)) {
      QARecord r = base;
      r.kind = QaKind::DetailQA;
      r.question = part.question;
      r.answer = part.answer;
      r.index = index++;
      out.records.push_back(std::move(r));
    }
  } else {
    auto overview = run_step(build_overview_qa_prompt(ld_part.answer), ExpectedShape::One, complete);
    if (auto* f = std::get_if<StepFailure>(&overview)) return quarantine("overview_qa", std::move(*f));
    const auto& part = std::get<std::vector<QaPart>>(overview).front();
    QARecord r = base;
    r.kind = QaKind::OverviewQA;
    r.question = part.question;
    r.answer = part.answer;
    out.records.push_back(std::move(r));
  }
  return out;
}

std::vector<ClipGeneration> generate_dataset(std::span<const FusedClip> clips, const CompletionFn& complete,
                                             int workers) {
  std::vector<ClipGeneration> results(clips.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < clips.size(); i = next++) results[i] = generate_for_clip(clips[i], complete);
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(clips.size())));
  {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace soccerforge
