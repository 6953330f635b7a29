#include "soccerforge/media_budget.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include <fmt/format.h>

namespace soccerforge {

TokenBudget patch_grid(int aspect_w, int aspect_h, int max_tokens) {
  if (aspect_w < 1 || aspect_h < 1) throw std::invalid_argument("aspect sides must be >= 1");
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be >= 1");
  const bool landscape = aspect_w >= aspect_h;
  const std::int64_t long_side = landscape ? aspect_w : aspect_h;
  const std::int64_t short_side = landscape ? aspect_h : aspect_w;

  // Largest s with s^2 <= max_tokens / r, i.e. s^2 * long <= max_tokens * short.
  std::int64_t s = 0;
  while ((s + 1) * (s + 1) * long_side <= static_cast<std::int64_t>(max_tokens) * short_side) ++s;
  s = std::max<std::int64_t>(s, 1);
  std::int64_t l = std::max<std::int64_t>((s * long_side) / short_side, 1);
  // Ratios beyond max_tokens:1 would overflow the cap with s pinned at 1.
  l = std::min<std::int64_t>(l, max_tokens / s);

  TokenBudget b;
  b.grid_w = static_cast<int>(landscape ? l : s);
  b.grid_h = static_cast<int>(landscape ? s : l);
  b.tokens_per_frame = b.grid_w * b.grid_h;
  b.frames = kFramesPerClip;
  b.total_tokens = b.frames * b.tokens_per_frame;
  return b;
}

FramePlan plan_frames(const TimeSpan& span) {
  const std::int64_t d = span.duration();
  if (!span.valid() || d < kFramesPerClip) {
    throw DegenerateSpan(fmt::format("span of {} ms cannot hold {} distinct frame times", d, kFramesPerClip));
  }
  FramePlan plan;
  plan.span = span;
  plan.frame_times_ms.reserve(kFramesPerClip);
  constexpr std::int64_t den = 2 * kFramesPerClip;
  for (int i = 0; i < kFramesPerClip; ++i) {
    // (2i + 1) * d / 48, rounded half to even.
    const std::int64_t num = (2 * i + 1) * d;
    std::int64_t q = num / den;
    const std::int64_t rem = num % den;
    if (2 * rem > den || (2 * rem == den && (q % 2) == 1)) ++q;
    plan.frame_times_ms.push_back(span.start_ms + q);
  }
  for (std::size_t i = 0; i < plan.frame_times_ms.size(); ++i) {
    const auto t = plan.frame_times_ms[i];
    if (!span.contains(t) || (i > 0 && t <= plan.frame_times_ms[i - 1])) {
      throw DegenerateSpan(fmt::format("frame times collide in a {} ms span", d));
    }
  }
  plan.effective_fps = kFramesPerClip * 1000.0 / static_cast<double>(d);
  return plan;
}

std::string label_no_spaces(std::string_view label) {
  std::string out;
  for (char c : label) {
    if (c != ' ') out.push_back(c);
  }
  return out;
}

std::string clip_media_name(std::string_view clip_id, std::span<const std::string> labels) {
  std::string name(clip_id);
  name += '_';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) name += "--";
    name += label_no_spaces(labels[i]);
  }
  name += ".mp4";
  return name;
}

namespace {

std::string seconds(std::int64_t ms) { return fmt::format("{}.{:03d}", ms / 1000, ms % 1000); }

double probe_duration(const std::filesystem::path& out, const MediaToolConfig& cfg) {
  auto res = run_process({cfg.probe, "-v", "error", "-show_entries", "format=duration", "-of",
                          "default=noprint_wrappers=1:nokey=1", out.string()});
  if (res.exit_code != 0) throw NonzeroExit(res.exit_code, res.err);
  auto text = res.out;
  text.erase(std::remove_if(text.begin(), text.end(), [](char c) { return c == '\n' || c == '\r' || c == ' '; }),
             text.end());
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw NonzeroExit(res.exit_code, "unreadable probe output: " + res.out);
  }
}

}  // namespace

std::vector<std::string> cut_command(const std::filesystem::path& video, const TimeSpan& span,
                                     const std::filesystem::path& out, const MediaToolConfig& cfg) {
  std::vector<std::string> argv{cfg.tool, "-hide_banner", "-nostdin", "-y", "-i", video.string(),
                                "-ss",    seconds(span.start_ms), "-t", seconds(span.duration())};
  argv.insert(argv.end(), cfg.encoder_args.begin(), cfg.encoder_args.end());
  argv.insert(argv.end(), cfg.extra_args.begin(), cfg.extra_args.end());
  argv.push_back(out.string());
  return argv;
}

CutResult cut_clip(const std::filesystem::path& video, const TimeSpan& span, const std::filesystem::path& out,
                   const MediaToolConfig& cfg) {
  if (!span.valid()) throw std::invalid_argument("cut_clip: invalid span");
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  auto res = run_process(cut_command(video, span, out, cfg));
  if (res.exit_code != 0) throw NonzeroExit(res.exit_code, res.err);

  CutResult result;
  result.exit_status = res.exit_code;
  result.out_path = out;
  result.output_duration_s = probe_duration(out, cfg);
  const double requested = static_cast<double>(span.duration()) / 1000.0;
  if (std::abs(result.output_duration_s - requested) * 1000.0 > static_cast<double>(cfg.tolerance_ms)) {
    throw DurationMismatch(requested, result.output_duration_s);
  }
  return result;
}

std::vector<CutOutcome> cut_all(std::span<const CutJob> jobs, const MediaToolConfig& cfg) {
  std::vector<CutOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      outcomes[i].clip_id = job.clip_id;
      try {
        outcomes[i].result = cut_clip(job.video, job.span, job.out, cfg);
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  return outcomes;
}

}  // namespace soccerforge
