#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "soccerforge/annotations.hpp"
#include "soccerforge/process.hpp"

namespace soccerforge {

inline constexpr int kFramesPerClip = 24;
inline constexpr int kMaxVisualTokens = 128;

struct TokenBudget {
  int grid_w = 1;
  int grid_h = 1;
  int tokens_per_frame = 1;
  int frames = kFramesPerClip;
  int total_tokens = kFramesPerClip;

  bool operator==(const TokenBudget&) const = default;
};

/// Patch grid for one frame: with r = long/short side ratio,
/// short = floor(sqrt(max_tokens / r)), long = floor(short * r), both >= 1,
/// oriented like the input. Evaluated in exact integer arithmetic.
TokenBudget patch_grid(int aspect_w, int aspect_h, int max_tokens = kMaxVisualTokens);

struct FramePlan {
  TimeSpan span;
  std::vector<std::int64_t> frame_times_ms;
  double effective_fps = 0.0;
};

class DegenerateSpan : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// 24 midpoint samples start + (i + 0.5) * duration / 24, rounded half-to-even
/// to whole ms. Throws DegenerateSpan when they are not distinct and inside the span.
FramePlan plan_frames(const TimeSpan& span);

/// "Shots off target" -> "Shotsofftarget".
std::string label_no_spaces(std::string_view label);

/// "<clip_id>_<Label>.mp4", or "<clip_id>_<Label1>--<Label2>.mp4" for two labels.
std::string clip_media_name(std::string_view clip_id, std::span<const std::string> labels);

struct MediaToolConfig {
  std::string tool = "ffmpeg";
  std::string probe = "ffprobe";
  std::vector<std::string> encoder_args{"-c:v", "libx264", "-preset", "veryfast", "-crf", "23", "-c:a", "aac"};
  std::vector<std::string> extra_args;
  std::int64_t tolerance_ms = 120;
  int workers = 2;
};

struct CutResult {
  int exit_status = 0;
  double output_duration_s = 0.0;
  std::filesystem::path out_path;
};

class NonzeroExit : public std::runtime_error {
 public:
  NonzeroExit(int status, std::string stderr_text)
      : std::runtime_error("media tool exited with status " + std::to_string(status) + ": " + stderr_text),
        status_(status),
        stderr_(std::move(stderr_text)) {}
  int status() const { return status_; }
  const std::string& stderr_text() const { return stderr_; }

 private:
  int status_;
  std::string stderr_;
};

class DurationMismatch : public std::runtime_error {
 public:
  DurationMismatch(double requested_s, double actual_s)
      : std::runtime_error("clip duration " + std::to_string(actual_s) + " s, requested " +
                           std::to_string(requested_s) + " s"),
        requested_(requested_s),
        actual_(actual_s) {}
  double requested_s() const { return requested_; }
  double actual_s() const { return actual_; }

 private:
  double requested_;
  double actual_;
};

/// Argument vector for one cut: output-side -ss (decode-accurate seek),
/// -t duration, re-encode settings.
std::vector<std::string> cut_command(const std::filesystem::path& video, const TimeSpan& span,
                                     const std::filesystem::path& out, const MediaToolConfig& cfg);

/// Runs the cut, probes the result, checks the duration tolerance.
/// Throws ToolMissing, NonzeroExit or DurationMismatch.
CutResult cut_clip(const std::filesystem::path& video, const TimeSpan& span, const std::filesystem::path& out,
                   const MediaToolConfig& cfg);

struct CutJob {
  std::string clip_id;
  std::filesystem::path video;
  TimeSpan span;
  std::filesystem::path out;
};

struct CutOutcome {
  std::string clip_id;
  std::optional<CutResult> result;
  std::string error;
};

/// Runs independent cuts on a bounded pool of cfg.workers threads; outcomes
/// keep job order.
std::vector<CutOutcome> cut_all(std::span<const CutJob> jobs, const MediaToolConfig& cfg);

}  // namespace soccerforge
