#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace soccerforge {

using json = nlohmann::json;

std::string read_text(const std::filesystem::path& path);

// Writes to a sibling temp file and renames over `path`; parent dirs are created.
void write_text(const std::filesystem::path& path, std::string_view content);

// One JSON value per non-blank line. Lines that hold only a {"manifest": ...}
// header are skipped unless keep_manifest is set.
std::vector<json> parse_jsonl(std::string_view text, bool keep_manifest = false);
std::vector<json> read_jsonl(const std::filesystem::path& path, bool keep_manifest = false);

bool is_manifest_line(const json& record);

// Canonical single-line rendering: sorted keys, no extra whitespace, trailing newline.
std::string to_jsonl(const std::vector<json>& records);

}  // namespace soccerforge
