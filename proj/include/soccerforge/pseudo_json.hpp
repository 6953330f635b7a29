#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace soccerforge {

class PseudoJsonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Locates the first brace-delimited object (inside the first ``` fence when
/// one is present) and rewrites it as strict JSON:
///  - single-quoted strings become double-quoted, with embedded `"` escaped
///    and `\'` unescaped; other escapes are kept
///  - an unescaped quote only closes a string when the next non-blank
///    character is one of `: , } ]` (or input ends), so apostrophes survive
///  - raw control characters inside strings are escaped
///  - Python True/False/None become true/false/null; trailing commas dropped
/// Throws PseudoJsonError when no balanced object is found.
std::string repair_pseudo_json(std::string_view text);

/// repair_pseudo_json followed by a strict parse.
nlohmann::json parse_pseudo_json(std::string_view text);

}  // namespace soccerforge
