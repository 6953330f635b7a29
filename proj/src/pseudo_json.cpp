#include "soccerforge/pseudo_json.hpp"

#include <cctype>

#include <fmt/format.h>

namespace soccerforge {
namespace {

std::string_view fenced_body(std::string_view text) {
  auto open = text.find("```");
  if (open == std::string_view::npos) return text;
  auto body_start = open + 3;
  auto close = text.find("```", body_start);
  auto body = text.substr(body_start, close == std::string_view::npos ? std::string_view::npos : close - body_start);
  // Only trust the fence if it actually holds an object.
  return body.find('{') == std::string_view::npos ? text : body;
}

bool closes_string(std::string_view text, std::size_t quote_pos) {
  for (std::size_t k = quote_pos + 1; k < text.size(); ++k) {
    char c = text[k];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    return c == ':' || c == ',' || c == '}' || c == ']';
  }
  return true;
}

void append_escaped_control(std::string& out, char c) {
  switch (c) {
    case '\n': out += "\\n"; break;
    case '\r': out += "\\r"; break;
    case '\t': out += "\\t"; break;
    case '\b': out += "\\b"; break;
    case '\f': out += "\\f"; break;
    default: out += fmt::format("\\u{:04x}", static_cast<unsigned char>(c));
  }
}

void drop_trailing_comma(std::string& out) {
  auto k = out.find_last_not_of(" \t\r\n");
  if (k != std::string::npos && out[k] == ',') out.erase(k, 1);
}

}  // namespace

std::string repair_pseudo_json(std::string_view text) {
  auto body = fenced_body(text);
  auto start = body.find('{');
  if (start == std::string_view::npos) throw PseudoJsonError("no '{' in response");

  std::string out;
  out.reserve(body.size() - start + 16);
  int depth = 0;
  std::size_t i = start;
  while (i < body.size()) {
    char c = body[i];
    if (c == '"' || c == '\'') {
      const char quote = c;
      out.push_back('"');
      ++i;
      bool closed = false;
      while (i < body.size()) {
        char s = body[i];
        if (s == '\\' && i + 1 < body.size()) {
          char next = body[i + 1];
          if (next == '\'') {
            out.push_back('\'');
          } else {
            out.push_back('\\');
            out.push_back(next);
          }
          i += 2;
          continue;
        }
        if (s == quote && closes_string(body, i)) {
          out.push_back('"');
          ++i;
          closed = true;
          break;
        }
        if (s == '"') {
          out += "\\\"";
        } else if (static_cast<unsigned char>(s) < 0x20) {
          append_escaped_control(out, s);
        } else {
          out.push_back(s);
        }
        ++i;
      }
      if (!closed) throw PseudoJsonError("unterminated string");
      continue;
    }
    if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      drop_trailing_comma(out);
      --depth;
      out.push_back(c);
      ++i;
      if (depth == 0) return out;
      continue;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < body.size() && (std::isalnum(static_cast<unsigned char>(body[j])) || body[j] == '_')) ++j;
      auto word = body.substr(i, j - i);
      if (word == "True") {
        out += "true";
      } else if (word == "False") {
        out += "false";
      } else if (word == "None") {
        out += "null";
      } else {
        out += word;
      }
      i = j;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  throw PseudoJsonError("unbalanced braces");
}

nlohmann::json parse_pseudo_json(std::string_view text) {
  auto repaired = repair_pseudo_json(text);
  try {
    return nlohmann::json::parse(repaired);
  } catch (const nlohmann::json::parse_error& e) {
    throw PseudoJsonError(std::string("repaired text is not JSON: ") + e.what());
  }
}

}  // namespace soccerforge
