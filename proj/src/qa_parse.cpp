#include <fmt/format.h>

#include "soccerforge/pseudo_json.hpp"
#include "soccerforge/qa_factory.hpp"

namespace soccerforge {

std::vector<QaPart> parse_qa_response(std::string_view raw, ExpectedShape expected) {
  json obj;
  try {
    obj = parse_pseudo_json(raw);
  } catch (const PseudoJsonError& e) {
    throw UnparseableResponse(e.what(), std::string(raw));
  }
  if (!obj.is_object()) throw UnparseableResponse("response is not an object", std::string(raw));

  std::vector<std::pair<std::string, std::string>> keys;
  if (expected == ExpectedShape::One) {
    keys.emplace_back("Q", "A");
  } else {
    for (int i = 1; i <= 3; ++i) keys.emplace_back(fmt::format("Q{}", i), fmt::format("A{}", i));
  }

  std::vector<std::string> problems;
  for (const auto& [q, a] : keys) {
    for (const auto& k : {q, a}) {
      if (!obj.contains(k)) {
        problems.push_back("missing " + k);
      } else if (!obj[k].is_string() || obj[k].get_ref<const std::string&>().empty()) {
        problems.push_back("empty or non-string " + k);
      }
    }
  }
  if (obj.size() != keys.size() * 2) {
    for (const auto& [k, v] : obj.items()) {
      bool known = false;
      for (const auto& [q, a] : keys) known = known || k == q || k == a;
      if (!known) problems.push_back("unexpected key " + k);
    }
  }
  if (!problems.empty()) {
    std::string msg = "wrong response shape:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw WrongShape(msg, std::string(raw));
  }

  std::vector<QaPart> parts;
  for (const auto& [q, a] : keys) parts.push_back({obj[q].get<std::string>(), obj[a].get<std::string>()});
  return parts;
}

}  // namespace soccerforge
