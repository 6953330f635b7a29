#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace soccerforge {

struct ProcessResult {
  int exit_code = -1;  // negative signal number when killed by a signal
  std::string out;
  std::string err;
};

class ToolMissing : public std::runtime_error {
 public:
  explicit ToolMissing(const std::string& tool)
      : std::runtime_error("external tool not found: " + tool), tool_(tool) {}
  const std::string& tool() const { return tool_; }

 private:
  std::string tool_;
};

// Runs argv[0] (resolved through PATH) and captures stdout/stderr.
// Throws ToolMissing when the executable cannot be found.
ProcessResult run_process(const std::vector<std::string>& argv);

// True when `tool` is an executable path or resolves through PATH.
bool tool_available(const std::string& tool);

}  // namespace soccerforge
