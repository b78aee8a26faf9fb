#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "molecuforge/session.hpp"

namespace molecuforge {

enum class LineStatus { ok, expected_error, failed };

struct ScriptLine {
    int line = 0;  // 1-based line number in the file
    std::string cmd;
    LineStatus status = LineStatus::ok;
    std::string error_code;  // empty when the command succeeded
    std::string message;
    json response;
};

struct ScriptReport {
    std::vector<ScriptLine> lines;
    std::vector<Violation> violations;  // validate() of the final workspace
    bool success = true;
    std::string final_snapshot;  // XML of the final workspace
};

/// Runs one request per line (no ids; assigned 1, 2, ...). Blank lines and
/// lines starting with '#' are skipped. A line may carry "expect_error":
/// "<Code>" to assert that it fails with that code. Execution stops at the
/// first unexpected outcome. Throws FileNotFound.
ScriptReport run_script(const std::filesystem::path& path);

/// Same, over an existing session and already-read text.
ScriptReport run_script_text(Session& session, std::string_view text);

json to_json(const ScriptReport& report);

}  // namespace molecuforge
