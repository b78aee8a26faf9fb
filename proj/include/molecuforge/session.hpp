#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "molecuforge/relaxation.hpp"
#include "molecuforge/workspace.hpp"

namespace molecuforge {

using json = nlohmann::json;

/// What one request produced: the response object, unprompted events to
/// send after it, and whether the client asked to end the session.
struct Outcome {
    json response;
    std::vector<json> events;
    bool close = false;

    bool ok() const { return response.value("ok", false); }
};

/// One client's private workspace plus the command table that drives it.
/// Commands run strictly in call order; a failing command leaves the
/// workspace untouched.
class Session {
public:
    /// Relative file paths in save/load/export_xyz resolve against base_dir.
    explicit Session(std::filesystem::path base_dir = {});

    Outcome execute(const json& request);
    /// Parses one protocol line; malformed JSON yields a ParseError response.
    Outcome execute_line(std::string_view line);

    const Workspace& workspace() const { return ws_; }
    Workspace& workspace() { return ws_; }
    ForceFieldParams& params() { return params_; }

private:
    json dispatch(const std::string& cmd, const json& args, std::vector<json>& events, bool& close);
    void track_candidate(std::vector<json>& events);
    std::filesystem::path resolve(const std::string& path) const;

    Workspace ws_;
    ForceFieldParams params_;
    std::filesystem::path base_dir_;
    std::optional<SnapCandidate> last_candidate_;
};

json to_json(const SnapCandidate& c);
json to_json(const RelaxReport& r, bool with_trace = false);

/// Serializes one outgoing protocol object as a single line (no newline).
std::string to_line(const json& message);

}  // namespace molecuforge
