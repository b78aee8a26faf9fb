#include "molecuforge/script.hpp"

#include <sstream>

#include "molecuforge/error.hpp"
#include "molecuforge/persistence.hpp"

namespace molecuforge {

namespace {

const char* status_name(LineStatus s) {
    switch (s) {
        case LineStatus::ok: return "ok";
        case LineStatus::expected_error: return "expected_error";
        case LineStatus::failed: return "failed";
    }
    return "failed";
}

}  // namespace

ScriptReport run_script_text(Session& session, std::string_view text) {
    ScriptReport report;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    std::int64_t next_id = 1;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos || raw[first] == '#') continue;

        ScriptLine entry;
        entry.line = line_no;
        json request;
        std::string expected;
        try {
            request = json::parse(raw);
        } catch (const json::parse_error& e) {
            entry.status = LineStatus::failed;
            entry.error_code = "ParseError";
            entry.message = e.what();
            report.lines.push_back(std::move(entry));
            report.success = false;
            break;
        }
        if (request.is_object()) {
            if (auto it = request.find("expect_error"); it != request.end()) {
                if (it->is_string()) expected = it->get<std::string>();
                request.erase("expect_error");
            }
            entry.cmd = request.value("cmd", "");
            request["id"] = next_id;
        }
        ++next_id;

        Outcome outcome = session.execute(request);
        entry.response = outcome.response;
        if (outcome.ok()) {
            if (expected.empty()) {
                entry.status = LineStatus::ok;
            } else {
                entry.status = LineStatus::failed;
                entry.message = "expected " + expected + " but the command succeeded";
            }
        } else {
            entry.error_code = outcome.response["error"]["code"].get<std::string>();
            entry.message = outcome.response["error"]["message"].get<std::string>();
            entry.status = entry.error_code == expected ? LineStatus::expected_error : LineStatus::failed;
        }
        const bool stop = entry.status == LineStatus::failed || outcome.close;
        if (entry.status == LineStatus::failed) report.success = false;
        report.lines.push_back(std::move(entry));
        if (stop) break;
    }
    report.violations = validate(session.workspace());
    if (!report.violations.empty()) report.success = false;
    try {
        report.final_snapshot = save_xml(session.workspace());
    } catch (const Error&) {
        report.final_snapshot.clear();
    }
    return report;
}

ScriptReport run_script(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    Session session(path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
    return run_script_text(session, text);
}

json to_json(const ScriptReport& report) {
    json lines = json::array();
    for (const auto& l : report.lines) {
        json entry{{"line", l.line}, {"cmd", l.cmd}, {"status", status_name(l.status)}};
        if (!l.error_code.empty()) entry["code"] = l.error_code;
        if (!l.message.empty()) entry["message"] = l.message;
        if (l.response.contains("result")) entry["result"] = l.response.at("result");
        lines.push_back(std::move(entry));
    }
    json violations = json::array();
    for (const auto& v : report.violations) violations.push_back({{"entity", v.entity}, {"rule", v.rule}});
    return {{"lines", lines}, {"violations", violations}, {"success", report.success}};
}

}  // namespace molecuforge
