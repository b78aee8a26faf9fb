#include "molecuforge/session.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "molecuforge/construction.hpp"
#include "molecuforge/error.hpp"
#include "molecuforge/geometry.hpp"
#include "molecuforge/persistence.hpp"

namespace molecuforge {

namespace {

[[noreturn]] void bad_args(const std::string& msg) { throw Error(ErrorCode::BadArguments, msg); }

const json& require(const json& args, const char* key) {
    auto it = args.find(key);
    if (it == args.end()) bad_args(std::string("missing argument '") + key + "'");
    return *it;
}

double number(const json& args, const char* key) {
    const json& v = require(args, key);
    if (!v.is_number()) bad_args(std::string("argument '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad_args(std::string("argument '") + key + "' must be finite");
    return d;
}

std::int64_t as_integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) bad_args("argument '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::int64_t integer(const json& args, const char* key) { return as_integer(require(args, key), key); }

std::string text(const json& args, const char* key) {
    const json& v = require(args, key);
    if (!v.is_string()) bad_args(std::string("argument '") + key + "' must be a string");
    return v.get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> vector_arg(const json& args, const char* key, const Eigen::Matrix<double, N, 1>& fallback) {
    auto it = args.find(key);
    if (it == args.end()) return fallback;
    if (!it->is_array() || it->size() != N) {
        bad_args(std::string("argument '") + key + "' must be an array of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) {
        if (!(*it)[i].is_number()) bad_args(std::string("argument '") + key + "' must contain numbers");
        out[i] = (*it)[i].get<double>();
        if (!std::isfinite(out[i])) bad_args(std::string("argument '") + key + "' must be finite");
    }
    return out;
}

Vec3 position_arg(const json& args) { return Vec3(number(args, "x"), number(args, "y"), number(args, "z")); }

json slot_json(const SlotRef& s) { return {{"atom", s.atom_id}, {"slot", s.slot_index}}; }

json readout_json(const std::vector<AngleReading>& readout) {
    json out = json::array();
    for (const auto& r : readout) out.push_back({{"a", r.a}, {"b", r.b}, {"degrees", r.degrees}});
    return out;
}

json list_json(const Workspace& ws) {
    json atoms = json::array();
    for (const auto& [id, a] : ws.atoms) {
        atoms.push_back({{"id", id},
                         {"element", std::string(a.element->symbol)},
                         {"position", {a.position.x(), a.position.y(), a.position.z()}},
                         {"orientation", {a.orientation.w(), a.orientation.x(), a.orientation.y(), a.orientation.z()}},
                         {"free_slots", a.free_slots()}});
    }
    json bonds = json::array();
    for (const auto& [id, b] : ws.bonds) {
        const double len = (ws.atom(b.ends[1].atom_id).position - ws.atom(b.ends[0].atom_id).position).norm();
        bonds.push_back({{"id", id}, {"a", b.ends[0].atom_id}, {"b", b.ends[1].atom_id}, {"length", len},
                         {"rest", b.rest_length}});
    }
    json grab = nullptr;
    if (ws.grab) {
        grab = {{"atom", ws.grab->held_atom},
                {"mode", ws.grab->mode == GrabMode::molecule ? "molecule" : "single_atom"},
                {"candidate", ws.grab->candidate ? to_json(*ws.grab->candidate) : json(nullptr)}};
    }
    return {{"atoms", atoms},
            {"bonds", bonds},
            {"anchor", ws.anchor ? json(*ws.anchor) : json(nullptr)},
            {"grab", grab}};
}

json event(const char* name, json payload) { return {{"event", name}, {"payload", std::move(payload)}}; }

bool same_pair(const SnapCandidate& a, const SnapCandidate& b) {
    return a.held_slot == b.held_slot && a.target_slot == b.target_slot;
}

bool is_read_only(const std::string& cmd) {
    static const std::set<std::string> kReadOnly{"energy", "validate", "save", "export_xyz", "snapshot", "list"};
    return kReadOnly.contains(cmd);
}

}  // namespace

json to_json(const SnapCandidate& c) {
    return {{"held", slot_json(c.held_slot)}, {"target", slot_json(c.target_slot)}, {"distance", c.distance}};
}

json to_json(const RelaxReport& r, bool with_trace) {
    json out = {{"iterations", r.iterations},
                {"initial_energy", r.initial_energy},
                {"final_energy", r.final_energy},
                {"final_gradient_norm", r.final_gradient_norm},
                {"converged", r.converged}};
    if (with_trace) out["energy_trace"] = r.energy_trace;
    return out;
}

std::string to_line(const json& message) { return message.dump(-1, ' ', false, json::error_handler_t::replace); }

Session::Session(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

std::filesystem::path Session::resolve(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.is_relative() && !base_dir_.empty()) return base_dir_ / p;
    return p;
}

void Session::track_candidate(std::vector<json>& events) {
    const std::optional<SnapCandidate> current = ws_.grab ? ws_.grab->candidate : std::nullopt;
    if (current && (!last_candidate_ || !same_pair(*current, *last_candidate_))) {
        events.push_back(event("snap_candidate", to_json(*current)));
    } else if (!current && last_candidate_) {
        events.push_back(event("snap_cleared", json::object()));
    }
    last_candidate_ = current;
}

Outcome Session::execute_line(std::string_view line) {
    json request;
    try {
        request = json::parse(line);
    } catch (const json::parse_error& e) {
        Outcome out;
        out.response = {{"id", nullptr},
                        {"ok", false},
                        {"error", {{"code", "ParseError"}, {"message", std::string("malformed request: ") + e.what()}}}};
        return out;
    }
    return execute(request);
}

Outcome Session::execute(const json& request) {
    Outcome out;
    json id = nullptr;
    try {
        if (!request.is_object()) bad_args("request must be an object");
        if (auto it = request.find("id"); it != request.end()) {
            if (!it->is_number_integer() && !it->is_null()) bad_args("request id must be an integer");
            id = *it;
        }
        const std::string cmd = text(request, "cmd");
        json args = json::object();
        if (auto it = request.find("args"); it != request.end()) {
            if (!it->is_object()) bad_args("'args' must be an object");
            args = *it;
        }

        std::optional<Workspace> backup;
        if (!is_read_only(cmd)) backup = ws_;
        const auto candidate_backup = last_candidate_;
        std::vector<json> events;
        try {
            json result = dispatch(cmd, args, events, out.close);
            out.response = {{"id", id}, {"ok", true}, {"result", std::move(result)}};
            out.events = std::move(events);
        } catch (...) {
            if (backup) ws_ = std::move(*backup);
            last_candidate_ = candidate_backup;
            out.close = false;
            throw;
        }
    } catch (const Error& e) {
        out.response = {{"id", id},
                        {"ok", false},
                        {"error", {{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}}}};
    } catch (const json::exception& e) {
        out.response = {{"id", id}, {"ok", false}, {"error", {{"code", "BadArguments"}, {"message", e.what()}}}};
    }
    return out;
}

json Session::dispatch(const std::string& cmd, const json& args, std::vector<json>& events, bool& close) {
    using Handler = std::function<json()>;
    const std::map<std::string, Handler> table{
        {"create_atom",
         [&] { return json{{"atom", create_atom(ws_, text(args, "element"), position_arg(args))}}; }},
        {"delete_atom",
         [&] {
             const bool was_anchor = ws_.anchor.has_value();
             json removed = delete_atom(ws_, integer(args, "atom"));
             if (was_anchor && !ws_.anchor) events.push_back(event("anchor_changed", {{"atom", nullptr}}));
             return json{{"removed_bonds", removed}};
         }},
        {"grab",
         [&] {
             const GrabState& g = grab(ws_, integer(args, "atom"));
             return json{{"atom", g.held_atom},
                         {"mode", g.mode == GrabMode::molecule ? "molecule" : "single_atom"},
                         {"candidate", g.candidate ? to_json(*g.candidate) : json(nullptr)}};
         }},
        {"drag",
         [&] {
             auto c = drag(ws_, position_arg(args));
             return json{{"candidate", c ? to_json(*c) : json(nullptr)}};
         }},
        {"release",
         [&] {
             ReleaseResult r = release(ws_, params_);
             json out{{"bond", r.bond ? json(*r.bond) : json(nullptr)}};
             if (r.relax) {
                 out["relax"] = to_json(*r.relax);
                 events.push_back(event("relax_done", to_json(*r.relax)));
             }
             return out;
         }},
        {"form_bond", [&] { return json{{"bond", form_bond(ws_, integer(args, "a"), integer(args, "b"))}}; }},
        {"set_anchor",
         [&] {
             const json& a = require(args, "atom");
             std::optional<AtomId> target;
             if (!a.is_null()) target = as_integer(a, "atom");
             auto readout = set_anchor(ws_, target);
             events.push_back(event("anchor_changed", {{"atom", a}}));
             return json{{"anchor", a}, {"angles", readout_json(readout)}};
         }},
        {"rotate_about_bond",
         [&] {
             const bool deg = args.contains("degrees");
             if (deg == args.contains("radians")) bad_args("give exactly one of 'degrees' or 'radians'");
             const double angle = deg ? to_radians(number(args, "degrees")) : number(args, "radians");
             return json{{"moved", rotate_about_bond(ws_, integer(args, "bond"), integer(args, "moving"), angle)}};
         }},
        {"move_molecule",
         [&] {
             const AtomId atom = integer(args, "atom");
             const Vec3 translation = vector_arg<3>(args, "translation", Vec3::Zero());
             const Eigen::Vector4d q = vector_arg<4>(args, "rotation", Eigen::Vector4d(1, 0, 0, 0));
             const Vec3 pivot = vector_arg<3>(args, "pivot", ws_.atom(atom).position);
             return json{{"moved", move_molecule(ws_, atom, translation, Quat(q[0], q[1], q[2], q[3]), pivot)}};
         }},
        {"relax",
         [&] {
             ForceFieldParams p = params_;
             if (args.contains("k_bond")) p.k_bond = number(args, "k_bond");
             if (args.contains("k_angle")) p.k_angle = number(args, "k_angle");
             if (args.contains("gradient_tolerance")) p.gradient_tolerance = number(args, "gradient_tolerance");
             if (args.contains("max_iterations")) p.max_iterations = static_cast<int>(integer(args, "max_iterations"));
             std::set<AtomId> fixed;
             if (args.contains("fixed")) {
                 const json& f = args.at("fixed");
                 if (!f.is_array()) bad_args("argument 'fixed' must be an array of atom ids");
                 for (const auto& v : f) fixed.insert(as_integer(v, "fixed"));
             }
             if (ws_.anchor) fixed.insert(*ws_.anchor);
             const bool trace = args.value("trace", false);
             RelaxReport r = relax(ws_, p, fixed);
             events.push_back(event("relax_done", to_json(r)));
             return to_json(r, trace);
         }},
        {"energy", [&] { return json{{"energy", energy(ws_, params_)}}; }},
        {"validate",
         [&] {
             json v = json::array();
             for (const auto& x : validate(ws_)) v.push_back({{"entity", x.entity}, {"rule", x.rule}});
             return json{{"violations", v}};
         }},
        {"save",
         [&] {
             const auto path = resolve(text(args, "path"));
             const std::string doc = save_xml(ws_);
             write_file(path, doc);
             return json{{"path", path.string()}, {"bytes", doc.size()}};
         }},
        {"load",
         [&] {
             Workspace loaded = load_xml(read_file(resolve(text(args, "path"))));
             if (ws_.anchor) events.push_back(event("anchor_changed", {{"atom", nullptr}}));
             ws_ = std::move(loaded);
             return json{{"atoms", ws_.atoms.size()}, {"bonds", ws_.bonds.size()}};
         }},
        {"export_xyz",
         [&] {
             const std::string xyz = export_xyz(ws_);
             if (!args.contains("path")) return json{{"xyz", xyz}};
             const auto path = resolve(text(args, "path"));
             write_file(path, xyz);
             return json{{"path", path.string()}, {"bytes", xyz.size()}};
         }},
        {"snapshot", [&] { return json{{"xml", save_xml(ws_)}}; }},
        {"list", [&] { return list_json(ws_); }},
        {"shutdown",
         [&] {
             close = true;
             return json::object();
         }},
    };

    auto it = table.find(cmd);
    if (it == table.end()) throw Error(ErrorCode::UnknownCommand, "unknown command '" + cmd + "'");
    json result = it->second();
    track_candidate(events);
    return result;
}

}  // namespace molecuforge
