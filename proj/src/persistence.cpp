#include "molecuforge/persistence.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "molecuforge/error.hpp"

namespace molecuforge {

namespace {

namespace pt = boost::property_tree;

std::string fmt_real(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string attr(std::string_view name, const std::string& value) {
    return std::string(" ") + std::string(name) + "=\"" + value + "\"";
}

[[noreturn]] void schema_error(const std::string& msg) { throw Error(ErrorCode::SchemaError, msg); }
[[noreturn]] void consistency_error(const std::string& msg) { throw Error(ErrorCode::ConsistencyError, msg); }

/// Attribute map of an element; rejects text content, child elements and
/// any attribute outside `allowed`. All allowed attributes are required.
std::map<std::string, std::string> attributes(const pt::ptree& node, const std::string& tag,
                                              std::initializer_list<std::string_view> allowed) {
    std::map<std::string, std::string> out;
    for (const auto& [key, child] : node) {
        if (key != "<xmlattr>") schema_error("<" + tag + "> must not contain <" + key + ">");
        for (const auto& [name, value] : child) {
            if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
                schema_error("<" + tag + "> has unexpected attribute '" + name + "'");
            }
            out[name] = value.data();
        }
    }
    if (!node.data().empty()) schema_error("<" + tag + "> must not contain text");
    for (auto name : allowed) {
        if (!out.contains(std::string(name))) schema_error("<" + tag + "> is missing attribute '" + std::string(name) + "'");
    }
    return out;
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) schema_error(what + " is not an integer: '" + text + "'");
    return v;
}

double parse_real(const std::string& text, const std::string& what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        schema_error(what + " is not a finite number: '" + text + "'");
    }
    return v;
}

}  // namespace

std::string save_xml(const Workspace& ws) {
    if (auto violations = validate(ws); !violations.empty()) {
        throw Error(ErrorCode::InvalidWorkspace,
                    "workspace is invalid: " + violations.front().entity + ": " + violations.front().rule);
    }
    std::string out;
    out += "<" + std::string(kFormatName) + attr("version", std::to_string(kFormatVersion)) + ">\n";
    out += "  <atoms>\n";
    for (const auto& [id, a] : ws.atoms) {
        out += "    <atom" + attr("id", std::to_string(id)) + attr("element", std::string(a.element->symbol)) +
               attr("x", fmt_real(a.position.x())) + attr("y", fmt_real(a.position.y())) +
               attr("z", fmt_real(a.position.z())) + attr("qw", fmt_real(a.orientation.w())) +
               attr("qx", fmt_real(a.orientation.x())) + attr("qy", fmt_real(a.orientation.y())) +
               attr("qz", fmt_real(a.orientation.z())) + "/>\n";
    }
    out += "  </atoms>\n";
    out += "  <bonds>\n";
    for (const auto& [id, b] : ws.bonds) {
        out += "    <bond" + attr("id", std::to_string(id)) + attr("a", std::to_string(b.ends[0].atom_id)) +
               attr("slotA", std::to_string(b.ends[0].slot_index)) + attr("b", std::to_string(b.ends[1].atom_id)) +
               attr("slotB", std::to_string(b.ends[1].slot_index)) + attr("rest", fmt_real(b.rest_length)) + "/>\n";
    }
    out += "  </bonds>\n";
    out += "</" + std::string(kFormatName) + ">\n";
    return out;
}

Workspace load_xml(std::string_view document) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(document)};
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed XML: ") + e.what());
    }

    if (tree.size() != 1 || tree.front().first != kFormatName) {
        schema_error("document root must be a single <" + std::string(kFormatName) + "> element");
    }
    const pt::ptree& root = tree.front().second;
    if (!root.data().empty()) schema_error("root element must not contain text");

    const pt::ptree* atoms_node = nullptr;
    const pt::ptree* bonds_node = nullptr;
    bool have_version = false;
    for (const auto& [key, child] : root) {
        if (key == "<xmlattr>") {
            for (const auto& [name, value] : child) {
                if (name != "version") schema_error("root has unexpected attribute '" + name + "'");
                if (parse_int(value.data(), "version") != kFormatVersion) {
                    schema_error("unsupported version '" + value.data() + "'");
                }
                have_version = true;
            }
        } else if (key == "atoms" && !atoms_node) {
            atoms_node = &child;
        } else if (key == "bonds" && !bonds_node) {
            bonds_node = &child;
        } else {
            schema_error("unexpected or repeated element <" + key + ">");
        }
    }
    if (!have_version) schema_error("root is missing attribute 'version'");
    if (!atoms_node || !bonds_node) schema_error("document needs both <atoms> and <bonds>");
    if (!atoms_node->data().empty() || !bonds_node->data().empty()) schema_error("list elements must not contain text");

    Workspace ws;
    AtomId max_atom = 0;
    for (const auto& [key, node] : *atoms_node) {
        if (key != "atom") schema_error("<atoms> may only contain <atom>, found <" + key + ">");
        auto a = attributes(node, "atom", {"id", "element", "x", "y", "z", "qw", "qx", "qy", "qz"});
        const AtomId id = parse_int(a["id"], "atom id");
        if (id <= 0) consistency_error("atom id " + std::to_string(id) + " is not positive");
        if (ws.atoms.contains(id)) consistency_error("duplicate atom id " + std::to_string(id));
        const ElementSpec* element = nullptr;
        try {
            element = &element_spec(a["element"]);
        } catch (const Error&) {
            schema_error("unknown element '" + a["element"] + "'");
        }
        const Vec3 pos(parse_real(a["x"], "x"), parse_real(a["y"], "y"), parse_real(a["z"], "z"));
        Quat q(parse_real(a["qw"], "qw"), parse_real(a["qx"], "qx"), parse_real(a["qy"], "qy"),
               parse_real(a["qz"], "qz"));
        const double n = q.norm();
        if (std::abs(n - 1.0) > 1e-6) consistency_error("atom " + std::to_string(id) + " orientation is not unit length");
        // Hand-written files may carry short decimals; our own output is always within 1e-9.
        if (std::abs(n - 1.0) > 1e-9) q.normalize();
        Atom atom = make_atom(id, *element, pos);
        atom.orientation = q;
        ws.atoms.emplace(id, std::move(atom));
        max_atom = std::max(max_atom, id);
    }

    BondId max_bond = 0;
    std::set<std::pair<AtomId, AtomId>> pairs;
    for (const auto& [key, node] : *bonds_node) {
        if (key != "bond") schema_error("<bonds> may only contain <bond>, found <" + key + ">");
        auto b = attributes(node, "bond", {"id", "a", "slotA", "b", "slotB", "rest"});
        Bond bond;
        bond.id = parse_int(b["id"], "bond id");
        const std::string name = "bond " + std::to_string(bond.id);
        if (bond.id <= 0) consistency_error(name + " id is not positive");
        if (ws.bonds.contains(bond.id)) consistency_error("duplicate " + name);
        bond.ends = {SlotRef{parse_int(b["a"], "a"), static_cast<int>(parse_int(b["slotA"], "slotA"))},
                     SlotRef{parse_int(b["b"], "b"), static_cast<int>(parse_int(b["slotB"], "slotB"))}};
        bond.rest_length = parse_real(b["rest"], "rest");
        if (!(bond.rest_length > 0.0)) consistency_error(name + " rest length is not positive");
        if (bond.ends[0].atom_id == bond.ends[1].atom_id) consistency_error(name + " is a self-loop");
        auto key_pair = std::minmax(bond.ends[0].atom_id, bond.ends[1].atom_id);
        if (!pairs.insert({key_pair.first, key_pair.second}).second) consistency_error(name + " duplicates an atom pair");
        for (const auto& end : bond.ends) {
            auto it = ws.atoms.find(end.atom_id);
            if (it == ws.atoms.end()) consistency_error(name + " references missing atom " + std::to_string(end.atom_id));
            auto& slots = it->second.slots;
            if (end.slot_index < 0 || end.slot_index >= static_cast<int>(slots.size())) {
                consistency_error(name + " uses slot " + std::to_string(end.slot_index) + " beyond the valency of atom " +
                                  std::to_string(end.atom_id));
            }
            if (slots[end.slot_index].occupied_by) {
                consistency_error(name + " reuses occupied slot " + std::to_string(end.slot_index) + " of atom " +
                                  std::to_string(end.atom_id));
            }
            slots[end.slot_index].occupied_by = bond.id;
        }
        ws.bonds.emplace(bond.id, bond);
        max_bond = std::max(max_bond, bond.id);
    }
    ws.next_atom_id = max_atom + 1;
    ws.next_bond_id = max_bond + 1;

    if (auto violations = validate(ws); !violations.empty()) {
        consistency_error(violations.front().entity + ": " + violations.front().rule);
    }
    return ws;
}

std::string export_xyz(const Workspace& ws) {
    std::string out = std::to_string(ws.atoms.size()) + "\nmolecusense export\n";
    char buf[128];
    for (const auto& [id, a] : ws.atoms) {
        std::snprintf(buf, sizeof buf, "%s %.6f %.6f %.6f\n", std::string(a.element->symbol).c_str(), a.position.x(),
                      a.position.y(), a.position.z());
        out += buf;
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorCode::FileNotFound, "no such file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace molecuforge
