#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "molecuforge/construction.hpp"
#include "molecuforge/error.hpp"
#include "molecuforge/geometry.hpp"
#include "molecuforge/persistence.hpp"
#include "molecuforge/relaxation.hpp"
#include "molecuforge/script.hpp"
#include "molecuforge/session.hpp"
#include "molecuforge/workspace.hpp"

namespace py = pybind11;
namespace mf = molecuforge;

namespace {

py::dict candidate_dict(const mf::SnapCandidate& c) {
    py::dict d;
    d["held"] = py::make_tuple(c.held_slot.atom_id, c.held_slot.slot_index);
    d["target"] = py::make_tuple(c.target_slot.atom_id, c.target_slot.slot_index);
    d["distance"] = c.distance;
    return d;
}

py::object candidate_or_none(const std::optional<mf::SnapCandidate>& c) {
    return c ? py::object(candidate_dict(*c)) : py::none();
}

py::dict report_dict(const mf::RelaxReport& r) {
    py::dict d;
    d["iterations"] = r.iterations;
    d["initial_energy"] = r.initial_energy;
    d["final_energy"] = r.final_energy;
    d["final_gradient_norm"] = r.final_gradient_norm;
    d["converged"] = r.converged;
    d["energy_trace"] = r.energy_trace;
    return d;
}

mf::Vec3 vec3(const std::array<double, 3>& a) { return mf::Vec3(a[0], a[1], a[2]); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Molecular construction engine";

    static py::exception<mf::Error> error_type(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const mf::Error& e) {
            py::object instance = py::handle(error_type.ptr())(e.what());
            instance.attr("code") = std::string(mf::error_code_name(e.code()));
            PyErr_SetObject(error_type.ptr(), instance.ptr());
        }
    });

    py::class_<mf::ForceFieldParams>(m, "ForceFieldParams")
        .def(py::init<>())
        .def_readwrite("k_bond", &mf::ForceFieldParams::k_bond)
        .def_readwrite("k_angle", &mf::ForceFieldParams::k_angle)
        .def_readwrite("max_iterations", &mf::ForceFieldParams::max_iterations)
        .def_readwrite("gradient_tolerance", &mf::ForceFieldParams::gradient_tolerance)
        .def_readwrite("initial_step", &mf::ForceFieldParams::initial_step);

    py::class_<mf::Workspace>(m, "Workspace")
        .def(py::init<>())
        .def("copy", [](const mf::Workspace& ws) { return mf::Workspace(ws); })
        .def_property_readonly("atom_ids",
                               [](const mf::Workspace& ws) {
                                   std::vector<mf::AtomId> ids;
                                   for (const auto& [id, a] : ws.atoms) ids.push_back(id);
                                   return ids;
                               })
        .def_property_readonly("bonds",
                               [](const mf::Workspace& ws) {
                                   py::list out;
                                   for (const auto& [id, b] : ws.bonds) {
                                       py::dict d;
                                       d["id"] = id;
                                       d["a"] = b.ends[0].atom_id;
                                       d["slot_a"] = b.ends[0].slot_index;
                                       d["b"] = b.ends[1].atom_id;
                                       d["slot_b"] = b.ends[1].slot_index;
                                       d["rest"] = b.rest_length;
                                       out.append(d);
                                   }
                                   return out;
                               })
        .def_property_readonly("anchor", [](const mf::Workspace& ws) { return ws.anchor; })
        .def("element", [](const mf::Workspace& ws, mf::AtomId id) { return std::string(ws.atom(id).element->symbol); })
        .def("position", [](const mf::Workspace& ws, mf::AtomId id) { return ws.atom(id).position; })
        .def("free_slots", [](const mf::Workspace& ws, mf::AtomId id) { return ws.atom(id).free_slots(); })
        .def("neighbors", &mf::Workspace::neighbors)
        .def("degree", &mf::Workspace::degree)
        .def("component", [](const mf::Workspace& ws, mf::AtomId id) { return mf::connected_component(ws, id); })
        .def("validate",
             [](const mf::Workspace& ws) {
                 std::vector<std::pair<std::string, std::string>> out;
                 for (const auto& v : mf::validate(ws)) out.emplace_back(v.entity, v.rule);
                 return out;
             })
        .def("create_atom",
             [](mf::Workspace& ws, const std::string& element, const std::array<double, 3>& at) {
                 return mf::create_atom(ws, element, vec3(at));
             },
             py::arg("element"), py::arg("position"))
        .def("delete_atom", [](mf::Workspace& ws, mf::AtomId id) { return mf::delete_atom(ws, id); })
        .def("grab",
             [](mf::Workspace& ws, mf::AtomId id) {
                 const auto& g = mf::grab(ws, id);
                 return py::make_tuple(g.mode == mf::GrabMode::molecule ? "molecule" : "single_atom",
                                       candidate_or_none(g.candidate));
             })
        .def("drag", [](mf::Workspace& ws, const std::array<double, 3>& to) { return candidate_or_none(mf::drag(ws, vec3(to))); })
        .def("release",
             [](mf::Workspace& ws) {
                 const auto r = mf::release(ws);
                 py::dict d;
                 d["bond"] = r.bond ? py::object(py::int_(*r.bond)) : py::none();
                 d["relax"] = r.relax ? py::object(report_dict(*r.relax)) : py::none();
                 return d;
             })
        .def("form_bond", [](mf::Workspace& ws, mf::AtomId a, mf::AtomId b) { return mf::form_bond(ws, a, b); })
        .def("set_anchor",
             [](mf::Workspace& ws, std::optional<mf::AtomId> id) {
                 std::vector<std::tuple<mf::AtomId, mf::AtomId, double>> out;
                 for (const auto& r : mf::set_anchor(ws, id)) out.emplace_back(r.a, r.b, r.degrees);
                 return out;
             })
        .def("rotate_about_bond",
             [](mf::Workspace& ws, mf::BondId bond, mf::AtomId moving, double degrees) {
                 return mf::rotate_about_bond(ws, bond, moving, mf::to_radians(degrees));
             },
             py::arg("bond"), py::arg("moving"), py::arg("degrees"))
        .def("move_molecule",
             [](mf::Workspace& ws, mf::AtomId atom, const std::array<double, 3>& translation,
                const std::array<double, 4>& rotation, std::optional<std::array<double, 3>> pivot) {
                 const mf::Vec3 p = pivot ? vec3(*pivot) : ws.atom(atom).position;
                 return mf::move_molecule(ws, atom, vec3(translation),
                                          mf::Quat(rotation[0], rotation[1], rotation[2], rotation[3]), p);
             },
             py::arg("atom"), py::arg("translation") = std::array<double, 3>{0, 0, 0},
             py::arg("rotation") = std::array<double, 4>{1, 0, 0, 0}, py::arg("pivot") = py::none())
        .def("bond_angle",
             [](const mf::Workspace& ws, mf::AtomId a, mf::AtomId c, mf::AtomId b) {
                 return mf::to_degrees(mf::bond_angle(ws, a, c, b));
             })
        .def("dihedral",
             [](const mf::Workspace& ws, mf::AtomId a, mf::AtomId b, mf::AtomId c, mf::AtomId d) {
                 return mf::to_degrees(mf::dihedral_angle(ws.atom(a).position, ws.atom(b).position, ws.atom(c).position,
                                                          ws.atom(d).position));
             })
        .def("energy", [](const mf::Workspace& ws, const mf::ForceFieldParams& p) { return mf::energy(ws, p); },
             py::arg("params") = mf::ForceFieldParams{})
        .def("gradient", [](const mf::Workspace& ws, const mf::ForceFieldParams& p) { return mf::gradient(ws, p); },
             py::arg("params") = mf::ForceFieldParams{})
        .def("relax",
             [](mf::Workspace& ws, const std::set<mf::AtomId>& fixed, const mf::ForceFieldParams& p) {
                 return report_dict(mf::relax(ws, p, fixed));
             },
             py::arg("fixed") = std::set<mf::AtomId>{}, py::arg("params") = mf::ForceFieldParams{})
        .def("to_xml", [](const mf::Workspace& ws) { return mf::save_xml(ws); })
        .def("to_xyz", [](const mf::Workspace& ws) { return mf::export_xyz(ws); })
        .def_static("from_xml", [](const std::string& doc) { return mf::load_xml(doc); })
        .def("__len__", [](const mf::Workspace& ws) { return ws.atoms.size(); });

    py::class_<mf::Session>(m, "Session")
        .def(py::init<std::filesystem::path>(), py::arg("base_dir") = std::filesystem::path{})
        .def("execute_line",
             [](mf::Session& s, const std::string& line) {
                 const auto o = s.execute_line(line);
                 std::vector<std::string> out{mf::to_line(o.response)};
                 for (const auto& e : o.events) out.push_back(mf::to_line(e));
                 return py::make_tuple(out, o.close);
             })
        .def_property_readonly("workspace", [](const mf::Session& s) { return mf::Workspace(s.workspace()); });

    m.def("run_script", [](const std::filesystem::path& path) {
        const auto report = mf::run_script(path);
        mf::json j = mf::to_json(report);
        j["final_snapshot"] = report.final_snapshot;
        return j.dump();
    });
    m.def("element_symbols", [] {
        std::vector<std::string> out;
        for (const auto& e : mf::element_table()) out.emplace_back(e.symbol);
        return out;
    });
}
