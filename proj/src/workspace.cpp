#include "molecuforge/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "molecuforge/error.hpp"
#include "molecuforge/geometry.hpp"

namespace molecuforge {

int Atom::free_slots() const {
    return static_cast<int>(std::count_if(slots.begin(), slots.end(),
                                          [](const VacancySlot& s) { return !s.occupied_by; }));
}

const Atom& Workspace::atom(AtomId id) const {
    auto it = atoms.find(id);
    if (it == atoms.end()) throw Error(ErrorCode::NoSuchAtom, "no atom " + std::to_string(id));
    return it->second;
}

Atom& Workspace::atom(AtomId id) {
    auto it = atoms.find(id);
    if (it == atoms.end()) throw Error(ErrorCode::NoSuchAtom, "no atom " + std::to_string(id));
    return it->second;
}

const Bond& Workspace::bond(BondId id) const {
    auto it = bonds.find(id);
    if (it == bonds.end()) throw Error(ErrorCode::NoSuchBond, "no bond " + std::to_string(id));
    return it->second;
}

std::vector<BondId> Workspace::incident_bonds(AtomId id) const {
    std::vector<BondId> out;
    for (const auto& slot : atom(id).slots) {
        if (slot.occupied_by) out.push_back(*slot.occupied_by);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<AtomId> Workspace::neighbors(AtomId id) const {
    std::vector<AtomId> out;
    for (BondId b : incident_bonds(id)) {
        auto it = bonds.find(b);
        if (it != bonds.end()) out.push_back(it->second.other(id));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<BondId> Workspace::bond_between(AtomId a, AtomId b) const {
    for (BondId id : incident_bonds(a)) {
        auto it = bonds.find(id);
        if (it != bonds.end() && it->second.touches(b) && it->second.other(a) == b) return id;
    }
    return std::nullopt;
}

int Workspace::degree(AtomId id) const { return static_cast<int>(incident_bonds(id).size()); }

std::set<AtomId> connected_component(const Workspace& ws, AtomId atom_id) {
    ws.atom(atom_id);
    std::set<AtomId> seen{atom_id};
    std::deque<AtomId> queue{atom_id};
    while (!queue.empty()) {
        AtomId cur = queue.front();
        queue.pop_front();
        for (AtomId n : ws.neighbors(cur)) {
            if (seen.insert(n).second) queue.push_back(n);
        }
    }
    return seen;
}

int free_slot_count(const Workspace& ws, AtomId atom_id) { return ws.atom(atom_id).free_slots(); }

Atom make_atom(AtomId id, const ElementSpec& element, const Vec3& position) {
    Atom atom;
    atom.id = id;
    atom.element = &element;
    atom.position = position;
    auto dirs = vacancy_directions(element.valency);
    for (int i = 0; i < static_cast<int>(dirs.size()); ++i) {
        atom.slots.push_back(VacancySlot{i, dirs[i], std::nullopt});
    }
    return atom;
}

namespace {

std::string atom_name(AtomId id) { return "atom " + std::to_string(id); }
std::string bond_name(BondId id) { return "bond " + std::to_string(id); }

}  // namespace

std::vector<Violation> validate(const Workspace& ws) {
    std::vector<Violation> out;
    auto report = [&](std::string entity, std::string rule) {
        out.push_back(Violation{std::move(entity), std::move(rule)});
    };

    for (const auto& [id, atom] : ws.atoms) {
        const std::string name = atom_name(id);
        if (atom.id != id) report(name, "stored id differs from key");
        if (id <= 0) report(name, "id must be positive");
        if (id >= ws.next_atom_id) report(name, "id not below next_atom_id counter");
        if (atom.element == nullptr) {
            report(name, "missing element");
            continue;
        }
        if (!atom.position.allFinite()) report(name, "position is not finite");
        if (std::abs(atom.orientation.norm() - 1.0) > 1e-9) report(name, "orientation is not a unit quaternion");
        if (static_cast<int>(atom.slots.size()) != atom.valency()) report(name, "slot count differs from valency");
        int occupied = 0;
        for (std::size_t i = 0; i < atom.slots.size(); ++i) {
            const auto& slot = atom.slots[i];
            if (slot.index != static_cast<int>(i)) report(name, "slot indices are not 0..valency-1");
            if (std::abs(slot.local_direction.norm() - 1.0) > 1e-9) {
                report(name, "slot " + std::to_string(i) + " direction is not unit length");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if ((atom.slots[j].local_direction - slot.local_direction).norm() < 1e-12) {
                    report(name, "slots " + std::to_string(j) + " and " + std::to_string(i) + " share a direction");
                }
            }
            if (!slot.occupied_by) continue;
            ++occupied;
            auto it = ws.bonds.find(*slot.occupied_by);
            if (it == ws.bonds.end()) {
                report(name, "slot " + std::to_string(i) + " references missing bond " +
                                 std::to_string(*slot.occupied_by));
                continue;
            }
            const SlotRef self{id, static_cast<int>(i)};
            if (it->second.ends[0] != self && it->second.ends[1] != self) {
                report(name, "slot " + std::to_string(i) + " occupancy not mirrored by bond " +
                                 std::to_string(it->first));
            }
        }
        int degree = 0;
        for (const auto& [bid, bond] : ws.bonds) {
            if (bond.ends[0].atom_id == id) ++degree;
            if (bond.ends[1].atom_id == id) ++degree;
        }
        if (occupied != degree) report(name, "occupied slot count differs from degree");
        if (degree > atom.valency()) report(name, "degree exceeds valency");
    }

    std::set<std::pair<AtomId, AtomId>> pairs;
    for (const auto& [id, bond] : ws.bonds) {
        const std::string name = bond_name(id);
        if (bond.id != id) report(name, "stored id differs from key");
        if (id <= 0) report(name, "id must be positive");
        if (id >= ws.next_bond_id) report(name, "id not below next_bond_id counter");
        if (!(bond.rest_length > 0.0)) report(name, "rest length must be positive");
        if (bond.ends[0].atom_id == bond.ends[1].atom_id) report(name, "self-loop");
        for (const auto& end : bond.ends) {
            auto it = ws.atoms.find(end.atom_id);
            if (it == ws.atoms.end()) {
                report(name, "endpoint atom " + std::to_string(end.atom_id) + " does not exist");
                continue;
            }
            const auto& slots = it->second.slots;
            if (end.slot_index < 0 || end.slot_index >= static_cast<int>(slots.size())) {
                report(name, "endpoint slot " + std::to_string(end.slot_index) + " out of range");
                continue;
            }
            if (slots[end.slot_index].occupied_by != id) {
                report(name, "slot " + std::to_string(end.slot_index) + " of atom " +
                                 std::to_string(end.atom_id) + " is not occupied by this bond");
            }
        }
        auto key = std::minmax(bond.ends[0].atom_id, bond.ends[1].atom_id);
        if (!pairs.insert({key.first, key.second}).second) report(name, "duplicate bond between atom pair");
    }

    if (ws.anchor && !ws.atoms.contains(*ws.anchor)) {
        report("anchor", "anchor atom " + std::to_string(*ws.anchor) + " does not exist");
    }
    if (ws.grab) {
        if (!ws.atoms.contains(ws.grab->held_atom)) report("grab", "held atom does not exist");
        const bool single = ws.grab->mode == GrabMode::single_atom;
        if (single != ws.anchor.has_value()) report("grab", "mode disagrees with edit mode");
        if (ws.anchor && ws.grab->held_atom == *ws.anchor) report("grab", "anchor is held");
    }
    return out;
}

}  // namespace molecuforge
