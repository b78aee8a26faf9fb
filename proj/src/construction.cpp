#include "molecuforge/construction.hpp"

#include <cmath>
#include <deque>
#include <tuple>

#include "molecuforge/error.hpp"

namespace molecuforge {

namespace {

int lowest_free_slot(const Atom& atom) {
    for (const auto& slot : atom.slots) {
        if (!slot.occupied_by) return slot.index;
    }
    return -1;
}

/// Free slot whose world direction points most closely along `toward`.
/// Ties and a zero `toward` fall back to the lowest index.
int best_aligned_slot(const Atom& atom, const Vec3& toward) {
    int best = -1;
    double best_dot = -2.0;
    const double len = toward.norm();
    for (const auto& slot : atom.slots) {
        if (slot.occupied_by) continue;
        const double d = len > 0.0 ? (atom.orientation * slot.local_direction).dot(toward / len) : 0.0;
        if (d > best_dot) {
            best_dot = d;
            best = slot.index;
        }
    }
    return best;
}

BondId add_bond(Workspace& ws, const SlotRef& a, const SlotRef& b) {
    Atom& atom_a = ws.atom(a.atom_id);
    Atom& atom_b = ws.atom(b.atom_id);
    Bond bond;
    bond.id = ws.next_bond_id++;
    bond.ends = {a, b};
    bond.rest_length = rest_length(*atom_a.element, *atom_b.element);
    atom_a.slots[a.slot_index].occupied_by = bond.id;
    atom_b.slots[b.slot_index].occupied_by = bond.id;
    ws.bonds.emplace(bond.id, bond);
    return bond.id;
}

/// Atoms reachable from `start` without crossing `skip`.
std::set<AtomId> side_of(const Workspace& ws, AtomId start, BondId skip) {
    std::set<AtomId> seen{start};
    std::deque<AtomId> queue{start};
    while (!queue.empty()) {
        AtomId cur = queue.front();
        queue.pop_front();
        for (BondId b : ws.incident_bonds(cur)) {
            if (b == skip) continue;
            AtomId n = ws.bond(b).other(cur);
            if (seen.insert(n).second) queue.push_back(n);
        }
    }
    return seen;
}

void refresh_candidate(Workspace& ws) {
    if (ws.grab) ws.grab->candidate = find_snap_candidate(ws);
}

}  // namespace

double snap_threshold(const ElementSpec& a, const ElementSpec& b) {
    return 1.5 * (a.covalent_radius + b.covalent_radius);
}

double rest_length(const ElementSpec& a, const ElementSpec& b) { return a.covalent_radius + b.covalent_radius; }

AtomId create_atom(Workspace& ws, std::string_view symbol, const Vec3& position) {
    const ElementSpec& element = element_spec(symbol);
    const AtomId id = ws.next_atom_id++;
    ws.atoms.emplace(id, make_atom(id, element, position));
    refresh_candidate(ws);
    return id;
}

std::vector<BondId> delete_atom(Workspace& ws, AtomId atom_id) {
    ws.atom(atom_id);
    if (ws.grab && ws.grab->held_atom == atom_id) {
        throw Error(ErrorCode::AtomGrabbed, "atom " + std::to_string(atom_id) + " is being held");
    }
    std::vector<BondId> removed = ws.incident_bonds(atom_id);
    for (BondId id : removed) {
        const Bond& bond = ws.bond(id);
        for (const auto& end : bond.ends) {
            if (end.atom_id != atom_id) ws.atom(end.atom_id).slots[end.slot_index].occupied_by.reset();
        }
        ws.bonds.erase(id);
    }
    ws.atoms.erase(atom_id);
    if (ws.anchor == atom_id) {
        ws.anchor.reset();
        if (ws.grab) ws.grab->mode = GrabMode::molecule;
    }
    refresh_candidate(ws);
    return removed;
}

std::optional<SnapCandidate> find_snap_candidate(const Workspace& ws) {
    if (!ws.grab) return std::nullopt;
    const Atom& held = ws.atom(ws.grab->held_atom);
    const int held_slot = lowest_free_slot(held);
    if (held_slot < 0) return std::nullopt;

    const bool single = ws.grab->mode == GrabMode::single_atom;
    const std::set<AtomId> component = connected_component(ws, held.id);
    const std::vector<AtomId> adjacent = ws.neighbors(held.id);

    std::optional<SnapCandidate> best;
    for (const auto& [id, target] : ws.atoms) {
        if (id == held.id) continue;
        if (component.contains(id)) {
            // Ring closure: only in edit mode and never onto a direct neighbor.
            if (!single) continue;
            if (std::find(adjacent.begin(), adjacent.end(), id) != adjacent.end()) continue;
        }
        const int target_slot = lowest_free_slot(target);
        if (target_slot < 0) continue;
        const double d = (target.position - held.position).norm();
        if (d > snap_threshold(*held.element, *target.element)) continue;
        // Atoms are visited in ascending id order, so strict < keeps the lowest id on ties.
        if (!best || d < best->distance) {
            best = SnapCandidate{SlotRef{held.id, held_slot}, SlotRef{id, target_slot}, d};
        }
    }
    return best;
}

const GrabState& grab(Workspace& ws, AtomId atom_id) {
    ws.atom(atom_id);
    if (ws.grab) throw Error(ErrorCode::AlreadyGrabbing, "atom " + std::to_string(ws.grab->held_atom) + " is already held");
    if (ws.anchor == atom_id) throw Error(ErrorCode::AnchorGrabbed, "the anchor atom is frozen");
    ws.grab = GrabState{atom_id, ws.anchor ? GrabMode::single_atom : GrabMode::molecule, std::nullopt};
    refresh_candidate(ws);
    return *ws.grab;
}

std::optional<SnapCandidate> drag(Workspace& ws, const Vec3& new_position) {
    if (!ws.grab) throw Error(ErrorCode::NoActiveGrab, "nothing is held");
    Atom& held = ws.atom(ws.grab->held_atom);
    if (ws.grab->mode == GrabMode::molecule) {
        const Vec3 delta = new_position - held.position;
        for (AtomId id : connected_component(ws, held.id)) {
            if (id != held.id) ws.atom(id).position += delta;
        }
    }
    held.position = new_position;
    refresh_candidate(ws);
    return ws.grab->candidate;
}

ReleaseResult release(Workspace& ws, const ForceFieldParams& params) {
    if (!ws.grab) throw Error(ErrorCode::NoActiveGrab, "nothing is held");
    const GrabState state = *ws.grab;
    const std::optional<SnapCandidate> candidate = find_snap_candidate(ws);
    ws.grab.reset();

    ReleaseResult result;
    if (candidate) {
        if (state.mode == GrabMode::molecule) {
            const Atom& h = ws.atom(candidate->held_slot.atom_id);
            const Atom& t = ws.atom(candidate->target_slot.atom_id);
            const RigidTransform dock = docking_transform(ws, candidate->held_slot, candidate->target_slot,
                                                          rest_length(*h.element, *t.element));
            apply_transform(ws, connected_component(ws, h.id), dock);
        }
        result.bond = add_bond(ws, candidate->held_slot, candidate->target_slot);
    }
    if (ws.anchor) result.relax = relax(ws, params, {*ws.anchor});
    return result;
}

BondId form_bond(Workspace& ws, AtomId a, AtomId b) {
    const Atom& atom_a = ws.atom(a);
    const Atom& atom_b = ws.atom(b);
    if (a == b) throw Error(ErrorCode::SelfBond, "cannot bond atom " + std::to_string(a) + " to itself");
    if (ws.bond_between(a, b)) {
        throw Error(ErrorCode::AlreadyBonded, "atoms " + std::to_string(a) + " and " + std::to_string(b) + " are already bonded");
    }
    for (const Atom* atom : {&atom_a, &atom_b}) {
        if (atom->free_slots() == 0) {
            throw Error(ErrorCode::NoFreeSlot, "atom " + std::to_string(atom->id) + " has no free vacancy");
        }
    }
    const SlotRef slot_a{a, best_aligned_slot(atom_a, atom_b.position - atom_a.position)};
    const SlotRef slot_b{b, best_aligned_slot(atom_b, atom_a.position - atom_b.position)};

    const std::set<AtomId> component_b = connected_component(ws, b);
    if (!component_b.contains(a)) {
        // Dock b onto a, unless that would move the frozen anchor.
        const bool swap = ws.anchor && component_b.contains(*ws.anchor);
        const SlotRef& held = swap ? slot_a : slot_b;
        const SlotRef& target = swap ? slot_b : slot_a;
        const RigidTransform dock =
            docking_transform(ws, held, target, rest_length(*atom_a.element, *atom_b.element));
        apply_transform(ws, swap ? connected_component(ws, a) : component_b, dock);
    }
    const BondId id = add_bond(ws, slot_a, slot_b);
    refresh_candidate(ws);
    return id;
}

std::vector<AngleReading> anchor_readout(const Workspace& ws, AtomId center) {
    std::vector<AngleReading> out;
    const std::vector<AtomId> n = ws.neighbors(center);
    for (std::size_t i = 0; i < n.size(); ++i) {
        for (std::size_t j = i + 1; j < n.size(); ++j) {
            out.push_back(AngleReading{n[i], n[j], to_degrees(bond_angle(ws, n[i], center, n[j]))});
        }
    }
    return out;
}

std::vector<AngleReading> set_anchor(Workspace& ws, std::optional<AtomId> atom_id) {
    if (atom_id) ws.atom(*atom_id);
    if (ws.grab) {
        throw Error(ErrorCode::AlreadyGrabbing, "release the held atom before toggling edit mode");
    }
    if (!atom_id) {
        ws.anchor.reset();
        return {};
    }
    auto readout = anchor_readout(ws, *atom_id);
    ws.anchor = atom_id;
    return readout;
}

int rotate_about_bond(Workspace& ws, BondId bond_id, AtomId moving_side, double angle) {
    const Bond& bond = ws.bond(bond_id);
    if (!bond.touches(moving_side)) {
        throw Error(ErrorCode::NotAnEndpoint, "atom " + std::to_string(moving_side) + " is not an endpoint of bond " +
                                                  std::to_string(bond_id));
    }
    const AtomId fixed_end = bond.other(moving_side);
    std::set<AtomId> side = side_of(ws, moving_side, bond_id);
    if (side.contains(fixed_end)) {
        throw Error(ErrorCode::BondInCycle, "bond " + std::to_string(bond_id) + " is part of a ring");
    }
    if (std::remainder(angle, 2.0 * kPi) == 0.0) return 0;

    const Vec3 pivot = ws.atom(moving_side).position;
    const Vec3 axis_vec = pivot - ws.atom(fixed_end).position;
    if (axis_vec.norm() < 1e-9) throw Error(ErrorCode::DegeneratePositions, "bond has zero length");
    const Vec3 axis = axis_vec.normalized();

    // The frozen anchor stays put: turn the other side the opposite way,
    // which yields the same relative conformation.
    if (ws.anchor && side.contains(*ws.anchor)) {
        std::set<AtomId> rest;
        for (AtomId id : connected_component(ws, moving_side)) {
            if (!side.contains(id)) rest.insert(id);
        }
        side = std::move(rest);
        angle = -angle;
    }
    RigidTransform t;
    t.rotation = Quat(Eigen::AngleAxisd(angle, axis));
    t.translation = pivot - t.rotation * pivot;
    apply_transform(ws, side, t);
    refresh_candidate(ws);
    return static_cast<int>(side.size());
}

int move_molecule(Workspace& ws, AtomId atom_id, const Vec3& translation, const Quat& rotation, const Vec3& pivot) {
    ws.atom(atom_id);
    if (std::abs(rotation.norm() - 1.0) > 1e-6) {
        throw Error(ErrorCode::BadArguments, "rotation must be a unit quaternion");
    }
    const std::set<AtomId> component = connected_component(ws, atom_id);
    if (ws.anchor && component.contains(*ws.anchor)) {
        throw Error(ErrorCode::AnchorGrabbed, "the molecule contains the frozen anchor");
    }
    RigidTransform t;
    t.rotation = rotation.normalized();
    t.translation = pivot - t.rotation * pivot + translation;
    apply_transform(ws, component, t);
    refresh_candidate(ws);
    return static_cast<int>(component.size());
}

void apply_transform(Workspace& ws, const std::set<AtomId>& atoms, const RigidTransform& t) {
    for (AtomId id : atoms) {
        Atom& atom = ws.atom(id);
        atom.position = t.apply(atom.position);
        atom.orientation = (t.rotation * atom.orientation).normalized();
    }
}

}  // namespace molecuforge
