#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "molecuforge/elements.hpp"

namespace molecuforge {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

using AtomId = std::int64_t;
using BondId = std::int64_t;

struct SlotRef {
    AtomId atom_id = 0;
    int slot_index = 0;

    friend bool operator==(const SlotRef&, const SlotRef&) = default;
};

struct VacancySlot {
    int index = 0;
    Vec3 local_direction = Vec3::UnitZ();
    std::optional<BondId> occupied_by;
};

struct Atom {
    AtomId id = 0;
    const ElementSpec* element = nullptr;
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();  // local-to-world
    std::vector<VacancySlot> slots;

    int valency() const { return element->valency; }
    int free_slots() const;
};

struct Bond {
    BondId id = 0;
    std::array<SlotRef, 2> ends;
    double rest_length = 0.0;  // Å

    bool touches(AtomId atom) const { return ends[0].atom_id == atom || ends[1].atom_id == atom; }
    /// The endpoint that is not `atom`. Requires touches(atom).
    AtomId other(AtomId atom) const { return ends[0].atom_id == atom ? ends[1].atom_id : ends[0].atom_id; }
};

struct SnapCandidate {
    SlotRef held_slot;
    SlotRef target_slot;
    double distance = 0.0;  // Å between atom centers

    friend bool operator==(const SnapCandidate&, const SnapCandidate&) = default;
};

enum class GrabMode { molecule, single_atom };

struct GrabState {
    AtomId held_atom = 0;
    GrabMode mode = GrabMode::molecule;
    std::optional<SnapCandidate> candidate;
};

/// Full editing state. Maps keep iteration in ascending id order, which the
/// serializers and tie-break rules rely on.
struct Workspace {
    std::map<AtomId, Atom> atoms;
    std::map<BondId, Bond> bonds;
    std::optional<AtomId> anchor;
    std::optional<GrabState> grab;
    AtomId next_atom_id = 1;
    BondId next_bond_id = 1;

    const Atom& atom(AtomId id) const;  // throws NoSuchAtom
    Atom& atom(AtomId id);
    const Bond& bond(BondId id) const;  // throws NoSuchBond
    bool has_atom(AtomId id) const { return atoms.contains(id); }

    /// Bond ids incident to an atom, ascending.
    std::vector<BondId> incident_bonds(AtomId id) const;
    /// Neighbor atom ids, ascending.
    std::vector<AtomId> neighbors(AtomId id) const;
    std::optional<BondId> bond_between(AtomId a, AtomId b) const;
    int degree(AtomId id) const;
};

struct Violation {
    std::string entity;  // e.g. "bond 3"
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

std::set<AtomId> connected_component(const Workspace& ws, AtomId atom_id);
int free_slot_count(const Workspace& ws, AtomId atom_id);
/// Empty iff every structural invariant holds.
std::vector<Violation> validate(const Workspace& ws);

/// Builds an atom with preset vacancy slots and identity orientation.
/// Does not insert it into any workspace.
Atom make_atom(AtomId id, const ElementSpec& element, const Vec3& position);

}  // namespace molecuforge
