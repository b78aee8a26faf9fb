#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "molecuforge/geometry.hpp"
#include "molecuforge/relaxation.hpp"
#include "molecuforge/workspace.hpp"

namespace molecuforge {

/// Snap distance for a pair of elements: 1.5 x the sum of covalent radii.
double snap_threshold(const ElementSpec& a, const ElementSpec& b);

/// Default bond length: sum of covalent radii.
double rest_length(const ElementSpec& a, const ElementSpec& b);

AtomId create_atom(Workspace& ws, std::string_view symbol, const Vec3& position);

/// Returns the removed bond ids, ascending.
std::vector<BondId> delete_atom(Workspace& ws, AtomId atom_id);

const GrabState& grab(Workspace& ws, AtomId atom_id);

std::optional<SnapCandidate> drag(Workspace& ws, const Vec3& new_position);

/// Best snap candidate for the current grab, without moving anything.
std::optional<SnapCandidate> find_snap_candidate(const Workspace& ws);

struct ReleaseResult {
    std::optional<BondId> bond;
    std::optional<RelaxReport> relax;  // present when edit mode relaxed the scene
};

ReleaseResult release(Workspace& ws, const ForceFieldParams& params = {});

BondId form_bond(Workspace& ws, AtomId a, AtomId b);

struct AngleReading {
    AtomId a = 0;
    AtomId b = 0;
    double degrees = 0.0;
};

/// Turns edit mode on (anchor given) or off. Returns every bond-angle pair at
/// the new anchor, in degrees.
std::vector<AngleReading> set_anchor(Workspace& ws, std::optional<AtomId> atom_id);

std::vector<AngleReading> anchor_readout(const Workspace& ws, AtomId center);

/// Rigidly rotates one side of an acyclic bond about the bond axis.
/// Returns the number of atoms transformed.
int rotate_about_bond(Workspace& ws, BondId bond_id, AtomId moving_side, double angle);

/// Rotates the atom's component about `pivot`, then translates it.
int move_molecule(Workspace& ws, AtomId atom_id, const Vec3& translation,
                  const Quat& rotation = Quat::Identity(), const Vec3& pivot = Vec3::Zero());

/// Applies a rigid transform to a set of atoms, updating orientations.
void apply_transform(Workspace& ws, const std::set<AtomId>& atoms, const RigidTransform& t);

}  // namespace molecuforge
