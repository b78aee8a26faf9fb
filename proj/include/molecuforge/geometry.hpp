#pragma once

#include <vector>

#include "molecuforge/workspace.hpp"

namespace molecuforge {

/// Rigid motion x -> rotation * x + translation.
struct RigidTransform {
    Quat rotation = Quat::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

/// Symmetric preset slot directions for a valency in 1..4, in the atom's
/// local frame. Throws UnsupportedValency.
std::vector<Vec3> vacancy_directions(int valency);

/// Pairwise angle between slots of the preset for `valency` (radians).
/// This is also the rest angle used by the force field. Valency 1 has no
/// pair and throws UnsupportedValency.
double preset_angle(int valency);

Vec3 world_direction(const Workspace& ws, const SlotRef& slot);

/// Angle a-center-b in [0, pi]. Both arms must be bonds.
double bond_angle(const Workspace& ws, AtomId a, AtomId center, AtomId b);

/// Angle between two arms in [0, pi]; throws DegeneratePositions for arms
/// shorter than 1e-9 Å.
double arm_angle(const Vec3& u, const Vec3& v);

/// Signed dihedral in (-pi, pi] about the p2->p3 axis.
double dihedral_angle(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4);

/// Rotation with the smallest angle taking unit vector `from` onto unit
/// vector `to`. For antiparallel inputs the axis is a fixed perpendicular.
Quat minimal_rotation(const Vec3& from, const Vec3& to);

/// Rigid transform for the held atom's component that docks `held` against
/// `target` at `rest_length`, with the held slot antiparallel to the target
/// slot. Throws SlotOccupied, SameComponent.
RigidTransform docking_transform(const Workspace& ws, const SlotRef& held, const SlotRef& target,
                                 double rest_length);

constexpr double kPi = 3.14159265358979323846;
inline double to_degrees(double radians) { return radians * 180.0 / kPi; }
inline double to_radians(double degrees) { return degrees * kPi / 180.0; }

}  // namespace molecuforge
