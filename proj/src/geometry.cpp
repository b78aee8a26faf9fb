#include "molecuforge/geometry.hpp"

#include <cmath>

#include "molecuforge/error.hpp"

namespace molecuforge {

namespace {

constexpr double kMinArm = 1e-9;  // Å

const Atom& slot_atom(const Workspace& ws, const SlotRef& slot) {
    const Atom& atom = ws.atom(slot.atom_id);
    if (slot.slot_index < 0 || slot.slot_index >= static_cast<int>(atom.slots.size())) {
        throw Error(ErrorCode::NoSuchSlot, "atom " + std::to_string(slot.atom_id) + " has no slot " +
                                               std::to_string(slot.slot_index));
    }
    return atom;
}

}  // namespace

std::vector<Vec3> vacancy_directions(int valency) {
    const double s3 = std::sqrt(3.0);
    switch (valency) {
        case 1:
            return {Vec3(0, 0, 1)};
        case 2:
            return {Vec3(0, 0, 1), Vec3(0, 0, -1)};
        case 3:
            return {Vec3(1, 0, 0), Vec3(-0.5, s3 / 2, 0), Vec3(-0.5, -s3 / 2, 0)};
        case 4:
            return {Vec3(1, 1, 1) / s3, Vec3(1, -1, -1) / s3, Vec3(-1, 1, -1) / s3, Vec3(-1, -1, 1) / s3};
        default:
            throw Error(ErrorCode::UnsupportedValency, "valency " + std::to_string(valency) + " not in 1..4");
    }
}

double preset_angle(int valency) {
    switch (valency) {
        case 2: return kPi;
        case 3: return 2.0 * kPi / 3.0;
        case 4: return std::acos(-1.0 / 3.0);
        default:
            throw Error(ErrorCode::UnsupportedValency, "no rest angle for valency " + std::to_string(valency));
    }
}

Vec3 world_direction(const Workspace& ws, const SlotRef& slot) {
    const Atom& atom = slot_atom(ws, slot);
    return atom.orientation * atom.slots[slot.slot_index].local_direction;
}

double arm_angle(const Vec3& u, const Vec3& v) {
    if (u.norm() < kMinArm || v.norm() < kMinArm) {
        throw Error(ErrorCode::DegeneratePositions, "bond arm shorter than 1e-9 Å");
    }
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

double bond_angle(const Workspace& ws, AtomId a, AtomId center, AtomId b) {
    const Atom& c = ws.atom(center);
    const Atom& pa = ws.atom(a);
    const Atom& pb = ws.atom(b);
    if (a == b) throw Error(ErrorCode::BadArguments, "bond_angle needs two distinct outer atoms");
    if (!ws.bond_between(a, center) || !ws.bond_between(b, center)) {
        throw Error(ErrorCode::NotBonded, "atoms " + std::to_string(a) + " and " + std::to_string(b) +
                                              " must both be bonded to " + std::to_string(center));
    }
    return arm_angle(pa.position - c.position, pb.position - c.position);
}

double dihedral_angle(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4) {
    const Vec3 b1 = p2 - p1;
    const Vec3 b2 = p3 - p2;
    const Vec3 b3 = p4 - p3;
    if (b1.norm() < kMinArm || b2.norm() < kMinArm || b3.norm() < kMinArm) {
        throw Error(ErrorCode::DegeneratePositions, "dihedral arm shorter than 1e-9 Å");
    }
    const Vec3 n1 = b1.cross(b2);
    const Vec3 n2 = b2.cross(b3);
    if (n1.norm() < 1e-9 * b1.norm() * b2.norm() || n2.norm() < 1e-9 * b2.norm() * b3.norm()) {
        throw Error(ErrorCode::DegeneratePositions, "dihedral arms parallel at the hinge");
    }
    const double y = b2.norm() * b1.dot(n2);
    const double x = n1.dot(n2);
    const double phi = std::atan2(y, x);
    return phi <= -kPi ? kPi : phi;
}

Quat minimal_rotation(const Vec3& from, const Vec3& to) {
    const double c = from.dot(to);
    if (1.0 + c < 1e-12) {
        int k = 0;
        for (int i = 1; i < 3; ++i) {
            if (std::abs(from[i]) < std::abs(from[k])) k = i;
        }
        const Vec3 axis = from.cross(Vec3::Unit(k)).normalized();
        return Quat(0.0, axis.x(), axis.y(), axis.z());
    }
    const Vec3 axis = from.cross(to);
    return Quat(1.0 + c, axis.x(), axis.y(), axis.z()).normalized();
}

RigidTransform docking_transform(const Workspace& ws, const SlotRef& held, const SlotRef& target,
                                 double rest_length) {
    const Atom& h = slot_atom(ws, held);
    const Atom& t = slot_atom(ws, target);
    if (h.slots[held.slot_index].occupied_by) {
        throw Error(ErrorCode::SlotOccupied, "held slot is occupied");
    }
    if (t.slots[target.slot_index].occupied_by) {
        throw Error(ErrorCode::SlotOccupied, "target slot is occupied");
    }
    if (connected_component(ws, held.atom_id).contains(target.atom_id)) {
        throw Error(ErrorCode::SameComponent, "held and target atoms are already connected");
    }
    const Vec3 held_dir = world_direction(ws, held);
    const Vec3 target_dir = world_direction(ws, target);

    RigidTransform out;
    out.rotation = minimal_rotation(held_dir, -target_dir);
    const Vec3 landing = t.position + rest_length * target_dir;
    out.translation = landing - out.rotation * h.position;
    return out;
}

}  // namespace molecuforge
