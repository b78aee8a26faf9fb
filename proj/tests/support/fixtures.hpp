#pragma once

// Shared builders and independent oracles for the test suites. Oracles here
// deliberately avoid the library's own math paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "molecuforge/construction.hpp"
#include "molecuforge/geometry.hpp"
#include "molecuforge/relaxation.hpp"
#include "molecuforge/workspace.hpp"

namespace fixtures {

namespace mf = molecuforge;

inline constexpr double kTetrahedralDeg = 109.47122063449069;

/// C at the origin plus four docked hydrogens. Returns {C, H1..H4}.
inline std::array<mf::AtomId, 5> build_methane(mf::Workspace& ws, const mf::Vec3& at = mf::Vec3::Zero()) {
    std::array<mf::AtomId, 5> ids{};
    ids[0] = mf::create_atom(ws, "C", at);
    for (int i = 1; i <= 4; ++i) {
        ids[i] = mf::create_atom(ws, "H", at + mf::Vec3(3.0 * i, 2.0, -1.0));
        mf::form_bond(ws, ids[0], ids[i]);
    }
    return ids;
}

/// 2-methylbutane carbon skeleton: bonds 1-2, 2-3, 3-4, 2-5 (local numbering).
inline std::array<mf::AtomId, 5> build_methylbutane(mf::Workspace& ws) {
    std::array<mf::AtomId, 5> c{};
    const std::array<mf::Vec3, 5> starts{mf::Vec3(0, 0, 0), mf::Vec3(1.5, 0, 0), mf::Vec3(3, 0.2, 0),
                                         mf::Vec3(4.5, 0, 0.3), mf::Vec3(1.5, 1.5, 0)};
    for (int i = 0; i < 5; ++i) c[i] = mf::create_atom(ws, "C", starts[i]);
    mf::form_bond(ws, c[0], c[1]);
    mf::form_bond(ws, c[1], c[2]);
    mf::form_bond(ws, c[2], c[3]);
    mf::form_bond(ws, c[1], c[4]);
    return c;
}

/// Open chain of `n` carbons built by docking. Returns ids in chain order.
inline std::vector<mf::AtomId> build_chain(mf::Workspace& ws, int n) {
    std::vector<mf::AtomId> ids;
    for (int i = 0; i < n; ++i) ids.push_back(mf::create_atom(ws, "C", mf::Vec3(2.0 * i, 0.3 * i, 0)));
    for (int i = 0; i + 1 < n; ++i) mf::form_bond(ws, ids[i], ids[i + 1]);
    return ids;
}

/// Relaxed cyclopentane carbon ring.
inline std::vector<mf::AtomId> build_cyclopentane(mf::Workspace& ws) {
    auto ids = build_chain(ws, 5);
    mf::form_bond(ws, ids.front(), ids.back());
    mf::relax(ws, mf::ForceFieldParams{}, {});
    return ids;
}

/// Breadth-first search over an explicit edge list.
inline std::set<int> bfs_component(int start, const std::vector<std::pair<int, int>>& edges) {
    std::map<int, std::vector<int>> adj;
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::set<int> seen{start};
    std::queue<int> q;
    q.push(start);
    while (!q.empty()) {
        int cur = q.front();
        q.pop();
        for (int n : adj[cur]) {
            if (seen.insert(n).second) q.push(n);
        }
    }
    return seen;
}

/// Rotation matrix from a unit quaternion (w, x, y, z), written out by hand.
inline std::array<std::array<double, 3>, 3> rotation_matrix(double w, double x, double y, double z) {
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
             {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
             {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

using V3 = std::array<double, 3>;

inline V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline V3 cross(const V3& a, const V3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline V3 arr(const mf::Vec3& v) { return {v.x(), v.y(), v.z()}; }

/// Dihedral via the angle between the two plane normals, signed by the
/// orientation of the first arm relative to the second plane.
inline double dihedral_oracle(const V3& p1, const V3& p2, const V3& p3, const V3& p4) {
    const V3 b1 = sub(p2, p1), b2 = sub(p3, p2), b3 = sub(p4, p3);
    const V3 n1 = cross(b1, b2), n2 = cross(b2, b3);
    double c = dot(n1, n2) / std::sqrt(dot(n1, n1) * dot(n2, n2));
    c = std::clamp(c, -1.0, 1.0);
    const double angle = std::acos(c);
    return dot(b1, n2) < 0 ? -angle : angle;
}

/// Central-difference gradient of the spring energy.
inline std::map<mf::AtomId, mf::Vec3> fd_gradient(mf::Workspace ws, const mf::ForceFieldParams& p, double h) {
    std::map<mf::AtomId, mf::Vec3> out;
    for (auto& [id, atom] : ws.atoms) {
        mf::Vec3 g;
        for (int k = 0; k < 3; ++k) {
            const double x0 = atom.position[k];
            atom.position[k] = x0 + h;
            const double ep = mf::energy(ws, p);
            atom.position[k] = x0 - h;
            const double em = mf::energy(ws, p);
            atom.position[k] = x0;
            g[k] = (ep - em) / (2 * h);
        }
        out.emplace(id, g);
    }
    return out;
}

inline mf::Quat random_quaternion(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    mf::Quat q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized();
}

inline mf::Vec3 random_vec(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return mf::Vec3(u(rng), u(rng), u(rng));
}

/// Random valid workspace built only through public operations: mixed
/// elements, random bonds (including ring closures), random rigid poses.
inline mf::Workspace random_workspace(std::mt19937_64& rng, int max_atoms) {
    static const char* kSymbols[] = {"C", "C", "C", "H", "O", "N"};
    mf::Workspace ws;
    std::uniform_int_distribution<int> count(1, max_atoms);
    std::uniform_int_distribution<int> pick_symbol(0, 5);
    const int n = count(rng);
    std::vector<mf::AtomId> ids;
    for (int i = 0; i < n; ++i) ids.push_back(mf::create_atom(ws, kSymbols[pick_symbol(rng)], random_vec(rng, 8.0)));
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int tries = 0; tries < 3 * n; ++tries) {
        const mf::AtomId a = ids[pick(rng)], b = ids[pick(rng)];
        if (a == b || ws.bond_between(a, b) || ws.atom(a).free_slots() == 0 || ws.atom(b).free_slots() == 0) continue;
        mf::form_bond(ws, a, b);
    }
    std::set<mf::AtomId> seen;
    for (mf::AtomId id : ids) {
        if (seen.contains(id)) continue;
        auto comp = mf::connected_component(ws, id);
        seen.insert(comp.begin(), comp.end());
        mf::move_molecule(ws, id, random_vec(rng, 5.0), random_quaternion(rng), ws.atom(id).position);
    }
    return ws;
}

/// Brute-force graph isomorphism check by trying every vertex permutation.
inline bool isomorphic(const std::vector<std::pair<int, int>>& g1, const std::vector<std::pair<int, int>>& g2, int n) {
    if (g1.size() != g2.size()) return false;
    auto normalize = [](std::vector<std::pair<int, int>> e) {
        for (auto& p : e) {
            if (p.first > p.second) std::swap(p.first, p.second);
        }
        std::sort(e.begin(), e.end());
        return e;
    };
    const auto target = normalize(g2);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<std::pair<int, int>> mapped;
        for (auto [a, b] : g1) mapped.emplace_back(perm[a], perm[b]);
        if (normalize(mapped) == target) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace fixtures
