#include "molecuforge/relaxation.hpp"

#include <cmath>

#include "molecuforge/error.hpp"
#include "molecuforge/geometry.hpp"

namespace molecuforge {

namespace {

constexpr double kMinBond = 1e-9;  // Å

struct BondTerm {
    std::size_t a, b;
    double rest;
};

struct AngleTerm {
    std::size_t a, center, b;
    double rest;
};

/// Flattened force-field terms over a dense atom index.
struct Model {
    std::vector<AtomId> ids;
    std::vector<Vec3> positions;
    std::vector<BondTerm> bonds;
    std::vector<AngleTerm> angles;
};

Model build_model(const Workspace& ws) {
    Model m;
    std::map<AtomId, std::size_t> index;
    for (const auto& [id, atom] : ws.atoms) {
        index.emplace(id, m.ids.size());
        m.ids.push_back(id);
        m.positions.push_back(atom.position);
    }
    for (const auto& [id, bond] : ws.bonds) {
        m.bonds.push_back(BondTerm{index.at(bond.ends[0].atom_id), index.at(bond.ends[1].atom_id), bond.rest_length});
    }
    for (const auto& [id, atom] : ws.atoms) {
        const std::vector<AtomId> n = ws.neighbors(id);
        if (n.size() < 2) continue;
        const double rest = preset_angle(atom.valency());
        for (std::size_t i = 0; i < n.size(); ++i) {
            for (std::size_t j = i + 1; j < n.size(); ++j) {
                m.angles.push_back(AngleTerm{index.at(n[i]), index.at(id), index.at(n[j]), rest});
            }
        }
    }
    return m;
}

double bond_length(const std::vector<Vec3>& x, const BondTerm& t) {
    const double len = (x[t.b] - x[t.a]).norm();
    if (len < kMinBond) throw Error(ErrorCode::DegeneratePositions, "bonded atoms closer than 1e-9 Å");
    return len;
}

double model_energy(const Model& m, const std::vector<Vec3>& x, const ForceFieldParams& p) {
    double e = 0.0;
    for (const auto& t : m.bonds) {
        const double d = bond_length(x, t) - t.rest;
        e += p.k_bond * d * d;
    }
    for (const auto& t : m.angles) {
        const double d = arm_angle(x[t.a] - x[t.center], x[t.b] - x[t.center]) - t.rest;
        e += p.k_angle * d * d;
    }
    return e;
}

std::vector<Vec3> model_gradient(const Model& m, const std::vector<Vec3>& x, const ForceFieldParams& p) {
    std::vector<Vec3> g(x.size(), Vec3::Zero());
    for (const auto& t : m.bonds) {
        const Vec3 r = x[t.b] - x[t.a];
        const double len = bond_length(x, t);
        const Vec3 f = 2.0 * p.k_bond * (len - t.rest) / len * r;
        g[t.b] += f;
        g[t.a] -= f;
    }
    for (const auto& t : m.angles) {
        const Vec3 u = x[t.a] - x[t.center];
        const Vec3 v = x[t.b] - x[t.center];
        const double theta = arm_angle(u, v);
        const Vec3 uh = u.normalized();
        const Vec3 vh = v.normalized();
        const Vec3 w = uh.cross(vh);
        const double s = w.norm();  // sin(theta)
        // Collinear or folded arms: the in-plane direction is undefined.
        if (s < 1e-12) continue;
        const double coef = 2.0 * p.k_angle * (theta - t.rest);
        const Vec3 dtheta_a = -w.cross(uh) / (s * u.norm());
        const Vec3 dtheta_b = w.cross(vh) / (s * v.norm());
        g[t.a] += coef * dtheta_a;
        g[t.b] += coef * dtheta_b;
        g[t.center] -= coef * (dtheta_a + dtheta_b);
    }
    return g;
}

}  // namespace

double energy(const Workspace& ws, const ForceFieldParams& params) {
    const Model m = build_model(ws);
    return model_energy(m, m.positions, params);
}

std::map<AtomId, Vec3> gradient(const Workspace& ws, const ForceFieldParams& params) {
    const Model m = build_model(ws);
    const std::vector<Vec3> g = model_gradient(m, m.positions, params);
    std::map<AtomId, Vec3> out;
    for (std::size_t i = 0; i < m.ids.size(); ++i) out.emplace(m.ids[i], g[i]);
    return out;
}

RelaxReport relax(Workspace& ws, const ForceFieldParams& params, const std::set<AtomId>& fixed) {
    if (params.k_bond < 0 || params.k_angle < 0 || !(params.gradient_tolerance > 0) || !(params.initial_step > 0) ||
        params.max_iterations < 0) {
        throw Error(ErrorCode::BadArguments, "invalid force-field parameters");
    }
    for (AtomId id : fixed) ws.atom(id);

    const Model m = build_model(ws);
    std::vector<bool> movable(m.ids.size());
    for (std::size_t i = 0; i < m.ids.size(); ++i) movable[i] = !fixed.contains(m.ids[i]);

    auto free_norm2 = [&](const std::vector<Vec3>& g) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (movable[i]) s += g[i].squaredNorm();
        }
        return s;
    };

    std::vector<Vec3> x = m.positions;
    double e = model_energy(m, x, params);
    std::vector<Vec3> g = model_gradient(m, x, params);
    double g2 = free_norm2(g);

    RelaxReport report;
    report.initial_energy = e;
    report.energy_trace.push_back(e);

    double step = params.initial_step;
    std::vector<Vec3> trial(x.size());
    while (std::sqrt(g2) > params.gradient_tolerance && report.iterations < params.max_iterations) {
        bool accepted = false;
        double e_trial = e;
        while (step > 1e-30) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = movable[i] ? Vec3(x[i] - step * g[i]) : x[i];
            try {
                e_trial = model_energy(m, trial, params);
            } catch (const Error&) {
                step *= 0.5;  // trial collapsed a bond; treat as overshoot
                continue;
            }
            if (e_trial <= e - params.armijo * step * g2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no representable descent left
        x.swap(trial);
        e = e_trial;
        std::vector<Vec3> g_next = model_gradient(m, x, params);
        // Barzilai-Borwein step as the next trial length; the line search
        // above still enforces sufficient decrease.
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!movable[i]) continue;
            const Vec3 s = x[i] - trial[i];
            ss += s.squaredNorm();
            sy += s.dot(g_next[i] - g[i]);
        }
        g.swap(g_next);
        g2 = free_norm2(g);
        ++report.iterations;
        report.energy_trace.push_back(e);
        step = sy > 0.0 ? std::min(ss / sy, 1e6) : 2.0 * step;
    }

    for (std::size_t i = 0; i < m.ids.size(); ++i) {
        if (movable[i]) ws.atom(m.ids[i]).position = x[i];
    }
    report.final_energy = e;
    report.final_gradient_norm = std::sqrt(g2);
    report.converged = report.final_gradient_norm <= params.gradient_tolerance;
    return report;
}

}  // namespace molecuforge
