#pragma once

#include <map>
#include <set>
#include <vector>

#include "molecuforge/workspace.hpp"

namespace molecuforge {

struct ForceFieldParams {
    double k_bond = 100.0;             // energy / Å^2
    double k_angle = 10.0;             // energy / rad^2
    int max_iterations = 10000;
    double gradient_tolerance = 1e-6;  // energy / Å
    double initial_step = 1e-3;        // Å^2 / energy
    double armijo = 1e-4;
};

struct RelaxReport {
    int iterations = 0;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double final_gradient_norm = 0.0;
    bool converged = false;
    /// Energy after each accepted step, starting with the initial energy.
    std::vector<double> energy_trace;
};

/// Harmonic bond-length plus bond-angle spring energy. The rest angle at a
/// center is the vacancy-preset angle for its valency.
double energy(const Workspace& ws, const ForceFieldParams& params);

/// dE/dx for every atom, keyed by atom id.
std::map<AtomId, Vec3> gradient(const Workspace& ws, const ForceFieldParams& params);

/// Gradient descent with Armijo backtracking. Atoms in `fixed` never move.
RelaxReport relax(Workspace& ws, const ForceFieldParams& params, const std::set<AtomId>& fixed);

}  // namespace molecuforge
