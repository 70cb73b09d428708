#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "elastonet/reduce.hpp"
#include "elastonet/synth2d.hpp"

namespace elastonet {

/// One stiffness change: the spring (a, b) gains epsilon * factor.
struct SpringChange {
    std::string a;
    std::string b;
    double factor = 1.0;
};

/// A structured perturbation K -> K + epsilon E: existing springs change by
/// epsilon * factor, new springs appear with stiffness epsilon * factor.
/// No deletions; every resulting stiffness must stay non-negative.
struct Perturbation {
    std::vector<SpringChange> scaled_springs;
    std::vector<SpringChange> added_springs;  // factors must be positive
    double epsilon = 0.0;
};

/// Network with the perturbation applied; the node set is unchanged.
Network apply_perturbation(const Network& net, const Perturbation& pert);

/// Drift of the terminal response under a growing perturbation, with a
/// log-log least-squares fit of e(epsilon) = max over omega of
/// ||W(omega; epsilon) - W(omega)||.
struct StabilityReport {
    std::vector<double> eps;
    std::vector<double> drift;
    std::optional<double> slope;  // absent with fewer than two usable points
    double fit_residual = 0.0;    // rms residual of the log-log fit
};

StabilityReport stability_experiment(const Network& net, Perturbation pert,
                                     const std::vector<double>& eps_list,
                                     const std::vector<double>& omegas);

/// True when the floppy nullspace of the perturbed interior block is
/// contained in the unperturbed one (always holds for PSD perturbations;
/// this verifies it numerically).
bool floppy_nullspace_containment(const Network& net, const Perturbation& pert);

struct FloppyFixReport {
    Network fixed_network;
    double added_spring_constant = 0.0;
    std::vector<std::string> anchor_nodes;
    double residual_drift = 0.0;  // sup over sampled omega of ||W_fixed - W||
    FloppyModes remaining_modes;  // empty on success
};

/// Removes floppy interior modes by completing the spring graph with weak
/// springs of stiffness eps_k, adding off-line anchor nodes when the
/// terminals are degenerate (collinear in 2D, coplanar node sets in 3D).
/// Throws UnfixableFloppy for 3D networks whose terminals are collinear.
FloppyFixReport eliminate_floppy(const Network& net, double eps_k,
                                 const PlacementPolicy& policy);

}  // namespace elastonet
