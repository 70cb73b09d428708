#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "elastonet/model.hpp"

namespace elastonet {

/// One rank-one piece lambda * f f^T of a response, optionally carrying a
/// resonance (absent means a static piece).
struct RankOneTarget {
    double lambda = 0.0;
    Eigen::VectorXd f;
    std::optional<double> omega0_sq;
};

/// Outcome of a single validation condition with its measured residual.
struct Condition {
    std::string name;
    bool passed = false;
    double residual = 0.0;
};

struct ValidationReport {
    std::vector<Condition> conditions;
    bool passed() const {
        for (const auto& c : conditions) {
            if (!c.passed) return false;
        }
        return true;
    }
};

/// Checks shape/realness, symmetry, positive semidefiniteness, and balance
/// of every column against the terminal positions.
ValidationReport validate_static(const StaticResponse& resp, double tol = kRelTol);

/// Checks the modal structure: positive distinct resonances, PSD symmetric
/// residues, non-negative masses, and validate_static on W(0).
ValidationReport validate_modal(const ModalResponse& resp, double tol = kRelTol);

/// Spectral split W = sum lambda_i w_i w_i^T over strictly positive
/// eigenvalues. Requires validate_static to pass.
std::vector<RankOneTarget> split_rank_one(const StaticResponse& resp,
                                          double tol = kRelTol);

/// Decomposition of a modal response for synthesis: the static part W(0),
/// the terminal masses, and one dynamic rank-one target per positive
/// eigenvalue of each residue matrix.
struct ModalSplit {
    StaticResponse static_part;
    Eigen::VectorXd terminal_masses;
    std::vector<RankOneTarget> dynamic_targets;
};

/// Rewrites W as W(0) - omega^2 M + sum C_i omega^2/(omega_i^2 (omega^2-omega_i^2));
/// each dynamic target carries force sqrt(lambda_j)/omega_i * c_j and
/// resonance omega_i^2.
ModalSplit split_modal(const ModalResponse& resp, double tol = kRelTol);

}  // namespace elastonet
