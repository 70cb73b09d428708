#pragma once

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <vector>

#include "elastonet/errors.hpp"
#include "elastonet/linalg.hpp"

namespace elastonet {

enum class NodeKind { Terminal, Interior };

/// A point mass in the network. Positions are dimensionless, masses >= 0.
struct Node {
    std::string label;
    Eigen::VectorXd position;  // d-vector, d in {2,3}
    double mass = 0.0;
    NodeKind kind = NodeKind::Interior;
};

/// A Hookean spring between two distinct nodes, stiffness >= 0.
struct Spring {
    std::string a;
    std::string b;
    double stiffness = 0.0;
};

/// An immutable spring-mass network. Construction validates all invariants:
/// finite positions, non-negative masses and stiffnesses, unique labels,
/// distinct node positions, at least one terminal. Duplicate springs between
/// the same unordered pair are merged by summing their stiffnesses.
class Network {
public:
    Network(int dimension, std::vector<Node> nodes, std::vector<Spring> springs);

    int dimension() const { return dim_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Spring>& springs() const { return springs_; }

    /// Index of the node with the given label; throws Error if absent.
    int node_index(const std::string& label) const;
    bool has_node(const std::string& label) const;

    /// Indices of terminal nodes, in node-list order. This order fixes the
    /// block ordering of every response matrix derived from the network.
    const std::vector<int>& terminal_indices() const { return terminals_; }
    std::vector<int> interior_indices() const;

    int num_terminals() const { return static_cast<int>(terminals_.size()); }
    std::vector<Eigen::VectorXd> terminal_positions() const;

private:
    int dim_;
    std::vector<Node> nodes_;
    std::vector<Spring> springs_;
    std::unordered_map<std::string, int> index_;
    std::vector<int> terminals_;
};

/// Forces attached to points; the balance conditions are checked by
/// check_balanced rather than enforced on construction.
struct BalancedForceSystem {
    std::vector<Eigen::VectorXd> points;
    std::vector<Eigen::VectorXd> forces;
};

struct BalanceReport {
    bool balanced = false;
    Eigen::VectorXd force_residual;   // sum of forces
    Eigen::VectorXd torque_residual;  // size 1 in 2D, 3 in 3D
    double scale = 1.0;
};

/// Checks zero net force and zero net torque within tol * scale, where
/// scale = max(1, sum ||f_i|| (1 + ||x_i||)).
BalanceReport check_balanced(const BalancedForceSystem& sys, double tol = kRelTol);

/// Wedge product: scalar det[u,v] in 2D, cross product in 3D.
Eigen::VectorXd wedge(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// A symmetric PSD nd x nd matrix whose columns are balanced force systems
/// at the given terminal positions.
struct StaticResponse {
    std::vector<Eigen::VectorXd> terminal_positions;
    Eigen::MatrixXd matrix;
};

/// One resonance term C / (omega^2 - omega_sq).
struct ModalTerm {
    double omega_sq = 0.0;
    Eigen::MatrixXd C;
};

/// The rational response W(omega) = A - omega^2 M + sum_i C_i / (omega^2 - omega_i^2),
/// with M = diag(m_1 e, ..., m_n e) stored as the per-terminal masses.
struct ModalResponse {
    std::vector<Eigen::VectorXd> terminal_positions;
    Eigen::MatrixXd A;
    Eigen::VectorXd terminal_masses;  // length n; each repeats d times in M
    std::vector<ModalTerm> terms;

    int dimension() const {
        return terminal_positions.empty() ? 0
                                          : static_cast<int>(terminal_positions[0].size());
    }
    Eigen::MatrixXd mass_matrix() const;
    /// W(0) = A - sum omega_i^{-2} C_i.
    Eigen::MatrixXd static_part() const;
};

/// Evaluates the modal form at a frequency. Throws ResonanceProximity when
/// omega^2 is within kResGuard * max(1, max omega_i^2) of a resonance.
Eigen::MatrixXd evaluate_modal(const ModalResponse& resp, double omega);

}  // namespace elastonet
