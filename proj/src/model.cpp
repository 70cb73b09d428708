#include "elastonet/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace elastonet {

Network::Network(int dimension, std::vector<Node> nodes, std::vector<Spring> springs)
    : dim_(dimension), nodes_(std::move(nodes)) {
    if (dim_ != 2 && dim_ != 3) {
        throw DimensionMismatch("network dimension must be 2 or 3");
    }
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        const Node& n = nodes_[i];
        if (n.position.size() != dim_) {
            throw DimensionMismatch("node '" + n.label + "' has wrong position size");
        }
        if (!n.position.allFinite()) {
            throw Error("node '" + n.label + "' has non-finite position");
        }
        if (!(n.mass >= 0.0) || !std::isfinite(n.mass)) {
            throw Error("node '" + n.label + "' has invalid mass");
        }
        if (!index_.emplace(n.label, i).second) {
            throw Error("duplicate node label '" + n.label + "'");
        }
        if (n.kind == NodeKind::Terminal) terminals_.push_back(i);
    }
    for (size_t i = 0; i < nodes_.size(); ++i) {
        for (size_t j = i + 1; j < nodes_.size(); ++j) {
            if ((nodes_[i].position - nodes_[j].position).norm() == 0.0) {
                throw Error("coincident node positions: '" + nodes_[i].label +
                            "' and '" + nodes_[j].label + "'");
            }
        }
    }
    if (terminals_.empty()) {
        throw Error("network must have at least one terminal node");
    }

    // Merge duplicate springs between the same unordered pair.
    std::map<std::pair<int, int>, double> merged;
    for (const Spring& s : springs) {
        int ia = node_index(s.a);
        int ib = node_index(s.b);
        if (ia == ib) {
            throw ZeroRestLength("spring with identical endpoints '" + s.a + "'");
        }
        if (!(s.stiffness >= 0.0) || !std::isfinite(s.stiffness)) {
            throw NegativeStiffness("spring (" + s.a + "," + s.b +
                                    ") has invalid stiffness");
        }
        auto key = std::minmax(ia, ib);
        merged[key] += s.stiffness;
    }
    springs_.reserve(merged.size());
    for (const auto& [key, k] : merged) {
        springs_.push_back({nodes_[key.first].label, nodes_[key.second].label, k});
    }
}

int Network::node_index(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw Error("unknown node label '" + label + "'");
    return it->second;
}

bool Network::has_node(const std::string& label) const {
    return index_.count(label) > 0;
}

std::vector<int> Network::interior_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        if (nodes_[i].kind == NodeKind::Interior) out.push_back(i);
    }
    return out;
}

std::vector<Eigen::VectorXd> Network::terminal_positions() const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(terminals_.size());
    for (int i : terminals_) out.push_back(nodes_[i].position);
    return out;
}

Eigen::VectorXd wedge(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != v.size()) throw DimensionMismatch("wedge of mixed dimensions");
    if (u.size() == 2) {
        Eigen::VectorXd w(1);
        w(0) = u(0) * v(1) - u(1) * v(0);
        return w;
    }
    if (u.size() == 3) {
        Eigen::VectorXd w(3);
        w(0) = u(1) * v(2) - u(2) * v(1);
        w(1) = u(2) * v(0) - u(0) * v(2);
        w(2) = u(0) * v(1) - u(1) * v(0);
        return w;
    }
    throw DimensionMismatch("wedge defined only for d=2,3");
}

BalanceReport check_balanced(const BalancedForceSystem& sys, double tol) {
    if (sys.points.size() != sys.forces.size()) {
        throw DimensionMismatch("points/forces length mismatch");
    }
    if (sys.points.empty()) {
        BalanceReport r;
        r.balanced = true;
        r.force_residual = Eigen::VectorXd::Zero(0);
        r.torque_residual = Eigen::VectorXd::Zero(0);
        return r;
    }
    const int d = static_cast<int>(sys.points[0].size());
    if (d != 2 && d != 3) throw DimensionMismatch("dimension must be 2 or 3");

    BalanceReport r;
    r.force_residual = Eigen::VectorXd::Zero(d);
    r.torque_residual = Eigen::VectorXd::Zero(d == 2 ? 1 : 3);
    double scale = 0.0;
    for (size_t i = 0; i < sys.points.size(); ++i) {
        if (sys.points[i].size() != d || sys.forces[i].size() != d) {
            throw DimensionMismatch("inconsistent vector sizes in force system");
        }
        r.force_residual += sys.forces[i];
        r.torque_residual += wedge(sys.points[i], sys.forces[i]);
        scale += sys.forces[i].norm() * (1.0 + sys.points[i].norm());
    }
    r.scale = std::max(1.0, scale);
    r.balanced = r.force_residual.norm() <= tol * r.scale &&
                 r.torque_residual.norm() <= tol * r.scale;
    return r;
}

Eigen::MatrixXd ModalResponse::mass_matrix() const {
    const int d = dimension();
    const int n = static_cast<int>(terminal_positions.size());
    Eigen::VectorXd diag(n * d);
    for (int i = 0; i < n; ++i) {
        diag.segment(i * d, d).setConstant(terminal_masses(i));
    }
    return diag.asDiagonal();
}

Eigen::MatrixXd ModalResponse::static_part() const {
    Eigen::MatrixXd w = A;
    for (const ModalTerm& t : terms) {
        w -= t.C / t.omega_sq;
    }
    return symmetrized(w);
}

Eigen::MatrixXd evaluate_modal(const ModalResponse& resp, double omega) {
    const double om2 = omega * omega;
    double max_res = 0.0;
    for (const ModalTerm& t : resp.terms) max_res = std::max(max_res, t.omega_sq);
    const double guard = kResGuard * std::max(1.0, max_res);
    for (const ModalTerm& t : resp.terms) {
        if (std::abs(om2 - t.omega_sq) < guard) {
            throw ResonanceProximity("frequency too close to resonance", t.omega_sq);
        }
    }
    Eigen::MatrixXd w = resp.A - om2 * resp.mass_matrix();
    for (const ModalTerm& t : resp.terms) {
        w += t.C / (om2 - t.omega_sq);
    }
    return symmetrized(w);
}

}  // namespace elastonet
