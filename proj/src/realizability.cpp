#include "elastonet/realizability.hpp"

#include <cmath>
#include <limits>

namespace elastonet {

namespace {

int check_dimension(const std::vector<Eigen::VectorXd>& positions) {
    if (positions.empty()) throw DimensionMismatch("no terminal positions");
    const int d = static_cast<int>(positions[0].size());
    if (d != 2 && d != 3) throw DimensionMismatch("dimension must be 2 or 3");
    for (const auto& p : positions) {
        if (p.size() != d) throw DimensionMismatch("mixed position dimensions");
    }
    return d;
}

}  // namespace

ValidationReport validate_static(const StaticResponse& resp, double tol) {
    const int d = check_dimension(resp.terminal_positions);
    const int n = static_cast<int>(resp.terminal_positions.size());
    const int nd = n * d;
    ValidationReport report;

    const bool shape_ok =
        resp.matrix.rows() == nd && resp.matrix.cols() == nd && resp.matrix.allFinite();
    report.conditions.push_back({"shape", shape_ok, 0.0});
    if (!shape_ok) {
        report.conditions.push_back({"symmetry", false, 0.0});
        report.conditions.push_back({"psd", false, 0.0});
        report.conditions.push_back({"balanced_columns", false, 0.0});
        return report;
    }

    const double norm = std::max(1.0, spectral_norm(resp.matrix));
    const double asym = spectral_norm(resp.matrix - resp.matrix.transpose());
    report.conditions.push_back({"symmetry", asym <= tol * norm, asym});

    const double min_eig = min_eigenvalue(resp.matrix);
    report.conditions.push_back({"psd", min_eig >= -tol * norm, min_eig});

    double worst = 0.0;
    bool balanced = true;
    for (int col = 0; col < nd; ++col) {
        BalancedForceSystem sys;
        for (int i = 0; i < n; ++i) {
            sys.points.push_back(resp.terminal_positions[i]);
            sys.forces.push_back(resp.matrix.col(col).segment(i * d, d));
        }
        auto r = check_balanced(sys, tol);
        const double res =
            std::max(r.force_residual.norm(), r.torque_residual.norm()) / r.scale;
        worst = std::max(worst, res);
        balanced = balanced && r.balanced;
    }
    report.conditions.push_back({"balanced_columns", balanced, worst});
    return report;
}

ValidationReport validate_modal(const ModalResponse& resp, double tol) {
    const int d = check_dimension(resp.terminal_positions);
    const int n = static_cast<int>(resp.terminal_positions.size());
    const int nd = n * d;
    ValidationReport report;

    bool shape_ok = resp.A.rows() == nd && resp.A.cols() == nd && resp.A.allFinite() &&
                    resp.terminal_masses.size() == n;
    for (const ModalTerm& t : resp.terms) {
        shape_ok = shape_ok && t.C.rows() == nd && t.C.cols() == nd && t.C.allFinite();
    }
    report.conditions.push_back({"shape", shape_ok, 0.0});
    if (!shape_ok) return report;

    const bool masses_ok = (resp.terminal_masses.array() >= 0.0).all() &&
                           resp.terminal_masses.allFinite();
    report.conditions.push_back(
        {"masses_nonnegative", masses_ok,
         resp.terminal_masses.size() > 0 ? resp.terminal_masses.minCoeff() : 0.0});

    double max_res = 0.0;
    bool positive = true;
    for (const ModalTerm& t : resp.terms) {
        positive = positive && t.omega_sq > 0.0 && std::isfinite(t.omega_sq);
        max_res = std::max(max_res, t.omega_sq);
    }
    report.conditions.push_back({"resonances_positive_finite", positive, 0.0});

    bool distinct = true;
    double min_gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < resp.terms.size(); ++i) {
        for (size_t j = i + 1; j < resp.terms.size(); ++j) {
            const double gap =
                std::abs(resp.terms[i].omega_sq - resp.terms[j].omega_sq);
            min_gap = std::min(min_gap, gap);
            if (gap <= kClusterTol * std::max(1.0, max_res)) distinct = false;
        }
    }
    report.conditions.push_back(
        {"resonances_distinct", distinct,
         std::isfinite(min_gap) ? min_gap : 0.0});

    bool residues_ok = true;
    double worst_eig = 0.0;
    for (const ModalTerm& t : resp.terms) {
        const double norm = std::max(1.0, spectral_norm(t.C));
        const double asym = spectral_norm(t.C - t.C.transpose());
        const double min_eig = min_eigenvalue(t.C);
        if (asym > tol * norm || min_eig < -tol * norm) residues_ok = false;
        worst_eig = std::min(worst_eig, min_eig);
    }
    report.conditions.push_back({"residues_symmetric_psd", residues_ok, worst_eig});

    auto static_report =
        validate_static({resp.terminal_positions, resp.static_part()}, tol);
    for (auto& c : static_report.conditions) {
        c.name = "static_" + c.name;
        report.conditions.push_back(std::move(c));
    }
    return report;
}

std::vector<RankOneTarget> split_rank_one(const StaticResponse& resp, double tol) {
    auto report = validate_static(resp, tol);
    if (!report.passed()) {
        throw ValidationFailed("static response fails validation; cannot split");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(resp.matrix));
    const double cutoff = tol * std::max(1.0, spectral_norm(resp.matrix));
    std::vector<RankOneTarget> pieces;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) > cutoff) {
            pieces.push_back({es.eigenvalues()(i), es.eigenvectors().col(i),
                              std::nullopt});
        }
    }
    return pieces;
}

ModalSplit split_modal(const ModalResponse& resp, double tol) {
    auto report = validate_modal(resp, tol);
    if (!report.passed()) {
        throw ValidationFailed("modal response fails validation; cannot split");
    }
    ModalSplit out;
    out.static_part = {resp.terminal_positions, resp.static_part()};
    out.terminal_masses = resp.terminal_masses;
    for (const ModalTerm& t : resp.terms) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(t.C));
        const double cutoff = tol * std::max(1.0, spectral_norm(t.C));
        for (int j = 0; j < es.eigenvalues().size(); ++j) {
            if (es.eigenvalues()(j) > cutoff) {
                RankOneTarget target;
                // force sqrt(lambda_j)/omega_i * c_j, pole at omega_i^2
                target.lambda = 1.0;
                target.f = std::sqrt(es.eigenvalues()(j) / t.omega_sq) *
                           es.eigenvectors().col(j);
                target.omega0_sq = t.omega_sq;
                out.dynamic_targets.push_back(std::move(target));
            }
        }
    }
    return out;
}

}  // namespace elastonet
