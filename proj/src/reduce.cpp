#include "elastonet/reduce.hpp"

#include <algorithm>
#include <cmath>

namespace elastonet {

namespace {

std::vector<int> dof_indices(const std::vector<int>& nodes, int d) {
    std::vector<int> out;
    out.reserve(nodes.size() * d);
    for (int n : nodes) {
        for (int c = 0; c < d; ++c) out.push_back(n * d + c);
    }
    return out;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const std::vector<int>& rows,
                          const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < cols.size(); ++j) {
            out(i, j) = m(rows[i], cols[j]);
        }
    }
    return out;
}

/// Stiffness over B u J after static elimination of the massless interiors L
/// (the matrix Kt), together with the J-block masses.
struct MasslessEliminated {
    Eigen::MatrixXd Kt_BB;
    Eigen::MatrixXd Kt_BJ;
    Eigen::MatrixXd Kt_JJ;
    Eigen::VectorXd M_BB_diag;  // terminal masses, repeated d times
    Eigen::VectorXd M_JJ_diag;  // positive by construction of J
};

MasslessEliminated eliminate_massless(const Network& net) {
    const int d = net.dimension();
    const AssembledSystem sys = assemble(net);
    const Partition part = make_partition(net);
    const auto bi = dof_indices(part.B, d);
    const auto ji = dof_indices(part.J, d);
    const auto li = dof_indices(part.L, d);

    std::vector<int> bj = bi;
    bj.insert(bj.end(), ji.begin(), ji.end());

    Eigen::MatrixXd kt = submatrix(sys.K, bj, bj);
    if (!li.empty()) {
        const Eigen::MatrixXd k_bj_l = submatrix(sys.K, bj, li);
        const Eigen::MatrixXd k_ll = submatrix(sys.K, li, li);
        kt -= k_bj_l * pseudo_inverse(k_ll) * k_bj_l.transpose();
        kt = symmetrized(kt);
    }

    const int nb = static_cast<int>(bi.size());
    const int nj = static_cast<int>(ji.size());
    MasslessEliminated out;
    out.Kt_BB = kt.topLeftCorner(nb, nb);
    out.Kt_BJ = kt.topRightCorner(nb, nj);
    out.Kt_JJ = kt.bottomRightCorner(nj, nj);
    out.M_BB_diag = Eigen::VectorXd(nb);
    for (int i = 0; i < nb; ++i) out.M_BB_diag(i) = sys.M_diag(bi[i]);
    out.M_JJ_diag = Eigen::VectorXd(nj);
    for (int i = 0; i < nj; ++i) out.M_JJ_diag(i) = sys.M_diag(ji[i]);
    return out;
}

}  // namespace

Partition make_partition(const Network& net) {
    Partition p;
    p.B = net.terminal_indices();
    p.I = net.interior_indices();
    for (int i : p.I) {
        if (net.nodes()[i].mass > 0.0) {
            p.J.push_back(i);
        } else {
            p.L.push_back(i);
        }
    }
    return p;
}

StaticResponse static_response(const Network& net) {
    const int d = net.dimension();
    const AssembledSystem sys = assemble(net);
    const Partition part = make_partition(net);
    const auto bi = dof_indices(part.B, d);
    const auto ii = dof_indices(part.I, d);

    Eigen::MatrixXd w = submatrix(sys.K, bi, bi);
    if (!ii.empty()) {
        const Eigen::MatrixXd a_bi = submatrix(sys.K, bi, ii);
        const Eigen::MatrixXd a_ii = submatrix(sys.K, ii, ii);
        w -= a_bi * pseudo_inverse(a_ii) * a_bi.transpose();
    }
    return {net.terminal_positions(), symmetrized(w)};
}

FloppyModes floppy_modes(const Network& net) {
    const int d = net.dimension();
    const AssembledSystem sys = assemble(net);
    const Partition part = make_partition(net);
    const auto ii = dof_indices(part.I, d);
    FloppyModes fm;
    if (ii.empty()) {
        fm.basis = Eigen::MatrixXd(0, 0);
        return fm;
    }
    fm.basis = nullspace_basis(submatrix(sys.K, ii, ii), fm.tolerance);
    return fm;
}

Eigen::VectorXd resonance_spectrum(const Network& net) {
    const MasslessEliminated el = eliminate_massless(net);
    const int nj = static_cast<int>(el.M_JJ_diag.size());
    if (nj == 0) return Eigen::VectorXd(0);
    const Eigen::VectorXd inv_sqrt_m = el.M_JJ_diag.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd c = symmetrized(inv_sqrt_m.asDiagonal() * el.Kt_JJ *
                                          inv_sqrt_m.asDiagonal());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Eigen::MatrixXd dynamic_response_at(const Network& net, double omega) {
    const double om2 = omega * omega;
    const MasslessEliminated el = eliminate_massless(net);
    const int nj = static_cast<int>(el.M_JJ_diag.size());
    Eigen::MatrixXd w =
        el.Kt_BB - om2 * Eigen::MatrixXd(el.M_BB_diag.asDiagonal());
    if (nj > 0) {
        const Eigen::VectorXd spectrum = resonance_spectrum(net);
        const double spec_max = std::max(0.0, spectrum.maxCoeff());
        // Zero eigenvalues are floppy directions, not resonances: their
        // residues vanish (Schur consistency), so only positive eigenvalues
        // carry poles.
        const double zero_cut = kPinvCutoff * std::max(1.0, spec_max);
        const double guard = kResGuard * std::max(1.0, spec_max);
        for (int i = 0; i < spectrum.size(); ++i) {
            if (spectrum(i) > zero_cut && std::abs(om2 - spectrum(i)) < guard) {
                throw ResonanceProximity("omega^2 too close to a resonance",
                                         spectrum(i));
            }
        }
        if (om2 <= zero_cut) {
            // The shifted block may be singular through the floppy nullspace.
            w -= el.Kt_BJ * pseudo_inverse(el.Kt_JJ) * el.Kt_BJ.transpose();
        } else {
            Eigen::MatrixXd shifted = el.Kt_JJ;
            shifted.diagonal() -= om2 * el.M_JJ_diag;
            w -= el.Kt_BJ * shifted.partialPivLu().solve(el.Kt_BJ.transpose());
        }
    }
    return symmetrized(w);
}

ModalResponse extract_modal(const Network& net) {
    const int d = net.dimension();
    const MasslessEliminated el = eliminate_massless(net);
    ModalResponse resp;
    resp.terminal_positions = net.terminal_positions();
    resp.A = el.Kt_BB;
    const int n = net.num_terminals();
    resp.terminal_masses = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) resp.terminal_masses(i) = el.M_BB_diag(i * d);

    const int nj = static_cast<int>(el.M_JJ_diag.size());
    if (nj == 0) return resp;

    const Eigen::VectorXd inv_sqrt_m = el.M_JJ_diag.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd c = symmetrized(inv_sqrt_m.asDiagonal() * el.Kt_JJ *
                                          inv_sqrt_m.asDiagonal());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    const Eigen::VectorXd eig = es.eigenvalues();
    const double eig_max = std::max(0.0, eig.maxCoeff());
    const double zero_cut = kPinvCutoff * std::max(1.0, eig_max);
    const double residue_cut =
        kRelTol * std::max(1.0, spectral_norm(el.Kt_BJ));

    // Residue vectors ct_j = Kt_BJ M_JJ^{-1/2} c_j for the positive eigenvalues;
    // zero-eigenvalue residues vanish and are dropped.
    std::vector<std::pair<double, Eigen::VectorXd>> kept;
    for (int j = 0; j < nj; ++j) {
        if (eig(j) <= zero_cut) continue;
        Eigen::VectorXd ct =
            el.Kt_BJ * (inv_sqrt_m.asDiagonal() * es.eigenvectors().col(j));
        if (ct.norm() <= residue_cut) continue;
        kept.emplace_back(eig(j), std::move(ct));
    }
    std::sort(kept.begin(), kept.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Cluster nearly equal eigenvalues into one residue matrix.
    size_t i = 0;
    while (i < kept.size()) {
        size_t j = i + 1;
        double cluster_max = kept[i].first;
        while (j < kept.size() &&
               kept[j].first - cluster_max <= kClusterTol * std::max(1.0, kept[j].first)) {
            cluster_max = kept[j].first;
            ++j;
        }
        ModalTerm term;
        double sum = 0.0;
        term.C = Eigen::MatrixXd::Zero(n * d, n * d);
        for (size_t m = i; m < j; ++m) {
            sum += kept[m].first;
            term.C += kept[m].second * kept[m].second.transpose();
        }
        term.omega_sq = sum / static_cast<double>(j - i);
        term.C = symmetrized(term.C);
        resp.terms.push_back(std::move(term));
        i = j;
    }
    return resp;
}

}  // namespace elastonet
