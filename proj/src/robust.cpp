#include "elastonet/robust.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "elastonet/assembly.hpp"

namespace elastonet {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::pair<std::string, std::string> ordered(const std::string& a,
                                            const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

/// Interior block A_II of the assembled stiffness matrix.
MatrixXd interior_block(const Network& net) {
    const auto sys = assemble(net);
    const auto interior = net.interior_indices();
    const int d = net.dimension();
    std::vector<int> dofs;
    for (int idx : interior) {
        for (int c = 0; c < d; ++c) dofs.push_back(idx * d + c);
    }
    MatrixXd block(dofs.size(), dofs.size());
    for (size_t r = 0; r < dofs.size(); ++r) {
        for (size_t c = 0; c < dofs.size(); ++c) {
            block(r, c) = sys.K(dofs[r], dofs[c]);
        }
    }
    return block;
}

/// Sampled frequencies for drift measurements: a log-spaced grid over the
/// combined spectral range, skipping points near a resonance of either
/// network.
std::vector<double> drift_grid(const Network& a, const Network& b) {
    std::vector<double> resonances;
    for (const Network* net : {&a, &b}) {
        const VectorXd s = resonance_spectrum(*net);
        for (int i = 0; i < s.size(); ++i) resonances.push_back(s(i));
    }
    double top = 2.0;
    for (double r : resonances) top = std::max(top, 1.5 * r + 1.0);
    const double guard =
        10.0 * kResGuard *
        std::max(1.0, resonances.empty()
                          ? 1.0
                          : *std::max_element(resonances.begin(), resonances.end()));
    std::vector<double> omegas;
    const int points = 16;
    for (int i = 0; i < points; ++i) {
        const double om2 =
            1e-3 * std::pow(top / 1e-3, static_cast<double>(i) / (points - 1));
        bool clear = true;
        for (double r : resonances) {
            if (std::abs(om2 - r) < guard) clear = false;
        }
        if (clear) omegas.push_back(std::sqrt(om2));
    }
    return omegas;
}

double response_drift(const Network& a, const Network& b,
                      const std::vector<double>& omegas) {
    double worst = 0.0;
    for (double omega : omegas) {
        worst = std::max(worst, spectral_norm(dynamic_response_at(a, omega) -
                                              dynamic_response_at(b, omega)));
    }
    return worst;
}

}  // namespace

Network apply_perturbation(const Network& net, const Perturbation& pert) {
    if (pert.epsilon < 0.0) throw Error("perturbation epsilon must be >= 0");
    for (const auto& add : pert.added_springs) {
        if (!(add.factor > 0.0)) {
            throw Error("added springs need a positive factor");
        }
        if (!net.has_node(add.a) || !net.has_node(add.b)) {
            throw Error("added spring references a missing node");
        }
    }
    std::vector<Spring> springs = net.springs();
    for (const auto& change : pert.scaled_springs) {
        bool found = false;
        for (auto& s : springs) {
            if (ordered(s.a, s.b) == ordered(change.a, change.b)) {
                s.stiffness += pert.epsilon * change.factor;
                if (s.stiffness < 0.0) {
                    throw NegativeStiffness(
                        "perturbation would delete spring " + s.a + "-" + s.b);
                }
                found = true;
            }
        }
        if (!found) throw Error("scaled spring not present in the network");
    }
    if (pert.epsilon > 0.0) {
        for (const auto& add : pert.added_springs) {
            springs.push_back({add.a, add.b, pert.epsilon * add.factor});
        }
    }
    return Network(net.dimension(), net.nodes(), std::move(springs));
}

StabilityReport stability_experiment(const Network& net, Perturbation pert,
                                     const std::vector<double>& eps_list,
                                     const std::vector<double>& omegas) {
    StabilityReport report;
    report.eps = eps_list;
    std::sort(report.eps.begin(), report.eps.end());

    std::vector<MatrixXd> base;
    for (double omega : omegas) base.push_back(dynamic_response_at(net, omega));

    for (double eps : report.eps) {
        pert.epsilon = eps;
        const Network perturbed = apply_perturbation(net, pert);
        double worst = 0.0;
        for (size_t i = 0; i < omegas.size(); ++i) {
            worst = std::max(
                worst, spectral_norm(dynamic_response_at(perturbed, omegas[i]) -
                                     base[i]));
        }
        report.drift.push_back(worst);
    }

    // Least-squares line through (log eps, log drift), skipping exact zeros.
    std::vector<double> lx, ly;
    for (size_t i = 0; i < report.eps.size(); ++i) {
        if (report.eps[i] > 0.0 && report.drift[i] > 1e-300) {
            lx.push_back(std::log(report.eps[i]));
            ly.push_back(std::log(report.drift[i]));
        }
    }
    if (lx.size() >= 2) {
        const double n = static_cast<double>(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const double denom = n * sxx - sx * sx;
        if (std::abs(denom) > 0.0) {
            const double slope = (n * sxy - sx * sy) / denom;
            const double icept = (sy - slope * sx) / n;
            double ss = 0.0;
            for (size_t i = 0; i < lx.size(); ++i) {
                const double r = ly[i] - (slope * lx[i] + icept);
                ss += r * r;
            }
            report.slope = slope;
            report.fit_residual = std::sqrt(ss / n);
        }
    }
    return report;
}

bool floppy_nullspace_containment(const Network& net, const Perturbation& pert) {
    Perturbation probe = pert;
    if (!(probe.epsilon > 0.0)) probe.epsilon = 1e-6;
    const MatrixXd base = interior_block(net);
    if (base.size() == 0) return true;
    const MatrixXd perturbed = interior_block(apply_perturbation(net, probe));
    const MatrixXd nullspace = nullspace_basis(perturbed);
    if (nullspace.cols() == 0) return true;
    const double scale = std::max(1.0, spectral_norm(base));
    return spectral_norm(base * nullspace) <= 1e-9 * scale * nullspace.cols();
}

FloppyFixReport eliminate_floppy(const Network& net, double eps_k,
                                 const PlacementPolicy& policy) {
    if (!(eps_k > 0.0)) throw Error("eps_k must be positive");
    const int d = net.dimension();

    // Degeneracy of the terminal (or whole-node) geometry decides whether
    // plain graph completion can anchor the interior.
    std::vector<VectorXd> term_pts = net.terminal_positions();
    MatrixXd centered(d, static_cast<int>(term_pts.size()));
    for (size_t i = 0; i < term_pts.size(); ++i) {
        centered.col(static_cast<int>(i)) = term_pts[i] - term_pts[0];
    }
    const int term_rank = numerical_rank(centered);

    std::vector<Node> nodes = net.nodes();
    std::vector<Spring> springs = net.springs();
    std::vector<std::string> anchors;
    std::mt19937_64 rng(policy.rng_seed);

    if (d == 2 && term_rank < 2) {
        // All terminals on a line (or a single terminal): two truss nodes at
        // height eps_hull/2 off the line give the graph a rigid anchor.
        VectorXd origin = term_pts[0];
        VectorXd u(2);
        double span = 0.0;
        if (term_rank == 1) {
            for (const auto& p : term_pts) {
                if ((p - origin).norm() > span) {
                    span = (p - origin).norm();
                    u = (p - origin) / (p - origin).norm();
                }
            }
        } else {
            u << 1, 0;
            span = policy.eps_hull;
        }
        VectorXd normal(2);
        normal << -u(1), u(0);
        std::uniform_real_distribution<double> us(0.2, 0.8);
        for (int a = 0; a < 2; ++a) {
            for (int attempt = 0; attempt < 64; ++attempt) {
                const VectorXd pos = origin + (us(rng) * span) * u +
                                     (0.5 * policy.eps_hull) * normal;
                bool clash = false;
                for (const auto& n : nodes) {
                    if ((n.position - pos).norm() < 1e-12) clash = true;
                }
                if (clash) continue;
                const std::string label = "anchor" + std::to_string(a);
                nodes.push_back({label, pos, 0.0, NodeKind::Interior});
                anchors.push_back(label);
                break;
            }
        }
        if (anchors.size() != 2) throw RetryExhausted("could not place anchor nodes");
    } else if (d == 3) {
        if (term_rank < 2) {
            throw UnfixableFloppy(
                "3D networks with collinear terminals keep a rotational mode");
        }
        // If every node lies in one plane, perpendicular motion has no
        // restoring force; one off-plane node fixes that.
        MatrixXd all(3, static_cast<int>(nodes.size()));
        for (size_t i = 0; i < nodes.size(); ++i) {
            all.col(static_cast<int>(i)) = nodes[i].position - nodes[0].position;
        }
        if (numerical_rank(all) < 3) {
            Eigen::JacobiSVD<MatrixXd> svd(all, Eigen::ComputeFullU);
            const VectorXd normal = svd.matrixU().col(2);
            VectorXd centroid = VectorXd::Zero(3);
            for (const auto& n : nodes) centroid += n.position;
            centroid /= static_cast<double>(nodes.size());
            nodes.push_back({"anchor0", centroid + 0.5 * policy.eps_hull * normal,
                             0.0, NodeKind::Interior});
            anchors.push_back("anchor0");
        }
    }

    // Complete-graph fill with the weak stiffness, skipping connected pairs.
    std::set<std::pair<std::string, std::string>> connected;
    for (const auto& s : springs) {
        if (s.stiffness > 0.0) connected.insert(ordered(s.a, s.b));
    }
    for (size_t i = 0; i < nodes.size(); ++i) {
        for (size_t j = i + 1; j < nodes.size(); ++j) {
            const auto key = ordered(nodes[i].label, nodes[j].label);
            if (connected.count(key)) continue;
            springs.push_back({key.first, key.second, eps_k});
        }
    }

    Network fixed(d, std::move(nodes), std::move(springs));
    FloppyModes remaining = floppy_modes(fixed);
    const auto omegas = drift_grid(net, fixed);
    const double drift = response_drift(net, fixed, omegas);
    return {std::move(fixed), eps_k, std::move(anchors), drift,
            std::move(remaining)};
}

}  // namespace elastonet
