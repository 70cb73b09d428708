#include "elastonet/dynsynth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "elastonet/reduce.hpp"

namespace elastonet {

namespace {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

constexpr double kGadgetTol = 1e-8;

double w2(const Vector2d& a, const Vector2d& b) {
    return a.x() * b.y() - a.y() * b.x();
}

Vector2d perp(const Vector2d& v) { return Vector2d(-v.y(), v.x()); }

std::vector<Vector2d> to_vec2(const std::vector<VectorXd>& pts) {
    std::vector<Vector2d> out;
    for (const auto& p : pts) {
        if (p.size() != 2) throw NotSupported("synthesis is implemented in 2D only");
        out.push_back(p);
    }
    return out;
}

/// Completes the terminal forces with oscillator forces g1, g2 at y1, y2 so
/// the extended system balances, keeping both g's bounded away from zero.
/// Returns false when the geometry is too ill-conditioned.
bool complete_forces(const std::vector<Vector2d>& pts, const VectorXd& f,
                     const Vector2d& y1, const Vector2d& y2, Vector2d& g1,
                     Vector2d& g2) {
    const Vector2d w = y2 - y1;
    const double wn = w.norm();
    if (wn <= 0.0) return false;
    Vector2d total = Vector2d::Zero();
    double rhs = 0.0;
    double fscale = 1e-300;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vector2d fi = f.segment<2>(2 * static_cast<int>(i));
        total += fi;
        rhs -= w2(pts[i] - y1, fi);
        fscale = std::max(fscale, fi.norm());
    }
    if (std::abs(rhs) / wn > 1e8 * fscale) return false;  // near-coincident pair
    g2 = rhs * perp(w) / (wn * wn);
    g1 = -(total + g2);
    // Shift along the homogeneous direction w (which carries no torque about
    // y1) until both oscillator forces are genuinely nonzero.
    for (double t : {0.0, 1.0, -1.0, 2.0}) {
        const Vector2d cand2 = g2 + t * fscale / wn * w;
        const Vector2d cand1 = -(total + cand2);
        if (cand1.norm() >= 0.1 * fscale && cand2.norm() >= 0.1 * fscale) {
            g2 = cand2;
            g1 = cand1;
            return true;
        }
    }
    return false;
}

/// Relabels every node of `net` not in `keep` by prefixing it, so gadget
/// networks can be merged without clashes.
void relabel(std::vector<Node>& nodes, std::vector<Spring>& springs,
             const Network& net, const std::string& prefix, int n_terminals) {
    auto map_label = [&](const std::string& l) {
        // terminal labels t0..t{n-1} are shared; everything else is private
        for (int i = 0; i < n_terminals; ++i) {
            if (l == "t" + std::to_string(i)) return l;
        }
        return prefix + l;
    };
    for (const auto& node : net.nodes()) {
        if (node.kind == NodeKind::Terminal) {
            bool shared = false;
            for (int i = 0; i < n_terminals; ++i) {
                if (node.label == "t" + std::to_string(i)) shared = true;
            }
            if (shared) continue;  // merged with the common terminal list
        }
        Node copy = node;
        copy.label = map_label(node.label);
        nodes.push_back(std::move(copy));
    }
    for (const auto& s : net.springs()) {
        springs.push_back({map_label(s.a), map_label(s.b), s.stiffness});
    }
}

}  // namespace

ResonantGadget make_resonant_gadget(const std::vector<VectorXd>& positions,
                                    const VectorXd& f, double omega0_sq,
                                    const PlacementPolicy& policy) {
    const std::vector<Vector2d> pts = to_vec2(positions);
    const int n = static_cast<int>(pts.size());
    if (f.size() != 2 * n) throw DimensionMismatch("force vector length mismatch");
    if (!(omega0_sq > 0.0) || !std::isfinite(omega0_sq)) {
        throw DegenerateTarget("resonance must be positive and finite");
    }
    if (f.norm() <= 1e-14) throw DegenerateTarget("zero resonant force");

    // Oscillator nodes live in the half-budget neighborhood so that the
    // static sub-synthesis (run with the remaining half budget over the
    // extended hull) stays inside the full neighborhood.
    HullSampler half(pts, 0.5 * policy.eps_hull);
    std::mt19937_64 rng(policy.rng_seed);
    std::vector<Vector2d> forbidden = policy.forbidden;
    for (const auto& p : pts) forbidden.push_back(p);

    std::string err = "resonant gadget failed";
    for (int attempt = 0; attempt < policy.max_retries; ++attempt) {
        Vector2d y1, y2;
        try {
            y1 = half.sample(rng, forbidden, policy.min_separation);
            std::vector<Vector2d> avoid = forbidden;
            avoid.push_back(y1);
            y2 = half.sample(rng, avoid, policy.min_separation);
        } catch (const RetryExhausted&) {
            throw RetryExhausted("no room for the oscillator pair");
        }
        if ((y2 - y1).norm() < 0.05 * policy.eps_hull) continue;
        Vector2d g1, g2;
        if (!complete_forces(pts, f, y1, y2, g1, g2)) continue;

        std::vector<VectorXd> ext_pts = positions;
        ext_pts.push_back(y1);
        ext_pts.push_back(y2);
        VectorXd ext_f(2 * n + 4);
        ext_f.head(2 * n) = f;
        ext_f.segment<2>(2 * n) = g1;
        ext_f.segment<2>(2 * n + 2) = g2;

        PlacementPolicy sub = policy;
        sub.eps_hull = 0.5 * policy.eps_hull;
        sub.rng_seed = policy.rng_seed + 0x9e3779b9u * (attempt + 1);
        sub.forbidden = forbidden;
        sub.forbidden.push_back(y1);
        sub.forbidden.push_back(y2);
        std::optional<SynthesisReport> stat_opt;
        try {
            stat_opt = synth_rank_one(ext_pts, ext_f, 1.0, sub);
        } catch (const Error& e) {
            err = e.what();
            continue;
        }
        SynthesisReport& stat = *stat_opt;
        if (stat.roundtrip_error > kGadgetTol) {
            err = "static stage of the resonant gadget did not verify";
            continue;
        }

        // Demote the oscillator terminals to massive interior nodes. With
        // both carrying mass m, eliminating them turns the static response
        // a a^T into f f^T omega^2/(omega^2 - q), q = (|g1|^2 + |g2|^2)/m.
        const double mass = (g1.squaredNorm() + g2.squaredNorm()) / omega0_sq;
        std::vector<Node> nodes;
        for (const auto& node : stat.network.nodes()) {
            Node copy = node;
            if (node.label == "t" + std::to_string(n) ||
                node.label == "t" + std::to_string(n + 1)) {
                copy.kind = NodeKind::Interior;
                copy.mass = mass;
                copy.label = (node.label == "t" + std::to_string(n)) ? "osc0" : "osc1";
            }
            nodes.push_back(std::move(copy));
        }
        std::vector<Spring> springs;
        for (const auto& s : stat.network.springs()) {
            auto fix = [n](const std::string& l) {
                if (l == "t" + std::to_string(n)) return std::string("osc0");
                if (l == "t" + std::to_string(n + 1)) return std::string("osc1");
                return l;
            };
            springs.push_back({fix(s.a), fix(s.b), s.stiffness});
        }
        Network net(2, std::move(nodes), std::move(springs));

        // Verify against the closed form away from the pole.
        double worst = 0.0;
        bool ok = true;
        const MatrixXd ff = f * f.transpose();
        for (double factor : {0.3, 0.7, 1.9, 3.0}) {
            const double om2 = factor * omega0_sq;
            const MatrixXd expected = ff * om2 / (om2 - omega0_sq);
            MatrixXd got;
            try {
                got = dynamic_response_at(net, std::sqrt(om2));
            } catch (const ResonanceProximity&) {
                ok = false;
                break;
            }
            const double rel = spectral_norm(got - expected) /
                               std::max(1.0, spectral_norm(expected));
            worst = std::max(worst, rel);
            if (rel > kGadgetTol) ok = false;
        }
        if (!ok) {
            err = "resonant gadget response did not match the closed form";
            continue;
        }

        std::vector<PlacedNode> placed = stat.placed_nodes;
        placed.push_back({y1, "oscillator"});
        placed.push_back({y2, "oscillator"});
        return {std::move(net), omega0_sq, mass, std::move(placed), worst};
    }
    throw RetryExhausted(err);
}

SynthesisReport synth_dynamic(const ModalResponse& target,
                              const PlacementPolicy& policy) {
    const std::vector<Vector2d> pts = to_vec2(target.terminal_positions);
    const int n = static_cast<int>(pts.size());
    const ModalSplit split = split_modal(target);  // validates

    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i) {
        nodes.push_back({"t" + std::to_string(i), target.terminal_positions[i],
                         split.terminal_masses(i), NodeKind::Terminal});
    }
    std::vector<Spring> springs;
    std::vector<PlacedNode> placed;
    std::vector<Vector2d> forbidden = policy.forbidden;
    for (const auto& p : pts) forbidden.push_back(p);

    PlacementPolicy stage = policy;
    stage.forbidden = forbidden;
    SynthesisReport stat = synth_static(split.static_part, stage);
    relabel(nodes, springs, stat.network, "s_", n);
    for (const auto& pn : stat.placed_nodes) {
        placed.push_back(pn);
        forbidden.push_back(pn.position);
    }

    for (size_t j = 0; j < split.dynamic_targets.size(); ++j) {
        const auto& t = split.dynamic_targets[j];
        stage = policy;
        stage.forbidden = forbidden;
        stage.rng_seed = policy.rng_seed + 1000003u * (j + 1);
        ResonantGadget gadget = make_resonant_gadget(
            target.terminal_positions, std::sqrt(t.lambda) * t.f, *t.omega0_sq,
            stage);
        const std::string prefix = "g" + std::to_string(j) + "_";
        relabel(nodes, springs, gadget.network, prefix, n);
        for (const auto& pn : gadget.placed_nodes) {
            placed.push_back(pn);
            forbidden.push_back(pn.position);
        }
    }

    Network net(2, std::move(nodes), std::move(springs));

    // Round trip: compare the assembled network against the target at
    // frequencies clear of every resonance.
    Eigen::VectorXd spectrum(static_cast<int>(target.terms.size()));
    for (size_t i = 0; i < target.terms.size(); ++i) {
        spectrum(static_cast<int>(i)) = target.terms[i].omega_sq;
    }
    const double guard =
        10.0 * kResGuard *
        std::max(1.0, target.terms.empty() ? 1.0 : spectrum.maxCoeff());
    double worst = 0.0;
    const int probes = 12;
    const double hi = (spectrum.size() > 0 ? spectrum.maxCoeff() : 1.0) * 2.0 + 1.0;
    int used = 0;
    for (int i = 0; i < 8 * probes && used < probes; ++i) {
        const double om2 = hi * (i + 0.5) / (8.0 * probes);
        bool clear = std::abs(om2) > guard;
        for (int k = 0; k < spectrum.size(); ++k) {
            if (std::abs(om2 - spectrum(k)) < guard) clear = false;
        }
        if (!clear) continue;
        ++used;
        const double omega = std::sqrt(om2);
        const MatrixXd got = dynamic_response_at(net, omega);
        const MatrixXd expected = evaluate_modal(target, omega);
        worst = std::max(worst, spectral_norm(got - expected) /
                                    std::max(1.0, spectral_norm(expected)));
    }
    return {std::move(net), 1.0, std::move(placed), worst};
}

}  // namespace elastonet
