#include "elastonet/synth2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "elastonet/reduce.hpp"

namespace elastonet {

namespace {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

// Relative rank-one defect allowed after calibrating a gadget.
constexpr double kGadgetTol = 1e-8;
// Forces below this fraction of the system scale are treated as absent.
constexpr double kActiveTol = 1e-12;
constexpr int kMaxDepth = 32;

double w2(const Vector2d& a, const Vector2d& b) {
    return a.x() * b.y() - a.y() * b.x();
}

Vector2d perp(const Vector2d& v) { return Vector2d(-v.y(), v.x()); }

struct TerminalRef {
    std::string label;
    Vector2d pos;
};

/// A sub-network under construction: its own terminals plus interior
/// nodes and springs referencing nodes by label.
struct Gadget {
    std::vector<TerminalRef> terminals;
    std::vector<Node> interior;
    std::vector<Spring> springs;
};

void check_policy(const PlacementPolicy& policy) {
    if (!(policy.eps_hull > 0.0) || !std::isfinite(policy.eps_hull)) {
        throw Error("eps_hull must be positive and finite");
    }
    if (!(policy.min_separation >= 0.0) ||
        !(policy.min_separation < policy.eps_hull)) {
        throw Error("min_separation must lie in [0, eps_hull)");
    }
    if (policy.max_retries < 1) throw Error("max_retries must be at least 1");
}

/// Shared synthesis state: placement samplers over the outermost terminal
/// hull, the growing forbidden set, RNG, and fresh labels.
class Context {
public:
    Context(const PlacementPolicy& policy, const std::vector<Vector2d>& term_pts)
        : policy_(&policy),
          outer_(term_pts, policy.eps_hull),
          inner_(term_pts, 0.8 * policy.eps_hull),
          forbidden_(policy.forbidden) {
        rng_.seed(policy.rng_seed);
        for (const auto& p : term_pts) forbidden_.push_back(p);
    }

    const PlacementPolicy& policy() const { return *policy_; }
    std::mt19937_64& rng() { return rng_; }
    const HullSampler& outer() const { return outer_; }
    const std::vector<Vector2d>& forbidden() const { return forbidden_; }
    std::vector<PlacedNode>& placed() { return placed_; }

    std::string fresh_label() { return "aux" + std::to_string(counter_++); }

    bool clear_of_forbidden(const Vector2d& p) const {
        for (const auto& q : forbidden_) {
            if ((p - q).norm() < policy_->min_separation) return false;
        }
        return true;
    }

    /// Random point in the (slightly shrunken) hull neighborhood, recorded
    /// as placed and added to the forbidden set.
    Vector2d draw(const char* provenance) {
        Vector2d p = inner_.sample(rng_, forbidden_, policy_->min_separation);
        record(p, provenance);
        return p;
    }

    /// Records a deterministically placed point (caller has checked
    /// containment and separation).
    void record(const Vector2d& p, const char* provenance) {
        forbidden_.push_back(p);
        placed_.push_back({p, provenance});
    }

    double last_calibration = 1.0;

private:
    const PlacementPolicy* policy_;
    std::mt19937_64 rng_;
    HullSampler outer_;
    HullSampler inner_;
    std::vector<Vector2d> forbidden_;
    std::vector<PlacedNode> placed_;
    int counter_ = 0;
};

Network gadget_network(const Gadget& g) {
    std::vector<Node> nodes;
    nodes.reserve(g.terminals.size() + g.interior.size());
    for (const auto& t : g.terminals) {
        nodes.push_back({t.label, t.pos, 0.0, NodeKind::Terminal});
    }
    for (const auto& n : g.interior) nodes.push_back(n);
    return Network(2, std::move(nodes), g.springs);
}

/// Forward-solves the gadget, fits the coefficient c of g g^T, checks that
/// the response is rank one along g, and rescales all stiffnesses so the
/// response becomes exactly g g^T. Returns c.
double calibrate_unit(Gadget& gad, const VectorXd& g, Context& ctx) {
    const MatrixXd W = static_response(gadget_network(gad)).matrix;
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0)) throw DegenerateTarget("cannot calibrate a zero target");
    const double c = g.dot(W * g) / (g2 * g2);
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw GadgetVerificationFailed("non-positive gadget coefficient");
    }
    const double defect = spectral_norm(W - c * g * g.transpose());
    if (defect > kGadgetTol * std::max(1.0, spectral_norm(W))) {
        throw GadgetVerificationFailed("gadget response is not rank one");
    }
    for (auto& s : gad.springs) s.stiffness /= c;
    ctx.last_calibration = c;
    return c;
}

/// Union of sub-gadgets over a common terminal list; the shared split point
/// y becomes an interior node. Duplicate springs between shared terminals
/// merge by stiffness summation at Network construction, which is exactly
/// superposition.
Gadget merge_families(const std::vector<TerminalRef>& terminals,
                      const std::string& y_label, const Vector2d& y,
                      const Gadget& fam1, const Gadget& fam2) {
    Gadget out;
    out.terminals = terminals;
    out.interior.push_back({y_label, y, 0.0, NodeKind::Interior});
    for (const Gadget* fam : {&fam1, &fam2}) {
        out.interior.insert(out.interior.end(), fam->interior.begin(),
                            fam->interior.end());
        out.springs.insert(out.springs.end(), fam->springs.begin(),
                           fam->springs.end());
    }
    return out;
}

int pair_rank(const Vector2d& x0, const Vector2d& x1, const Vector2d& x2,
              const Vector2d& f1, const Vector2d& f2) {
    MatrixXd m(2, 4);
    m.col(0) = f1;
    m.col(1) = f2;
    m.col(2) = x1 - x0;
    m.col(3) = x2 - x0;
    return numerical_rank(m);
}

/// Epsilon for the rank-2 three-terminal gadget: keeps the displaced points
/// x1 + eps f1, x2 + eps f2 inside the hull neighborhood, clear of the
/// forbidden set, and well non-collinear with x0. jitter != 1 perturbs the
/// candidate sequence on retries.
double pick_eps(Context& ctx, const Vector2d& x0, const Vector2d& x1,
                const Vector2d& x2, const Vector2d& f1, const Vector2d& f2,
                double jitter) {
    const double fmax = std::max(f1.norm(), f2.norm());
    if (!(fmax > 0.0)) throw DegenerateTarget("zero leg force");
    double min_sep = std::min({(x1 - x0).norm(), (x2 - x0).norm(),
                               (x2 - x1).norm()});
    const double eps0 =
        jitter * std::min(0.5 * ctx.policy().eps_hull, 0.25 * min_sep) / fmax;

    double best_eps = 0.0;
    double best_m = 0.0;
    double eps = eps0;
    for (int j = 0; j < 60; ++j, eps *= 0.5) {
        const Vector2d p1 = x1 + eps * f1;
        const Vector2d p2 = x2 + eps * f2;
        if (!ctx.outer().contains(p1) || !ctx.outer().contains(p2)) continue;
        if (!ctx.clear_of_forbidden(p1) || !ctx.clear_of_forbidden(p2)) continue;
        if ((p1 - p2).norm() < ctx.policy().min_separation) continue;
        const double denom = (p1 - x0).norm() * (p2 - x0).norm();
        if (!(denom > 0.0)) continue;
        const double m = std::abs(w2(p1 - x0, p2 - x0)) / denom;
        if (m >= 1e-2) return eps;
        if (m > best_m) {
            best_m = m;
            best_eps = eps;
        }
    }
    if (best_m >= 1e-6) return best_eps;
    throw GadgetVerificationFailed("no epsilon keeps the gadget non-collinear");
}

Gadget synth_unit(Context& ctx, const std::vector<TerminalRef>& terms,
                  const VectorXd& f, int depth);

/// Five-spring gadget for three active terminals whose forces and relative
/// positions span the plane. The hub x0 connects to displaced copies of the
/// other two terminals; hub choice and epsilon are retried until the
/// forward-solved response is rank one.
Gadget three_rank2(Context& ctx, const std::vector<TerminalRef>& terms,
                   const std::vector<Vector2d>& g) {
    const int perms[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
    std::uniform_real_distribution<double> uj(0.6, 1.0);
    std::string err = "three-terminal gadget failed";
    for (int attempt = 0; attempt < ctx.policy().max_retries; ++attempt) {
        const int* pm = perms[attempt % 3];
        const double jitter = attempt < 3 ? 1.0 : uj(ctx.rng());
        const Vector2d hub = terms[pm[0]].pos;
        const Vector2d x1 = terms[pm[1]].pos;
        const Vector2d x2 = terms[pm[2]].pos;
        const Vector2d g1 = g[pm[1]];
        const Vector2d g2 = g[pm[2]];
        try {
            const double eps = pick_eps(ctx, hub, x1, x2, g1, g2, jitter);
            const Vector2d p1 = x1 + eps * g1;
            const Vector2d p2 = x2 + eps * g2;
            Gadget gad;
            gad.terminals = terms;
            const std::string l1 = ctx.fresh_label();
            const std::string l2 = ctx.fresh_label();
            gad.interior.push_back({l1, p1, 0.0, NodeKind::Interior});
            gad.interior.push_back({l2, p2, 0.0, NodeKind::Interior});
            const std::string& hl = terms[pm[0]].label;
            gad.springs = {{hl, l1, 1.0},
                           {hl, l2, 1.0},
                           {terms[pm[1]].label, l1, 1.0},
                           {terms[pm[2]].label, l2, 1.0},
                           {l1, l2, 1.0}};
            VectorXd gv(6);
            for (int i = 0; i < 3; ++i) gv.segment<2>(2 * i) = g[i];
            calibrate_unit(gad, gv, ctx);
            ctx.record(p1, "three_rank2_displaced");
            ctx.record(p2, "three_rank2_displaced");
            return gad;
        } catch (const GadgetVerificationFailed&) {
            err = "three-terminal rank-2 gadget did not verify";
        } catch (const DegenerateTarget&) {
            err = "three-terminal rank-2 gadget has a zero leg force";
        }
    }
    throw RetryExhausted(err);
}

/// Splits a balanced three-terminal system through a point y off the
/// x0-x2 line into two three-terminal families sharing y, then eliminates
/// y. Handles the collinear (rank-1) case and serves as a fallback when the
/// direct gadget fails.
Gadget three_split(Context& ctx, const std::vector<TerminalRef>& terms,
                   const std::vector<Vector2d>& g, int depth) {
    const Vector2d x0 = terms[0].pos;
    const Vector2d x2 = terms[2].pos;
    const Vector2d u02 = (x2 - x0).normalized();
    double fscale = 0.0;
    for (const auto& gi : g) fscale = std::max(fscale, gi.norm());
    std::uniform_int_distribution<int> coin(0, 1);

    std::string err = "three-terminal split failed";
    for (int attempt = 0; attempt < ctx.policy().max_retries; ++attempt) {
        Vector2d y;
        try {
            y = ctx.draw("split_point");
        } catch (const RetryExhausted&) {
            throw RetryExhausted("no room for a split point");
        }
        if (std::abs(w2(u02, y - x0)) < 0.05 * ctx.policy().eps_hull) {
            continue;  // too close to the x0-x2 line; poor conditioning
        }
        const Vector2d a = y - x0;
        Vector2d f = w2(x2 - x0, g[2]) * perp(a) / a.squaredNorm();
        if (f.norm() < 0.1 * fscale) {
            // Minimal-norm solution is degenerate; add the homogeneous part
            // (parallel to y - x0) to get a genuinely planar family.
            f += (coin(ctx.rng()) ? 1.0 : -1.0) * fscale * a.normalized();
        }
        const std::string yl = ctx.fresh_label();
        const std::vector<TerminalRef> fam1_terms = {{yl, y}, terms[0], terms[1]};
        const std::vector<TerminalRef> fam2_terms = {{yl, y}, terms[0], terms[2]};
        VectorXd g1(6), g2v(6);
        g1 << f, g[0] + g[2] - f, g[1];
        g2v << -f, f - g[2], g[2];
        try {
            Gadget fam1 = synth_unit(ctx, fam1_terms, g1, depth + 1);
            Gadget fam2 = synth_unit(ctx, fam2_terms, g2v, depth + 1);
            Gadget out = merge_families(terms, yl, y, fam1, fam2);
            VectorXd gv(6);
            for (int i = 0; i < 3; ++i) gv.segment<2>(2 * i) = g[i];
            calibrate_unit(out, gv, ctx);
            return out;
        } catch (const GadgetVerificationFailed& e) {
            err = e.what();
        } catch (const RetryExhausted& e) {
            err = e.what();
        }
    }
    throw RetryExhausted(err);
}

struct BalancingChoice {
    std::pair<int, int> pair;
    Vector2d point;
};

/// Searches, over pairs {i,j} in decreasing |f_i + f_j|, for a point y in
/// the hull neighborhood where (f_i, f_j, -(f_i+f_j)) at (x_i, x_j, y) is
/// torque-free, staying clear of the forbidden set.
BalancingChoice balancing_point(Context& ctx, const std::vector<Vector2d>& xs,
                                const std::vector<Vector2d>& fs) {
    const int n = static_cast<int>(xs.size());
    double fscale = 1e-300;
    double xscale = 1.0;
    for (const auto& fi : fs) fscale = std::max(fscale, fi.norm());
    for (const auto& xi : xs) xscale = std::max(xscale, xi.norm());

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [&](const auto& a, const auto& b) {
                         return (fs[a.first] + fs[a.second]).norm() >
                                (fs[b.first] + fs[b.second]).norm();
                     });

    std::uniform_real_distribution<double> us(-1.0, 1.0);
    for (const auto& [i, j] : pairs) {
        const Vector2d s = fs[i] + fs[j];
        const double c = w2(xs[i], fs[i]) + w2(xs[j], fs[j]);
        if (s.norm() <= 1e-12 * fscale) {
            if (std::abs(c) > 1e-12 * fscale * xscale) continue;
            // Torque vanishes everywhere; any clear point balances.
            try {
                Vector2d y = ctx.draw("balancing_point");
                return {{i, j}, y};
            } catch (const RetryExhausted&) {
                continue;
            }
        }
        // Zero set of the torque is the line y0 + t s.
        const Vector2d y0 = c * Vector2d(s.y(), -s.x()) / s.squaredNorm();
        // Bracket t by projecting the terminals, then minimize the convex
        // distance to the hull neighborhood along the line.
        double tlo = std::numeric_limits<double>::infinity();
        double thi = -tlo;
        for (const auto& x : xs) {
            const double t = (x - y0).dot(s) / s.squaredNorm();
            tlo = std::min(tlo, t);
            thi = std::max(thi, t);
        }
        const double pad = (xscale + ctx.policy().eps_hull + 1.0) / s.norm();
        tlo -= pad;
        thi += pad;
        // Ternary search on the convex distance to the terminal hull.
        const auto hull = convex_hull_2d(xs);
        auto hull_dist = [&](double t) {
            return distance_to_hull(y0 + t * s, hull);
        };
        double lo = tlo, hi = thi;
        for (int it = 0; it < 200; ++it) {
            const double m1 = lo + (hi - lo) / 3.0;
            const double m2 = hi - (hi - lo) / 3.0;
            if (hull_dist(m1) <= hull_dist(m2)) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        const double tstar = 0.5 * (lo + hi);
        if (!ctx.outer().contains(y0 + tstar * s)) continue;
        // Jitter along the line to clear terminals and earlier placements.
        const double window = 0.5 * ctx.policy().eps_hull / s.norm();
        for (int trial = 0; trial < 128; ++trial) {
            const double t = tstar + us(ctx.rng()) * window;
            const Vector2d y = y0 + t * s;
            if (!ctx.outer().contains(y)) continue;
            if (!ctx.clear_of_forbidden(y)) continue;
            ctx.record(y, "balancing_point");
            return {{i, j}, y};
        }
    }
    throw NoBalancingPoint("no pair admits a balancing point in the hull neighborhood");
}

/// Four active terminals: split at a balancing point y into two
/// three-terminal families (f_i, f_j, -(f_i+f_j)) and its complement, then
/// eliminate y.
Gadget four_split(Context& ctx, const std::vector<TerminalRef>& terms,
                  const std::vector<Vector2d>& g, int depth) {
    std::vector<Vector2d> xs;
    for (const auto& t : terms) xs.push_back(t.pos);

    std::string err = "four-terminal split failed";
    for (int attempt = 0; attempt < ctx.policy().max_retries; ++attempt) {
        const auto choice = balancing_point(ctx, xs, g);
        const auto [i, j] = choice.pair;
        int k = -1, l = -1;
        for (int m = 0; m < 4; ++m) {
            if (m == i || m == j) continue;
            (k < 0 ? k : l) = m;
        }
        const Vector2d s = g[i] + g[j];
        const std::string yl = ctx.fresh_label();
        const std::vector<TerminalRef> fam1_terms = {{yl, choice.point}, terms[i],
                                                     terms[j]};
        const std::vector<TerminalRef> fam2_terms = {{yl, choice.point}, terms[k],
                                                     terms[l]};
        VectorXd g1(6), g2(6);
        g1 << -s, g[i], g[j];
        g2 << s, g[k], g[l];
        try {
            Gadget fam1 = synth_unit(ctx, fam1_terms, g1, depth + 1);
            Gadget fam2 = synth_unit(ctx, fam2_terms, g2, depth + 1);
            Gadget out = merge_families(terms, yl, choice.point, fam1, fam2);
            VectorXd gv(8);
            for (int m = 0; m < 4; ++m) gv.segment<2>(2 * m) = g[m];
            calibrate_unit(out, gv, ctx);
            return out;
        } catch (const GadgetVerificationFailed& e) {
            err = e.what();
        } catch (const RetryExhausted& e) {
            err = e.what();
        }
    }
    throw RetryExhausted(err);
}

/// p >= 5 active terminals: split through a fresh point y into families of
/// r+2 and p-r+1 terminals (r = p/2), both strictly smaller than p, and
/// recurse.
Gadget many_split(Context& ctx, const std::vector<TerminalRef>& terms,
                  const std::vector<Vector2d>& g, int depth) {
    const int p = static_cast<int>(terms.size());
    const int r = p / 2;
    double fscale = 0.0;
    for (const auto& gi : g) fscale = std::max(fscale, gi.norm());
    std::uniform_int_distribution<int> coin(0, 1);

    std::string err = "multi-terminal split failed";
    for (int attempt = 0; attempt < ctx.policy().max_retries; ++attempt) {
        const Vector2d y = ctx.draw("split_point");
        const Vector2d x0 = terms[0].pos;
        double rhs = 0.0;
        for (int i = 1; i <= r; ++i) rhs -= w2(terms[i].pos - x0, g[i]);
        const Vector2d a = y - x0;
        Vector2d f = rhs * perp(a) / a.squaredNorm();
        if (f.norm() < 0.1 * fscale) {
            f += (coin(ctx.rng()) ? 1.0 : -1.0) * fscale * a.normalized();
        }
        Vector2d fp = -f;
        for (int i = 0; i <= r; ++i) fp -= g[i];

        const std::string yl = ctx.fresh_label();
        std::vector<TerminalRef> fam1_terms = {{yl, y}};
        VectorXd g1(2 * (r + 2));
        g1.segment<2>(0) = f;
        fam1_terms.push_back(terms[0]);
        g1.segment<2>(2) = g[0] + fp;
        for (int i = 1; i <= r; ++i) {
            fam1_terms.push_back(terms[i]);
            g1.segment<2>(2 * (i + 1)) = g[i];
        }
        std::vector<TerminalRef> fam2_terms = {{yl, y}, terms[0]};
        VectorXd g2(2 * (p - r + 1));
        g2.segment<2>(0) = -f;
        g2.segment<2>(2) = -fp;
        for (int i = r + 1; i < p; ++i) {
            fam2_terms.push_back(terms[i]);
            g2.segment<2>(2 * (i - r + 1)) = g[i];
        }
        try {
            Gadget fam1 = synth_unit(ctx, fam1_terms, g1, depth + 1);
            Gadget fam2 = synth_unit(ctx, fam2_terms, g2, depth + 1);
            Gadget out = merge_families(terms, yl, y, fam1, fam2);
            VectorXd gv(2 * p);
            for (int i = 0; i < p; ++i) gv.segment<2>(2 * i) = g[i];
            calibrate_unit(out, gv, ctx);
            return out;
        } catch (const GadgetVerificationFailed& e) {
            err = e.what();
        } catch (const RetryExhausted& e) {
            err = e.what();
        }
    }
    throw RetryExhausted(err);
}

/// Single spring between an opposite collinear pair; the unit-coefficient
/// response of stiffness |g0|^2 is exactly g g^T.
Gadget pair_gadget(const std::vector<TerminalRef>& terms,
                   const std::vector<Vector2d>& g) {
    const Vector2d axis = terms[1].pos - terms[0].pos;
    const double fn = g[0].norm();
    if ((g[0] + g[1]).norm() > 1e-7 * std::max(1.0, fn) ||
        std::abs(w2(axis, g[0])) > 1e-7 * std::max(1.0, fn * axis.norm())) {
        throw DegenerateTarget(
            "two-terminal target is not an opposite pair along its axis");
    }
    Gadget gad;
    gad.terminals = terms;
    gad.springs = {{terms[0].label, terms[1].label, fn * fn}};
    return gad;
}

/// Core recursion: a gadget over exactly `terms` whose static response is
/// f f^T, by dispatch on the number of terminals carrying a nonzero force.
Gadget synth_unit(Context& ctx, const std::vector<TerminalRef>& terms,
                  const VectorXd& f, int depth) {
    if (depth > kMaxDepth) {
        throw RetryExhausted("synthesis recursion exceeded its depth limit");
    }
    const int n = static_cast<int>(terms.size());
    if (f.size() != 2 * n) throw DimensionMismatch("force vector length mismatch");

    Gadget empty;
    empty.terminals = terms;
    const double scale = f.norm();
    if (scale <= 1e-14) return empty;

    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
        if (f.segment<2>(2 * i).norm() > kActiveTol * scale) active.push_back(i);
    }
    if (active.size() <= 1) {
        throw DegenerateTarget("a balanced force system needs at least two forces");
    }

    std::vector<TerminalRef> at;
    std::vector<Vector2d> ag;
    for (int idx : active) {
        at.push_back(terms[idx]);
        ag.push_back(f.segment<2>(2 * idx));
    }

    Gadget core;
    const int p = static_cast<int>(active.size());
    if (p == 2) {
        core = pair_gadget(at, ag);
    } else if (p == 3) {
        const int rank = pair_rank(at[0].pos, at[1].pos, at[2].pos, ag[1], ag[2]);
        if (rank >= 2) {
            try {
                core = three_rank2(ctx, at, ag);
            } catch (const RetryExhausted&) {
                core = three_split(ctx, at, ag, depth);
            }
        } else {
            core = three_split(ctx, at, ag, depth);
        }
    } else if (p == 4) {
        core = four_split(ctx, at, ag, depth);
    } else {
        core = many_split(ctx, at, ag, depth);
    }

    if (active.size() == static_cast<size_t>(n)) return core;
    Gadget out;
    out.terminals = terms;
    out.interior = std::move(core.interior);
    out.springs = std::move(core.springs);
    return out;
}

std::vector<Vector2d> to_vec2(const std::vector<VectorXd>& pts) {
    std::vector<Vector2d> out;
    for (const auto& p : pts) {
        if (p.size() != 2) throw NotSupported("synthesis is implemented in 2D only");
        out.push_back(p);
    }
    return out;
}

Network build_network(const Gadget& gad) { return gadget_network(gad); }

/// Placement log filtered to the points that survived as interior nodes
/// (failed attempts also draw points; those are dropped here).
std::vector<PlacedNode> used_placements(Context& ctx, const Gadget& gad) {
    std::vector<PlacedNode> out;
    for (const auto& pn : ctx.placed()) {
        for (const auto& node : gad.interior) {
            if ((Vector2d(node.position) - pn.position).norm() < 1e-15) {
                out.push_back(pn);
                break;
            }
        }
    }
    return out;
}

SynthesisReport finish_report(Context& ctx, Gadget gad, double lambda,
                              const VectorXd& f_full,
                              const MatrixXd* target = nullptr) {
    for (auto& s : gad.springs) s.stiffness *= lambda;
    Network net = build_network(gad);
    const MatrixXd W = static_response(net).matrix;
    MatrixXd ref;
    if (target) {
        ref = *target;
    } else {
        ref = lambda * f_full * f_full.transpose();
    }
    const double err = spectral_norm(W - ref) / std::max(1.0, spectral_norm(ref));
    return {std::move(net), ctx.last_calibration,
            used_placements(ctx, gad), err};
}

}  // namespace

Network synth_pair(const Vector2d& x1, const Vector2d& x2, const VectorXd& f,
                   double lambda) {
    if (f.size() != 4) throw DimensionMismatch("expected a stacked pair of 2D forces");
    if (lambda < 0.0) throw NegativeStiffness("lambda must be non-negative");
    std::vector<TerminalRef> terms = {{"t0", x1}, {"t1", x2}};
    std::vector<Vector2d> g = {f.segment<2>(0), f.segment<2>(2)};
    Gadget gad;
    if (g[0].norm() > 0.0 || g[1].norm() > 0.0) {
        gad = pair_gadget(terms, g);
        for (auto& s : gad.springs) s.stiffness *= lambda;
    } else {
        gad.terminals = terms;
    }
    return gadget_network(gad);
}

double choose_eps_noncollinear(const Vector2d& x0, const Vector2d& x1,
                               const Vector2d& x2, const Vector2d& f1,
                               const Vector2d& f2, const PlacementPolicy& policy) {
    check_policy(policy);
    if (pair_rank(x0, x1, x2, f1, f2) < 2) {
        throw RankDeficient("forces and relative positions span only a line");
    }
    Context ctx(policy, {x0, x1, x2});
    std::uniform_real_distribution<double> uj(0.6, 1.0);
    for (int attempt = 0; attempt < policy.max_retries; ++attempt) {
        try {
            return pick_eps(ctx, x0, x1, x2, f1, f2,
                            attempt == 0 ? 1.0 : uj(ctx.rng()));
        } catch (const GadgetVerificationFailed&) {
        }
    }
    throw RetryExhausted("no admissible epsilon found");
}

SynthesisReport synth_three_rank2(const Vector2d& x0, const Vector2d& x1,
                                  const Vector2d& x2, const Vector2d& f0,
                                  const Vector2d& f1, const Vector2d& f2,
                                  double lambda, const PlacementPolicy& policy) {
    check_policy(policy);
    if (lambda <= 0.0) throw NegativeStiffness("lambda must be positive");
    if (pair_rank(x0, x1, x2, f1, f2) < 2) {
        throw RankDeficient("three-terminal system has rank < 2");
    }
    VectorXd f(6);
    f << f0, f1, f2;
    BalancedForceSystem sys{{x0, x1, x2}, {f0, f1, f2}};
    if (!check_balanced(sys, 1e-7).balanced) {
        throw ValidationFailed("force system is not balanced");
    }
    Context ctx(policy, {x0, x1, x2});
    std::vector<TerminalRef> terms = {{"t0", x0}, {"t1", x1}, {"t2", x2}};
    Gadget gad = three_rank2(ctx, terms, {f0, f1, f2});
    return finish_report(ctx, std::move(gad), lambda, f);
}

SynthesisReport synth_three_rank1(const Vector2d& x0, const Vector2d& x1,
                                  const Vector2d& x2, const Vector2d& f0,
                                  const Vector2d& f1, const Vector2d& f2,
                                  double lambda, const PlacementPolicy& policy) {
    check_policy(policy);
    if (lambda <= 0.0) throw NegativeStiffness("lambda must be positive");
    VectorXd f(6);
    f << f0, f1, f2;
    BalancedForceSystem sys{{x0, x1, x2}, {f0, f1, f2}};
    if (!check_balanced(sys, 1e-7).balanced) {
        throw ValidationFailed("force system is not balanced");
    }
    Context ctx(policy, {x0, x1, x2});
    std::vector<TerminalRef> terms = {{"t0", x0}, {"t1", x1}, {"t2", x2}};
    Gadget gad = three_split(ctx, terms, {f0, f1, f2}, 0);
    return finish_report(ctx, std::move(gad), lambda, f);
}

std::pair<std::pair<int, int>, Vector2d> find_balancing_point(
    const std::vector<Vector2d>& positions, const std::vector<Vector2d>& forces,
    const PlacementPolicy& policy) {
    check_policy(policy);
    if (positions.size() != forces.size() || positions.size() < 2) {
        throw DimensionMismatch("need matching positions and forces");
    }
    BalancedForceSystem sys;
    for (size_t i = 0; i < positions.size(); ++i) {
        sys.points.push_back(positions[i]);
        sys.forces.push_back(forces[i]);
    }
    if (!check_balanced(sys, 1e-7).balanced) {
        throw NoBalancingPoint("force system is not balanced");
    }
    Context ctx(policy, positions);
    const auto choice = balancing_point(ctx, positions, forces);
    return {choice.pair, choice.point};
}

SynthesisReport synth_four(const std::vector<Vector2d>& positions,
                           const std::vector<Vector2d>& forces, double lambda,
                           const PlacementPolicy& policy) {
    check_policy(policy);
    if (positions.size() != 4 || forces.size() != 4) {
        throw DimensionMismatch("expected exactly four terminals");
    }
    if (lambda <= 0.0) throw NegativeStiffness("lambda must be positive");
    BalancedForceSystem sys;
    VectorXd f(8);
    for (int i = 0; i < 4; ++i) {
        sys.points.push_back(positions[i]);
        sys.forces.push_back(forces[i]);
        f.segment<2>(2 * i) = forces[i];
    }
    if (!check_balanced(sys, 1e-7).balanced) {
        throw ValidationFailed("force system is not balanced");
    }
    Context ctx(policy, positions);
    std::vector<TerminalRef> terms;
    for (int i = 0; i < 4; ++i) {
        terms.push_back({"t" + std::to_string(i), positions[i]});
    }
    Gadget gad = four_split(ctx, terms, forces, 0);
    return finish_report(ctx, std::move(gad), lambda, f);
}

SynthesisReport synth_rank_one(const std::vector<VectorXd>& positions,
                               const VectorXd& f, double lambda,
                               const PlacementPolicy& policy) {
    check_policy(policy);
    const std::vector<Vector2d> pts = to_vec2(positions);
    const int n = static_cast<int>(pts.size());
    if (f.size() != 2 * n) throw DimensionMismatch("force vector length mismatch");
    if (lambda < 0.0) throw NegativeStiffness("lambda must be non-negative");

    BalancedForceSystem sys;
    for (int i = 0; i < n; ++i) {
        sys.points.push_back(pts[i]);
        sys.forces.push_back(f.segment<2>(2 * i));
    }
    if (f.norm() > 0.0 && !check_balanced(sys, 1e-7).balanced) {
        throw ValidationFailed("force system is not balanced");
    }

    Context ctx(policy, pts);
    std::vector<TerminalRef> terms;
    for (int i = 0; i < n; ++i) {
        terms.push_back({"t" + std::to_string(i), pts[i]});
    }
    Gadget gad = (lambda == 0.0 || f.norm() <= 1e-14)
                     ? [&] {
                           Gadget g;
                           g.terminals = terms;
                           return g;
                       }()
                     : synth_unit(ctx, terms, f, 0);
    return finish_report(ctx, std::move(gad), lambda, f);
}

SynthesisReport synth_static(const StaticResponse& resp,
                             const PlacementPolicy& policy) {
    check_policy(policy);
    const std::vector<Vector2d> pts = to_vec2(resp.terminal_positions);
    const auto pieces = split_rank_one(resp);  // validates the response
    const int n = static_cast<int>(pts.size());

    Context ctx(policy, pts);
    std::vector<TerminalRef> terms;
    for (int i = 0; i < n; ++i) {
        terms.push_back({"t" + std::to_string(i), pts[i]});
    }
    Gadget total;
    total.terminals = terms;
    for (const auto& piece : pieces) {
        Gadget gad = synth_unit(ctx, terms, piece.f, 0);
        for (auto& s : gad.springs) s.stiffness *= piece.lambda;
        total.interior.insert(total.interior.end(), gad.interior.begin(),
                              gad.interior.end());
        total.springs.insert(total.springs.end(), gad.springs.begin(),
                             gad.springs.end());
    }
    Network net = build_network(total);
    const MatrixXd W = static_response(net).matrix;
    const double err = spectral_norm(W - resp.matrix) /
                       std::max(1.0, spectral_norm(resp.matrix));
    return {std::move(net), 1.0, used_placements(ctx, total), err};
}

int network_crossings(const Network& net) {
    if (net.dimension() != 2) throw NotSupported("crossing count is 2D only");
    std::vector<std::pair<Vector2d, Vector2d>> segments;
    for (const auto& s : net.springs()) {
        segments.push_back({net.nodes()[net.node_index(s.a)].position,
                            net.nodes()[net.node_index(s.b)].position});
    }
    return count_crossings(segments);
}

}  // namespace elastonet
