#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "elastonet/geometry.hpp"
#include "elastonet/model.hpp"
#include "elastonet/realizability.hpp"

namespace elastonet {

/// Controls where synthesized interior nodes may go and how generic choices
/// are drawn.
struct PlacementPolicy {
    double eps_hull = 0.5;                    // epsilon of the hull neighborhood
    std::vector<Eigen::Vector2d> forbidden;   // points to stay away from
    uint64_t rng_seed = 0;
    double min_separation = 1e-3;
    int max_retries = 64;
};

struct PlacedNode {
    Eigen::Vector2d position;
    std::string provenance;  // which construction placed it
};

struct SynthesisReport {
    Network network;
    double calibration = 1.0;           // overall stiffness rescale applied
    std::vector<PlacedNode> placed_nodes;
    double roundtrip_error = 0.0;       // relative forward-solve mismatch
};

/// Single spring realizing lambda * f f^T for an opposite collinear pair.
Network synth_pair(const Eigen::Vector2d& x1, const Eigen::Vector2d& x2,
                   const Eigen::VectorXd& f, double lambda);

/// Epsilon such that x0, x1 + eps f1, x2 + eps f2 are well non-collinear,
/// the displaced points stay in the eps_hull neighborhood and clear the
/// forbidden set. Throws RankDeficient when [f1,f2,x1-x0,x2-x0] has rank < 2.
double choose_eps_noncollinear(const Eigen::Vector2d& x0, const Eigen::Vector2d& x1,
                               const Eigen::Vector2d& x2, const Eigen::Vector2d& f1,
                               const Eigen::Vector2d& f2,
                               const PlacementPolicy& policy);

/// Five-spring, two-interior-node gadget for a balanced three-terminal
/// system with rank[f1,f2,x1-x0,x2-x0] = 2.
SynthesisReport synth_three_rank2(const Eigen::Vector2d& x0, const Eigen::Vector2d& x1,
                                  const Eigen::Vector2d& x2, const Eigen::Vector2d& f0,
                                  const Eigen::Vector2d& f1, const Eigen::Vector2d& f2,
                                  double lambda, const PlacementPolicy& policy);

/// Collinear three-terminal case (rank 1): splits through an off-line point
/// into two three-terminal sub-gadgets.
SynthesisReport synth_three_rank1(const Eigen::Vector2d& x0, const Eigen::Vector2d& x1,
                                  const Eigen::Vector2d& x2, const Eigen::Vector2d& f0,
                                  const Eigen::Vector2d& f1, const Eigen::Vector2d& f2,
                                  double lambda, const PlacementPolicy& policy);

/// Pair {i,j} and point y* in the hull neighborhood where the three forces
/// f_i, f_j, -(f_i+f_j) at x_i, x_j, y* balance. Throws NoBalancingPoint
/// for unbalanced input.
std::pair<std::pair<int, int>, Eigen::Vector2d> find_balancing_point(
    const std::vector<Eigen::Vector2d>& positions,
    const std::vector<Eigen::Vector2d>& forces, const PlacementPolicy& policy);

/// Four-terminal rank-one gadget: splits at a balancing point into two
/// three-terminal systems.
SynthesisReport synth_four(const std::vector<Eigen::Vector2d>& positions,
                           const std::vector<Eigen::Vector2d>& forces, double lambda,
                           const PlacementPolicy& policy);

/// General planar rank-one synthesis: network whose static response is
/// lambda * f f^T for any balanced (positions, f), by dispatch on the number
/// of active terminals and induction for p > 4.
SynthesisReport synth_rank_one(const std::vector<Eigen::VectorXd>& positions,
                               const Eigen::VectorXd& f, double lambda,
                               const PlacementPolicy& policy);

/// Full static synthesis: spectral split into rank-one pieces, one gadget
/// per piece with pairwise-disjoint interior placements, superposed.
SynthesisReport synth_static(const StaticResponse& resp, const PlacementPolicy& policy);

/// Geometric spring crossings of a 2D network (diagnostic; synthesized
/// networks are allowed to cross).
int network_crossings(const Network& net);

}  // namespace elastonet
