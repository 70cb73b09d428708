#pragma once

#include <Eigen/Dense>
#include <vector>

#include "elastonet/synth2d.hpp"

namespace elastonet {

/// A spring network with two massive oscillator nodes whose terminal
/// response is f f^T omega^2 / (omega^2 - omega0^2).
struct ResonantGadget {
    Network network;
    double omega0_sq = 0.0;
    double mass = 0.0;  // mass carried by each oscillator node
    std::vector<PlacedNode> placed_nodes;
    double roundtrip_error = 0.0;
};

/// Builds a resonant gadget over the given terminals: two massive nodes are
/// placed in the half-budget hull neighborhood, the extended force system is
/// completed to balance, realized statically with unit coefficient, and the
/// oscillator masses are chosen so the single coupled resonance sits at
/// omega0_sq. The terminal forces f need not balance on their own.
ResonantGadget make_resonant_gadget(const std::vector<Eigen::VectorXd>& positions,
                                    const Eigen::VectorXd& f, double omega0_sq,
                                    const PlacementPolicy& policy);

/// Full dynamic synthesis: realizes a validated modal response as a planar
/// spring-mass network. The static part W(0) is synthesized masslessly, each
/// dynamic rank-one target gets its own resonant gadget with disjoint
/// interior placements, and the terminal masses are attached directly.
SynthesisReport synth_dynamic(const ModalResponse& target,
                              const PlacementPolicy& policy);

}  // namespace elastonet
