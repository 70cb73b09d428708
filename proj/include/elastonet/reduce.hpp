#pragma once

#include <Eigen/Dense>
#include <vector>

#include "elastonet/assembly.hpp"
#include "elastonet/model.hpp"

namespace elastonet {

/// Node partition used by the eliminations: terminals B, interior I,
/// interior with positive mass J, interior massless L. I = J + L disjoint.
struct Partition {
    std::vector<int> B;
    std::vector<int> I;
    std::vector<int> J;
    std::vector<int> L;
};

Partition make_partition(const Network& net);

/// Orthonormal basis of the numerical nullspace of the interior block A_II.
struct FloppyModes {
    Eigen::MatrixXd basis;  // (|I|*d) x m, columns orthonormal
    double tolerance = kPinvCutoff;
    int count() const { return static_cast<int>(basis.cols()); }
};

/// Terminal response by Schur complement: W = A_BB - A_BI A_II^+ A_IB.
StaticResponse static_response(const Network& net);

/// Nullspace of A_II; empty when there are no interior nodes.
FloppyModes floppy_modes(const Network& net);

/// Terminal response at a frequency, eliminating massless interiors
/// statically and massive interiors through the shifted solve. Throws
/// ResonanceProximity when omega^2 is near an eigenvalue of
/// M_JJ^{-1/2} Kt_JJ M_JJ^{-1/2}.
Eigen::MatrixXd dynamic_response_at(const Network& net, double omega);

/// Squared resonance frequencies of the network (eigenvalues of
/// M_JJ^{-1/2} Kt_JJ M_JJ^{-1/2}, including zeros). Empty if J is empty.
Eigen::VectorXd resonance_spectrum(const Network& net);

/// Full rational modal form of the terminal response.
ModalResponse extract_modal(const Network& net);

}  // namespace elastonet
