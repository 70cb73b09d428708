#pragma once

#include <Eigen/Dense>

#include "elastonet/model.hpp"

namespace elastonet {

/// Global stiffness and mass matrices of a network. Node blocks follow the
/// network's node-list order, coordinates fastest-varying: node i owns rows
/// and columns [i*d, (i+1)*d).
struct AssembledSystem {
    Eigen::MatrixXd K;       // N*d x N*d symmetric PSD
    Eigen::VectorXd M_diag;  // diagonal of the mass matrix, each mass repeated d times
    int dimension = 0;
};

/// Sums the per-spring Hooke blocks k * n n^T with the usual +/- sign pattern.
AssembledSystem assemble(const Network& net);

/// Elastic energy k * ((u_i - u_j) . n)^2 stored by one spring under the given
/// endpoint displacements.
double spring_energy(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x_j,
                     double stiffness, const Eigen::VectorXd& u_i,
                     const Eigen::VectorXd& u_j);

/// u^T K u; equals the sum of spring_energy over all springs.
double quadratic_form(const AssembledSystem& sys, const Eigen::VectorXd& u);

}  // namespace elastonet
