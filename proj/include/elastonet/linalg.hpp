#pragma once

#include <Eigen/Dense>

namespace elastonet {

/// Default relative tolerance for balance and PSD checks.
inline constexpr double kRelTol = 1e-9;
/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kPinvCutoff = 1e-10;
/// Resonance guard factor: delta = kResGuard * max(1, max omega_i^2).
inline constexpr double kResGuard = 1e-8;
/// Relative gap below which eigenvalues are merged into one resonance.
inline constexpr double kClusterTol = 1e-8;

/// Moore-Penrose pseudo-inverse via SVD with a relative rank cutoff.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double cutoff = kPinvCutoff);

/// Orthonormal basis of the numerical nullspace (right singular vectors with
/// sigma <= cutoff * sigma_max). Columns of the result span the nullspace.
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& m, double cutoff = kPinvCutoff);

/// Numerical rank with a relative singular value cutoff.
int numerical_rank(const Eigen::MatrixXd& m, double cutoff = kRelTol);

/// (m + m^T) / 2: removes rounding-noise asymmetry.
inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

/// Spectral norm (largest singular value).
double spectral_norm(const Eigen::MatrixXd& m);

/// Smallest eigenvalue of the symmetrized matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

/// True if the symmetrized matrix has all eigenvalues >= -tol * ||m||_2.
bool is_psd(const Eigen::MatrixXd& m, double tol = kRelTol);

}  // namespace elastonet
