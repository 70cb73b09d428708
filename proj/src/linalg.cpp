#include "elastonet/linalg.hpp"

namespace elastonet {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double cutoff) {
    if (m.size() == 0) return m.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double thresh = cutoff * (sigma.size() > 0 ? sigma(0) : 0.0);
    Eigen::VectorXd inv_sigma = Eigen::VectorXd::Zero(sigma.size());
    for (int i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > thresh) inv_sigma(i) = 1.0 / sigma(i);
    }
    return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& m, double cutoff) {
    if (m.size() == 0) return Eigen::MatrixXd(0, 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double thresh = cutoff * (sigma.size() > 0 ? sigma(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > thresh) ++rank;
    }
    return svd.matrixV().rightCols(m.cols() - rank);
}

int numerical_rank(const Eigen::MatrixXd& m, double cutoff) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sigma = svd.singularValues();
    const double thresh = cutoff * (sigma.size() > 0 ? sigma(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > thresh) ++rank;
    }
    return rank;
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_psd(const Eigen::MatrixXd& m, double tol) {
    if (m.size() == 0) return true;
    return min_eigenvalue(m) >= -tol * spectral_norm(m);
}

}  // namespace elastonet
