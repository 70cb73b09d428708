#include "elastonet/assembly.hpp"

namespace elastonet {

AssembledSystem assemble(const Network& net) {
    const int d = net.dimension();
    const int n = static_cast<int>(net.nodes().size());
    AssembledSystem sys;
    sys.dimension = d;
    sys.K = Eigen::MatrixXd::Zero(n * d, n * d);
    sys.M_diag = Eigen::VectorXd::Zero(n * d);
    for (int i = 0; i < n; ++i) {
        sys.M_diag.segment(i * d, d).setConstant(net.nodes()[i].mass);
    }
    for (const Spring& s : net.springs()) {
        const int ia = net.node_index(s.a);
        const int ib = net.node_index(s.b);
        Eigen::VectorXd axis = net.nodes()[ib].position - net.nodes()[ia].position;
        const double len = axis.norm();
        if (len == 0.0) {
            throw ZeroRestLength("spring (" + s.a + "," + s.b + ") has zero rest length");
        }
        axis /= len;
        const Eigen::MatrixXd block = s.stiffness * (axis * axis.transpose());
        sys.K.block(ia * d, ia * d, d, d) += block;
        sys.K.block(ib * d, ib * d, d, d) += block;
        sys.K.block(ia * d, ib * d, d, d) -= block;
        sys.K.block(ib * d, ia * d, d, d) -= block;
    }
    return sys;
}

double spring_energy(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x_j,
                     double stiffness, const Eigen::VectorXd& u_i,
                     const Eigen::VectorXd& u_j) {
    Eigen::VectorXd axis = x_j - x_i;
    const double len = axis.norm();
    if (len == 0.0) throw ZeroRestLength("coincident spring endpoints");
    const double stretch = (u_i - u_j).dot(axis / len);
    return stiffness * stretch * stretch;
}

double quadratic_form(const AssembledSystem& sys, const Eigen::VectorXd& u) {
    if (u.size() != sys.K.rows()) {
        throw DimensionMismatch("displacement vector length mismatch");
    }
    return u.dot(sys.K * u);
}

}  // namespace elastonet
