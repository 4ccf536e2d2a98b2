#include "nldecay/damped_system.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace nldecay {

double graph_seminorm(const DampedSystem& system, const Eigen::VectorXd& state) {
    if (state.size() != system.dim)
        throw std::invalid_argument("graph_seminorm: state dimension " +
                                    std::to_string(state.size()) + " != system dim " +
                                    std::to_string(system.dim));
    return state.norm() + (system.generator * state).norm();
}

EigenData eigen_data_from_pairs(const Eigen::VectorXd& freqs,
                                const Eigen::MatrixXd& pair_basis,
                                const Eigen::MatrixXd& input_map) {
    const int n_pairs = static_cast<int>(freqs.size());
    const int dim = static_cast<int>(pair_basis.rows());
    const int d = static_cast<int>(input_map.cols());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const std::complex<double> i_unit(0.0, 1.0);

    EigenData data;
    data.s.resize(2 * n_pairs);
    data.vectors.resize(dim, 2 * n_pairs);
    data.input_on_modes.resize(d, 2 * n_pairs);

    for (int k = 0; k < n_pairs; ++k) {
        const Eigen::VectorXd ta = pair_basis.col(2 * k);
        const Eigen::VectorXd tb = pair_basis.col(2 * k + 1);
        // block ((0, w), (-w, 0)) on (ta, tb): eigenvector for +i w is
        // (ta + i tb)/sqrt(2), for -i w its conjugate.
        data.s(2 * k) = freqs(k);
        data.s(2 * k + 1) = -freqs(k);
        data.vectors.col(2 * k) = inv_sqrt2 * (ta + i_unit * tb);
        data.vectors.col(2 * k + 1) = inv_sqrt2 * (ta - i_unit * tb);
    }
    data.input_on_modes = input_map.transpose().cast<std::complex<double>>() *
                          data.vectors;
    return data;
}

void validate_system(const DampedSystem& system) {
    if (system.dim <= 0 || system.dim % 2 != 0)
        throw std::runtime_error("DampedSystem: dim must be positive and even");
    if (system.input_dim < 1 || system.input_dim > 2)
        throw std::runtime_error("DampedSystem: input_dim must be 1 or 2");

    const double a_norm = system.generator.norm();
    const double skew = (system.generator + system.generator.transpose()).norm();
    if (a_norm > 0 && skew > 1e-12 * a_norm)
        throw std::runtime_error("DampedSystem: generator not skew");

    Eigen::MatrixXd btb = system.input_map.transpose() * system.input_map;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(btb);
    if (es.eigenvalues().minCoeff() <= 0)
        throw std::runtime_error("DampedSystem: columns of B are linearly dependent");

    if (system.eigen_data) {
        const auto& ed = *system.eigen_data;
        Eigen::MatrixXcd gram =
            ed.vectors.adjoint() * ed.vectors -
            Eigen::MatrixXcd::Identity(ed.vectors.cols(), ed.vectors.cols());
        if (gram.cwiseAbs().maxCoeff() > 1e-10)
            throw std::runtime_error("DampedSystem: eigenvectors not orthonormal");
        // A e_k = i s_k e_k
        Eigen::MatrixXcd resid =
            system.generator.cast<std::complex<double>>() * ed.vectors -
            ed.vectors * (std::complex<double>(0, 1) * ed.s.cast<std::complex<double>>())
                             .asDiagonal()
                             .toDenseMatrix();
        if (resid.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, a_norm))
            throw std::runtime_error("DampedSystem: eigen_data inconsistent with A");
    }
}

}  // namespace nldecay
