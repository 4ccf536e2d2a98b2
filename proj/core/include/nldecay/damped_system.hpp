#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace nldecay {

/// Spectral data of a skew generator: purely imaginary eigenvalues i*s(k)
/// with orthonormal eigenvectors, plus the collocated input values B*e_k.
struct EigenData {
    Eigen::VectorXd s;           // eigenvalue frequencies, s(k) real, eigenvalue = i*s(k)
    Eigen::MatrixXcd vectors;    // columns e_k, orthonormal
    Eigen::MatrixXcd input_on_modes;  // d x N, column k = B* e_k
};

/// Finite-dimensional realization of x' = A x - B phi(B* x) in coordinates
/// where the energy norm is Euclidean. A is skew and carries a rotation-pair
/// factorization A = T * blockdiag{(0, w_k; -w_k, 0)} * T^T with T orthogonal,
/// which gives the exact conservative flow and the eigenbasis in closed form.
struct DampedSystem {
    int dim = 0;        // state dimension N (even)
    int input_dim = 0;  // d, 1 or 2

    Eigen::MatrixXd generator;   // dense skew A, N x N
    Eigen::MatrixXd input_map;   // B, N x d

    Eigen::VectorXd freqs;       // w_k > 0, one per rotation pair (N/2 entries)
    Eigen::MatrixXd pair_basis;  // T orthogonal; identity for modal systems
    bool modal = false;          // pair_basis == identity

    std::optional<EigenData> eigen_data;
    std::string label;

    /// Input map expressed in pair coordinates, T^T B. Cached by constructors.
    Eigen::MatrixXd input_map_pairs;
};

/// ||x|| + ||A x||. Throws on dimension mismatch.
double graph_seminorm(const DampedSystem& system, const Eigen::VectorXd& state);

/// Derives eigen_data from the rotation-pair factorization: each pair
/// (t_a, t_b) of basis columns with frequency w yields eigenvectors
/// (t_a +- i t_b)/sqrt(2) for eigenvalues +- i w.
EigenData eigen_data_from_pairs(const Eigen::VectorXd& freqs,
                                const Eigen::MatrixXd& pair_basis,
                                const Eigen::MatrixXd& input_map);

/// Checks the DampedSystem invariants (skewness, B rank, eigen_data
/// orthonormality); throws std::runtime_error naming the violated one.
void validate_system(const DampedSystem& system);

}  // namespace nldecay
