#pragma once

#include <Eigen/Dense>

namespace qwalk {

/// Eigendecomposition of a real symmetric Hamiltonian, H = V diag(lambda) V^T.
/// Kept around so sweeps over z reuse one decomposition.
struct Spectrum {
    Eigen::VectorXd eigenvalues;  // cm^-1
    Eigen::MatrixXd eigenvectors; // orthonormal columns
};

/// Throws std::invalid_argument if the matrix is not symmetric
/// (max |H - H^T| > 1e-10).
Spectrum decompose(const Eigen::MatrixXd& hamiltonian);

/// Unitary propagator U(z) = exp(-i H z) plus the spectral data behind it.
struct Propagator {
    Eigen::MatrixXcd u;
    double z_cm = 0.0;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

Propagator propagator(const Eigen::MatrixXd& hamiltonian, double z_cm);
Propagator propagator(const Spectrum& spectrum, double z_cm);

/// |U_{q', input}|^2 for all q'; sums to 1 by unitarity.
Eigen::VectorXd single_photon_distribution(const Propagator& p, Eigen::Index input);

} // namespace qwalk
