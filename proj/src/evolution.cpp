#include "qwalk/evolution.hpp"

#include <complex>
#include <stdexcept>

namespace qwalk {

Spectrum decompose(const Eigen::MatrixXd& hamiltonian) {
    if (hamiltonian.rows() != hamiltonian.cols())
        throw std::invalid_argument("hamiltonian must be square");
    const double asymmetry = (hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff();
    if (asymmetry > 1e-10)
        throw std::invalid_argument("hamiltonian is not symmetric (max asymmetry " +
                                    std::to_string(asymmetry) + ")");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Propagator propagator(const Spectrum& spectrum, double z_cm) {
    if (z_cm < 0.0) throw std::invalid_argument("z_cm must be >= 0");
    const Eigen::Index n = spectrum.eigenvalues.size();
    Propagator p;
    p.z_cm = z_cm;
    p.eigenvalues = spectrum.eigenvalues;
    p.eigenvectors = spectrum.eigenvectors;
    if (z_cm == 0.0) {
        p.u = Eigen::MatrixXcd::Identity(n, n);
        return p;
    }
    Eigen::VectorXcd phases(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double angle = -spectrum.eigenvalues(k) * z_cm;
        phases(k) = std::complex<double>(std::cos(angle), std::sin(angle));
    }
    const Eigen::MatrixXcd v = spectrum.eigenvectors.cast<std::complex<double>>();
    p.u = v * phases.asDiagonal() * v.adjoint();
    return p;
}

Propagator propagator(const Eigen::MatrixXd& hamiltonian, double z_cm) {
    return propagator(decompose(hamiltonian), z_cm);
}

Eigen::VectorXd single_photon_distribution(const Propagator& p, Eigen::Index input) {
    if (input < 0 || input >= p.u.cols())
        throw std::out_of_range("input site index out of range");
    return p.u.col(input).cwiseAbs2();
}

} // namespace qwalk
