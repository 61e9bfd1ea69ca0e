#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include "qwalk/evolution.hpp"
#include "qwalk/lattice.hpp"

namespace testutil {

inline Eigen::MatrixXd random_symmetric(Eigen::Index n, std::mt19937_64& rng, double scale = 5.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) m(i, j) = m(j, i) = dist(rng);
    return m;
}

/// Random lattice with non-negative couplings and per-site betas.
inline qwalk::WaveguideLattice random_lattice(Eigen::Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coupling(0.0, 2.0);
    std::uniform_real_distribution<double> beta_dist(-2.0, 2.0);
    std::uniform_real_distribution<double> length_dist(0.2, 2.5);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) c(i, j) = c(j, i) = coupling(rng);
    Eigen::VectorXd beta(n);
    for (Eigen::Index i = 0; i < n; ++i) beta(i) = beta_dist(rng);
    std::vector<qwalk::Waveguide> sites;
    for (Eigen::Index i = 0; i < n; ++i)
        sites.push_back({"W" + std::to_string(i + 1), 10.0 * static_cast<double>(i), 0.0});
    return qwalk::WaveguideLattice(std::move(sites), beta, std::move(c), length_dist(rng));
}

/// Haar-ish unitary via QR of a random complex matrix; independent of the
/// propagator implementation.
inline Eigen::MatrixXcd random_unitary(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

/// Permanent by brute-force expansion over permutations (fine for n <= 6).
inline std::complex<double> permanent(const Eigen::MatrixXcd& m) {
    const Eigen::Index n = m.rows();
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::complex<double> total = 0.0;
    do {
        std::complex<double> term = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) term *= m(i, perm[static_cast<std::size_t>(i)]);
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

/// Brute-force two-photon coincidence probabilities: evolve the symmetric
/// pair state in the ordered N^2 basis with U (x) U and read unordered-pair
/// probabilities. Independent of the correlation-function formula.
inline Eigen::MatrixXd two_photon_bruteforce(const Eigen::MatrixXcd& u, Eigen::Index q,
                                             Eigen::Index r) {
    const Eigen::Index n = u.rows();
    Eigen::MatrixXcd pair_state = Eigen::MatrixXcd::Zero(n, n);
    if (q == r)
        pair_state(q, q) = 1.0;
    else
        pair_state(q, r) = pair_state(r, q) = 1.0 / std::sqrt(2.0);
    const Eigen::MatrixXcd evolved = u * pair_state * u.transpose();
    Eigen::MatrixXd gamma(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        gamma(a, a) = std::norm(evolved(a, a));
        for (Eigen::Index b = a + 1; b < n; ++b)
            gamma(a, b) = gamma(b, a) = std::norm(evolved(a, b)) + std::norm(evolved(b, a));
    }
    return gamma;
}

inline double unordered_sum(const Eigen::MatrixXd& gamma) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < gamma.rows(); ++i)
        for (Eigen::Index j = i; j < gamma.cols(); ++j) total += gamma(i, j);
    return total;
}

} // namespace testutil
