#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "qwalk/correlations.hpp"

namespace qwalk {

/// Classical-bound test V[q][r] = (2/3) sqrt(gamma_qq gamma_rr) - gamma_qr.
/// V > 0 certifies nonclassical interference; the diagonal is defined as 0.
struct ViolationReport {
    Eigen::MatrixXd v;
    Eigen::MatrixXd sigma;            // empty unless derived from counts
    Eigen::MatrixXd sigmas_violated;  // v/sigma where v > 0, else 0
    bool has_sigma = false;
};

ViolationReport violation_matrix(const Eigen::MatrixXd& gamma);
ViolationReport violation_matrix(const CorrelationMatrix& c);

using CountsXi = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Coincidence counts per unordered output pair (stored symmetric, the
/// unordered count mirrored across the diagonal).
struct CountMatrix {
    CountsXi counts;
    std::int64_t total = 0; // sum over unordered pairs
};

/// Independent Poisson draw per unordered pair with mean
/// total_expected * gamma. Deterministic given the seed (philox4x32-10,
/// stream 0).
CountMatrix sample_counts(const CorrelationMatrix& c, double total_expected, std::uint64_t seed);

enum class SigmaMode {
    bootstrap,   // parametric bootstrap: resample Poisson(observed), recompute V
    propagation, // first-order error propagation through V
};

struct SignificanceOptions {
    int resamples = 10000;
    std::uint64_t seed = 0;
    SigmaMode mode = SigmaMode::bootstrap;
    int threads = 0; // 0 = hardware default; results do not depend on it
};

/// Point estimate of V from normalized counts plus per-entry standard
/// deviations. Bootstrap resample b draws from stream b+1 of the seed, so
/// the sampling stream (0) never collides with the bootstrap streams.
ViolationReport violation_significance(const CountMatrix& counts, const SignificanceOptions& options);
ViolationReport violation_significance(const CountMatrix& counts, int resamples, std::uint64_t seed);

} // namespace qwalk
