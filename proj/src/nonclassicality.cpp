#include "qwalk/nonclassicality.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

ViolationReport violation_matrix(const Eigen::MatrixXd& gamma) {
    if (gamma.rows() != gamma.cols()) throw std::invalid_argument("correlation matrix must be square");
    const Eigen::Index n = gamma.rows();
    ViolationReport report;
    report.v = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index q = 0; q < n; ++q)
        for (Eigen::Index r = 0; r < n; ++r)
            if (q != r)
                report.v(q, r) = (2.0 / 3.0) * std::sqrt(gamma(q, q) * gamma(r, r)) - gamma(q, r);
    return report;
}

ViolationReport violation_matrix(const CorrelationMatrix& c) { return violation_matrix(c.gamma); }

CountMatrix sample_counts(const CorrelationMatrix& c, double total_expected, std::uint64_t seed) {
    if (!(total_expected > 0.0)) throw std::invalid_argument("count budget must be > 0");
    const Eigen::Index n = c.gamma.rows();
    rng::RandomStream stream(seed, 0);
    CountMatrix out;
    out.counts = CountsXi::Zero(n, n);
    out.total = 0;
    for (Eigen::Index q = 0; q < n; ++q) {
        for (Eigen::Index r = q; r < n; ++r) {
            const std::int64_t k = stream.poisson(total_expected * c.gamma(q, r));
            out.counts(q, r) = out.counts(r, q) = k;
            out.total += k;
        }
    }
    return out;
}

namespace {

Eigen::MatrixXd normalized_gamma(const CountsXi& counts) {
    const Eigen::Index n = counts.rows();
    double total = 0.0;
    for (Eigen::Index q = 0; q < n; ++q)
        for (Eigen::Index r = q; r < n; ++r) total += static_cast<double>(counts(q, r));
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
    if (total <= 0.0) return gamma; // degenerate resample; treated as all-zero
    for (Eigen::Index q = 0; q < n; ++q)
        for (Eigen::Index r = 0; r < n; ++r) gamma(q, r) = static_cast<double>(counts(q, r)) / total;
    return gamma;
}

Eigen::MatrixXd propagation_sigma(const CountMatrix& counts, const Eigen::MatrixXd& gamma) {
    // v = (2/3) sqrt(g_qq g_rr) - g_qr with independent Poisson counts;
    // var(g) ~ count / total^2, normalization jitter neglected
    const Eigen::Index n = gamma.rows();
    const auto total = static_cast<double>(counts.total);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index q = 0; q < n; ++q) {
        for (Eigen::Index r = 0; r < n; ++r) {
            if (q == r) continue;
            const double gqq = gamma(q, q), grr = gamma(r, r);
            double var = static_cast<double>(counts.counts(q, r)) / (total * total);
            if (gqq > 0.0 && grr > 0.0) {
                const double dq = (1.0 / 3.0) * std::sqrt(grr / gqq);
                const double dr = (1.0 / 3.0) * std::sqrt(gqq / grr);
                var += dq * dq * static_cast<double>(counts.counts(q, q)) / (total * total);
                var += dr * dr * static_cast<double>(counts.counts(r, r)) / (total * total);
            }
            sigma(q, r) = std::sqrt(var);
        }
    }
    return sigma;
}

} // namespace

ViolationReport violation_significance(const CountMatrix& counts, const SignificanceOptions& options) {
    const Eigen::Index n = counts.counts.rows();
    if (n != counts.counts.cols()) throw std::invalid_argument("count matrix must be square");
    if (counts.total <= 0) throw std::invalid_argument("count matrix has zero total");

    const Eigen::MatrixXd gamma_hat = normalized_gamma(counts.counts);
    ViolationReport report = violation_matrix(gamma_hat);
    report.has_sigma = true;

    if (options.mode == SigmaMode::propagation) {
        report.sigma = propagation_sigma(counts, gamma_hat);
    } else {
        if (options.resamples < 100) throw std::invalid_argument("bootstrap needs >= 100 resamples");
        const auto b_total = static_cast<std::size_t>(options.resamples);
        std::vector<Eigen::MatrixXd> resampled(b_total);
        parallel_for(options.resamples, options.threads, [&](std::int64_t b) {
            rng::RandomStream stream(options.seed, static_cast<std::uint64_t>(b) + 1);
            CountsXi draw = CountsXi::Zero(n, n);
            for (Eigen::Index q = 0; q < n; ++q)
                for (Eigen::Index r = q; r < n; ++r) {
                    const std::int64_t k =
                        stream.poisson(static_cast<double>(counts.counts(q, r)));
                    draw(q, r) = draw(r, q) = k;
                }
            resampled[static_cast<std::size_t>(b)] = violation_matrix(normalized_gamma(draw)).v;
        });
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd sumsq = Eigen::MatrixXd::Zero(n, n);
        for (const auto& v : resampled) {
            sum += v;
            sumsq += v.cwiseProduct(v);
        }
        const auto b_count = static_cast<double>(b_total);
        const Eigen::MatrixXd mean = sum / b_count;
        Eigen::MatrixXd variance = sumsq / b_count - mean.cwiseProduct(mean);
        variance = variance.cwiseMax(0.0);
        report.sigma = variance.cwiseSqrt();
    }

    report.sigmas_violated = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index q = 0; q < n; ++q)
        for (Eigen::Index r = 0; r < n; ++r)
            if (q != r && report.v(q, r) > 0.0 && report.sigma(q, r) > 0.0)
                report.sigmas_violated(q, r) = report.v(q, r) / report.sigma(q, r);
    return report;
}

ViolationReport violation_significance(const CountMatrix& counts, int resamples, std::uint64_t seed) {
    SignificanceOptions options;
    options.resamples = resamples;
    options.seed = seed;
    return violation_significance(counts, options);
}

} // namespace qwalk
