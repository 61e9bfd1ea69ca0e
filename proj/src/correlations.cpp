#include "qwalk/correlations.hpp"

#include <stdexcept>
#include <vector>

namespace qwalk {

namespace {

void check_inputs(const Propagator& p, Eigen::Index q, Eigen::Index r) {
    const Eigen::Index n = p.u.rows();
    if (q < 0 || q >= n || r < 0 || r >= n)
        throw std::out_of_range("input site index out of range");
}

double unordered_total(const Eigen::MatrixXd& gamma) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < gamma.rows(); ++i)
        for (Eigen::Index j = i; j < gamma.cols(); ++j) total += gamma(i, j);
    return total;
}

} // namespace

CorrelationMatrix partial_correlations(const Propagator& p, Eigen::Index q, Eigen::Index r,
                                       double indistinguishability) {
    check_inputs(p, q, r);
    if (!(indistinguishability >= 0.0 && indistinguishability <= 1.0))
        throw std::invalid_argument("indistinguishability must be in [0,1]");
    const Eigen::Index n = p.u.rows();
    const double input_norm = (q == r) ? 1.0 + indistinguishability : 1.0;

    CorrelationMatrix c;
    c.gamma.resize(n, n);
    c.input_pair = {q, r};
    c.indistinguishability = indistinguishability;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a; b < n; ++b) {
            const std::complex<double> amp_direct = p.u(a, q) * p.u(b, r);
            const std::complex<double> amp_exchanged = p.u(a, r) * p.u(b, q);
            double value;
            if (a == b) {
                // A = B on the diagonal, so the entry is |A|^2 (1 + I): the
                // count-rate doubling between I=0 and I=1 is exact.
                value = std::norm(amp_direct) * (1.0 + indistinguishability) / input_norm;
            } else {
                const double direct = std::norm(amp_direct);
                const double exchanged = std::norm(amp_exchanged);
                const double cross = 2.0 * (amp_direct * std::conj(amp_exchanged)).real();
                value = (direct + exchanged + indistinguishability * cross) / input_norm;
            }
            c.gamma(a, b) = c.gamma(b, a) = value;
        }
    }
    return c;
}

CorrelationMatrix quantum_correlations(const Propagator& p, Eigen::Index q, Eigen::Index r) {
    return partial_correlations(p, q, r, 1.0);
}

CorrelationMatrix distinguishable_correlations(const Propagator& p, Eigen::Index q, Eigen::Index r) {
    return partial_correlations(p, q, r, 0.0);
}

PortEfficiencies PortEfficiencies::unit(Eigen::Index n) {
    return {Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(n)};
}

void PortEfficiencies::validate(Eigen::Index n) const {
    if (eta_in.size() != n || eta_out.size() != n)
        throw std::invalid_argument("efficiency vector length does not match site count");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(eta_in(i) > 0.0 && eta_in(i) <= 1.0) || !(eta_out(i) > 0.0 && eta_out(i) <= 1.0))
            throw std::invalid_argument("port efficiencies must lie in (0,1]");
    }
}

CorrelationMatrix apply_losses(const CorrelationMatrix& c, const PortEfficiencies& eff,
                               bool renormalize) {
    if (c.loss_applied) throw std::logic_error("losses already applied to this matrix");
    const Eigen::Index n = c.gamma.rows();
    eff.validate(n);

    CorrelationMatrix out = c;
    out.loss_applied = true;
    const double input_scale = eff.eta_in(c.input_pair.first) * eff.eta_in(c.input_pair.second);
    out.gamma = input_scale *
                (eff.eta_out * eff.eta_out.transpose()).cwiseProduct(c.gamma);
    if (renormalize) {
        const double total = unordered_total(out.gamma);
        if (total <= 0.0) throw std::runtime_error("cannot renormalize an all-zero matrix");
        out.gamma /= total;
    }
    return out;
}

Eigen::MatrixXd branch_sum(const CorrelationMatrix& c, const std::vector<Branch>& branches) {
    const Eigen::Index n = c.gamma.rows();
    std::vector<Eigen::Index> owner(static_cast<std::size_t>(n), -1);
    for (std::size_t b = 0; b < branches.size(); ++b) {
        for (Eigen::Index site : branches[b].sites) {
            if (site < 0 || site >= n) throw std::invalid_argument("branch site index out of range");
            if (owner[static_cast<std::size_t>(site)] != -1)
                throw std::invalid_argument("branches overlap at site " + std::to_string(site));
            owner[static_cast<std::size_t>(site)] = static_cast<Eigen::Index>(b);
        }
    }
    for (Eigen::Index site = 0; site < n; ++site)
        if (owner[static_cast<std::size_t>(site)] == -1)
            throw std::invalid_argument("branch partition does not cover site " + std::to_string(site));

    const auto k = static_cast<Eigen::Index>(branches.size());
    Eigen::MatrixXd summed = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const Eigen::Index bi = owner[static_cast<std::size_t>(i)];
            const Eigen::Index bj = owner[static_cast<std::size_t>(j)];
            summed(bi, bj) += c.gamma(i, j);
            if (bi != bj) summed(bj, bi) += c.gamma(i, j);
        }
    }
    return summed;
}

} // namespace qwalk
