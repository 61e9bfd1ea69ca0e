#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/evolution.hpp"

namespace qwalk {

/// Two-photon coincidence probabilities over output pairs. Stored dense and
/// symmetric (both (q',r') and (r',q') carry the unordered-pair probability);
/// normalization is over unordered pairs: sum_{q'<=r'} gamma = 1 when no
/// losses have been applied.
struct CorrelationMatrix {
    Eigen::MatrixXd gamma;
    std::pair<Eigen::Index, Eigen::Index> input_pair{0, 0};
    double indistinguishability = 1.0;
    bool loss_applied = false;
};

/// Indistinguishable photons injected at (q, r):
///   gamma[q'][r'] = |U_{q',q} U_{r',r} + U_{q',r} U_{r',q}|^2
///                   / ((1 + delta_{q',r'}) (1 + delta_{q,r})).
/// The (1 + delta_{q,r}) input factor is the sqrt(2) amplitude normalization
/// of a doubly-occupied input; it is 1 for the usual q != r case.
CorrelationMatrix quantum_correlations(const Propagator& p, Eigen::Index q, Eigen::Index r);

/// Distinguishable photons: no interference term,
///   gamma[q'][r'] = (|U_{q',q} U_{r',r}|^2 + |U_{q',r} U_{r',q}|^2) / (1 + delta_{q',r'}).
CorrelationMatrix distinguishable_correlations(const Propagator& p, Eigen::Index q, Eigen::Index r);

/// Partial indistinguishability I in [0,1] weights only the interference
/// cross-term:
///   gamma = (|A|^2 + |B|^2 + 2 I Re(A conj(B)))
///           / ((1 + delta_{q',r'}) (1 + I delta_{q,r})),
/// with A = U_{q',q} U_{r',r}, B = U_{q',r} U_{r',q}. Matches the
/// distinguishable case at I=0 and the quantum case at I=1, and keeps the
/// unordered sum at exactly 1 for every I.
CorrelationMatrix partial_correlations(const Propagator& p, Eigen::Index q, Eigen::Index r,
                                       double indistinguishability);

/// Per-port coupling efficiencies, all in (0,1].
struct PortEfficiencies {
    Eigen::VectorXd eta_in;
    Eigen::VectorXd eta_out;

    static PortEfficiencies unit(Eigen::Index n);
    void validate(Eigen::Index n) const;
};

/// Scale gamma[q'][r'] by eta_out[q']*eta_out[r'] and the whole matrix by
/// eta_in[q]*eta_in[r]; optionally renormalize the unordered-pair sum back
/// to 1. Throws std::logic_error if losses were already applied.
CorrelationMatrix apply_losses(const CorrelationMatrix& c, const PortEfficiencies& eff,
                               bool renormalize);

struct Branch {
    std::string name;
    std::vector<Eigen::Index> sites;
};

/// Sum coincidences over a disjoint, covering partition of the sites.
/// Entry (B1,B2) collects every unordered site pair with one site in each
/// branch (pairs inside a branch land on the diagonal), so the unordered
/// branch-pair total equals the unordered site-pair total.
Eigen::MatrixXd branch_sum(const CorrelationMatrix& c, const std::vector<Branch>& branches);

} // namespace qwalk
