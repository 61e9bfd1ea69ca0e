#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/correlations.hpp"
#include "qwalk/lattice.hpp"

namespace qwalk {

/// Bhattacharyya-type overlap between two correlation matrices,
///   S = (sum sqrt(a b))^2 / (sum a * sum b),
/// with the sums over unordered pairs (q' <= r'). S in [0,1]; S = 1 iff the
/// matrices are proportional.
double similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b);

/// (Gamma - Gamma') / Gamma' at one monitored output entry. Throws
/// std::domain_error when the distinguishable reference is zero there.
/// On diagonal entries this equals the indistinguishability exactly.
double hom_visibility(const CorrelationMatrix& quantum, const CorrelationMatrix& distinguishable,
                      Eigen::Index out_q, Eigen::Index out_r);

/// Coincidence rate at one output entry while scanning the relative delay of
/// the photon pair. Delay maps to overlap via the transform-limited Gaussian
/// I(tau) = exp(-tau^2 / (2 sigma^2)) with sigma the coherence time.
struct HOMScan {
    std::vector<double> delays_fs;
    std::vector<double> indistinguishability;
    std::vector<double> coincidences;
    double visibility = 0.0; // (Gamma - Gamma')/Gamma' at the monitored entry
};

HOMScan hom_scan(const Propagator& p, Eigen::Index q, Eigen::Index r, Eigen::Index out_q,
                 Eigen::Index out_r, double coherence_time_fs, std::span<const double> delays_fs);

/// One classical intensity measurement: light injected at `input`, per-site
/// output powers (probability vector; may sum to < 1 when ports are lossy).
struct CalibrationObservation {
    Eigen::Index input = 0;
    Eigen::VectorXd output;
};

struct FitParameter {
    std::string name;
    double initial = 0.0;
    double lower = 0.0;
    double upper = 1.0;
};

/// Rebuilds the device for a candidate parameter vector (same order as the
/// parameter list). This is what ties the optimizer to a concrete
/// parameterization (coupling model, per-site betas, port efficiencies, ...).
using LatticeRebuild =
    std::function<std::pair<WaveguideLattice, PortEfficiencies>(std::span<const double>)>;

struct CalibrationProblem {
    std::vector<CalibrationObservation> observations;
    std::vector<FitParameter> parameters;
    LatticeRebuild rebuild;
    double tolerance = 1e-10;    // converged when the residual drops below this
    long max_evaluations = 100000;
    int restarts = 16;           // multi-start count; restart 0 is the initial guess
    std::uint64_t seed = 0;
    int threads = 0;
    bool gradient_polish = false; // optional finite-difference descent after the simplex
};

struct CalibrationResult {
    WaveguideLattice lattice;
    PortEfficiencies efficiencies;
    Eigen::VectorXd parameters;
    double residual = 0.0;
    double initial_residual = 0.0;
    long evaluations = 0;
    bool converged = false;
};

/// Least-squares fit of the free parameters to the observed classical
/// distributions: minimizes
///   sum_obs sum_q' (eta_out[q'] |U_{q',input}|^2 eta_in[input] - observed)^2
/// by Nelder-Mead restarted from `restarts` seeded points inside the bounds.
/// Deterministic given the seed; restarts run in parallel.
CalibrationResult calibrate(const CalibrationProblem& problem);

/// Standard parameterizations over a template lattice, by parameter name:
///   "c1"               coupling model reference strength
///   "decay_um"         coupling model decay length
///   "coupling_scale"   scale factor on the template's coupling matrix
///   "beta:<label>"     propagation constant of one site (the gauge site -
///                      "C" if present, else the first site - cannot be fit)
///   "eta_in:<label>" / "eta_out:<label>"  port efficiencies
/// Model parameters require `model`; pass nullptr to forbid them.
CalibrationProblem standard_problem(const WaveguideLattice& lattice_template,
                                    const CouplingModel* model,
                                    std::vector<CalibrationObservation> observations,
                                    std::vector<FitParameter> parameters);

} // namespace qwalk
