#include "qwalk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qwalk/evolution.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

double similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("similarity: matrix dimensions differ");
    double overlap = 0.0, total_a = 0.0, total_b = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i; j < a.cols(); ++j) {
            const double va = a(i, j), vb = b(i, j);
            if (va < 0.0 || vb < 0.0)
                throw std::invalid_argument("similarity: entries must be non-negative");
            overlap += std::sqrt(va * vb);
            total_a += va;
            total_b += vb;
        }
    }
    if (total_a <= 0.0 || total_b <= 0.0)
        throw std::invalid_argument("similarity: all-zero matrix");
    return overlap * overlap / (total_a * total_b);
}

double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    return similarity(a.gamma, b.gamma);
}

double hom_visibility(const CorrelationMatrix& quantum, const CorrelationMatrix& distinguishable,
                      Eigen::Index out_q, Eigen::Index out_r) {
    if (quantum.gamma.rows() != distinguishable.gamma.rows())
        throw std::invalid_argument("visibility: matrix dimensions differ");
    const Eigen::Index n = quantum.gamma.rows();
    if (out_q < 0 || out_q >= n || out_r < 0 || out_r >= n)
        throw std::out_of_range("visibility: output index out of range");
    const double reference = distinguishable.gamma(out_q, out_r);
    if (reference == 0.0)
        throw std::domain_error("visibility undefined: distinguishable rate is zero at this entry");
    return (quantum.gamma(out_q, out_r) - reference) / reference;
}

HOMScan hom_scan(const Propagator& p, Eigen::Index q, Eigen::Index r, Eigen::Index out_q,
                 Eigen::Index out_r, double coherence_time_fs, std::span<const double> delays_fs) {
    if (!(coherence_time_fs > 0.0))
        throw std::invalid_argument("coherence time must be > 0");
    HOMScan scan;
    scan.delays_fs.assign(delays_fs.begin(), delays_fs.end());
    scan.indistinguishability.reserve(delays_fs.size());
    scan.coincidences.reserve(delays_fs.size());
    for (const double tau : delays_fs) {
        const double ratio = tau / coherence_time_fs;
        const double overlap = std::exp(-0.5 * ratio * ratio);
        scan.indistinguishability.push_back(overlap);
        scan.coincidences.push_back(partial_correlations(p, q, r, overlap).gamma(out_q, out_r));
    }
    scan.visibility = hom_visibility(quantum_correlations(p, q, r),
                                     distinguishable_correlations(p, q, r), out_q, out_r);
    return scan;
}

namespace {

// ---- bounded Nelder-Mead in logistic-transformed coordinates ----

double to_unbounded(double x, double lo, double hi) {
    const double f = std::clamp((x - lo) / (hi - lo), 1e-12, 1.0 - 1e-12);
    return std::log(f / (1.0 - f));
}

double to_bounded(double t, double lo, double hi) {
    return lo + (hi - lo) / (1.0 + std::exp(-t));
}

struct SimplexResult {
    Eigen::VectorXd point; // transformed coordinates
    double value = std::numeric_limits<double>::infinity();
    long evaluations = 0;
};

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& start, long eval_budget) {
    const Eigen::Index dim = start.size();
    const auto m = static_cast<std::size_t>(dim + 1);
    std::vector<Eigen::VectorXd> simplex(m, start);
    std::vector<double> values(m);
    long evals = 0;
    for (std::size_t i = 1; i < m; ++i) simplex[i](static_cast<Eigen::Index>(i - 1)) += 0.5;
    for (std::size_t i = 0; i < m; ++i) {
        values[i] = f(simplex[i]);
        ++evals;
    }

    const double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
    while (evals < eval_budget) {
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second_worst = order[m - 2];

        // relative plateau of the simplex values = converged
        const double spread = values[worst] - values[best];
        if (spread <= 1e-10 * (std::abs(values[best]) + 1e-300)) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = 0; i < m; ++i)
            if (i != worst) centroid += simplex[i];
        centroid /= static_cast<double>(dim);

        const Eigen::VectorXd reflected = centroid + kReflect * (centroid - simplex[worst]);
        const double f_reflected = f(reflected);
        ++evals;
        if (f_reflected < values[best]) {
            const Eigen::VectorXd expanded = centroid + kExpand * (reflected - centroid);
            const double f_expanded = f(expanded);
            ++evals;
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if (f_reflected < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            const bool outside = f_reflected < values[worst];
            const Eigen::VectorXd pivot = outside ? reflected : simplex[worst];
            const Eigen::VectorXd contracted = centroid + kContract * (pivot - centroid);
            const double f_contracted = f(contracted);
            ++evals;
            if (f_contracted < std::min(f_reflected, values[worst])) {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                for (std::size_t i = 0; i < m; ++i) {
                    if (i == best) continue;
                    simplex[i] = simplex[best] + kShrink * (simplex[i] - simplex[best]);
                    values[i] = f(simplex[i]);
                    ++evals;
                }
            }
        }
    }
    SimplexResult result;
    for (std::size_t i = 0; i < m; ++i) {
        if (values[i] < result.value) {
            result.value = values[i];
            result.point = simplex[i];
        }
    }
    result.evaluations = evals;
    return result;
}

SimplexResult gradient_descent(const std::function<double(const Eigen::VectorXd&)>& f,
                               Eigen::VectorXd point, double value, long eval_budget) {
    const Eigen::Index dim = point.size();
    long evals = 0;
    const double h = 1e-6;
    for (int iter = 0; iter < 100 && evals + 2 * dim < eval_budget; ++iter) {
        Eigen::VectorXd grad(dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            Eigen::VectorXd hi = point, lo = point;
            hi(k) += h;
            lo(k) -= h;
            grad(k) = (f(hi) - f(lo)) / (2.0 * h);
            evals += 2;
        }
        const double norm = grad.norm();
        if (norm < 1e-14) break;
        double step = 1.0;
        bool improved = false;
        while (step > 1e-12 && evals < eval_budget) {
            const Eigen::VectorXd candidate = point - step * grad / norm;
            const double f_candidate = f(candidate);
            ++evals;
            if (f_candidate < value) {
                point = candidate;
                value = f_candidate;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return {point, value, evals};
}

} // namespace

CalibrationResult calibrate(const CalibrationProblem& problem) {
    const auto dim = static_cast<Eigen::Index>(problem.parameters.size());
    if (dim == 0) throw std::invalid_argument("calibrate: no free parameters");
    if (!problem.rebuild) throw std::invalid_argument("calibrate: missing rebuild function");
    if (problem.observations.empty()) throw std::invalid_argument("calibrate: no observations");
    if (problem.restarts < 1) throw std::invalid_argument("calibrate: restarts must be >= 1");

    long scalar_observations = 0;
    for (const auto& obs : problem.observations) {
        if ((obs.output.array() < 0.0).any())
            throw std::invalid_argument("calibrate: observed intensities must be >= 0");
        if (obs.output.sum() > 1.05) // small slack for measurement noise
            throw std::invalid_argument("calibrate: observed distribution sums to more than 1");
        scalar_observations += obs.output.size();
    }
    if (scalar_observations < dim)
        throw std::invalid_argument("calibrate: under-determined problem (fewer observations than parameters)");

    Eigen::VectorXd lower(dim), upper(dim), initial(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const auto& param = problem.parameters[static_cast<std::size_t>(k)];
        if (!(param.lower < param.upper))
            throw std::invalid_argument("calibrate: bad bounds for parameter " + param.name);
        if (param.initial < param.lower || param.initial > param.upper)
            throw std::invalid_argument("calibrate: initial value outside bounds for " + param.name);
        lower(k) = param.lower;
        upper(k) = param.upper;
        initial(k) = param.initial;
    }

    const auto objective_bounded = [&](std::span<const double> params) {
        auto [lattice, efficiencies] = problem.rebuild(params);
        const Spectrum spectrum = decompose(hamiltonian(lattice));
        const Propagator p = propagator(spectrum, lattice.length_cm());
        double residual = 0.0;
        for (const auto& obs : problem.observations) {
            if (obs.input < 0 || obs.input >= lattice.size())
                throw std::out_of_range("calibrate: observation input index out of range");
            if (obs.output.size() != lattice.size())
                throw std::invalid_argument("calibrate: observation length mismatch");
            const Eigen::VectorXd predicted = efficiencies.eta_in(obs.input) *
                                              efficiencies.eta_out.cwiseProduct(
                                                  single_photon_distribution(p, obs.input));
            residual += (predicted - obs.output).squaredNorm();
        }
        return residual;
    };
    const auto objective_transformed = [&](const Eigen::VectorXd& t) {
        std::vector<double> x(static_cast<std::size_t>(dim));
        for (Eigen::Index k = 0; k < dim; ++k)
            x[static_cast<std::size_t>(k)] = to_bounded(t(k), lower(k), upper(k));
        return objective_bounded(x);
    };

    const double initial_residual = objective_bounded(
        std::span<const double>(initial.data(), static_cast<std::size_t>(dim)));

    const long budget_per_restart =
        std::max<long>(problem.max_evaluations / problem.restarts, 50 * (dim + 1));
    std::vector<SimplexResult> results(static_cast<std::size_t>(problem.restarts));
    parallel_for(problem.restarts, problem.threads, [&](std::int64_t restart) {
        Eigen::VectorXd start(dim);
        if (restart == 0) {
            for (Eigen::Index k = 0; k < dim; ++k)
                start(k) = to_unbounded(initial(k), lower(k), upper(k));
        } else {
            rng::RandomStream stream(problem.seed, static_cast<std::uint64_t>(restart));
            for (Eigen::Index k = 0; k < dim; ++k)
                start(k) = to_unbounded(stream.uniform(lower(k), upper(k)), lower(k), upper(k));
        }
        SimplexResult local = nelder_mead(objective_transformed, start, budget_per_restart);
        if (problem.gradient_polish) {
            SimplexResult polished = gradient_descent(objective_transformed, local.point,
                                                      local.value, budget_per_restart / 4);
            polished.evaluations += local.evaluations;
            local = polished;
        }
        results[static_cast<std::size_t>(restart)] = local;
    });

    const SimplexResult* best = &results[0];
    long total_evals = 1;
    for (const auto& r : results) {
        total_evals += r.evaluations;
        if (r.value < best->value) best = &r;
    }

    Eigen::VectorXd fitted(dim);
    for (Eigen::Index k = 0; k < dim; ++k)
        fitted(k) = to_bounded(best->point(k), lower(k), upper(k));
    double best_value = best->value;
    // the initial guess is always a candidate, so the fit never regresses
    if (initial_residual < best_value) {
        fitted = initial;
        best_value = initial_residual;
    }

    auto [lattice, efficiencies] =
        problem.rebuild(std::span<const double>(fitted.data(), static_cast<std::size_t>(dim)));
    CalibrationResult result{std::move(lattice), std::move(efficiencies), fitted, best_value,
                             initial_residual, total_evals, best_value <= problem.tolerance};
    return result;
}

CalibrationProblem standard_problem(const WaveguideLattice& lattice_template,
                                    const CouplingModel* model,
                                    std::vector<CalibrationObservation> observations,
                                    std::vector<FitParameter> parameters) {
    const Eigen::Index n = lattice_template.size();
    Eigen::Index gauge_site = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (lattice_template.sites()[static_cast<std::size_t>(i)].label == "C") gauge_site = i;

    struct Slot {
        enum Kind { c1, decay, coupling_scale, beta, eta_in, eta_out } kind;
        Eigen::Index site = -1;
    };
    std::vector<Slot> slots;
    for (const auto& param : parameters) {
        const std::string& name = param.name;
        if (name == "c1" || name == "decay_um") {
            if (model == nullptr)
                throw std::invalid_argument("parameter '" + name + "' needs a coupling model");
            slots.push_back({name == "c1" ? Slot::c1 : Slot::decay, -1});
        } else if (name == "coupling_scale") {
            slots.push_back({Slot::coupling_scale, -1});
        } else if (name.starts_with("beta:")) {
            const Eigen::Index site = lattice_template.index_of(name.substr(5));
            if (site == gauge_site)
                throw std::invalid_argument(
                    "beta of the gauge site cannot be fit (a global beta shift is unobservable)");
            slots.push_back({Slot::beta, site});
        } else if (name.starts_with("eta_in:")) {
            slots.push_back({Slot::eta_in, lattice_template.index_of(name.substr(7))});
        } else if (name.starts_with("eta_out:")) {
            slots.push_back({Slot::eta_out, lattice_template.index_of(name.substr(8))});
        } else {
            throw std::invalid_argument("unknown calibration parameter: " + name);
        }
    }

    CalibrationProblem problem;
    problem.observations = std::move(observations);
    problem.parameters = std::move(parameters);

    const CouplingModel base_model = model != nullptr ? *model : CouplingModel{};
    const bool has_model = model != nullptr;
    problem.rebuild = [lattice_template, base_model, has_model,
                       slots](std::span<const double> values) {
        CouplingModel fit_model = base_model;
        double coupling_scale = 1.0;
        Eigen::VectorXd beta = lattice_template.beta_cm();
        PortEfficiencies eff = PortEfficiencies::unit(lattice_template.size());
        bool model_touched = false;
        for (std::size_t k = 0; k < slots.size(); ++k) {
            switch (slots[k].kind) {
            case Slot::c1:
                fit_model.c_ref_cm = values[k];
                model_touched = true;
                break;
            case Slot::decay:
                fit_model.decay_um = values[k];
                model_touched = true;
                break;
            case Slot::coupling_scale: coupling_scale = values[k]; break;
            case Slot::beta: beta(slots[k].site) = values[k]; break;
            case Slot::eta_in: eff.eta_in(slots[k].site) = values[k]; break;
            case Slot::eta_out: eff.eta_out(slots[k].site) = values[k]; break;
            }
        }
        Eigen::MatrixXd coupling =
            (has_model && model_touched)
                ? coupling_from_model(lattice_template.sites(), fit_model)
                : lattice_template.coupling_cm();
        coupling *= coupling_scale;
        WaveguideLattice lattice(lattice_template.sites(), beta, std::move(coupling),
                                 lattice_template.length_cm());
        return std::make_pair(std::move(lattice), std::move(eff));
    };
    return problem;
}

} // namespace qwalk
