#include "qwalk/lattice.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace qwalk {

double CouplingModel::coupling_at(double distance_um) const {
    if (distance_um > cutoff_um) return 0.0;
    return c_ref_cm * std::exp(-(distance_um - d_ref_um) / decay_um);
}

void CouplingModel::validate() const {
    if (!(c_ref_cm > 0.0)) throw std::invalid_argument("coupling model: c_ref must be > 0");
    if (!(d_ref_um > 0.0)) throw std::invalid_argument("coupling model: d_ref_um must be > 0");
    if (!(decay_um > 0.0)) throw std::invalid_argument("coupling model: decay_um must be > 0");
    if (!(cutoff_um >= d_ref_um))
        throw std::invalid_argument("coupling model: cutoff_um must be >= d_ref_um");
}

WaveguideLattice::WaveguideLattice(std::vector<Waveguide> sites, Eigen::VectorXd beta_cm,
                                   Eigen::MatrixXd coupling_cm, double length_cm)
    : sites_(std::move(sites)),
      beta_cm_(std::move(beta_cm)),
      coupling_cm_(std::move(coupling_cm)),
      length_cm_(length_cm) {
    const auto n = static_cast<Eigen::Index>(sites_.size());
    if (n == 0) throw std::invalid_argument("lattice needs at least one site");
    std::set<std::string> seen;
    for (const auto& site : sites_)
        if (!seen.insert(site.label).second)
            throw std::invalid_argument("duplicate site label: " + site.label);
    if (beta_cm_.size() != n)
        throw std::invalid_argument("beta length does not match site count");
    if (coupling_cm_.rows() != n || coupling_cm_.cols() != n)
        throw std::invalid_argument("coupling matrix shape does not match site count");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (coupling_cm_(i, i) != 0.0)
            throw std::invalid_argument("coupling matrix diagonal must be zero");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (coupling_cm_(i, j) < 0.0)
                throw std::invalid_argument("coupling matrix entries must be >= 0");
            if (coupling_cm_(i, j) != coupling_cm_(j, i))
                throw std::invalid_argument("coupling matrix must be symmetric");
        }
    }
    if (!(length_cm_ > 0.0)) throw std::invalid_argument("length_cm must be > 0");
}

std::vector<std::string> WaveguideLattice::labels() const {
    std::vector<std::string> out;
    out.reserve(sites_.size());
    for (const auto& site : sites_) out.push_back(site.label);
    return out;
}

Eigen::Index WaveguideLattice::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < sites_.size(); ++i)
        if (sites_[i].label == label) return static_cast<Eigen::Index>(i);
    throw std::out_of_range("unknown site label: " + std::string(label));
}

Eigen::MatrixXd hamiltonian(const WaveguideLattice& lattice) {
    Eigen::MatrixXd h = lattice.coupling_cm();
    h.diagonal() = lattice.beta_cm();
    return h;
}

Eigen::MatrixXd coupling_from_model(const std::vector<Waveguide>& sites, const CouplingModel& model) {
    model.validate();
    const auto n = static_cast<Eigen::Index>(sites.size());
    Eigen::MatrixXd dist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dx = sites[static_cast<std::size_t>(i)].x_um - sites[static_cast<std::size_t>(j)].x_um;
            const double dy = sites[static_cast<std::size_t>(i)].y_um - sites[static_cast<std::size_t>(j)].y_um;
            dist(i, j) = dist(j, i) = std::hypot(dx, dy);
        }
    }
    Eigen::VectorXd nearest(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) best = std::min(best, dist(i, j));
        nearest(i) = best;
    }
    Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = dist(i, j);
            double c;
            if (model.pin_nearest && d <= (1.0 + 1e-9) * std::max(nearest(i), nearest(j)))
                c = model.c_ref_cm;
            else
                c = model.coupling_at(d);
            coupling(i, j) = coupling(j, i) = c;
        }
    }
    return coupling;
}

WaveguideLattice build_swiss_cross(double dx_um, double dy_um, double c1_cm, double beta_cm,
                                   double length_cm, CouplingModel model) {
    if (!(dx_um > 0.0) || !(dy_um > 0.0))
        throw std::invalid_argument("swiss cross spacings must be > 0");
    if (!(c1_cm > 0.0)) throw std::invalid_argument("c1 must be > 0");
    if (!(length_cm > 0.0)) throw std::invalid_argument("length_cm must be > 0");

    std::vector<Waveguide> sites = {
        {"X1", -2.0 * dx_um, 0.0}, {"X2", -dx_um, 0.0},     {"C", 0.0, 0.0},
        {"X3", dx_um, 0.0},        {"X4", 2.0 * dx_um, 0.0}, {"Y1", 0.0, 2.0 * dy_um},
        {"Y2", 0.0, dy_um},        {"Y3", 0.0, -dy_um},      {"Y4", 0.0, -2.0 * dy_um},
    };
    model.c_ref_cm = c1_cm;
    model.d_ref_um = std::min(dx_um, dy_um);
    model.cutoff_um = std::max(model.cutoff_um, model.d_ref_um);
    model.pin_nearest = true;
    Eigen::MatrixXd coupling = coupling_from_model(sites, model);
    return WaveguideLattice(std::move(sites), Eigen::VectorXd::Constant(9, beta_cm),
                            std::move(coupling), length_cm);
}

WaveguideLattice build_linear_chain(std::size_t n, double spacing_um, double c1_cm, double beta_cm,
                                    double length_cm, CouplingModel model) {
    if (n == 0) throw std::invalid_argument("chain needs at least one site");
    if (!(spacing_um > 0.0)) throw std::invalid_argument("spacing must be > 0");
    if (!(c1_cm > 0.0)) throw std::invalid_argument("c1 must be > 0");

    std::vector<Waveguide> sites;
    sites.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        sites.push_back({"W" + std::to_string(i + 1), spacing_um * static_cast<double>(i), 0.0});

    Eigen::MatrixXd coupling;
    if (n == 1) {
        coupling = Eigen::MatrixXd::Zero(1, 1);
    } else {
        model.c_ref_cm = c1_cm;
        model.d_ref_um = spacing_um;
        model.cutoff_um = std::max(model.cutoff_um, spacing_um);
        model.pin_nearest = true;
        coupling = coupling_from_model(sites, model);
    }
    return WaveguideLattice(std::move(sites),
                            Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), beta_cm),
                            std::move(coupling), length_cm);
}

namespace {

Eigen::VectorXd beta_from_json(const nlohmann::json& value, Eigen::Index n) {
    if (value.is_number()) return Eigen::VectorXd::Constant(n, value.get<double>());
    if (value.is_array()) {
        if (static_cast<Eigen::Index>(value.size()) != n)
            throw std::invalid_argument("beta_cm list length does not match site count");
        Eigen::VectorXd beta(n);
        for (Eigen::Index i = 0; i < n; ++i) beta(i) = value.at(static_cast<std::size_t>(i)).get<double>();
        return beta;
    }
    throw std::invalid_argument("beta_cm must be a number or a list");
}

} // namespace

WaveguideLattice lattice_from_json(const nlohmann::json& config) {
    if (!config.contains("sites")) throw std::invalid_argument("lattice config: missing 'sites'");
    std::vector<Waveguide> sites;
    for (const auto& entry : config.at("sites")) {
        sites.push_back({entry.at("label").get<std::string>(), entry.at("x_um").get<double>(),
                         entry.at("y_um").get<double>()});
    }
    const auto n = static_cast<Eigen::Index>(sites.size());
    const Eigen::VectorXd beta = beta_from_json(config.at("beta_cm"), n);
    const double length = config.at("length_cm").get<double>();

    const auto& coupling_cfg = config.at("coupling");
    Eigen::MatrixXd coupling;
    if (coupling_cfg.contains("model")) {
        const auto& m = coupling_cfg.at("model");
        CouplingModel model;
        model.c_ref_cm = m.at("c_ref").get<double>();
        model.d_ref_um = m.at("d_ref_um").get<double>();
        model.decay_um = m.value("decay_um", model.decay_um);
        model.cutoff_um = m.value("cutoff_um", model.cutoff_um);
        model.pin_nearest = m.value("pin_nearest", model.pin_nearest);
        coupling = coupling_from_model(sites, model);
    } else if (coupling_cfg.contains("matrix")) {
        const auto& rows = coupling_cfg.at("matrix");
        if (static_cast<Eigen::Index>(rows.size()) != n)
            throw std::invalid_argument("coupling matrix row count does not match site count");
        coupling.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = rows.at(static_cast<std::size_t>(i));
            if (static_cast<Eigen::Index>(row.size()) != n)
                throw std::invalid_argument("coupling matrix must be square");
            for (Eigen::Index j = 0; j < n; ++j)
                coupling(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
        }
    } else {
        throw std::invalid_argument("lattice config: coupling needs 'model' or 'matrix'");
    }
    return WaveguideLattice(std::move(sites), beta, std::move(coupling), length);
}

namespace {

nlohmann::json lattice_common_json(const WaveguideLattice& lattice) {
    nlohmann::json out;
    out["sites"] = nlohmann::json::array();
    for (const auto& site : lattice.sites())
        out["sites"].push_back({{"label", site.label}, {"x_um", site.x_um}, {"y_um", site.y_um}});
    const Eigen::VectorXd& beta = lattice.beta_cm();
    const bool uniform = (beta.array() == beta(0)).all();
    if (uniform) {
        out["beta_cm"] = beta(0);
    } else {
        nlohmann::json list = nlohmann::json::array();
        for (Eigen::Index i = 0; i < beta.size(); ++i) list.push_back(beta(i));
        out["beta_cm"] = list;
    }
    out["length_cm"] = lattice.length_cm();
    return out;
}

} // namespace

nlohmann::json lattice_to_json(const WaveguideLattice& lattice) {
    nlohmann::json out = lattice_common_json(lattice);
    nlohmann::json matrix = nlohmann::json::array();
    for (Eigen::Index i = 0; i < lattice.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < lattice.size(); ++j) row.push_back(lattice.coupling_cm()(i, j));
        matrix.push_back(row);
    }
    out["coupling"] = {{"matrix", matrix}};
    return out;
}

nlohmann::json lattice_to_json(const WaveguideLattice& lattice, const CouplingModel& model) {
    nlohmann::json out = lattice_common_json(lattice);
    out["coupling"] = {{"model",
                        {{"c_ref", model.c_ref_cm},
                         {"d_ref_um", model.d_ref_um},
                         {"decay_um", model.decay_um},
                         {"cutoff_um", model.cutoff_um},
                         {"pin_nearest", model.pin_nearest}}}};
    return out;
}

} // namespace qwalk
