#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qwalk {

/// A single waveguide: label plus transverse position in micrometres.
struct Waveguide {
    std::string label;
    double x_um = 0.0;
    double y_um = 0.0;
};

/// Distance -> coupling strength map, C(d) = c_ref * exp(-(d - d_ref)/decay)
/// for d <= cutoff, zero beyond. With pin_nearest set, every pair that is the
/// nearest-neighbour link of at least one of its endpoints is fixed to c_ref
/// regardless of distance, so anisotropic spacings (18 vs 19 um) can share one
/// first-order coupling.
struct CouplingModel {
    double c_ref_cm = 1.5;
    double d_ref_um = 18.0;
    double decay_um = 6.0;
    double cutoff_um = 30.0;
    bool pin_nearest = true;

    double coupling_at(double distance_um) const;
    void validate() const; // throws std::invalid_argument
};

/// Immutable waveguide lattice: sites, propagation constants beta (cm^-1),
/// symmetric coupling matrix (cm^-1) and propagation length (cm).
class WaveguideLattice {
public:
    WaveguideLattice(std::vector<Waveguide> sites, Eigen::VectorXd beta_cm,
                     Eigen::MatrixXd coupling_cm, double length_cm);

    Eigen::Index size() const { return static_cast<Eigen::Index>(sites_.size()); }
    const std::vector<Waveguide>& sites() const { return sites_; }
    const Eigen::VectorXd& beta_cm() const { return beta_cm_; }
    const Eigen::MatrixXd& coupling_cm() const { return coupling_cm_; }
    double length_cm() const { return length_cm_; }

    std::vector<std::string> labels() const;
    /// Site index for a label; throws std::out_of_range for unknown labels.
    Eigen::Index index_of(std::string_view label) const;

private:
    std::vector<Waveguide> sites_;
    Eigen::VectorXd beta_cm_;
    Eigen::MatrixXd coupling_cm_;
    double length_cm_;
};

/// Tight-binding Hamiltonian: beta on the diagonal, couplings off-diagonal.
/// Exactly symmetric (the coupling matrix is stored symmetric).
Eigen::MatrixXd hamiltonian(const WaveguideLattice& lattice);

/// Populate a coupling matrix from site geometry and a distance model.
Eigen::MatrixXd coupling_from_model(const std::vector<Waveguide>& sites, const CouplingModel& model);

/// Nine-site swiss cross: X-arm at (+-dx, +-2dx, 0), Y-arm at (0, +-dy, +-2dy),
/// site order [X1, X2, C, X3, X4, Y1, Y2, Y3, Y4] with X1 leftmost and Y1
/// topmost. The model is renormalized so that every arm link carries c1
/// (c_ref := c1, d_ref := min(dx, dy), nearest links pinned).
WaveguideLattice build_swiss_cross(double dx_um, double dy_um, double c1_cm, double beta_cm,
                                   double length_cm, CouplingModel model = CouplingModel{});

/// n collinear sites with uniform spacing; nearest-neighbour coupling c1,
/// farther pairs per the (renormalized) model.
WaveguideLattice build_linear_chain(std::size_t n, double spacing_um, double c1_cm, double beta_cm,
                                    double length_cm, CouplingModel model = CouplingModel{});

/// JSON lattice config: {sites: [{label,x_um,y_um}], beta_cm: scalar|list,
/// coupling: {model:{c_ref,d_ref_um,decay_um,cutoff_um,pin_nearest}} | {matrix: [[..]]},
/// length_cm}. Generators and the calibration output write the same schema.
WaveguideLattice lattice_from_json(const nlohmann::json& config);
nlohmann::json lattice_to_json(const WaveguideLattice& lattice);
nlohmann::json lattice_to_json(const WaveguideLattice& lattice, const CouplingModel& model);

} // namespace qwalk
