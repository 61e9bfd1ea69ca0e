#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/lattice.hpp"

namespace qwalk {

/// Two-photon configuration space of an N-site lattice as a single-particle
/// graph on the M = N(N+1)/2 unordered site pairs. Doubly-occupied vertices
/// use the normalized basis |2_q> = (a_q^dag)^2 |0> / sqrt(2), which is where
/// the sqrt(2) edge amplitudes come from:
///   {q,q} -- {q,r}   amplitude sqrt(2) C_{q,r}
///   {q,r} -- {q,r'}  amplitude C_{r,r'}          (q not in {r,r'})
/// On-site potential of {q,r} is beta_q + beta_r; the adjacency matrix keeps
/// the potentials on its diagonal, so it is the Hamiltonian of the pair walk.
class ConfigGraph {
public:
    explicit ConfigGraph(const WaveguideLattice& lattice);

    Eigen::Index vertex_count() const { return static_cast<Eigen::Index>(vertices_.size()); }
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& vertices() const { return vertices_; }
    const std::vector<std::string>& vertex_labels() const { return labels_; }
    const Eigen::MatrixXd& adjacency_cm() const { return adjacency_; }
    Eigen::VectorXd potentials_cm() const { return adjacency_.diagonal(); }
    double length_cm() const { return length_cm_; }

    /// Vertex index of the unordered pair {q,r}; order of q,r does not matter.
    Eigen::Index vertex_index(Eigen::Index q, Eigen::Index r) const;
    /// Number of incident edges (off-diagonal nonzeros in the vertex row).
    Eigen::Index degree(Eigen::Index vertex) const;

private:
    std::vector<std::pair<Eigen::Index, Eigen::Index>> vertices_;
    std::vector<std::string> labels_;
    Eigen::MatrixXd adjacency_;
    Eigen::Index n_sites_;
    double length_cm_;
};

ConfigGraph expand(const WaveguideLattice& lattice);

/// Single-particle walk on the pair graph: |exp(-i A z)_{v,start}|^2 for all
/// vertices v, with start = {q,r}. Equals the two-photon correlation function
/// of the underlying lattice read at unordered pairs.
Eigen::VectorXd simulate_on_graph(const ConfigGraph& g, Eigen::Index q, Eigen::Index r,
                                  double z_cm);

/// Edge list (vertex_a, vertex_b, amplitude_cm) and vertex list
/// (label, potential_cm) as CSV, for graph tooling.
void write_edge_csv(const ConfigGraph& g, const std::filesystem::path& path);
void write_vertex_csv(const ConfigGraph& g, const std::filesystem::path& path);

} // namespace qwalk
