#include "qwalk/configspace.hpp"

#include <cmath>
#include <stdexcept>

#include "qwalk/evolution.hpp"
#include "qwalk/io.hpp"

namespace qwalk {

ConfigGraph::ConfigGraph(const WaveguideLattice& lattice)
    : n_sites_(lattice.size()), length_cm_(lattice.length_cm()) {
    const Eigen::Index n = n_sites_;
    vertices_.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
    for (Eigen::Index q = 0; q < n; ++q)
        for (Eigen::Index r = q; r < n; ++r) vertices_.emplace_back(q, r);

    const auto& site_labels = lattice.sites();
    labels_.reserve(vertices_.size());
    for (const auto& [q, r] : vertices_)
        labels_.push_back(site_labels[static_cast<std::size_t>(q)].label + "-" +
                          site_labels[static_cast<std::size_t>(r)].label);

    const Eigen::MatrixXd& coupling = lattice.coupling_cm();
    const Eigen::VectorXd& beta = lattice.beta_cm();
    const auto m = static_cast<Eigen::Index>(vertices_.size());
    adjacency_ = Eigen::MatrixXd::Zero(m, m);
    const double root2 = std::sqrt(2.0);

    for (Eigen::Index v = 0; v < m; ++v) {
        const auto [q, r] = vertices_[static_cast<std::size_t>(v)];
        adjacency_(v, v) = beta(q) + beta(r);
        // one photon hops at a time; a sqrt(2) shows up whenever the hop
        // enters or leaves a doubly-occupied vertex
        for (Eigen::Index s = 0; s < n_sites_; ++s) {
            if (coupling(r, s) != 0.0) { // photon at r hops to s: {q,r} -> {q,s}
                const Eigen::Index w = vertex_index(q, s);
                const double amp =
                    (s == q || q == r) ? root2 * coupling(r, s) : coupling(r, s);
                adjacency_(v, w) = adjacency_(w, v) = amp;
            }
            if (q != r && coupling(q, s) != 0.0) { // photon at q hops to s: {q,r} -> {s,r}
                const Eigen::Index w = vertex_index(s, r);
                const double amp = (s == r) ? root2 * coupling(q, s) : coupling(q, s);
                adjacency_(v, w) = adjacency_(w, v) = amp;
            }
        }
    }
}

Eigen::Index ConfigGraph::vertex_index(Eigen::Index q, Eigen::Index r) const {
    if (q > r) std::swap(q, r);
    if (q < 0 || r >= n_sites_) throw std::out_of_range("site index out of range");
    // lexicographic (q,r) layout: rows of decreasing length n, n-1, ...
    return q * n_sites_ - q * (q - 1) / 2 + (r - q);
}

Eigen::Index ConfigGraph::degree(Eigen::Index vertex) const {
    if (vertex < 0 || vertex >= vertex_count()) throw std::out_of_range("vertex index out of range");
    Eigen::Index deg = 0;
    for (Eigen::Index w = 0; w < vertex_count(); ++w)
        if (w != vertex && adjacency_(vertex, w) != 0.0) ++deg;
    return deg;
}

ConfigGraph expand(const WaveguideLattice& lattice) { return ConfigGraph(lattice); }

Eigen::VectorXd simulate_on_graph(const ConfigGraph& g, Eigen::Index q, Eigen::Index r,
                                  double z_cm) {
    const Eigen::Index start = g.vertex_index(q, r);
    const Propagator p = propagator(g.adjacency_cm(), z_cm);
    return p.u.col(start).cwiseAbs2();
}

void write_edge_csv(const ConfigGraph& g, const std::filesystem::path& path) {
    std::string out = "vertex_a,vertex_b,amplitude_cm\n";
    const auto& adj = g.adjacency_cm();
    for (Eigen::Index v = 0; v < g.vertex_count(); ++v) {
        for (Eigen::Index w = v + 1; w < g.vertex_count(); ++w) {
            if (adj(v, w) == 0.0) continue;
            out += g.vertex_labels()[static_cast<std::size_t>(v)] + "," +
                   g.vertex_labels()[static_cast<std::size_t>(w)] + "," +
                   io::format_double(adj(v, w)) + "\n";
        }
    }
    io::atomic_write(path, out);
}

void write_vertex_csv(const ConfigGraph& g, const std::filesystem::path& path) {
    std::string out = "label,potential_cm\n";
    const Eigen::VectorXd pot = g.potentials_cm();
    for (Eigen::Index v = 0; v < g.vertex_count(); ++v)
        out += g.vertex_labels()[static_cast<std::size_t>(v)] + "," + io::format_double(pot(v)) + "\n";
    io::atomic_write(path, out);
}

} // namespace qwalk
