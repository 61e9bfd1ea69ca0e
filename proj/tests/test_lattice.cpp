#include <doctest.h>

#include <cmath>
#include <random>

#include "qwalk/lattice.hpp"

using qwalk::CouplingModel;
using qwalk::WaveguideLattice;

TEST_SUITE("lattice") {

TEST_CASE("swiss cross has the documented site order and pinned arm links") {
    const WaveguideLattice lattice = qwalk::build_swiss_cross(18.0, 19.0, 1.5, 0.0, 1.4);
    REQUIRE(lattice.size() == 9);
    const std::vector<std::string> expected = {"X1", "X2", "C", "X3", "X4",
                                               "Y1", "Y2", "Y3", "Y4"};
    CHECK(lattice.labels() == expected);

    const auto& c = lattice.coupling_cm();
    // both planes carry C1 despite the 18 vs 19 um spacings
    CHECK(c(lattice.index_of("X1"), lattice.index_of("X2")) == 1.5);
    CHECK(c(lattice.index_of("Y1"), lattice.index_of("Y2")) == 1.5);
    CHECK(c(lattice.index_of("X2"), lattice.index_of("C")) == 1.5);
    CHECK(c(lattice.index_of("C"), lattice.index_of("Y3")) == 1.5);

    // geometry: X arm on the x axis, Y arm on the y axis
    CHECK(lattice.sites()[0].x_um == -36.0);
    CHECK(lattice.sites()[0].y_um == 0.0);
    CHECK(lattice.sites()[5].y_um == 38.0);
}

TEST_CASE("second-order coupling follows the exponential distance model") {
    for (const double decay : {3.0, 6.0, 11.0}) {
        CouplingModel model;
        model.decay_um = decay;
        const WaveguideLattice lattice = qwalk::build_swiss_cross(18.0, 19.0, 1.5, 0.0, 1.4, model);
        const double diagonal = std::hypot(18.0, 19.0);
        const double expected = 1.5 * std::exp(-(diagonal - 18.0) / decay);
        const double got =
            lattice.coupling_cm()(lattice.index_of("X2"), lattice.index_of("Y2"));
        CHECK(std::abs(got - expected) < 1e-15);
    }
}

TEST_CASE("tight cutoff leaves only nearest-neighbour couplings") {
    CouplingModel model;
    model.cutoff_um = 18.0;
    const WaveguideLattice lattice = qwalk::build_swiss_cross(18.0, 18.0, 1.2, 0.0, 1.0, model);
    const auto& c = lattice.coupling_cm();
    int nonzero = 0;
    for (Eigen::Index i = 0; i < 9; ++i)
        for (Eigen::Index j = i + 1; j < 9; ++j)
            if (c(i, j) != 0.0) ++nonzero;
    CHECK(nonzero == 8); // the eight arm links
}

TEST_CASE("swiss cross rejects non-positive geometry") {
    CHECK_THROWS_AS(qwalk::build_swiss_cross(0.0, 19.0, 1.5, 0.0, 1.4), std::invalid_argument);
    CHECK_THROWS_AS(qwalk::build_swiss_cross(18.0, -1.0, 1.5, 0.0, 1.4), std::invalid_argument);
    CHECK_THROWS_AS(qwalk::build_swiss_cross(18.0, 19.0, 1.5, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("two-site chain couples at c1 only") {
    const WaveguideLattice lattice = qwalk::build_linear_chain(2, 18.0, 1.5, 0.7, 1.0);
    Eigen::MatrixXd expected(2, 2);
    expected << 0.0, 1.5, 1.5, 0.0;
    CHECK(lattice.coupling_cm() == expected);
}

TEST_CASE("single-site chain is a degenerate lattice") {
    const WaveguideLattice lattice = qwalk::build_linear_chain(1, 18.0, 1.5, 0.0, 1.0);
    CHECK(lattice.size() == 1);
    CHECK(lattice.coupling_cm()(0, 0) == 0.0);
}

TEST_CASE("chain next-nearest entries come from the model at twice the spacing") {
    CouplingModel model;
    model.cutoff_um = 40.0; // > 36
    const WaveguideLattice lattice = qwalk::build_linear_chain(5, 18.0, 1.5, 0.0, 1.0, model);
    const double expected = 1.5 * std::exp(-(36.0 - 18.0) / model.decay_um);
    CHECK(std::abs(lattice.coupling_cm()(0, 2) - expected) < 1e-15);
    CHECK(lattice.coupling_cm()(0, 1) == 1.5);
    CHECK(lattice.coupling_cm()(0, 3) == 0.0); // 54 um, beyond cutoff
}

TEST_CASE("empty chain is rejected") {
    CHECK_THROWS_AS(qwalk::build_linear_chain(0, 18.0, 1.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("hamiltonian puts beta on the diagonal and couplings off it") {
    const WaveguideLattice chain = qwalk::build_linear_chain(2, 18.0, 0.8, 0.3, 1.0);
    Eigen::MatrixXd expected(2, 2);
    expected << 0.3, 0.8, 0.8, 0.3;
    CHECK(qwalk::hamiltonian(chain) == expected);
}

TEST_CASE("uniform-beta hamiltonian minus beta identity has zero diagonal") {
    const WaveguideLattice cross = qwalk::build_swiss_cross(18.0, 19.0, 1.5, 0.42, 1.4);
    const Eigen::MatrixXd h = qwalk::hamiltonian(cross);
    const Eigen::MatrixXd shifted = h - 0.42 * Eigen::MatrixXd::Identity(9, 9);
    CHECK(shifted.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hamiltonian is bitwise symmetric for random lattices") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coupling(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 8);
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) c(i, j) = c(j, i) = coupling(rng);
        std::vector<qwalk::Waveguide> sites;
        for (Eigen::Index i = 0; i < n; ++i)
            sites.push_back({"W" + std::to_string(i), static_cast<double>(i) * 10.0, 0.0});
        const WaveguideLattice lattice(sites, Eigen::VectorXd::Random(n), c, 1.0);
        const Eigen::MatrixXd h = qwalk::hamiltonian(lattice);
        CHECK(h == h.transpose().eval());
    }
}

TEST_CASE("model coupling is monotonically non-increasing in distance") {
    CouplingModel model;
    model.cutoff_um = 100.0;
    double previous = model.coupling_at(1.0);
    for (double d = 2.0; d < 120.0; d += 1.0) {
        const double value = model.coupling_at(d);
        CHECK(value <= previous);
        previous = value;
    }
    CHECK(model.coupling_at(100.0) > 0.0);
    CHECK(model.coupling_at(100.01) == 0.0);
}

TEST_CASE("isotropic cross is invariant under 90-degree rotation relabelling") {
    const WaveguideLattice cross = qwalk::build_swiss_cross(18.0, 18.0, 1.5, 0.1, 1.4);
    const Eigen::MatrixXd h = qwalk::hamiltonian(cross);
    // (x,y) -> (-y,x): X1..X4 -> Y4,Y3,Y2,Y1 and Y1..Y4 -> X1..X4
    const std::vector<Eigen::Index> perm = {8, 7, 2, 6, 5, 0, 1, 3, 4};
    Eigen::MatrixXd rotated(9, 9);
    for (Eigen::Index i = 0; i < 9; ++i)
        for (Eigen::Index j = 0; j < 9; ++j) rotated(i, j) = h(perm[i], perm[j]);
    CHECK((rotated - h).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lattice invariants are enforced") {
    std::vector<qwalk::Waveguide> sites = {{"A", 0.0, 0.0}, {"B", 10.0, 0.0}};
    Eigen::MatrixXd ok(2, 2);
    ok << 0.0, 1.0, 1.0, 0.0;
    const Eigen::VectorXd beta = Eigen::VectorXd::Zero(2);

    CHECK_THROWS_AS(WaveguideLattice({{"A", 0, 0}, {"A", 1, 1}}, beta, ok, 1.0),
                    std::invalid_argument); // duplicate labels
    Eigen::MatrixXd asym = ok;
    asym(0, 1) = 2.0;
    CHECK_THROWS_AS(WaveguideLattice(sites, beta, asym, 1.0), std::invalid_argument);
    Eigen::MatrixXd diag = ok;
    diag(0, 0) = 1.0;
    CHECK_THROWS_AS(WaveguideLattice(sites, beta, diag, 1.0), std::invalid_argument);
    Eigen::MatrixXd negative = ok;
    negative(0, 1) = negative(1, 0) = -1.0;
    CHECK_THROWS_AS(WaveguideLattice(sites, beta, negative, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WaveguideLattice(sites, beta, ok, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(WaveguideLattice(sites, Eigen::VectorXd::Zero(3), ok, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(WaveguideLattice(sites, beta, ok, 1.0).index_of("Z"), std::out_of_range);
}

TEST_CASE("json config round-trips through both coupling forms") {
    const WaveguideLattice cross = qwalk::build_swiss_cross(18.0, 19.0, 1.5, 0.0, 1.4);

    const nlohmann::json explicit_form = qwalk::lattice_to_json(cross);
    const WaveguideLattice reloaded = qwalk::lattice_from_json(explicit_form);
    CHECK(reloaded.labels() == cross.labels());
    CHECK((reloaded.coupling_cm() - cross.coupling_cm()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(reloaded.length_cm() == cross.length_cm());

    CouplingModel model;
    model.c_ref_cm = 1.5;
    model.d_ref_um = 18.0;
    const nlohmann::json model_form = qwalk::lattice_to_json(cross, model);
    const WaveguideLattice from_model = qwalk::lattice_from_json(model_form);
    CHECK((from_model.coupling_cm() - cross.coupling_cm()).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(qwalk::lattice_from_json(nlohmann::json::object()), std::invalid_argument);
    nlohmann::json no_coupling = explicit_form;
    no_coupling["coupling"] = nlohmann::json::object();
    CHECK_THROWS_AS(qwalk::lattice_from_json(no_coupling), std::invalid_argument);
}

TEST_CASE("per-site beta list is honored") {
    nlohmann::json config;
    config["sites"] = {{{"label", "A"}, {"x_um", 0.0}, {"y_um", 0.0}},
                       {{"label", "B"}, {"x_um", 18.0}, {"y_um", 0.0}}};
    config["beta_cm"] = {0.1, 0.2};
    config["coupling"] = {{"matrix", {{0.0, 1.0}, {1.0, 0.0}}}};
    config["length_cm"] = 1.0;
    const WaveguideLattice lattice = qwalk::lattice_from_json(config);
    CHECK(lattice.beta_cm()(0) == 0.1);
    CHECK(lattice.beta_cm()(1) == 0.2);
}

} // TEST_SUITE
