// qwalk: correlation, nonclassicality and calibration runs for two-photon
// walks on 2D waveguide lattices, with file-based reproducible outputs.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/analysis.hpp"
#include "qwalk/configspace.hpp"
#include "qwalk/correlations.hpp"
#include "qwalk/evolution.hpp"
#include "qwalk/io.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/nonclassicality.hpp"
#include "qwalk/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes: 0 ok, 2 config error, 3 numerical failure, 4 I/O error
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalArgs {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    int threads = 0;
};

json load_json(const std::string& path) {
    std::string text;
    try {
        text = qwalk::io::read_file(path);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

qwalk::WaveguideLattice load_lattice(const std::string& path) {
    try {
        return qwalk::lattice_from_json(load_json(path));
    } catch (const ConfigError&) {
        throw;
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("bad lattice config " + path + ": " + e.what());
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::pair<Eigen::Index, Eigen::Index> parse_input_pair(const qwalk::WaveguideLattice& lattice,
                                                       const std::string& spec) {
    const auto parts = split(spec, ',');
    if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
        throw ConfigError("--input expects two comma-separated site labels, got '" + spec + "'");
    try {
        return {lattice.index_of(parts[0]), lattice.index_of(parts[1])};
    } catch (const std::out_of_range& e) {
        throw ConfigError(e.what());
    }
}

std::pair<Eigen::Index, Eigen::Index> parse_entry(const qwalk::WaveguideLattice& lattice,
                                                  const std::string& spec) {
    const auto parts = split(spec, ',');
    try {
        if (parts.size() == 1 && !parts[0].empty()) {
            const Eigen::Index s = lattice.index_of(parts[0]);
            return {s, s};
        }
        if (parts.size() == 2 && !parts[0].empty() && !parts[1].empty())
            return {lattice.index_of(parts[0]), lattice.index_of(parts[1])};
    } catch (const std::out_of_range& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("--entry expects 'SITE' or 'SITE_A,SITE_B', got '" + spec + "'");
}

std::vector<qwalk::Branch> parse_branches(const qwalk::WaveguideLattice& lattice,
                                          const std::string& spec) {
    std::vector<qwalk::Branch> branches;
    for (const std::string& part : split(spec, ';')) {
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw ConfigError("branch spec needs NAME=SITE,SITE,... got '" + part + "'");
        qwalk::Branch branch;
        branch.name = part.substr(0, eq);
        for (const std::string& label : split(part.substr(eq + 1), ',')) {
            if (label.empty()) continue;
            try {
                branch.sites.push_back(lattice.index_of(label));
            } catch (const std::out_of_range& e) {
                throw ConfigError(e.what());
            }
        }
        branches.push_back(std::move(branch));
    }
    if (branches.empty()) throw ConfigError("empty branch spec");
    return branches;
}

void write_manifest(const GlobalArgs& global, const std::string& command, const json& args,
                    const std::vector<std::string>& outputs) {
    json manifest;
    manifest["command"] = command;
    manifest["config_path"] = global.config;
    manifest["seed"] = global.seed;
    manifest["args"] = args;
    manifest["outputs"] = outputs;
    manifest["tool_version"] = kVersion;
    qwalk::io::write_json(fs::path(global.out) / "manifest.json", manifest);
}

void write_correlation(const fs::path& dir, const std::string& name,
                       const Eigen::MatrixXd& gamma, const std::vector<std::string>& labels,
                       std::vector<std::string>& outputs) {
    qwalk::io::write_matrix_csv(dir / (name + ".csv"), gamma, labels, labels);
    outputs.push_back(name + ".csv");
}

// ---- correlate ----

struct CorrelateArgs {
    std::string input;
    double indist = 1.0;
    double z_override = -1.0;
    std::string efficiencies;
    bool renormalize = false;
    std::string branches;
    bool dump_propagator = false;
};

int run_correlate(const GlobalArgs& global, const CorrelateArgs& args) {
    const qwalk::WaveguideLattice lattice = load_lattice(global.config);
    const auto [q, r] = parse_input_pair(lattice, args.input);
    const double z = args.z_override >= 0.0 ? args.z_override : lattice.length_cm();
    const auto labels = lattice.labels();

    const qwalk::Propagator p = qwalk::propagator(qwalk::hamiltonian(lattice), z);
    qwalk::CorrelationMatrix quantum = qwalk::quantum_correlations(p, q, r);
    qwalk::CorrelationMatrix distinguishable = qwalk::distinguishable_correlations(p, q, r);
    qwalk::CorrelationMatrix partial = qwalk::partial_correlations(p, q, r, args.indist);

    bool loss_applied = false;
    if (!args.efficiencies.empty()) {
        const json eff_json = load_json(args.efficiencies);
        qwalk::PortEfficiencies eff = qwalk::PortEfficiencies::unit(lattice.size());
        for (const auto& [label, value] : eff_json.value("eta_in", json::object()).items())
            eff.eta_in(lattice.index_of(label)) = value.get<double>();
        for (const auto& [label, value] : eff_json.value("eta_out", json::object()).items())
            eff.eta_out(lattice.index_of(label)) = value.get<double>();
        quantum = qwalk::apply_losses(quantum, eff, args.renormalize);
        distinguishable = qwalk::apply_losses(distinguishable, eff, args.renormalize);
        partial = qwalk::apply_losses(partial, eff, args.renormalize);
        loss_applied = true;
    }

    const fs::path dir(global.out);
    std::vector<std::string> outputs;
    write_correlation(dir, "quantum", quantum.gamma, labels, outputs);
    write_correlation(dir, "distinguishable", distinguishable.gamma, labels, outputs);
    write_correlation(dir, "partial", partial.gamma, labels, outputs);

    if (!args.branches.empty()) {
        const auto branches = parse_branches(lattice, args.branches);
        std::vector<std::string> branch_labels;
        for (const auto& b : branches) branch_labels.push_back(b.name);
        write_correlation(dir, "quantum_branches", qwalk::branch_sum(quantum, branches),
                          branch_labels, outputs);
        write_correlation(dir, "distinguishable_branches",
                          qwalk::branch_sum(distinguishable, branches), branch_labels, outputs);
        write_correlation(dir, "partial_branches", qwalk::branch_sum(partial, branches),
                          branch_labels, outputs);
    }

    if (args.dump_propagator) {
        qwalk::io::write_matrix_csv(dir / "u_real.csv", p.u.real(), labels, labels);
        qwalk::io::write_matrix_csv(dir / "u_imag.csv", p.u.imag(), labels, labels);
        outputs.push_back("u_real.csv");
        outputs.push_back("u_imag.csv");
    }

    json metadata;
    metadata["input_pair"] = {labels[static_cast<std::size_t>(q)], labels[static_cast<std::size_t>(r)]};
    metadata["indistinguishability"] = args.indist;
    metadata["z_cm"] = z;
    metadata["loss_applied"] = loss_applied;
    metadata["site_labels"] = labels;
    qwalk::io::write_json(dir / "metadata.json", metadata);
    outputs.push_back("metadata.json");

    json echo = {{"input", args.input},
                 {"indist", args.indist},
                 {"z_cm", z},
                 {"efficiencies", args.efficiencies},
                 {"renormalize", args.renormalize},
                 {"branches", args.branches},
                 {"dump_propagator", args.dump_propagator}};
    write_manifest(global, "correlate", echo, outputs);
    return 0;
}

// ---- violations ----

struct ViolationsArgs {
    std::string input;
    std::string counts_path;
    double budget = 1e6;
    int resamples = 10000;
    double indist = 1.0;
    bool distinguishable = false;
    double z_override = -1.0;
    std::string branches;
    std::string sigma_mode = "bootstrap";
};

int run_violations(const GlobalArgs& global, const ViolationsArgs& args) {
    const fs::path dir(global.out);
    std::vector<std::string> outputs;
    qwalk::CountMatrix counts;
    std::vector<std::string> labels;

    if (!args.counts_path.empty()) {
        qwalk::io::LabeledMatrix loaded;
        try {
            loaded = qwalk::io::read_matrix_csv(args.counts_path);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("bad counts file: ") + e.what());
        }
        labels = loaded.row_labels;
        if (labels.empty())
            for (Eigen::Index i = 0; i < loaded.values.rows(); ++i)
                labels.push_back("S" + std::to_string(i));
        counts.counts = loaded.values.cast<std::int64_t>();
        counts.total = 0;
        for (Eigen::Index i = 0; i < counts.counts.rows(); ++i)
            for (Eigen::Index j = i; j < counts.counts.cols(); ++j)
                counts.total += counts.counts(i, j);
    } else {
        if (global.config.empty()) throw ConfigError("violations needs --config or --counts");
        if (args.input.empty()) throw ConfigError("violations needs --input with --config");
        const qwalk::WaveguideLattice lattice = load_lattice(global.config);
        const auto [q, r] = parse_input_pair(lattice, args.input);
        const double z = args.z_override >= 0.0 ? args.z_override : lattice.length_cm();
        const qwalk::Propagator p = qwalk::propagator(qwalk::hamiltonian(lattice), z);
        const double indist = args.distinguishable ? 0.0 : args.indist;
        qwalk::CorrelationMatrix gamma = qwalk::partial_correlations(p, q, r, indist);
        labels = lattice.labels();

        if (!args.branches.empty()) {
            const auto branches = parse_branches(lattice, args.branches);
            qwalk::CorrelationMatrix summed;
            summed.gamma = qwalk::branch_sum(gamma, branches);
            summed.input_pair = gamma.input_pair;
            summed.indistinguishability = gamma.indistinguishability;
            gamma = std::move(summed);
            labels.clear();
            for (const auto& b : branches) labels.push_back(b.name);
        }
        counts = qwalk::sample_counts(gamma, args.budget, global.seed);
        qwalk::io::write_counts_csv(dir / "counts.csv", counts.counts, labels);
        outputs.push_back("counts.csv");
    }

    qwalk::SignificanceOptions options;
    options.resamples = args.resamples;
    options.seed = global.seed;
    options.threads = global.threads;
    if (args.sigma_mode == "bootstrap")
        options.mode = qwalk::SigmaMode::bootstrap;
    else if (args.sigma_mode == "propagation")
        options.mode = qwalk::SigmaMode::propagation;
    else
        throw ConfigError("--sigma-mode must be 'bootstrap' or 'propagation'");

    const qwalk::ViolationReport report = qwalk::violation_significance(counts, options);
    qwalk::io::write_matrix_csv(dir / "v.csv", report.v, labels, labels);
    qwalk::io::write_matrix_csv(dir / "sigma.csv", report.sigma, labels, labels);
    qwalk::io::write_matrix_csv(dir / "sigmas_violated.csv", report.sigmas_violated, labels, labels);
    outputs.insert(outputs.end(), {"v.csv", "sigma.csv", "sigmas_violated.csv"});

    json metadata;
    metadata["rng"] = std::string(qwalk::rng::kAlgorithm);
    metadata["seed"] = global.seed;
    metadata["resamples"] = args.resamples;
    metadata["budget"] = args.budget;
    metadata["sigma_mode"] = args.sigma_mode;
    metadata["total_counts"] = counts.total;
    qwalk::io::write_json(dir / "metadata.json", metadata);
    outputs.push_back("metadata.json");

    json echo = {{"input", args.input},        {"counts", args.counts_path},
                 {"budget", args.budget},      {"resamples", args.resamples},
                 {"indist", args.indist},      {"distinguishable", args.distinguishable},
                 {"z_cm", args.z_override},    {"branches", args.branches},
                 {"sigma_mode", args.sigma_mode}};
    write_manifest(global, "violations", echo, outputs);
    return 0;
}

// ---- graph ----

int run_graph(const GlobalArgs& global) {
    const qwalk::WaveguideLattice lattice = load_lattice(global.config);
    const qwalk::ConfigGraph graph = qwalk::expand(lattice);
    const fs::path dir(global.out);
    qwalk::write_vertex_csv(graph, dir / "vertices.csv");
    qwalk::write_edge_csv(graph, dir / "edges.csv");
    write_manifest(global, "graph", json::object(), {"vertices.csv", "edges.csv"});
    return 0;
}

// ---- heatmap ----

struct HeatmapArgs {
    std::string matrix_path;
    std::string scale = "max";
    int cell = 1;
};

int run_heatmap(const GlobalArgs& global, const HeatmapArgs& args) {
    qwalk::io::LabeledMatrix loaded;
    try {
        loaded = qwalk::io::read_matrix_csv(args.matrix_path);
    } catch (const std::exception& e) {
        const std::string what = e.what();
        if (what.find("cannot open") != std::string::npos) throw IoError(what);
        throw ConfigError("bad matrix CSV: " + what);
    }
    double scale_max = 1.0;
    if (args.scale == "max") {
        scale_max = loaded.values.size() > 0 ? loaded.values.maxCoeff() : 1.0;
        if (scale_max <= 0.0) scale_max = 1.0; // all-zero matrix renders black
    } else if (args.scale != "unit") {
        throw ConfigError("--scale must be 'max' or 'unit'");
    }
    const std::string stem = fs::path(args.matrix_path).stem().string();
    const std::string name = stem + ".pgm";
    const std::string comment =
        "scale=" + args.scale + " scale_max=" + qwalk::io::format_double(scale_max);
    qwalk::io::write_pgm16(fs::path(global.out) / name, loaded.values, scale_max, args.cell, comment);
    json echo = {{"matrix", args.matrix_path}, {"scale", args.scale}, {"cell", args.cell}};
    write_manifest(global, "heatmap", echo, {name});
    return 0;
}

// ---- calibrate ----

int run_calibrate(const GlobalArgs& global) {
    const json config = load_json(global.config);
    if (!config.contains("lattice")) throw ConfigError("calibration config: missing 'lattice'");

    json lattice_json;
    if (config.at("lattice").is_string())
        lattice_json = load_json(config.at("lattice").get<std::string>());
    else
        lattice_json = config.at("lattice");

    qwalk::WaveguideLattice lattice_template = [&] {
        try {
            return qwalk::lattice_from_json(lattice_json);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("bad lattice config: ") + e.what());
        }
    }();

    std::optional<qwalk::CouplingModel> model;
    if (lattice_json.at("coupling").contains("model")) {
        const auto& m = lattice_json.at("coupling").at("model");
        qwalk::CouplingModel parsed;
        parsed.c_ref_cm = m.at("c_ref").get<double>();
        parsed.d_ref_um = m.at("d_ref_um").get<double>();
        parsed.decay_um = m.value("decay_um", parsed.decay_um);
        parsed.cutoff_um = m.value("cutoff_um", parsed.cutoff_um);
        parsed.pin_nearest = m.value("pin_nearest", parsed.pin_nearest);
        model = parsed;
    }

    std::vector<qwalk::CalibrationObservation> observations;
    for (const auto& entry : config.value("observations", json::array())) {
        qwalk::CalibrationObservation obs;
        const auto& input = entry.at("input");
        obs.input = input.is_string() ? lattice_template.index_of(input.get<std::string>())
                                      : input.get<Eigen::Index>();
        const auto& output = entry.at("output");
        obs.output.resize(static_cast<Eigen::Index>(output.size()));
        for (Eigen::Index i = 0; i < obs.output.size(); ++i)
            obs.output(i) = output.at(static_cast<std::size_t>(i)).get<double>();
        observations.push_back(std::move(obs));
    }

    std::vector<qwalk::FitParameter> parameters;
    for (const auto& entry : config.value("parameters", json::array())) {
        parameters.push_back({entry.at("name").get<std::string>(), entry.at("initial").get<double>(),
                              entry.at("lower").get<double>(), entry.at("upper").get<double>()});
    }

    qwalk::CalibrationProblem problem = [&] {
        try {
            return qwalk::standard_problem(lattice_template, model ? &*model : nullptr,
                                           std::move(observations), std::move(parameters));
        } catch (const std::exception& e) {
            throw ConfigError(std::string("bad calibration config: ") + e.what());
        }
    }();
    problem.tolerance = config.value("tolerance", problem.tolerance);
    problem.restarts = config.value("restarts", problem.restarts);
    problem.max_evaluations = config.value("max_evaluations", problem.max_evaluations);
    problem.gradient_polish = config.value("gradient_polish", problem.gradient_polish);
    problem.seed = global.seed;
    problem.threads = global.threads;

    qwalk::CalibrationResult result = [&] {
        try {
            return qwalk::calibrate(problem);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }();

    const fs::path dir(global.out);
    // fitted model parameters, if any, are echoed in the report; the lattice
    // itself is written with the explicit coupling matrix
    qwalk::io::write_json(dir / "fitted_lattice.json", qwalk::lattice_to_json(result.lattice));

    json report;
    report["residual"] = result.residual;
    report["initial_residual"] = result.initial_residual;
    report["evaluations"] = result.evaluations;
    report["converged"] = result.converged;
    json fitted = json::object();
    for (std::size_t k = 0; k < problem.parameters.size(); ++k)
        fitted[problem.parameters[k].name] = result.parameters(static_cast<Eigen::Index>(k));
    report["parameters"] = fitted;
    json eta_in = json::object(), eta_out = json::object();
    const auto labels = result.lattice.labels();
    for (Eigen::Index i = 0; i < result.lattice.size(); ++i) {
        eta_in[labels[static_cast<std::size_t>(i)]] = result.efficiencies.eta_in(i);
        eta_out[labels[static_cast<std::size_t>(i)]] = result.efficiencies.eta_out(i);
    }
    report["eta_in"] = eta_in;
    report["eta_out"] = eta_out;
    report["rng"] = std::string(qwalk::rng::kAlgorithm);
    report["seed"] = global.seed;
    qwalk::io::write_json(dir / "fit_report.json", report);
    write_manifest(global, "calibrate", json::object(), {"fitted_lattice.json", "fit_report.json"});

    if (!result.converged)
        throw NumericalError("calibration did not reach the requested tolerance (residual " +
                             qwalk::io::format_double(result.residual) + ")");
    return 0;
}

// ---- homscan ----

struct HomscanArgs {
    std::string input;
    std::string entry;
    double coherence_fs = 100.0;
    std::string delays = "-300:300:121";
    double z_override = -1.0;
};

int run_homscan(const GlobalArgs& global, const HomscanArgs& args) {
    const qwalk::WaveguideLattice lattice = load_lattice(global.config);
    const auto [q, r] = parse_input_pair(lattice, args.input);
    const auto [out_q, out_r] = parse_entry(lattice, args.entry);
    const double z = args.z_override >= 0.0 ? args.z_override : lattice.length_cm();

    const auto parts = split(args.delays, ':');
    if (parts.size() != 3) throw ConfigError("--delays expects MIN:MAX:COUNT");
    double lo = 0, hi = 0;
    long count = 0;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        count = std::stol(parts[2]);
    } catch (const std::exception&) {
        throw ConfigError("--delays expects numeric MIN:MAX:COUNT");
    }
    if (count < 1) throw ConfigError("--delays needs at least one point");
    std::vector<double> delays;
    for (long i = 0; i < count; ++i)
        delays.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                               static_cast<double>(count - 1));

    const qwalk::Propagator p = qwalk::propagator(qwalk::hamiltonian(lattice), z);
    const qwalk::HOMScan scan = [&] {
        try {
            return qwalk::hom_scan(p, q, r, out_q, out_r, args.coherence_fs, delays);
        } catch (const std::domain_error& e) {
            throw NumericalError(e.what());
        }
    }();

    std::string csv = "delay_fs,indistinguishability,coincidence\n";
    for (std::size_t i = 0; i < scan.delays_fs.size(); ++i) {
        csv += qwalk::io::format_double(scan.delays_fs[i]) + "," +
               qwalk::io::format_double(scan.indistinguishability[i]) + "," +
               qwalk::io::format_double(scan.coincidences[i]) + "\n";
    }
    const fs::path dir(global.out);
    qwalk::io::atomic_write(dir / "scan.csv", csv);

    const auto labels = lattice.labels();
    json metadata;
    metadata["input_pair"] = {labels[static_cast<std::size_t>(q)], labels[static_cast<std::size_t>(r)]};
    metadata["entry"] = {labels[static_cast<std::size_t>(out_q)], labels[static_cast<std::size_t>(out_r)]};
    metadata["coherence_time_fs"] = args.coherence_fs;
    metadata["visibility"] = scan.visibility;
    metadata["z_cm"] = z;
    qwalk::io::write_json(dir / "metadata.json", metadata);

    json echo = {{"input", args.input},
                 {"entry", args.entry},
                 {"coherence_fs", args.coherence_fs},
                 {"delays", args.delays},
                 {"z_cm", z}};
    write_manifest(global, "homscan", echo, {"scan.csv", "metadata.json"});
    return 0;
}

// ---- preset ----

struct PresetArgs {
    std::string kind;
    double dx = 18.0, dy = 19.0;
    double spacing = 18.0;
    std::size_t n = 5;
    double c1 = 1.5;
    double beta = 0.0;
    double length = 1.4;
    double decay = 6.0;
    double cutoff = 30.0;
};

int run_preset(const GlobalArgs& global, const PresetArgs& args) {
    qwalk::CouplingModel model;
    model.decay_um = args.decay;
    model.cutoff_um = args.cutoff;
    std::string name;
    json config;
    try {
        if (args.kind == "swiss-cross") {
            const qwalk::WaveguideLattice lattice =
                qwalk::build_swiss_cross(args.dx, args.dy, args.c1, args.beta, args.length, model);
            model.c_ref_cm = args.c1;
            model.d_ref_um = std::min(args.dx, args.dy);
            model.cutoff_um = std::max(args.cutoff, model.d_ref_um);
            model.pin_nearest = true;
            config = qwalk::lattice_to_json(lattice, model);
            name = "swiss_cross.json";
        } else if (args.kind == "chain") {
            const qwalk::WaveguideLattice lattice = qwalk::build_linear_chain(
                args.n, args.spacing, args.c1, args.beta, args.length, model);
            model.c_ref_cm = args.c1;
            model.d_ref_um = args.spacing;
            model.cutoff_um = std::max(args.cutoff, args.spacing);
            model.pin_nearest = true;
            config = qwalk::lattice_to_json(lattice, model);
            name = "chain.json";
        } else {
            throw ConfigError("preset kind must be 'swiss-cross' or 'chain'");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    qwalk::io::write_json(fs::path(global.out) / name, config);
    json echo = {{"kind", args.kind}, {"c1", args.c1},       {"beta", args.beta},
                 {"length", args.length}, {"decay", args.decay}, {"cutoff", args.cutoff}};
    if (args.kind == "swiss-cross") {
        echo["dx"] = args.dx;
        echo["dy"] = args.dy;
    } else {
        echo["n"] = args.n;
        echo["spacing"] = args.spacing;
    }
    write_manifest(global, "preset", echo, {name});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-photon quantum walks in 2D waveguide lattices"};
    app.set_version_flag("--version", std::string("qwalk ") + kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs global;
    app.add_option("--config", global.config, "lattice or run config (JSON)");
    app.add_option("--seed", global.seed, "RNG seed (philox4x32-10)");
    app.add_option("--out", global.out, "output directory");
    app.add_option("--threads", global.threads, "worker threads (0 = hardware)");

    auto* correlate = app.add_subcommand("correlate", "two-photon correlation matrices");
    CorrelateArgs correlate_args;
    correlate->add_option("--input", correlate_args.input, "input pair, e.g. X1,X4")->required();
    correlate->add_option("--indist", correlate_args.indist, "indistinguishability for partial.csv");
    correlate->add_option("--z", correlate_args.z_override, "override propagation length (cm)");
    correlate->add_option("--efficiencies", correlate_args.efficiencies,
                          "port efficiency JSON {eta_in:{label:v},eta_out:{label:v}}");
    correlate->add_flag("--renormalize", correlate_args.renormalize,
                        "renormalize after applying losses");
    correlate->add_option("--branches", correlate_args.branches,
                          "also write branch sums, e.g. L=X1,X2;R=X3,X4;V=Y1,Y2,Y3,Y4;C=C");
    correlate->add_flag("--dump-propagator", correlate_args.dump_propagator,
                        "write u_real.csv/u_imag.csv");

    auto* violations = app.add_subcommand("violations", "classical-bound violations and significance");
    ViolationsArgs violations_args;
    violations->add_option("--input", violations_args.input, "input pair, e.g. X1,X4");
    violations->add_option("--counts", violations_args.counts_path,
                           "existing counts CSV (skips sampling)");
    violations->add_option("--budget", violations_args.budget, "expected total coincidences");
    violations->add_option("--resamples", violations_args.resamples, "bootstrap resamples");
    violations->add_option("--indist", violations_args.indist, "indistinguishability of the pair");
    violations->add_flag("--distinguishable", violations_args.distinguishable,
                         "simulate distinguishable photons");
    violations->add_option("--z", violations_args.z_override, "override propagation length (cm)");
    violations->add_option("--branches", violations_args.branches, "sum into branches first");
    violations->add_option("--sigma-mode", violations_args.sigma_mode,
                           "bootstrap | propagation");

    auto* graph = app.add_subcommand("graph", "two-photon configuration-space graph export");

    auto* heatmap = app.add_subcommand("heatmap", "render a matrix CSV as 16-bit PGM");
    HeatmapArgs heatmap_args;
    heatmap->add_option("--matrix", heatmap_args.matrix_path, "matrix CSV to render")->required();
    heatmap->add_option("--scale", heatmap_args.scale, "max | unit");
    heatmap->add_option("--cell", heatmap_args.cell, "pixels per matrix cell");

    auto* calibrate = app.add_subcommand("calibrate", "fit device parameters to classical data");

    auto* homscan = app.add_subcommand("homscan", "coincidence vs relative delay at one output");
    HomscanArgs homscan_args;
    homscan->add_option("--input", homscan_args.input, "input pair, e.g. X1,X4")->required();
    homscan->add_option("--entry", homscan_args.entry, "monitored output: SITE or SITE_A,SITE_B")
        ->required();
    homscan->add_option("--coherence-fs", homscan_args.coherence_fs, "photon coherence time (fs)");
    homscan->add_option("--delays", homscan_args.delays, "delay grid MIN:MAX:COUNT (fs)");
    homscan->add_option("--z", homscan_args.z_override, "override propagation length (cm)");

    auto* preset = app.add_subcommand("preset", "write a lattice config (swiss-cross | chain)");
    PresetArgs preset_args;
    preset->add_option("kind", preset_args.kind, "swiss-cross | chain")->required();
    preset->add_option("--dx", preset_args.dx, "X-plane spacing (um)");
    preset->add_option("--dy", preset_args.dy, "Y-plane spacing (um)");
    preset->add_option("--n", preset_args.n, "chain site count");
    preset->add_option("--spacing", preset_args.spacing, "chain spacing (um)");
    preset->add_option("--c1", preset_args.c1, "nearest-neighbour coupling (1/cm)");
    preset->add_option("--beta", preset_args.beta, "propagation constant (1/cm)");
    preset->add_option("--length", preset_args.length, "propagation length (cm)");
    preset->add_option("--decay", preset_args.decay, "coupling decay length (um)");
    preset->add_option("--cutoff", preset_args.cutoff, "coupling cutoff distance (um)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (correlate->parsed()) return run_correlate(global, correlate_args);
        if (violations->parsed()) return run_violations(global, violations_args);
        if (graph->parsed()) {
            if (global.config.empty()) throw ConfigError("graph needs --config");
            return run_graph(global);
        }
        if (heatmap->parsed()) return run_heatmap(global, heatmap_args);
        if (calibrate->parsed()) {
            if (global.config.empty()) throw ConfigError("calibrate needs --config");
            return run_calibrate(global);
        }
        if (homscan->parsed()) return run_homscan(global, homscan_args);
        if (preset->parsed()) return run_preset(global, preset_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
