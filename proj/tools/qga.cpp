// Command-line front end: `qga run <config>` and `qga eval <circuit> --target <statevector>`.

#include "qga/circuit_io.hpp"
#include "qga/errors.hpp"
#include "qga/experiment.hpp"
#include "qga/fitness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitRunFailure = 1;
constexpr int kExitConfigError = 2;

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& out_dir, bool quiet) {
    qga::ExperimentSpec spec;
    try {
        spec = qga::parse_config(config_path);
    } catch (const qga::ConfigError& e) {
        std::cerr << "qga: " << config_path << ": " << e.what() << '\n';
        return kExitConfigError;
    }
    if (seed) spec.run_config.seed = *seed;
    if (out_dir) spec.output_dir = *out_dir;

    qga::RunOptions options;
    options.log = quiet ? nullptr : &std::cerr;
    // input paths in the config file are relative to the file itself
    options.base_dir = std::filesystem::path(config_path).parent_path();

    const auto result = qga::run_experiment(spec, options);
    if (result.exit_code != 0) {
        std::cerr << "qga: " << result.error << '\n';
        return result.exit_code;
    }
    if (!quiet) {
        for (const auto& run : result.summary.runs) {
            std::printf("target %d run %d: best %.6f  baseline %.6f\n", run.target_index, run.repeat, run.best_fitness,
                        run.baseline_best_fitness);
        }
    }
    return 0;
}

int cmd_eval(const std::string& circuit_path, const std::string& target_path) {
    try {
        std::ifstream in(circuit_path);
        if (!in) throw qga::ConfigError("cannot open circuit file '" + circuit_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        const qga::Circuit circuit = qga::deserialize(buf.str());
        const qga::StateVector target = qga::load_statevector(target_path);
        if (target.n_qubits() != circuit.n_qubits()) {
            throw qga::ConfigError("circuit has " + std::to_string(circuit.n_qubits()) + " qubits, target has " +
                                   std::to_string(target.n_qubits()));
        }
        std::printf("fidelity %.17g\n", qga::fidelity_fitness(circuit, target));
        if (circuit.n_qubits() >= 2) std::printf("entanglement %.17g\n", qga::entanglement_fitness(circuit));
        std::printf("qubits %d depth %d\n", circuit.n_qubits(), circuit.depth());
        return 0;
    } catch (const qga::ConfigError& e) {
        std::cerr << "qga: " << e.what() << '\n';
    } catch (const qga::ParseError& e) {
        std::cerr << "qga: " << e.what() << '\n';
    }
    return kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolve quantum circuits with a genetic algorithm"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "Run the GA and random baseline for every target and repeat");
    run->add_option("config", config_path, "Property file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_dir, "Override output_dir");
    run->add_flag("--quiet", quiet, "Suppress progress output");

    std::string circuit_path;
    std::string target_path;
    auto* eval = app.add_subcommand("eval", "Score one circuit document against a target statevector");
    eval->add_option("circuit", circuit_path, "Circuit document (JSON)")->required()->check(CLI::ExistingFile);
    eval->add_option("--target", target_path, "Statevector file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (*run) return cmd_run(config_path, seed, out_dir, quiet);
        return cmd_eval(circuit_path, target_path);
    } catch (const std::exception& e) {
        std::cerr << "qga: " << e.what() << '\n';
        return kExitRunFailure;
    }
}
