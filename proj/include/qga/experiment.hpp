#pragma once

#include "qga/engine.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qga {

enum class TargetSource { RandomCircuit, StatevectorFile };

std::string_view to_string(TargetSource t);

/// A full experiment: one GA + baseline pair per (target, repeat).
struct ExperimentSpec {
    RunConfig run_config;
    int n_repeats = 1;
    TargetSource target_source = TargetSource::RandomCircuit;
    std::vector<std::uint64_t> target_seeds{10};
    std::optional<int> target_depth;  // defaults to run_config.depth
    GateSet target_gate_set = GateSet::full();
    std::filesystem::path target_file;
    std::filesystem::path output_dir = "results";

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Parses the `key = value` property format documented in docs/config.md. Relative paths
/// (target_file, fitness.dataset, output_dir) stay as written. ConfigError names the key and line.
ExperimentSpec parse_config_text(std::string_view text);
ExperimentSpec parse_config(const std::filesystem::path& path);

/// Every key with its current value; parse_config_text(serialize_config(s)) == s.
std::string serialize_config(const ExperimentSpec& spec);

/// Statevector text format: one "re im" pair per line, 2^n lines.
std::string format_statevector(const StateVector& state);
StateVector parse_statevector(std::string_view text);
StateVector load_statevector(const std::filesystem::path& path);

struct RunSummary {
    int target_index = 0;
    int repeat = 0;
    double best_fitness = 0.0;          // max of the trace best column
    double final_mean_fitness = 0.0;    // mean fitness of the last generation
    double baseline_best_fitness = 0.0; // max of the trace baseline column
    std::vector<GenerationRecord> trace;
};

struct ExperimentSummary {
    std::vector<RunSummary> runs;  // target-major, repeat-minor
};

/// Header plus one row per record, reals with 17 significant digits.
std::string trace_csv(const std::vector<GenerationRecord>& trace);
void emit_trace_csv(const std::vector<GenerationRecord>& trace, const std::filesystem::path& path);

std::string summary_csv(const ExperimentSummary& summary);

/// Mean of the best, average and baseline curves across runs, with mean +/- 1.96 * stderr
/// bands when there are at least two runs.
std::string convergence_svg(const ExperimentSummary& summary);
void emit_convergence_svg(const ExperimentSummary& summary, const std::filesystem::path& path);

struct RunOptions {
    std::ostream* log = nullptr;  // progress lines; null for quiet
    FitnessRegistry registry = FitnessRegistry::with_builtins();
    /// Directory that relative input paths (target_file, fitness.dataset) resolve against.
    /// output_dir is used as given.
    std::filesystem::path base_dir = ".";
};

struct ExperimentResult {
    int exit_code = 0;  // 0 success, 1 run failure, 2 configuration error
    std::string error;
    ExperimentSummary summary;
};

/// Writes under output_dir: config.properties, run.log, summary.csv, convergence.svg and per run
/// target_<t>/run_<r>/{trace.csv, best_circuit.json, best_circuit.qasm}; random targets also get
/// target_<t>/target_statevector.txt and target_circuit.json.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

}  // namespace qga
