#pragma once

#include "qga/fitness.hpp"
#include "qga/operators.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qga {

enum class CrossoverMethod { SinglePoint, MultiPoint, Blockwise };
enum class SelectionMethod { Random, Tournament, Roulette };
enum class SurvivorMethod { Truncation, Tournament, Roulette };
enum class CrossoverChildren { Both, One };

std::string_view to_string(CrossoverMethod m);
std::string_view to_string(SelectionMethod m);
std::string_view to_string(SurvivorMethod m);
std::string_view to_string(CrossoverChildren m);

/// Evolution parameters. Unset optionals resolve against the initial size: qubit bounds default
/// to n_qubits (fixed width), max_depth to depth, children_per_generation to
/// population_size - elitism.
struct RunConfig {
    int population_size = 200;
    int generations = 1000;
    int n_qubits = 4;
    int depth = 20;
    std::optional<int> min_qubits;
    std::optional<int> max_qubits;
    int min_depth = 1;
    std::optional<int> max_depth;

    double crossover_prob = 0.3;
    double mutation_prob = 0.9;
    CrossoverMethod crossover_method = CrossoverMethod::SinglePoint;
    int crossover_points = 2;
    CrossoverChildren crossover_children = CrossoverChildren::Both;
    SelectionMethod parent_selection = SelectionMethod::Tournament;
    SurvivorMethod survivor_selection = SurvivorMethod::Truncation;
    int tournament_size = 4;
    int elitism = 1;
    std::optional<int> children_per_generation;

    GateSet gate_set = GateSet::full();
    MutationWeights mutation_weights = kUniformMutationWeights;
    double parameter_sigma = 0.1 * std::numbers::pi;

    std::string fitness = "fidelity";
    std::map<std::string, std::string> fitness_options;
    /// Write angles tuned by the fitness function (ML) back into the genome.
    bool lamarckian = true;

    std::uint64_t seed = 0;
    int threads = 1;

    [[nodiscard]] int resolved_min_qubits() const { return min_qubits.value_or(n_qubits); }
    [[nodiscard]] int resolved_max_qubits() const { return max_qubits.value_or(n_qubits); }
    [[nodiscard]] int resolved_max_depth() const { return max_depth.value_or(depth); }
    [[nodiscard]] int resolved_children() const { return children_per_generation.value_or(population_size - elitism); }
    [[nodiscard]] MutationContext mutation_context() const;

    /// ConfigError naming the offending field.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct GenerationRecord {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::optional<double> baseline_best_fitness;
    std::uint64_t best_individual_id = 0;
};

struct EvolutionResult {
    Individual best;  // best ever seen
    std::vector<GenerationRecord> trace;  // generation 0 (initial population) .. generations
    Population final_population;
    std::uint64_t evaluations = 0;  // fitness calls actually made (cache hits excluded)
};

struct BaselineRecord {
    int generation = 0;
    int samples = 0;  // circuits drawn this generation
    double best_so_far = 0.0;
};

/// Raised when a fitness function throws; carries the circuit that was being scored.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, Circuit circuit, std::uint64_t id)
        : std::runtime_error(what), circuit_(std::move(circuit)), id_(id) {}
    [[nodiscard]] const Circuit& circuit() const { return circuit_; }
    [[nodiscard]] std::uint64_t individual_id() const { return id_; }

private:
    Circuit circuit_;
    std::uint64_t id_;
};

EvolutionResult evolve(const RunConfig& config, const FitnessFunction& fitness, Rng& rng);

/// Pure random search with the GA's budget: population_size draws at generation 0, then
/// resolved_children() per generation. best_so_far is monotone.
std::vector<BaselineRecord> random_baseline(const RunConfig& config, const FitnessFunction& fitness, Rng& rng);

/// Copies baseline best-so-far values into the matching GA records.
void attach_baseline(std::vector<GenerationRecord>& trace, const std::vector<BaselineRecord>& baseline);

/// Deterministic generator per (seed, label). ContractViolation on duplicate labels.
std::map<std::string, Rng> make_rng_streams(std::uint64_t seed, const std::vector<std::string>& labels);
Rng make_rng_stream(std::uint64_t seed, std::string_view label);

}  // namespace qga
