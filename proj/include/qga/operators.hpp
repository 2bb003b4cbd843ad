#pragma once

#include "qga/circuit.hpp"
#include "qga/random.hpp"

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace qga {

struct Individual {
    Circuit circuit;
    std::optional<double> fitness;  // finite once evaluated
    std::uint64_t id = 0;
};

struct Population {
    std::vector<Individual> members;
    int generation_index = 0;
};

// Selection. All draw with replacement and return copies.

std::vector<Individual> select_random(const Population& pop, int count, Rng& rng);

/// Each pick is the fittest of `tournament_size` uniform draws (with replacement); ties are
/// broken uniformly at random.
std::vector<Individual> select_tournament(const Population& pop, int count, int tournament_size, Rng& rng);

/// Fitness-proportionate. If any fitness is <= 0 the weights are shifted to
/// f - min(f) + eps, eps = 1e-9 * (max - min + 1).
std::vector<Individual> select_roulette(const Population& pop, int count, Rng& rng);

// Crossover. Parents are padded to a common size first; children come back repaired.

using Children = std::pair<Circuit, Circuit>;

Children crossover_single_point(const Circuit& a, const Circuit& b, const GateSet& gate_set, Rng& rng);

/// Same as above with an explicit cut column in [1, depth-1] (after padding).
Children crossover_single_point_at(const Circuit& a, const Circuit& b, int cut);

/// `n_points` distinct sorted cuts; segments alternate between the parents.
/// ConfigError unless 2 <= n_points <= depth-1 after padding.
Children crossover_multi_point(const Circuit& a, const Circuit& b, int n_points, const GateSet& gate_set, Rng& rng);

Children crossover_multi_point_at(const Circuit& a, const Circuit& b, std::span<const int> cuts);

/// Swaps the top-left block rows [0, row_cut) x cols [0, col_cut) between the parents, then
/// repairs two-qubit gates cut by the block edge. Single-row parents fall back to single-point.
Children crossover_blockwise(const Circuit& a, const Circuit& b, const GateSet& gate_set, Rng& rng);

Children crossover_blockwise_at(const Circuit& a, const Circuit& b, int row_cut, int col_cut,
                                const GateSet& gate_set, Rng& rng);

// Mutation.

enum class MutationKind { GateFlip, SwapControl, QubitCount, GateCount, SwapColumns, Parameter };

inline constexpr std::array<MutationKind, 6> kAllMutations{
    MutationKind::GateFlip,   MutationKind::SwapControl, MutationKind::QubitCount,
    MutationKind::GateCount,  MutationKind::SwapColumns, MutationKind::Parameter};

std::string_view mutation_name(MutationKind kind);

/// What a mutation may draw from and the size bounds it must respect.
struct MutationContext {
    GateSet gate_set = GateSet::full();
    int min_qubits = 1;
    int max_qubits = kMaxCircuitQubits;
    int min_depth = 1;
    int max_depth = 1000;
    double parameter_sigma = 0.1 * std::numbers::pi;

    static constexpr int kMaxCircuitQubits = 20;
};

Circuit mutate_single_gate_flip(const Circuit& c, const MutationContext& ctx, Rng& rng);
Circuit mutate_swap_control(const Circuit& c, Rng& rng);
Circuit mutate_qubit_count(const Circuit& c, const MutationContext& ctx, Rng& rng);
Circuit mutate_gate_count(const Circuit& c, const MutationContext& ctx, Rng& rng);
Circuit mutate_swap_columns(const Circuit& c, Rng& rng);
Circuit mutate_parameter(const Circuit& c, const MutationContext& ctx, Rng& rng);

/// Removes row `row`; two-qubit gates that lose a half are repaired.
Circuit remove_qubit(const Circuit& c, int row, const GateSet& gate_set, Rng& rng);

using MutationWeights = std::array<double, 6>;  // indexed like kAllMutations
inline constexpr MutationWeights kUniformMutationWeights{1, 1, 1, 1, 1, 1};

struct MutationOutcome {
    Circuit circuit;
    MutationKind applied;
};

/// Applies exactly one mutation, picked with probability proportional to `weights`.
/// ContractViolation for negative or all-zero weights.
MutationOutcome mutate(const Circuit& c, const MutationContext& ctx, const MutationWeights& weights, Rng& rng);

}  // namespace qga
