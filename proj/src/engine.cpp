#include "qga/engine.hpp"

#include "qga/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iterator>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

namespace qga {

std::string_view to_string(CrossoverMethod m) {
    switch (m) {
        case CrossoverMethod::SinglePoint: return "single_point";
        case CrossoverMethod::MultiPoint: return "multi_point";
        case CrossoverMethod::Blockwise: return "blockwise";
    }
    return "?";
}

std::string_view to_string(SelectionMethod m) {
    switch (m) {
        case SelectionMethod::Random: return "random";
        case SelectionMethod::Tournament: return "tournament";
        case SelectionMethod::Roulette: return "roulette";
    }
    return "?";
}

std::string_view to_string(SurvivorMethod m) {
    switch (m) {
        case SurvivorMethod::Truncation: return "truncation";
        case SurvivorMethod::Tournament: return "tournament";
        case SurvivorMethod::Roulette: return "roulette";
    }
    return "?";
}

std::string_view to_string(CrossoverChildren m) { return m == CrossoverChildren::Both ? "both" : "one"; }

MutationContext RunConfig::mutation_context() const {
    MutationContext ctx;
    ctx.gate_set = gate_set;
    ctx.min_qubits = resolved_min_qubits();
    ctx.max_qubits = resolved_max_qubits();
    ctx.min_depth = min_depth;
    ctx.max_depth = resolved_max_depth();
    ctx.parameter_sigma = parameter_sigma;
    return ctx;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    if (population_size < 2) fail("population_size must be >= 2");
    if (generations < 0) fail("generations must be >= 0");
    if (n_qubits < 1 || n_qubits > MutationContext::kMaxCircuitQubits) fail("n_qubits must be in [1, 20]");
    if (depth < 1) fail("depth must be >= 1");
    const int lo_q = resolved_min_qubits(), hi_q = resolved_max_qubits(), hi_d = resolved_max_depth();
    if (lo_q < 1 || lo_q > n_qubits) fail("min_qubits must be in [1, n_qubits]");
    if (hi_q < n_qubits || hi_q > MutationContext::kMaxCircuitQubits) fail("max_qubits must be in [n_qubits, 20]");
    if (min_depth < 1 || min_depth > depth) fail("min_depth must be in [1, depth]");
    if (hi_d < depth) fail("max_depth must be >= depth");
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) fail("crossover_prob must be in [0, 1]");
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) fail("mutation_prob must be in [0, 1]");
    if (crossover_points < 2) fail("crossover_points must be >= 2");
    if (tournament_size < 1) fail("tournament_size must be >= 1");
    if (elitism < 0 || elitism >= population_size) fail("elitism must be in [0, population_size)");
    if (resolved_children() < 1) fail("children_per_generation must be >= 1");
    if (gate_set.empty()) fail("gate_set must not be empty");
    if (n_qubits == 1 && std::ranges::none_of(gate_set.kinds(), [](GateKind k) { return arity(k) == 1; })) {
        fail("a 1-qubit circuit needs at least one 1-qubit gate in gate_set");
    }
    double total = 0.0;
    for (double w : mutation_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) fail("mutation_weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0.0) fail("mutation_weights must not all be zero");
    if (!(parameter_sigma >= 0.0)) fail("parameter_sigma must be >= 0");
    if (fitness.empty()) fail("fitness must name a fitness function");
    if (threads < 1) fail("threads must be >= 1");
}

namespace {

// Scores every unevaluated member in place. Results land by index, so the thread count never
// changes the outcome.
std::uint64_t evaluate_all(std::vector<Individual>& members, const FitnessFunction& fitness, bool lamarckian,
                           int threads) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!members[i].fitness) todo.push_back(i);
    }
    std::vector<std::optional<Evaluation>> results(todo.size());
    std::vector<std::exception_ptr> errors(todo.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < todo.size(); k = next++) {
            const Individual& ind = members[todo[k]];
            try {
                results[k] = fitness.evaluate(ind.circuit, ind.id);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int n_workers = std::min<int>(threads, static_cast<int>(todo.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    }
    for (std::size_t k = 0; k < todo.size(); ++k) {
        Individual& ind = members[todo[k]];
        if (errors[k]) {
            try {
                std::rethrow_exception(errors[k]);
            } catch (const std::exception& e) {
                throw EvaluationError("fitness evaluation failed for individual " + std::to_string(ind.id) + ": " +
                                          e.what(),
                                      ind.circuit, ind.id);
            }
        }
        const double score = results[k]->score;
        if (!std::isfinite(score)) {
            throw EvaluationError("fitness of individual " + std::to_string(ind.id) + " is not finite", ind.circuit,
                                  ind.id);
        }
        ind.fitness = score;
        if (lamarckian && results[k]->trained) ind.circuit = std::move(*results[k]->trained);
    }
    return todo.size();
}

std::vector<Individual> select_parents(const Population& pop, const RunConfig& cfg, Rng& rng) {
    switch (cfg.parent_selection) {
        case SelectionMethod::Random: return select_random(pop, 2, rng);
        case SelectionMethod::Tournament: return select_tournament(pop, 2, cfg.tournament_size, rng);
        case SelectionMethod::Roulette: return select_roulette(pop, 2, rng);
    }
    return {};
}

Children recombine(const Circuit& a, const Circuit& b, const RunConfig& cfg, Rng& rng) {
    switch (cfg.crossover_method) {
        case CrossoverMethod::SinglePoint: return crossover_single_point(a, b, cfg.gate_set, rng);
        case CrossoverMethod::MultiPoint: {
            // shallow parents cannot host the configured cut count
            const int m = std::max(a.depth(), b.depth());
            const int points = std::min(cfg.crossover_points, m - 1);
            if (points < 2) return crossover_single_point(a, b, cfg.gate_set, rng);
            return crossover_multi_point(a, b, points, cfg.gate_set, rng);
        }
        case CrossoverMethod::Blockwise: return crossover_blockwise(a, b, cfg.gate_set, rng);
    }
    return {a, b};
}

std::vector<Individual> make_children(const Population& pop, const RunConfig& cfg, const MutationContext& mctx,
                                      std::uint64_t& next_id, Rng& rng) {
    const int quota = cfg.resolved_children();
    std::bernoulli_distribution do_cross(cfg.crossover_prob);
    std::bernoulli_distribution do_mutate(cfg.mutation_prob);
    std::vector<Individual> children;
    children.reserve(static_cast<std::size_t>(quota));
    while (static_cast<int>(children.size()) < quota) {
        auto parents = select_parents(pop, cfg, rng);
        std::vector<Individual> brood;
        if (do_cross(rng)) {
            auto [c1, c2] = recombine(parents[0].circuit, parents[1].circuit, cfg, rng);
            brood.push_back({std::move(c1), std::nullopt, 0});
            brood.push_back({std::move(c2), std::nullopt, 0});
        } else {
            brood = std::move(parents);  // clones keep their cached fitness
        }
        if (cfg.crossover_children == CrossoverChildren::One) brood.erase(brood.begin() + 1, brood.end());
        for (auto& child : brood) {
            if (static_cast<int>(children.size()) == quota) break;
            if (do_mutate(rng)) {
                child.circuit = mutate(child.circuit, mctx, cfg.mutation_weights, rng).circuit;
                child.fitness.reset();
            }
            child.id = next_id++;
            children.push_back(std::move(child));
        }
    }
    return children;
}

// Descending by fitness; stable so earlier entries win ties.
void sort_by_fitness(std::vector<Individual>& v) {
    std::ranges::stable_sort(v, [](const Individual& a, const Individual& b) { return *a.fitness > *b.fitness; });
}

std::vector<Individual> select_survivors(Population& old, std::vector<Individual>& children, const RunConfig& cfg,
                                         Rng& rng) {
    std::vector<Individual> ranked = std::move(old.members);
    sort_by_fitness(ranked);
    std::vector<Individual> next(std::make_move_iterator(ranked.begin()),
                                 std::make_move_iterator(ranked.begin() + cfg.elitism));

    // children first so they win fitness ties against the old population
    std::vector<Individual> pool = std::move(children);
    pool.insert(pool.end(), std::make_move_iterator(ranked.begin() + cfg.elitism), std::make_move_iterator(ranked.end()));
    const int needed = cfg.population_size - cfg.elitism;

    if (cfg.survivor_selection == SurvivorMethod::Truncation) {
        sort_by_fitness(pool);
        if (static_cast<int>(pool.size()) > needed) pool.erase(pool.begin() + needed, pool.end());
        std::ranges::move(pool, std::back_inserter(next));
        return next;
    }
    Population candidates{std::move(pool), old.generation_index};
    auto chosen = cfg.survivor_selection == SurvivorMethod::Tournament
                      ? select_tournament(candidates, needed, cfg.tournament_size, rng)
                      : select_roulette(candidates, needed, rng);
    std::ranges::move(chosen, std::back_inserter(next));
    return next;
}

GenerationRecord record_of(const Population& pop) {
    GenerationRecord rec;
    rec.generation = pop.generation_index;
    double sum = 0.0;
    const Individual* best = &pop.members.front();
    for (const auto& ind : pop.members) {
        sum += *ind.fitness;
        if (*ind.fitness > *best->fitness) best = &ind;
    }
    rec.best_fitness = *best->fitness;
    rec.mean_fitness = sum / static_cast<double>(pop.members.size());
    rec.best_individual_id = best->id;
    return rec;
}

void keep_best(std::optional<Individual>& best, const Population& pop) {
    for (const auto& ind : pop.members) {
        if (!best || *ind.fitness > *best->fitness) best = ind;
    }
}

}  // namespace

EvolutionResult evolve(const RunConfig& config, const FitnessFunction& fitness, Rng& rng) {
    config.validate();
    const MutationContext mctx = config.mutation_context();
    EvolutionResult result{Individual{Circuit(1, 1), std::nullopt, 0}, {}, {}, 0};

    std::uint64_t next_id = 0;
    Population pop;
    pop.members.reserve(static_cast<std::size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i) {
        pop.members.push_back({random_circuit(config.n_qubits, config.depth, config.gate_set, rng), std::nullopt, next_id++});
    }
    result.evaluations += evaluate_all(pop.members, fitness, config.lamarckian, config.threads);
    result.trace.push_back(record_of(pop));
    std::optional<Individual> best;
    keep_best(best, pop);

    for (int gen = 1; gen <= config.generations; ++gen) {
        auto children = make_children(pop, config, mctx, next_id, rng);
        result.evaluations += evaluate_all(children, fitness, config.lamarckian, config.threads);
        pop.members = select_survivors(pop, children, config, rng);
        pop.generation_index = gen;
        result.trace.push_back(record_of(pop));
        keep_best(best, pop);
    }
    result.best = std::move(*best);
    result.final_population = std::move(pop);
    return result;
}

std::vector<BaselineRecord> random_baseline(const RunConfig& config, const FitnessFunction& fitness, Rng& rng) {
    config.validate();
    std::vector<BaselineRecord> trace;
    std::uint64_t next_id = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int gen = 0; gen <= config.generations; ++gen) {
        const int draws = gen == 0 ? config.population_size : config.resolved_children();
        std::vector<Individual> batch;
        batch.reserve(static_cast<std::size_t>(draws));
        for (int i = 0; i < draws; ++i) {
            batch.push_back({random_circuit(config.n_qubits, config.depth, config.gate_set, rng), std::nullopt, next_id++});
        }
        evaluate_all(batch, fitness, false, config.threads);
        for (const auto& ind : batch) best = std::max(best, *ind.fitness);
        trace.push_back({gen, draws, best});
    }
    return trace;
}

void attach_baseline(std::vector<GenerationRecord>& trace, const std::vector<BaselineRecord>& baseline) {
    if (trace.size() != baseline.size()) throw ContractViolation("GA and baseline traces differ in length");
    for (std::size_t i = 0; i < trace.size(); ++i) trace[i].baseline_best_fitness = baseline[i].best_so_far;
}

Rng make_rng_stream(std::uint64_t seed, std::string_view label) {
    // FNV-1a over the label keeps the derivation independent of std::hash
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(label.size())};
    return Rng(seq);
}

std::map<std::string, Rng> make_rng_streams(std::uint64_t seed, const std::vector<std::string>& labels) {
    std::map<std::string, Rng> out;
    for (const auto& label : labels) {
        if (!out.emplace(label, make_rng_stream(seed, label)).second) {
            throw ContractViolation("duplicate rng stream label '" + label + "'");
        }
    }
    return out;
}

}  // namespace qga
