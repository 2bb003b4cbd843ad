#include "qga/engine.hpp"
#include "qga/errors.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <atomic>

using namespace qga;

namespace {

RunConfig small_config() {
    RunConfig cfg;
    cfg.population_size = 20;
    cfg.generations = 10;
    cfg.n_qubits = 2;
    cfg.depth = 4;
    cfg.seed = 1;
    return cfg;
}

// Counts calls; scores by fidelity so there is something to climb.
class CountingFitness final : public FitnessFunction {
public:
    explicit CountingFitness(StateVector target) : target_(std::move(target)) {}
    std::string name() const override { return "counting"; }
    std::string describe() const override { return "counting"; }
    Evaluation evaluate(const Circuit& c, std::uint64_t) const override {
        ++calls;
        return {fidelity_fitness(c, target_), std::nullopt};
    }
    mutable std::atomic<int> calls{0};

private:
    StateVector target_;
};

class ThrowingFitness final : public FitnessFunction {
public:
    std::string name() const override { return "throwing"; }
    std::string describe() const override { return "throwing"; }
    Evaluation evaluate(const Circuit&, std::uint64_t) const override { throw std::runtime_error("boom"); }
};

}  // namespace

TEST(RunConfig, DefaultsAndValidation) {
    RunConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.resolved_children(), 199);
    EXPECT_EQ(cfg.resolved_max_depth(), 20);

    auto broken = [](auto edit) {
        RunConfig c;
        edit(c);
        return c;
    };
    EXPECT_THROW(broken([](RunConfig& c) { c.population_size = 1; }).validate(), ConfigError);
    EXPECT_THROW(broken([](RunConfig& c) { c.elitism = 200; }).validate(), ConfigError);
    EXPECT_THROW(broken([](RunConfig& c) { c.crossover_prob = 1.5; }).validate(), ConfigError);
    EXPECT_THROW(broken([](RunConfig& c) { c.mutation_prob = -0.1; }).validate(), ConfigError);
    EXPECT_THROW(broken([](RunConfig& c) { c.tournament_size = 0; }).validate(), ConfigError);
    EXPECT_THROW(broken([](RunConfig& c) { c.generations = -1; }).validate(), ConfigError);
    EXPECT_THROW(broken([](RunConfig& c) { c.max_qubits = 2; }).validate(), ConfigError);
}

TEST(Evolve, ZeroGenerationsGivesInitialRecordOnly) {
    RunConfig cfg = small_config();
    cfg.generations = 0;
    const EntanglementFitness fit;
    Rng rng(1);
    const auto res = evolve(cfg, fit, rng);
    ASSERT_EQ(res.trace.size(), 1u);
    EXPECT_EQ(res.trace[0].generation, 0);
    EXPECT_EQ(res.trace[0].best_fitness, *res.best.fitness);
    double best = -1;
    for (const auto& m : res.final_population.members) best = std::max(best, *m.fitness);
    EXPECT_EQ(best, *res.best.fitness);
}

TEST(Evolve, PerfectClonesStayPerfect) {
    // only identity gates exist, so every individual prepares |00> exactly
    RunConfig cfg = small_config();
    cfg.gate_set = GateSet::parse("id");
    const FidelityFitness fit(zero_state(2), 0.0, 4);
    Rng rng(2);
    const auto res = evolve(cfg, fit, rng);
    for (const auto& rec : res.trace) {
        EXPECT_DOUBLE_EQ(rec.best_fitness, 1.0);
        EXPECT_DOUBLE_EQ(rec.mean_fitness, 1.0);
    }
}

TEST(Evolve, FindsBellEntanglement) {
    RunConfig cfg;
    cfg.population_size = 50;
    cfg.generations = 50;
    cfg.n_qubits = 2;
    cfg.depth = 5;
    cfg.fitness = "entanglement";
    cfg.seed = 3;
    const EntanglementFitness fit;
    Rng rng = make_rng_stream(cfg.seed, "ga");
    const auto res = evolve(cfg, fit, rng);
    EXPECT_GE(*res.best.fitness, 0.99);
}

TEST(Evolve, TraceInvariants) {
    RunConfig cfg = small_config();
    cfg.generations = 30;
    cfg.min_qubits = 2;
    cfg.max_qubits = 3;
    cfg.max_depth = 8;
    const EntanglementFitness fit;
    Rng rng(4);
    const auto res = evolve(cfg, fit, rng);
    ASSERT_EQ(res.trace.size(), 31u);
    for (std::size_t g = 0; g < res.trace.size(); ++g) {
        EXPECT_EQ(res.trace[g].generation, static_cast<int>(g));
        EXPECT_GE(res.trace[g].best_fitness, res.trace[g].mean_fitness - 1e-12);
        if (g > 0) EXPECT_GE(res.trace[g].best_fitness, res.trace[g - 1].best_fitness);
    }
    EXPECT_EQ(res.final_population.members.size(), 20u);
    for (const auto& m : res.final_population.members) EXPECT_TRUE(m.circuit.is_valid());
}

TEST(Evolve, EveryGenerationValidAndSized) {
    // survivor modes other than truncation exercise the remaining code paths
    for (SurvivorMethod survivors : {SurvivorMethod::Truncation, SurvivorMethod::Tournament, SurvivorMethod::Roulette}) {
        for (CrossoverMethod cx : {CrossoverMethod::SinglePoint, CrossoverMethod::MultiPoint, CrossoverMethod::Blockwise}) {
            RunConfig cfg = small_config();
            cfg.survivor_selection = survivors;
            cfg.crossover_method = cx;
            cfg.crossover_prob = 0.8;
            cfg.max_qubits = 3;
            cfg.max_depth = 6;
            cfg.generations = 8;
            for (int g = 0; g <= 8; g += 4) {
                cfg.generations = g;
                Rng rng(5);
                const auto res = evolve(cfg, EntanglementFitness{}, rng);
                EXPECT_EQ(res.final_population.members.size(), 20u);
                for (const auto& m : res.final_population.members) {
                    EXPECT_TRUE(m.circuit.is_valid());
                    EXPECT_LE(m.circuit.n_qubits(), 3);
                    EXPECT_LE(m.circuit.depth(), 6);
                }
            }
        }
    }
}

TEST(Evolve, EvaluationBudgetMatchesBaseline) {
    RunConfig cfg = small_config();
    cfg.crossover_prob = 1.0;
    cfg.mutation_prob = 1.0;
    Rng rng(6);
    const CountingFitness ga_fit(oracle::random_state(2, rng));
    const CountingFitness base_fit(oracle::random_state(2, rng));
    const auto res = evolve(cfg, ga_fit, rng);
    const auto base = random_baseline(cfg, base_fit, rng);
    const int expected = cfg.population_size + cfg.generations * cfg.resolved_children();
    EXPECT_EQ(ga_fit.calls.load(), expected);
    EXPECT_EQ(res.evaluations, static_cast<std::uint64_t>(expected));
    EXPECT_EQ(base_fit.calls.load(), expected);
    ASSERT_EQ(base.size(), 11u);
    EXPECT_EQ(base[0].samples, cfg.population_size);
    for (std::size_t g = 1; g < base.size(); ++g) {
        EXPECT_EQ(base[g].samples, cfg.resolved_children());
        EXPECT_GE(base[g].best_so_far, base[g - 1].best_so_far);
    }
}

TEST(Evolve, CachedClonesAreNotReEvaluated) {
    RunConfig cfg = small_config();
    cfg.crossover_prob = 0.0;
    cfg.mutation_prob = 0.0;
    Rng rng(7);
    const CountingFitness fit(oracle::random_state(2, rng));
    evolve(cfg, fit, rng);
    EXPECT_EQ(fit.calls.load(), cfg.population_size);
}

TEST(Evolve, DeterministicAcrossThreadCounts) {
    RunConfig cfg = small_config();
    Rng target_rng(8);
    const FidelityFitness fit(oracle::random_state(2, target_rng), 0.0, 4);
    auto run = [&](int threads) {
        RunConfig c = cfg;
        c.threads = threads;
        Rng rng = make_rng_stream(c.seed, "ga");
        return evolve(c, fit, rng);
    };
    const auto a = run(1);
    const auto b = run(1);
    const auto c = run(4);
    for (const auto* other : {&b, &c}) {
        ASSERT_EQ(a.trace.size(), other->trace.size());
        for (std::size_t g = 0; g < a.trace.size(); ++g) {
            EXPECT_EQ(a.trace[g].best_fitness, other->trace[g].best_fitness);
            EXPECT_EQ(a.trace[g].mean_fitness, other->trace[g].mean_fitness);
        }
        EXPECT_EQ(a.best.circuit, other->best.circuit);
    }
}

TEST(Evolve, EvaluationFailureCarriesCircuit) {
    RunConfig cfg = small_config();
    Rng rng(9);
    try {
        evolve(cfg, ThrowingFitness{}, rng);
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        EXPECT_TRUE(e.circuit().is_valid());
        EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
    }
}

TEST(Evolve, InvalidConfigRejectedUpFront) {
    RunConfig cfg = small_config();
    cfg.population_size = 1;
    Rng rng(10);
    EXPECT_THROW(evolve(cfg, EntanglementFitness{}, rng), ConfigError);
}

TEST(RandomBaseline, DeterministicAndAttachable) {
    RunConfig cfg = small_config();
    auto run = [&] {
        Rng rng = make_rng_stream(4, "baseline");
        return random_baseline(cfg, EntanglementFitness{}, rng);
    };
    const auto a = run();
    const auto b = run();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].best_so_far, b[i].best_so_far);

    Rng rng(11);
    auto res = evolve(cfg, EntanglementFitness{}, rng);
    attach_baseline(res.trace, a);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(res.trace[i].baseline_best_fitness, a[i].best_so_far);
}

TEST(RngStreams, DeterministicAndDistinct) {
    Rng a = make_rng_stream(42, "ga");
    Rng b = make_rng_stream(42, "ga");
    Rng c = make_rng_stream(42, "baseline");
    Rng d = make_rng_stream(43, "ga");
    const auto first = a();
    EXPECT_EQ(first, b());
    EXPECT_NE(first, c());
    EXPECT_NE(first, d());
    auto streams = make_rng_streams(42, {"ga", "baseline"});
    EXPECT_EQ(streams.at("ga")(), first);
    EXPECT_THROW(make_rng_streams(42, {"ga", "ga"}), ContractViolation);
}
