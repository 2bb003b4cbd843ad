#include "qga/errors.hpp"
#include "qga/fitness.hpp"

#include "helpers.hpp"
#include "oracle.hpp"
#include "toy_ml.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qga;

namespace {

StateVector plus_zero() {
    const double r = 1 / std::sqrt(2.0);
    return StateVector::from_amplitudes({r, r, 0, 0});
}

}  // namespace

TEST(FidelityFitness, ExactTargetScoresOne) {
    Rng rng(50);
    const Circuit c = random_circuit(3, 10, GateSet::full(), rng);
    EXPECT_NEAR(fidelity_fitness(c, simulate(c)), 1.0, 1e-12);
}

TEST(FidelityFitness, IdentityAgainstPlusZero) {
    EXPECT_NEAR(fidelity_fitness(Circuit(2, 3), plus_zero()), 0.5, 1e-12);
}

TEST(FidelityFitness, BellTarget) {
    const double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(fidelity_fitness(support::bell_circuit(), StateVector::from_amplitudes({r, 0, 0, r})), 1.0, 1e-12);
}

TEST(FidelityFitness, DepthPenalty) {
    EXPECT_NEAR(fidelity_fitness(Circuit(2, 5), plus_zero(), 0.1, 20), 0.5 - 0.1 * 5 / 20.0, 1e-12);
    EXPECT_THROW(fidelity_fitness(Circuit(2, 5), plus_zero(), -0.1, 20), ConfigError);
}

TEST(FidelityFitness, QubitMismatch) {
    EXPECT_THROW(fidelity_fitness(Circuit(3, 2), plus_zero()), ConfigError);
}

TEST(FidelityFitness, InvariantUnderIdentityColumns) {
    Rng rng(51);
    for (int i = 0; i < 100; ++i) {
        const Circuit c = random_circuit(3, 6, GateSet::full(), rng);
        const StateVector target = oracle::random_state(3, rng);
        EXPECT_NEAR(fidelity_fitness(pad_to(c, 3, 9), target), fidelity_fitness(c, target), 1e-12);
        const double f = fidelity_fitness(c, target);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
    }
}

TEST(EntanglementFitness, BellAndGhz) {
    EXPECT_NEAR(entanglement_fitness(support::bell_circuit()), 1.0, 1e-9);
    EXPECT_NEAR(entanglement_fitness(support::ghz_circuit(3)), 1.0, 1e-9);
}

TEST(EntanglementFitness, GhzMarginalsAreMaximallyMixed) {
    const StateVector ghz = simulate(support::ghz_circuit(3));
    for (int q = 0; q < 3; ++q) {
        const oracle::Mat rho = oracle::reduced_density(ghz, {q});
        EXPECT_NEAR(std::abs(rho(0, 0) - 0.5), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(rho(1, 1) - 0.5), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(rho(0, 1)), 0.0, 1e-12);
    }
}

TEST(EntanglementFitness, ProductStatesScoreZero) {
    Rng rng(52);
    for (int i = 0; i < 50; ++i) {
        const Circuit c = random_circuit(3, 8, GateSet::parse("h,x,sx,rx,ry,rz"), rng);
        EXPECT_NEAR(entanglement_fitness(c), 0.0, 1e-8);
    }
}

TEST(EntanglementFitness, BoundedAndNeedsTwoQubits) {
    Rng rng(53);
    for (int i = 0; i < 100; ++i) {
        const double e = entanglement_fitness(random_circuit(3, 8, GateSet::full(), rng));
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0 + 1e-12);
    }
    EXPECT_THROW(entanglement_fitness(Circuit(1, 2)), ConfigError);
}

TEST(Dataset, ParsesCsvWithOptionalHeader) {
    const auto a = Dataset::parse_csv("x0,x1,label\n0.1,0.2,0\n0.5,0.9,1\n");
    ASSERT_EQ(a.samples.size(), 2u);
    EXPECT_EQ(a.feature_dim(), 2u);
    EXPECT_EQ(a.samples[1].label, 1.0);
    const auto b = Dataset::parse_csv("0.1,0.2,0\n");
    EXPECT_EQ(b.samples.size(), 1u);
    EXPECT_THROW(Dataset::parse_csv("0.1,0.2,0\n0.3,1\n"), ParseError);
}

TEST(MlFitness, AllZeroLabelsWithIdentityCircuit) {
    // no encoding angle reaches pi, so <Z0> = cos(pi x0) >= 0 for x0 <= 0.5
    Dataset d;
    for (double x : {0.0, 0.1, 0.3, 0.5}) d.samples.push_back({{x}, 0.0});
    Circuit c(1, 1);
    c.place(0, 0, GateKind::RZ, 0.3);
    EXPECT_DOUBLE_EQ(ml_fitness(c, d, 0, 0.1, 0), 1.0);
}

TEST(MlFitness, ZeroStepsReproducible) {
    const Dataset d = toy::separable_dataset();
    const Circuit c = toy::template_circuit(1.0, 0.4);
    const double a = ml_fitness(c, d, 0, 0.1, 7);
    EXPECT_EQ(a, ml_fitness(c, d, 0, 0.1, 7));
    EXPECT_DOUBLE_EQ(a, toy::oracle_accuracy(c, d));
}

TEST(MlFitness, AccuracyMatchesOracle) {
    const Dataset d = toy::separable_dataset();
    Rng rng(54);
    for (int i = 0; i < 10; ++i) {
        const Circuit c = random_circuit(2, 4, GateSet::full(), rng);
        EXPECT_DOUBLE_EQ(ml_accuracy(c, d), toy::oracle_accuracy(c, d));
    }
}

TEST(MlFitness, TrainingReachesOracleAccuracy) {
    const Dataset d = toy::separable_dataset();
    const double attainable = toy::grid_search_best(d);
    ASSERT_GE(attainable, 0.9);
    const Circuit start = toy::template_circuit(1.0, 0.4);
    const double before = ml_fitness(start, d, 0, 0.1, 3);
    const double after = ml_fitness(start, d, 100, 0.1, 3);
    EXPECT_GE(after, before);
    EXPECT_GE(after, 0.9);
}

TEST(MlFitness, TrainedCircuitKeepsStructure) {
    const Dataset d = toy::separable_dataset();
    const Circuit start = toy::template_circuit(1.0, 0.4);
    const MlOutcome out = ml_train(start, d, MlOptions{.train_steps = 20});
    EXPECT_EQ(out.trained.n_qubits(), 2);
    EXPECT_EQ(out.trained.depth(), 2);
    EXPECT_NE(out.trained.parameters(), start.parameters());
    EXPECT_DOUBLE_EQ(out.accuracy, ml_accuracy(out.trained, d));
}

TEST(MlFitness, TooManyFeatures) {
    EXPECT_THROW(ml_accuracy(Circuit(1, 1), toy::separable_dataset()), ConfigError);
}

TEST(MlFitness, MiniBatchDeterministicPerStream) {
    const Dataset d = toy::separable_dataset();
    const MlOptions opts{.train_steps = 10, .train_seed = 5, .batch_size = 16};
    const Circuit c = toy::template_circuit(1.0, 0.4);
    EXPECT_EQ(ml_train(c, d, opts, 3).trained, ml_train(c, d, opts, 3).trained);
}

TEST(FitnessRegistry, BuiltinsAndErrors) {
    auto reg = FitnessRegistry::with_builtins();
    EXPECT_EQ(reg.names(), (std::vector<std::string>{"entanglement", "fidelity", "ml"}));
    EXPECT_NO_THROW(reg.lookup("fidelity"));
    try {
        reg.lookup("nope");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("fidelity"), std::string::npos);
    }
    reg.register_fitness("custom1", [](const FitnessContext&) { return std::make_unique<EntanglementFitness>(); });
    EXPECT_THROW(reg.register_fitness("custom1", [](const FitnessContext&) { return std::make_unique<EntanglementFitness>(); }),
                 ConfigError);
    FitnessContext ctx;
    ctx.n_qubits = 2;
    EXPECT_EQ(reg.create("custom1", ctx)->name(), "entanglement");
}

TEST(FitnessRegistry, CreatesConfiguredFidelity) {
    const auto reg = FitnessRegistry::with_builtins();
    FitnessContext ctx;
    ctx.n_qubits = 2;
    ctx.max_depth = 4;
    ctx.target = plus_zero();
    ctx.options["depth_weight"] = "0.2";
    const auto f = reg.create("fidelity", ctx);
    EXPECT_NEAR(f->evaluate(Circuit(2, 2), 0).score, 0.5 - 0.2 * 2 / 4.0, 1e-12);
    ctx.options["bogus"] = "1";
    EXPECT_THROW(reg.create("fidelity", ctx), ConfigError);
    ctx.options.clear();
    ctx.max_qubits = 3;
    EXPECT_THROW(reg.create("fidelity", ctx), ConfigError);
    ctx.max_qubits.reset();
    ctx.min_qubits = 1;
    EXPECT_THROW(reg.create("entanglement", ctx), ConfigError);
    ctx.target.reset();
    EXPECT_THROW(reg.create("fidelity", ctx), ConfigError);
}

TEST(FitnessFunctions, EvaluationsAreDeterministic) {
    Rng rng(55);
    const StateVector target = oracle::random_state(2, rng);
    const FidelityFitness fid(target, 0.0, 10);
    const MlFitness ml(toy::separable_dataset(), MlOptions{.train_steps = 5, .train_seed = 1});
    for (int i = 0; i < 5; ++i) {
        const Circuit c = random_circuit(2, 5, GateSet::full(), rng);
        EXPECT_EQ(fid.evaluate(c, 1).score, fid.evaluate(c, 1).score);
        EXPECT_EQ(EntanglementFitness{}.evaluate(c, 1).score, EntanglementFitness{}.evaluate(c, 1).score);
        EXPECT_EQ(ml.evaluate(c, 4).score, ml.evaluate(c, 4).score);
    }
}
