#pragma once

#include "qga/circuit.hpp"
#include "qga/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qga {

/// Score of one evaluation. `trained` carries updated angles when the evaluator tunes them
/// (ML fitness); the engine decides whether to write them back.
struct Evaluation {
    double score = 0.0;
    std::optional<Circuit> trained;
};

/// Objective interface. Implementations must be deterministic in (circuit, stream) and safe
/// to call concurrently.
class FitnessFunction {
public:
    virtual ~FitnessFunction() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    /// Name plus parameters, for run logs.
    [[nodiscard]] virtual std::string describe() const = 0;
    /// `stream` identifies the individual being scored; stochastic evaluators derive their
    /// randomness from it so concurrent evaluation stays reproducible.
    [[nodiscard]] virtual Evaluation evaluate(const Circuit& circuit, std::uint64_t stream) const = 0;
};

/// fidelity(simulate(c), target) - depth_weight * depth / max_depth.
double fidelity_fitness(const Circuit& circuit, const StateVector& target, double depth_weight = 0.0,
                        int max_depth = 1);

/// Mean von Neumann entropy (bits) of the single-qubit marginals; 1 for Bell and GHZ states.
double entanglement_fitness(const Circuit& circuit);

struct Sample {
    std::vector<double> features;
    double label = 0.0;
};

struct Dataset {
    std::vector<Sample> samples;

    [[nodiscard]] std::size_t feature_dim() const { return samples.empty() ? 0 : samples.front().features.size(); }

    /// CSV, one sample per line: features then label. A non-numeric first line is a header.
    static Dataset parse_csv(std::string_view text);
    static Dataset load_csv(const std::filesystem::path& path);
};

struct MlOptions {
    int train_steps = 100;
    double learning_rate = 0.1;
    std::uint64_t train_seed = 0;
    double finite_difference_step = 1e-3;
    int batch_size = 0;  // 0 = full batch
};

struct MlOutcome {
    double accuracy = 0.0;
    Circuit trained;
};

/// Fraction of samples classified correctly. Each sample is encoded by RX(pi * x_j) on qubit j
/// ahead of the circuit; the prediction is label 0 iff <Z_0> >= 0.
double ml_accuracy(const Circuit& circuit, const Dataset& dataset);

/// Gradient descent (central finite differences) on the circuit angles against the squared
/// error between <Z_0> and +1/-1 targets, then the training accuracy of the result.
MlOutcome ml_train(const Circuit& circuit, const Dataset& dataset, const MlOptions& options,
                   std::uint64_t stream = 0);

double ml_fitness(const Circuit& circuit, const Dataset& dataset, int train_steps, double learning_rate,
                  std::uint64_t train_seed);

class FidelityFitness final : public FitnessFunction {
public:
    FidelityFitness(StateVector target, double depth_weight, int max_depth);
    [[nodiscard]] std::string name() const override { return "fidelity"; }
    [[nodiscard]] std::string describe() const override;
    [[nodiscard]] Evaluation evaluate(const Circuit& circuit, std::uint64_t stream) const override;

private:
    StateVector target_;
    double depth_weight_;
    int max_depth_;
};

class EntanglementFitness final : public FitnessFunction {
public:
    [[nodiscard]] std::string name() const override { return "entanglement"; }
    [[nodiscard]] std::string describe() const override { return "entanglement (mean single-qubit entropy)"; }
    [[nodiscard]] Evaluation evaluate(const Circuit& circuit, std::uint64_t stream) const override;
};

class MlFitness final : public FitnessFunction {
public:
    MlFitness(Dataset dataset, MlOptions options);
    [[nodiscard]] std::string name() const override { return "ml"; }
    [[nodiscard]] std::string describe() const override;
    [[nodiscard]] Evaluation evaluate(const Circuit& circuit, std::uint64_t stream) const override;

private:
    Dataset dataset_;
    MlOptions options_;
};

/// Everything a fitness constructor may need. `options` holds the `fitness.<key>` entries of the
/// property file with the prefix stripped.
struct FitnessContext {
    int n_qubits = 1;
    std::optional<int> min_qubits;  // width bounds mutations may reach; default n_qubits
    std::optional<int> max_qubits;
    int max_depth = 1;
    std::optional<StateVector> target;
    std::map<std::string, std::string> options;
    std::filesystem::path base_dir;  // relative paths in options resolve against this

    [[nodiscard]] int resolved_min_qubits() const { return min_qubits.value_or(n_qubits); }
    [[nodiscard]] int resolved_max_qubits() const { return max_qubits.value_or(n_qubits); }
};

/// Typed access to FitnessContext::options; finish() rejects keys nobody asked for.
class OptionReader {
public:
    explicit OptionReader(const FitnessContext& ctx) : ctx_(ctx) {}
    double get_double(const std::string& key, double fallback);
    long long get_int(const std::string& key, long long fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::optional<std::string> get_string(const std::string& key);
    void finish() const;

private:
    const FitnessContext& ctx_;
    std::set<std::string> used_;
};

using FitnessConstructor = std::function<std::unique_ptr<FitnessFunction>(const FitnessContext&)>;

class FitnessRegistry {
public:
    /// Registry holding "fidelity", "entanglement" and "ml".
    static FitnessRegistry with_builtins();

    /// ConfigError on duplicate names.
    void register_fitness(const std::string& name, FitnessConstructor constructor);
    /// ConfigError listing the known names when `name` is unknown.
    [[nodiscard]] const FitnessConstructor& lookup(const std::string& name) const;
    [[nodiscard]] std::unique_ptr<FitnessFunction> create(const std::string& name, const FitnessContext& ctx) const;
    [[nodiscard]] std::vector<std::string> names() const;

private:
    std::map<std::string, FitnessConstructor> entries_;
};

}  // namespace qga
