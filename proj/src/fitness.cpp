#include "qga/fitness.hpp"

#include "qga/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace qga {

double fidelity_fitness(const Circuit& circuit, const StateVector& target, double depth_weight, int max_depth) {
    if (circuit.n_qubits() != target.n_qubits()) {
        throw ConfigError("fidelity fitness: circuit has " + std::to_string(circuit.n_qubits()) +
                          " qubits, target has " + std::to_string(target.n_qubits()));
    }
    if (!(depth_weight >= 0.0)) throw ConfigError("fidelity fitness: depth_weight must be >= 0");
    if (max_depth < 1) throw ConfigError("fidelity fitness: max_depth must be >= 1");
    const double f = fidelity(simulate(circuit), target);
    if (depth_weight == 0.0) return f;
    return f - depth_weight * static_cast<double>(circuit.depth()) / static_cast<double>(max_depth);
}

double entanglement_fitness(const Circuit& circuit) {
    if (circuit.n_qubits() < 2) throw ConfigError("entanglement fitness needs at least 2 qubits");
    const StateVector psi = simulate(circuit);
    double total = 0.0;
    for (int q = 0; q < circuit.n_qubits(); ++q) {
        const int keep[] = {q};
        total += von_neumann_entropy(partial_trace(psi, keep));
    }
    return total / circuit.n_qubits();
}

namespace {

std::optional<double> parse_number(std::string_view token) {
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) return std::nullopt;
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == line.npos ? line.npos : pos - start));
        if (pos == line.npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

Dataset Dataset::parse_csv(std::string_view text) {
    Dataset data;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == text.npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == line.npos) continue;

        const auto fields = split(line, ',');
        std::vector<double> values;
        bool numeric = true;
        for (auto f : fields) {
            if (auto v = parse_number(f)) values.push_back(*v);
            else numeric = false;
        }
        if (!numeric) {
            if (line_no == 1) continue;  // header
            throw ParseError("dataset line " + std::to_string(line_no) + ": non-numeric field");
        }
        if (values.size() < 2) throw ParseError("dataset line " + std::to_string(line_no) + ": need features and a label");
        Sample s;
        s.label = values.back();
        values.pop_back();
        s.features = std::move(values);
        if (!data.samples.empty() && s.features.size() != data.feature_dim()) {
            throw ParseError("dataset line " + std::to_string(line_no) + ": expected " +
                             std::to_string(data.feature_dim()) + " features");
        }
        data.samples.push_back(std::move(s));
    }
    if (data.samples.empty()) throw ParseError("dataset is empty");
    return data;
}

Dataset Dataset::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

namespace {

void check_dataset(const Circuit& circuit, const Dataset& dataset) {
    if (dataset.samples.empty()) throw ConfigError("ML fitness: dataset is empty");
    if (dataset.feature_dim() > static_cast<std::size_t>(circuit.n_qubits())) {
        throw ConfigError("ML fitness: " + std::to_string(dataset.feature_dim()) + " features need at least as many qubits, circuit has " +
                          std::to_string(circuit.n_qubits()));
    }
    for (const auto& s : dataset.samples) {
        if (s.label != 0.0 && s.label != 1.0) throw ConfigError("ML fitness: labels must be 0 or 1");
    }
}

StateVector encode(const Sample& sample, int n_qubits) {
    StateVector state = zero_state(n_qubits);
    for (std::size_t j = 0; j < sample.features.size(); ++j) {
        const int q[] = {static_cast<int>(j)};
        state = apply_gate(state, GateKind::RX, std::numbers::pi * sample.features[j], q);
    }
    return state;
}

double predict(const Circuit& circuit, const StateVector& encoded) {
    return expectation_z(simulate(circuit, encoded), 0);
}

double target_of(const Sample& s) { return s.label == 0.0 ? 1.0 : -1.0; }

double accuracy_on(const Circuit& circuit, const Dataset& data, const std::vector<StateVector>& encoded) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const double label = predict(circuit, encoded[i]) >= 0.0 ? 0.0 : 1.0;
        if (label == data.samples[i].label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.samples.size());
}

}  // namespace

double ml_accuracy(const Circuit& circuit, const Dataset& dataset) {
    check_dataset(circuit, dataset);
    std::vector<StateVector> encoded;
    for (const auto& s : dataset.samples) encoded.push_back(encode(s, circuit.n_qubits()));
    return accuracy_on(circuit, dataset, encoded);
}

MlOutcome ml_train(const Circuit& circuit, const Dataset& dataset, const MlOptions& options, std::uint64_t stream) {
    check_dataset(circuit, dataset);
    if (options.train_steps < 0) throw ConfigError("ML fitness: train_steps must be >= 0");
    if (options.batch_size < 0) throw ConfigError("ML fitness: batch_size must be >= 0");
    const int n = circuit.n_qubits();
    std::vector<StateVector> encoded;
    encoded.reserve(dataset.samples.size());
    for (const auto& s : dataset.samples) encoded.push_back(encode(s, n));

    std::vector<double> theta = circuit.parameters();
    if (theta.empty() || options.train_steps == 0) return {accuracy_on(circuit, dataset, encoded), circuit};

    std::seed_seq seq{static_cast<std::uint32_t>(options.train_seed), static_cast<std::uint32_t>(options.train_seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    Rng rng(seq);
    const std::size_t total = dataset.samples.size();
    const std::size_t batch = options.batch_size == 0 ? total : std::min<std::size_t>(total, static_cast<std::size_t>(options.batch_size));
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);

    auto loss = [&](std::span<const double> params, std::span<const std::size_t> idx) {
        const Circuit c = circuit.with_parameters(params);
        double sum = 0.0;
        for (std::size_t i : idx) {
            const double d = predict(c, encoded[i]) - target_of(dataset.samples[i]);
            sum += d * d;
        }
        return sum / static_cast<double>(idx.size());
    };

    const double h = options.finite_difference_step;
    std::vector<double> grad(theta.size());
    for (int step = 0; step < options.train_steps; ++step) {
        if (batch < total) std::ranges::shuffle(order, rng);
        const std::span<const std::size_t> idx(order.data(), batch);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            const double saved = theta[k];
            theta[k] = saved + h;
            const double up = loss(theta, idx);
            theta[k] = saved - h;
            const double down = loss(theta, idx);
            theta[k] = saved;
            grad[k] = (up - down) / (2.0 * h);
        }
        for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= options.learning_rate * grad[k];
    }
    Circuit trained = circuit.with_parameters(theta);
    return {accuracy_on(trained, dataset, encoded), std::move(trained)};
}

double ml_fitness(const Circuit& circuit, const Dataset& dataset, int train_steps, double learning_rate,
                  std::uint64_t train_seed) {
    MlOptions opts;
    opts.train_steps = train_steps;
    opts.learning_rate = learning_rate;
    opts.train_seed = train_seed;
    return ml_train(circuit, dataset, opts).accuracy;
}

FidelityFitness::FidelityFitness(StateVector target, double depth_weight, int max_depth)
    : target_(std::move(target)), depth_weight_(depth_weight), max_depth_(max_depth) {
    if (!(depth_weight >= 0.0)) throw ConfigError("fidelity fitness: depth_weight must be >= 0");
    if (max_depth < 1) throw ConfigError("fidelity fitness: max_depth must be >= 1");
}

std::string FidelityFitness::describe() const {
    std::ostringstream out;
    out << "fidelity (|<psi|target>|^2, " << target_.n_qubits() << " qubits, depth_weight=" << depth_weight_
        << ", max_depth=" << max_depth_ << ")";
    return out.str();
}

Evaluation FidelityFitness::evaluate(const Circuit& circuit, std::uint64_t) const {
    return {fidelity_fitness(circuit, target_, depth_weight_, max_depth_), std::nullopt};
}

Evaluation EntanglementFitness::evaluate(const Circuit& circuit, std::uint64_t) const {
    return {entanglement_fitness(circuit), std::nullopt};
}

MlFitness::MlFitness(Dataset dataset, MlOptions options) : dataset_(std::move(dataset)), options_(options) {
    if (dataset_.samples.empty()) throw ConfigError("ML fitness: dataset is empty");
}

std::string MlFitness::describe() const {
    std::ostringstream out;
    out << "ml (RX(pi*x) encoding, <Z0> sign predictor, central-difference gradient descent; train_steps="
        << options_.train_steps << ", learning_rate=" << options_.learning_rate << ", train_seed=" << options_.train_seed
        << ", batch_size=" << options_.batch_size << ", samples=" << dataset_.samples.size() << ")";
    return out.str();
}

Evaluation MlFitness::evaluate(const Circuit& circuit, std::uint64_t stream) const {
    auto outcome = ml_train(circuit, dataset_, options_, stream);
    return {outcome.accuracy, std::move(outcome.trained)};
}

double OptionReader::get_double(const std::string& key, double fallback) {
    auto s = get_string(key);
    if (!s) return fallback;
    auto v = parse_number(*s);
    if (!v) throw ConfigError("fitness." + key + ": expected a number, got '" + *s + "'");
    return *v;
}

long long OptionReader::get_int(const std::string& key, long long fallback) {
    auto s = get_string(key);
    if (!s) return fallback;
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), value);
    if (ec != std::errc{} || ptr != s->data() + s->size()) {
        throw ConfigError("fitness." + key + ": expected an integer, got '" + *s + "'");
    }
    return value;
}

bool OptionReader::get_bool(const std::string& key, bool fallback) {
    auto s = get_string(key);
    if (!s) return fallback;
    if (*s == "true" || *s == "1") return true;
    if (*s == "false" || *s == "0") return false;
    throw ConfigError("fitness." + key + ": expected true or false, got '" + *s + "'");
}

std::optional<std::string> OptionReader::get_string(const std::string& key) {
    used_.insert(key);
    auto it = ctx_.options.find(key);
    if (it == ctx_.options.end()) return std::nullopt;
    return it->second;
}

void OptionReader::finish() const {
    for (const auto& [key, _] : ctx_.options) {
        if (!used_.contains(key)) throw ConfigError("unknown fitness option 'fitness." + key + "'");
    }
}

FitnessRegistry FitnessRegistry::with_builtins() {
    FitnessRegistry reg;
    reg.register_fitness("fidelity", [](const FitnessContext& ctx) -> std::unique_ptr<FitnessFunction> {
        OptionReader opts(ctx);
        const double weight = opts.get_double("depth_weight", 0.0);
        opts.finish();
        if (!ctx.target) throw ConfigError("fidelity fitness needs a target state");
        if (ctx.resolved_min_qubits() != ctx.target->n_qubits() || ctx.resolved_max_qubits() != ctx.target->n_qubits()) {
            throw ConfigError("fidelity fitness needs a fixed width: min_qubits and max_qubits must equal the target's " +
                              std::to_string(ctx.target->n_qubits()) + " qubits");
        }
        return std::make_unique<FidelityFitness>(*ctx.target, weight, ctx.max_depth);
    });
    reg.register_fitness("entanglement", [](const FitnessContext& ctx) -> std::unique_ptr<FitnessFunction> {
        OptionReader(ctx).finish();
        if (ctx.resolved_min_qubits() < 2) throw ConfigError("entanglement fitness needs at least 2 qubits (check min_qubits)");
        return std::make_unique<EntanglementFitness>();
    });
    reg.register_fitness("ml", [](const FitnessContext& ctx) -> std::unique_ptr<FitnessFunction> {
        OptionReader opts(ctx);
        const auto path = opts.get_string("dataset");
        MlOptions ml;
        ml.train_steps = static_cast<int>(opts.get_int("train_steps", ml.train_steps));
        ml.learning_rate = opts.get_double("learning_rate", ml.learning_rate);
        ml.train_seed = static_cast<std::uint64_t>(opts.get_int("train_seed", 0));
        ml.finite_difference_step = opts.get_double("fd_step", ml.finite_difference_step);
        ml.batch_size = static_cast<int>(opts.get_int("batch_size", 0));
        opts.finish();
        if (!path) throw ConfigError("ml fitness needs fitness.dataset = <csv file>");
        std::filesystem::path p(*path);
        if (p.is_relative()) p = ctx.base_dir / p;
        Dataset data = Dataset::load_csv(p);
        if (data.feature_dim() > static_cast<std::size_t>(ctx.resolved_min_qubits())) {
            throw ConfigError("ml fitness: dataset has " + std::to_string(data.feature_dim()) +
                              " features, more than min_qubits allows");
        }
        return std::make_unique<MlFitness>(std::move(data), ml);
    });
    return reg;
}

void FitnessRegistry::register_fitness(const std::string& name, FitnessConstructor constructor) {
    if (name.empty()) throw ConfigError("fitness name must not be empty");
    if (!entries_.emplace(name, std::move(constructor)).second) {
        throw ConfigError("fitness function '" + name + "' is already registered");
    }
}

const FitnessConstructor& FitnessRegistry::lookup(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) {
        std::string known;
        for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown fitness function '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

std::unique_ptr<FitnessFunction> FitnessRegistry::create(const std::string& name, const FitnessContext& ctx) const {
    return lookup(name)(ctx);
}

std::vector<std::string> FitnessRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : entries_) out.push_back(name);
    return out;
}

}  // namespace qga
