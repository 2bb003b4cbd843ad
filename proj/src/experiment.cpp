#include "qga/experiment.hpp"

#include "qga/circuit_io.hpp"
#include "qga/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <ostream>
#include <sstream>
#include <thread>

namespace qga {

namespace fs = std::filesystem;

std::string_view to_string(TargetSource t) { return t == TargetSource::RandomCircuit ? "random" : "file"; }

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(',', start);
        out.push_back(trim(s.substr(start, pos == s.npos ? s.npos : pos - start)));
        if (pos == s.npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
T parse_int(std::string_view v) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) throw ConfigError("expected an integer, got '" + std::string(v) + "'");
    return out;
}

double parse_double(std::string_view v) {
    double out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
        throw ConfigError("expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

bool parse_bool(std::string_view v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("expected true or false, got '" + std::string(v) + "'");
}

template <class E, std::size_t N>
E parse_enum(std::string_view v, const E (&values)[N]) {
    std::string known;
    for (E e : values) {
        if (to_string(e) == v) return e;
        known += (known.empty() ? "" : ", ") + std::string(to_string(e));
    }
    throw ConfigError("expected one of " + known + ", got '" + std::string(v) + "'");
}

constexpr CrossoverMethod kCrossovers[] = {CrossoverMethod::SinglePoint, CrossoverMethod::MultiPoint, CrossoverMethod::Blockwise};
constexpr SelectionMethod kSelections[] = {SelectionMethod::Random, SelectionMethod::Tournament, SelectionMethod::Roulette};
constexpr SurvivorMethod kSurvivors[] = {SurvivorMethod::Truncation, SurvivorMethod::Tournament, SurvivorMethod::Roulette};
constexpr CrossoverChildren kChildren[] = {CrossoverChildren::Both, CrossoverChildren::One};
constexpr TargetSource kTargets[] = {TargetSource::RandomCircuit, TargetSource::StatevectorFile};

struct Key {
    const char* name;
    std::function<void(ExperimentSpec&, std::string_view)> set;
    // nullopt: key is unset and is left out of serialize_config()
    std::function<std::optional<std::string>(const ExperimentSpec&)> get;
};

template <class T>
std::optional<std::string> opt_int(const std::optional<T>& v) {
    if (!v) return std::nullopt;
    return std::to_string(*v);
}

const std::vector<Key>& keys() {
    using S = ExperimentSpec;
    using V = std::string_view;
    static const std::vector<Key> table = {
        {"population_size", [](S& s, V v) { s.run_config.population_size = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.population_size)); }},
        {"generations", [](S& s, V v) { s.run_config.generations = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.generations)); }},
        {"n_qubits", [](S& s, V v) { s.run_config.n_qubits = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.n_qubits)); }},
        {"depth", [](S& s, V v) { s.run_config.depth = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.depth)); }},
        {"min_qubits", [](S& s, V v) { s.run_config.min_qubits = parse_int<int>(v); },
         [](const S& s) { return opt_int(s.run_config.min_qubits); }},
        {"max_qubits", [](S& s, V v) { s.run_config.max_qubits = parse_int<int>(v); },
         [](const S& s) { return opt_int(s.run_config.max_qubits); }},
        {"min_depth", [](S& s, V v) { s.run_config.min_depth = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.min_depth)); }},
        {"max_depth", [](S& s, V v) { s.run_config.max_depth = parse_int<int>(v); },
         [](const S& s) { return opt_int(s.run_config.max_depth); }},
        {"crossover_prob", [](S& s, V v) { s.run_config.crossover_prob = parse_double(v); },
         [](const S& s) { return std::optional(format_real(s.run_config.crossover_prob)); }},
        {"mutation_prob", [](S& s, V v) { s.run_config.mutation_prob = parse_double(v); },
         [](const S& s) { return std::optional(format_real(s.run_config.mutation_prob)); }},
        {"crossover_method", [](S& s, V v) { s.run_config.crossover_method = parse_enum(v, kCrossovers); },
         [](const S& s) { return std::optional(std::string(to_string(s.run_config.crossover_method))); }},
        {"crossover_points", [](S& s, V v) { s.run_config.crossover_points = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.crossover_points)); }},
        {"crossover_children", [](S& s, V v) { s.run_config.crossover_children = parse_enum(v, kChildren); },
         [](const S& s) { return std::optional(std::string(to_string(s.run_config.crossover_children))); }},
        {"parent_selection", [](S& s, V v) { s.run_config.parent_selection = parse_enum(v, kSelections); },
         [](const S& s) { return std::optional(std::string(to_string(s.run_config.parent_selection))); }},
        {"survivor_selection", [](S& s, V v) { s.run_config.survivor_selection = parse_enum(v, kSurvivors); },
         [](const S& s) { return std::optional(std::string(to_string(s.run_config.survivor_selection))); }},
        {"tournament_size", [](S& s, V v) { s.run_config.tournament_size = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.tournament_size)); }},
        {"elitism", [](S& s, V v) { s.run_config.elitism = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.elitism)); }},
        {"children_per_generation", [](S& s, V v) { s.run_config.children_per_generation = parse_int<int>(v); },
         [](const S& s) { return opt_int(s.run_config.children_per_generation); }},
        {"gate_set", [](S& s, V v) { s.run_config.gate_set = GateSet::parse(v); },
         [](const S& s) { return std::optional(s.run_config.gate_set.to_string()); }},
        {"mutation_weights",
         [](S& s, V v) {
             const auto parts = split_list(v);
             if (parts.size() != kAllMutations.size()) {
                 throw ConfigError("expected 6 weights (gate_flip, swap_control, qubit_count, gate_count, swap_columns, parameter)");
             }
             for (std::size_t i = 0; i < parts.size(); ++i) s.run_config.mutation_weights[i] = parse_double(parts[i]);
         },
         [](const S& s) {
             std::string out;
             for (double w : s.run_config.mutation_weights) out += (out.empty() ? "" : ",") + format_real(w);
             return std::optional(out);
         }},
        {"parameter_sigma", [](S& s, V v) { s.run_config.parameter_sigma = parse_double(v); },
         [](const S& s) { return std::optional(format_real(s.run_config.parameter_sigma)); }},
        {"fitness", [](S& s, V v) { s.run_config.fitness = std::string(v); },
         [](const S& s) { return std::optional(s.run_config.fitness); }},
        {"lamarckian", [](S& s, V v) { s.run_config.lamarckian = parse_bool(v); },
         [](const S& s) { return std::optional(std::string(s.run_config.lamarckian ? "true" : "false")); }},
        {"seed", [](S& s, V v) { s.run_config.seed = parse_int<std::uint64_t>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.seed)); }},
        {"threads", [](S& s, V v) { s.run_config.threads = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.run_config.threads)); }},
        {"n_repeats", [](S& s, V v) { s.n_repeats = parse_int<int>(v); },
         [](const S& s) { return std::optional(std::to_string(s.n_repeats)); }},
        {"target", [](S& s, V v) { s.target_source = parse_enum(v, kTargets); },
         [](const S& s) { return std::optional(std::string(to_string(s.target_source))); }},
        {"target_seeds",
         [](S& s, V v) {
             s.target_seeds.clear();
             for (auto part : split_list(v)) s.target_seeds.push_back(parse_int<std::uint64_t>(part));
         },
         [](const S& s) {
             std::string out;
             for (auto seed : s.target_seeds) out += (out.empty() ? "" : ",") + std::to_string(seed);
             return std::optional(out);
         }},
        {"target_depth", [](S& s, V v) { s.target_depth = parse_int<int>(v); },
         [](const S& s) { return opt_int(s.target_depth); }},
        {"target_gate_set", [](S& s, V v) { s.target_gate_set = GateSet::parse(v); },
         [](const S& s) { return std::optional(s.target_gate_set.to_string()); }},
        {"target_file", [](S& s, V v) { s.target_file = fs::path(std::string(v)); },
         [](const S& s) -> std::optional<std::string> {
             if (s.target_file.empty()) return std::nullopt;
             return s.target_file.generic_string();
         }},
        {"output_dir", [](S& s, V v) { s.output_dir = fs::path(std::string(v)); },
         [](const S& s) { return std::optional(s.output_dir.generic_string()); }},
    };
    return table;
}

std::string read_file(const fs::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(std::string("cannot open ") + what + " '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

ExperimentSpec parse_config_text(std::string_view text) {
    ExperimentSpec spec;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == text.npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const std::string where = "line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == line.npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");
        if (value.empty()) throw ConfigError(where + ", key '" + key + "': missing value");
        if (!seen.insert(key).second) throw ConfigError(where + ", key '" + key + "': duplicate key");

        try {
            if (key.starts_with("fitness.")) {
                const std::string option = key.substr(8);
                if (option.empty()) throw ConfigError("empty fitness option name");
                spec.run_config.fitness_options[option] = std::string(value);
            } else {
                const auto& table = keys();
                const auto it = std::ranges::find_if(table, [&](const Key& k) { return key == k.name; });
                if (it == table.end()) throw ConfigError("unknown key");
                it->set(spec, value);
            }
        } catch (const ConfigError& e) {
            throw ConfigError(where + ", key '" + key + "': " + e.what());
        }
        if (end == text.size()) break;
    }

    try {
        spec.run_config.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    if (spec.n_repeats < 1) throw ConfigError("invalid configuration: n_repeats must be >= 1");
    if (spec.target_source == TargetSource::RandomCircuit && spec.target_seeds.empty()) {
        throw ConfigError("invalid configuration: target_seeds must not be empty");
    }
    if (spec.target_depth && *spec.target_depth < 1) throw ConfigError("invalid configuration: target_depth must be >= 1");
    if (spec.target_gate_set.empty()) throw ConfigError("invalid configuration: target_gate_set must not be empty");
    if (spec.target_source == TargetSource::StatevectorFile && spec.target_file.empty()) {
        throw ConfigError("invalid configuration: target = file needs target_file");
    }
    return spec;
}

ExperimentSpec parse_config(const fs::path& path) { return parse_config_text(read_file(path, "config file")); }

std::string serialize_config(const ExperimentSpec& spec) {
    std::string out;
    for (const auto& key : keys()) {
        if (auto v = key.get(spec)) out += std::string(key.name) + " = " + *v + "\n";
    }
    for (const auto& [option, value] : spec.run_config.fitness_options) out += "fitness." + option + " = " + value + "\n";
    return out;
}

std::string format_statevector(const StateVector& state) {
    std::string out;
    for (const Complex& a : state.amplitudes()) out += format_real(a.real()) + " " + format_real(a.imag()) + "\n";
    return out;
}

StateVector parse_statevector(std::string_view text) {
    std::vector<Complex> amps;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream fields(line);
        std::string re, im, extra;
        if (!(fields >> re >> im) || (fields >> extra)) {
            throw ParseError("statevector line " + std::to_string(line_no) + ": expected 're im'");
        }
        try {
            amps.emplace_back(parse_double(re), parse_double(im));
        } catch (const ConfigError& e) {
            throw ParseError("statevector line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    try {
        return StateVector::from_amplitudes(std::move(amps));
    } catch (const std::exception& e) {
        throw ParseError(std::string("statevector: ") + e.what());
    }
}

StateVector load_statevector(const fs::path& path) { return parse_statevector(read_file(path, "statevector file")); }

std::string trace_csv(const std::vector<GenerationRecord>& trace) {
    if (trace.empty()) throw ContractViolation("trace is empty");
    std::string out = "generation,best_fitness,mean_fitness,baseline_best_fitness\n";
    for (const auto& r : trace) {
        out += std::to_string(r.generation) + "," + format_real(r.best_fitness) + "," + format_real(r.mean_fitness) + "," +
               (r.baseline_best_fitness ? format_real(*r.baseline_best_fitness) : std::string()) + "\n";
    }
    return out;
}

void emit_trace_csv(const std::vector<GenerationRecord>& trace, const fs::path& path) {
    write_file(path, trace_csv(trace));
}

std::string summary_csv(const ExperimentSummary& summary) {
    std::string out = "target,repeat,best_fitness,final_mean_fitness,baseline_best_fitness\n";
    for (const auto& run : summary.runs) {
        out += std::to_string(run.target_index) + "," + std::to_string(run.repeat) + "," + format_real(run.best_fitness) +
               "," + format_real(run.final_mean_fitness) + "," + format_real(run.baseline_best_fitness) + "\n";
    }
    return out;
}

namespace {

struct Band {
    std::vector<double> mean;
    std::vector<double> half_width;
};

Band aggregate(const ExperimentSummary& summary, const std::function<double(const GenerationRecord&)>& column) {
    const std::size_t len = summary.runs.front().trace.size();
    const auto n = static_cast<double>(summary.runs.size());
    Band band{std::vector<double>(len), std::vector<double>(len, 0.0)};
    for (std::size_t g = 0; g < len; ++g) {
        double sum = 0.0;
        for (const auto& run : summary.runs) sum += column(run.trace[g]);
        const double mean = sum / n;
        band.mean[g] = mean;
        if (summary.runs.size() >= 2) {
            double ss = 0.0;
            for (const auto& run : summary.runs) ss += (column(run.trace[g]) - mean) * (column(run.trace[g]) - mean);
            band.half_width[g] = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
    }
    return band;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string convergence_svg(const ExperimentSummary& summary) {
    if (summary.runs.empty()) throw ContractViolation("convergence plot needs at least one run");
    const std::size_t len = summary.runs.front().trace.size();
    for (const auto& run : summary.runs) {
        if (run.trace.size() != len) throw ContractViolation("runs have traces of different length");
    }
    const bool bands = summary.runs.size() >= 2;
    const Band best = aggregate(summary, [](const GenerationRecord& r) { return r.best_fitness; });
    const Band mean = aggregate(summary, [](const GenerationRecord& r) { return r.mean_fitness; });
    const Band base = aggregate(summary, [](const GenerationRecord& r) { return r.baseline_best_fitness.value_or(0.0); });

    double y_lo = 0.0, y_hi = 1.0;
    for (const Band* b : {&best, &mean, &base}) {
        for (std::size_t g = 0; g < len; ++g) {
            y_lo = std::min(y_lo, b->mean[g] - b->half_width[g]);
            y_hi = std::max(y_hi, b->mean[g] + b->half_width[g]);
        }
    }
    constexpr double W = 800, H = 500, L = 70, R = 170, T = 40, B = 60;
    const double last = static_cast<double>(std::max<std::size_t>(len - 1, 1));
    const int first_gen = summary.runs.front().trace.front().generation;
    auto x = [&](std::size_t g) { return L + (W - L - R) * static_cast<double>(g) / last; };
    auto y = [&](double v) { return T + (H - T - B) * (y_hi - v) / (y_hi - y_lo); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\" "
           "font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt2(L) + "\" y=\"24\" font-size=\"14\">Fitness per generation (" +
           std::to_string(summary.runs.size()) + (summary.runs.size() == 1 ? " run" : " runs, mean and 95% CI") + ")</text>\n";

    // axes and ticks
    svg += "<g stroke=\"#444\" fill=\"none\">\n";
    svg += "<line x1=\"" + fmt2(L) + "\" y1=\"" + fmt2(H - B) + "\" x2=\"" + fmt2(W - R) + "\" y2=\"" + fmt2(H - B) + "\"/>\n";
    svg += "<line x1=\"" + fmt2(L) + "\" y1=\"" + fmt2(T) + "\" x2=\"" + fmt2(L) + "\" y2=\"" + fmt2(H - B) + "\"/>\n";
    svg += "</g>\n<g fill=\"#222\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = y_lo + (y_hi - y_lo) * i / 5.0;
        svg += "<text x=\"" + fmt2(L - 8) + "\" y=\"" + fmt2(y(v) + 4) + "\" text-anchor=\"end\">" + fmt2(v) + "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const auto g = static_cast<std::size_t>(std::llround(last * i / 5.0));
        svg += "<text x=\"" + fmt2(x(g)) + "\" y=\"" + fmt2(H - B + 18) + "\" text-anchor=\"middle\">" +
               std::to_string(first_gen + static_cast<int>(g)) + "</text>\n";
    }
    svg += "<text x=\"" + fmt2((L + W - R) / 2) + "\" y=\"" + fmt2(H - 18) + "\" text-anchor=\"middle\">generation</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt2((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           fmt2((T + H - B) / 2) + ")\">fitness</text>\n";
    svg += "</g>\n";

    struct Series {
        const Band* band;
        const char* label;
        const char* color;
    };
    const Series series[] = {{&best, "best", "#1f77b4"}, {&mean, "average", "#2ca02c"}, {&base, "random baseline", "#d62728"}};
    for (const auto& s : series) {
        if (bands) {
            std::string pts;
            for (std::size_t g = 0; g < len; ++g) pts += fmt2(x(g)) + "," + fmt2(y(s.band->mean[g] + s.band->half_width[g])) + " ";
            for (std::size_t g = len; g-- > 0;) pts += fmt2(x(g)) + "," + fmt2(y(s.band->mean[g] - s.band->half_width[g])) + " ";
            pts.pop_back();
            svg += "<polygon class=\"ci\" points=\"" + pts + "\" fill=\"" + s.color + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        }
        std::string pts;
        for (std::size_t g = 0; g < len; ++g) pts += fmt2(x(g)) + "," + fmt2(y(s.band->mean[g])) + " ";
        pts.pop_back();
        svg += "<polyline class=\"series\" data-label=\"" + std::string(s.label) + "\" points=\"" + pts +
               "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"/>\n";
    }
    double ly = T + 10;
    for (const auto& s : series) {
        svg += "<line x1=\"" + fmt2(W - R + 15) + "\" y1=\"" + fmt2(ly) + "\" x2=\"" + fmt2(W - R + 40) + "\" y2=\"" + fmt2(ly) +
               "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt2(W - R + 46) + "\" y=\"" + fmt2(ly + 4) + "\">" + s.label + "</text>\n";
        ly += 20;
    }
    svg += "</svg>\n";
    return svg;
}

void emit_convergence_svg(const ExperimentSummary& summary, const fs::path& path) {
    write_file(path, convergence_svg(summary));
}

namespace {

struct Target {
    StateVector state;
    std::optional<Circuit> circuit;
};

struct RunJob {
    int target = 0;
    int repeat = 0;
};

std::string run_label(const RunJob& job) { return "t" + std::to_string(job.target) + "/r" + std::to_string(job.repeat); }

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_relative() ? base / p : p; }

// Fills `out` and writes the per-run artifacts. Throws on failure.
void execute_run(const ExperimentSpec& spec, const RunJob& job, const FitnessFunction& fitness,
                 int eval_threads, const fs::path& run_dir, RunSummary& out) {
    fs::create_directories(run_dir);
    RunConfig cfg = spec.run_config;
    cfg.threads = eval_threads;
    auto streams = make_rng_streams(cfg.seed, {run_label(job) + "/ga", run_label(job) + "/baseline"});

    EvolutionResult evo = [&] {
        try {
            return evolve(cfg, fitness, streams.at(run_label(job) + "/ga"));
        } catch (const EvaluationError& e) {
            write_file(run_dir / "failed_individual.json", serialize(e.circuit()));
            throw;
        }
    }();
    const auto baseline = random_baseline(cfg, fitness, streams.at(run_label(job) + "/baseline"));
    attach_baseline(evo.trace, baseline);

    emit_trace_csv(evo.trace, run_dir / "trace.csv");
    write_file(run_dir / "best_circuit.json", serialize(evo.best.circuit));
    write_file(run_dir / "best_circuit.qasm", export_qasm(evo.best.circuit));

    out.target_index = job.target;
    out.repeat = job.repeat;
    out.trace = evo.trace;
    out.best_fitness = -std::numeric_limits<double>::infinity();
    out.baseline_best_fitness = -std::numeric_limits<double>::infinity();
    for (const auto& r : evo.trace) {
        out.best_fitness = std::max(out.best_fitness, r.best_fitness);
        out.baseline_best_fitness = std::max(out.baseline_best_fitness, *r.baseline_best_fitness);
    }
    out.final_mean_fitness = evo.trace.back().mean_fitness;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
    ExperimentResult result;
    auto log = [&](const std::string& line) {
        if (options.log) *options.log << line << '\n';
    };
    const fs::path out_dir = spec.output_dir;

    // Everything that can fail on configuration happens before the first generation.
    std::vector<Target> targets;
    std::vector<std::unique_ptr<FitnessFunction>> fitness;
    try {
        spec.run_config.validate();
        if (spec.n_repeats < 1) throw ConfigError("n_repeats must be >= 1");
        const int n = spec.run_config.n_qubits;
        if (spec.target_source == TargetSource::StatevectorFile) {
            StateVector sv = load_statevector(resolve(spec.target_file, options.base_dir));
            if (sv.n_qubits() != n) {
                throw ConfigError("target statevector has " + std::to_string(sv.n_qubits()) + " qubits, n_qubits is " +
                                  std::to_string(n));
            }
            targets.push_back({std::move(sv), std::nullopt});
        } else {
            for (auto seed : spec.target_seeds) {
                Rng rng = make_rng_stream(seed, "target");
                Circuit c = random_circuit(n, spec.target_depth.value_or(spec.run_config.depth), spec.target_gate_set, rng);
                targets.push_back({simulate(c), std::move(c)});
            }
        }
        for (const auto& t : targets) {
            FitnessContext ctx;
            ctx.n_qubits = n;
            ctx.min_qubits = spec.run_config.resolved_min_qubits();
            ctx.max_qubits = spec.run_config.resolved_max_qubits();
            ctx.max_depth = spec.run_config.resolved_max_depth();
            ctx.target = t.state;
            ctx.options = spec.run_config.fitness_options;
            ctx.base_dir = options.base_dir;
            fitness.push_back(options.registry.create(spec.run_config.fitness, ctx));
        }
        fs::create_directories(out_dir);
    } catch (const ConfigError& e) {
        result.exit_code = 2;
        result.error = e.what();
        return result;
    } catch (const ParseError& e) {
        result.exit_code = 2;
        result.error = e.what();
        return result;
    } catch (const fs::filesystem_error& e) {
        result.exit_code = 2;
        result.error = e.what();
        return result;
    }

    try {
        write_file(out_dir / "config.properties", serialize_config(spec));
        std::string notes;
        notes += "fitness: " + fitness.front()->describe() + "\n";
        notes += "targets: " + std::to_string(targets.size()) + ", repeats: " + std::to_string(spec.n_repeats) + "\n";
        notes += "assumption: crossover/mutation probabilities, selection methods, elitism and survivor rule are library "
                 "defaults unless set in the config (config.properties lists the values used)\n";
        notes += "assumption: depth counts grid columns; targets come from this library's random_circuit\n";
        if (spec.run_config.fitness == "ml") {
            notes += "assumption: ML model (RX(pi*x) encoding, <Z0> sign readout, finite-difference descent) is a design "
                     "choice, lamarckian=" + std::string(spec.run_config.lamarckian ? "true" : "false") + "\n";
        }
        write_file(out_dir / "run.log", notes);
        for (std::size_t t = 0; t < targets.size(); ++t) {
            if (!targets[t].circuit) continue;
            const fs::path dir = out_dir / ("target_" + std::to_string(t));
            fs::create_directories(dir);
            write_file(dir / "target_statevector.txt", format_statevector(targets[t].state));
            write_file(dir / "target_circuit.json", serialize(*targets[t].circuit));
        }
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.error = e.what();
        return result;
    }

    std::vector<RunJob> jobs;
    for (int t = 0; t < static_cast<int>(targets.size()); ++t) {
        for (int r = 0; r < spec.n_repeats; ++r) jobs.push_back({t, r});
    }
    std::vector<RunSummary> summaries(jobs.size());
    std::vector<std::string> errors(jobs.size());
    const int threads = spec.run_config.threads;
    const int run_workers = std::min<int>(threads, static_cast<int>(jobs.size()));
    const int eval_threads = run_workers > 1 ? 1 : threads;
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            const RunJob& job = jobs[k];
            const fs::path run_dir = out_dir / ("target_" + std::to_string(job.target)) / ("run_" + std::to_string(job.repeat));
            try {
                execute_run(spec, job, *fitness[static_cast<std::size_t>(job.target)], eval_threads, run_dir, summaries[k]);
                std::lock_guard lock(log_mutex);
                log("target " + std::to_string(job.target) + " run " + std::to_string(job.repeat) + ": best " +
                    format_real(summaries[k].best_fitness) + ", baseline " + format_real(summaries[k].baseline_best_fitness));
            } catch (const std::exception& e) {
                errors[k] = e.what();
                std::lock_guard lock(log_mutex);
                log("target " + std::to_string(job.target) + " run " + std::to_string(job.repeat) + " failed: " + e.what());
            }
        }
    };
    if (run_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < run_workers; ++i) pool.emplace_back(worker);
    }

    for (std::size_t k = 0; k < jobs.size(); ++k) {
        if (errors[k].empty()) {
            result.summary.runs.push_back(std::move(summaries[k]));
        } else if (result.error.empty()) {
            result.error = run_label(jobs[k]) + ": " + errors[k];
        }
    }
    try {
        write_file(out_dir / "summary.csv", summary_csv(result.summary));
        if (!result.summary.runs.empty()) emit_convergence_svg(result.summary, out_dir / "convergence.svg");
    } catch (const std::exception& e) {
        if (result.error.empty()) result.error = e.what();
    }
    result.exit_code = result.error.empty() ? 0 : 1;
    return result;
}

}  // namespace qga
