#include "qga/circuit.hpp"

#include "qga/errors.hpp"
#include "qga/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qga {

std::string_view role_name(Role role) {
    switch (role) {
        case Role::Single: return "single";
        case Role::Control: return "control";
        case Role::Target: return "target";
        case Role::Affected: return "affected";
    }
    return "?";
}

Role parse_role(std::string_view name) {
    for (Role r : {Role::Single, Role::Control, Role::Target, Role::Affected}) {
        if (role_name(r) == name) return r;
    }
    throw ParseError("unknown gate role '" + std::string(name) + "'");
}

Circuit::Circuit(int n_qubits, int depth) : n_qubits_(n_qubits), depth_(depth) {
    if (n_qubits < 1 || n_qubits > kMaxSimulatedQubits) {
        throw ConfigError("circuit width must be in [1, " + std::to_string(kMaxSimulatedQubits) +
                          "], got " + std::to_string(n_qubits));
    }
    if (depth < 1) throw ConfigError("circuit depth must be >= 1, got " + std::to_string(depth));
    cells_.assign(static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(depth), Gate::identity());
}

Circuit& Circuit::set(int row, int col, Gate gate) {
    at(row, col) = gate;
    return *this;
}

Circuit& Circuit::place(int row, int col, GateKind kind, std::optional<double> theta) {
    return set(row, col, Gate::single(kind, theta));
}

Circuit& Circuit::place_two(GateKind kind, int control, int target, int col) {
    set(control, col, Gate{kind, Role::Control, std::nullopt, target});
    set(target, col, Gate{kind, Role::Target, std::nullopt, control});
    return *this;
}

namespace {

std::string cell_ref(int row, int col) {
    return "cell (" + std::to_string(row) + ", " + std::to_string(col) + ")";
}

Role complement(Role role) { return role == Role::Control ? Role::Target : Role::Control; }

// Both halves of a two-qubit gate reference each other consistently.
bool pair_intact(const Circuit& c, int row, int col) {
    const Gate& g = c.at(row, col);
    if (!g.is_two_qubit() || arity(g.kind) != 2 || g.theta || !g.partner) return false;
    const int p = *g.partner;
    if (p < 0 || p >= c.n_qubits() || p == row) return false;
    const Gate& other = c.at(p, col);
    return other.kind == g.kind && other.role == complement(g.role) && other.partner == row && !other.theta;
}

}  // namespace

std::optional<std::string> Circuit::find_violation() const {
    for (int col = 0; col < depth_; ++col) {
        for (int row = 0; row < n_qubits_; ++row) {
            const Gate& g = at(row, col);
            const auto info = gate_info(g.kind);
            if (info.parameterized != g.theta.has_value()) {
                return cell_ref(row, col) + ": " + std::string(info.name) +
                       (info.parameterized ? " is missing its angle" : " must not carry an angle");
            }
            if (g.theta && !std::isfinite(*g.theta)) return cell_ref(row, col) + ": angle is not finite";
            if (g.role == Role::Affected) {
                return cell_ref(row, col) + ": role 'affected' is unsupported (no gates above two qubits)";
            }
            if (info.arity == 1) {
                if (g.role != Role::Single) return cell_ref(row, col) + ": 1-qubit gate with a two-qubit role";
                if (g.partner) return cell_ref(row, col) + ": 1-qubit gate with a partner";
                continue;
            }
            if (g.role == Role::Single) {
                return cell_ref(row, col) + ": " + std::string(info.name) + " needs a control or target role";
            }
            if (!g.partner) return cell_ref(row, col) + ": two-qubit cell without partner";
            if (!pair_intact(*this, row, col)) {
                return cell_ref(row, col) + ": partner row " + std::to_string(*g.partner) +
                       " does not hold the matching half of " + std::string(info.name);
            }
        }
    }
    return std::nullopt;
}

void Circuit::validate() const {
    if (auto v = find_violation()) throw StructuralError("malformed circuit: " + *v);
}

std::vector<double> Circuit::parameters() const {
    std::vector<double> out;
    for (const Gate& g : cells_) {
        if (g.theta) out.push_back(*g.theta);
    }
    return out;
}

Circuit Circuit::with_parameters(std::span<const double> values) const {
    Circuit out = *this;
    std::size_t next = 0;
    for (Gate& g : out.cells_) {
        if (!g.theta) continue;
        if (next >= values.size()) throw ContractViolation("too few parameter values");
        g.theta = values[next++];
    }
    if (next != values.size()) throw ContractViolation("too many parameter values");
    return out;
}

double random_angle(Rng& rng) { return uniform_real(rng, -std::numbers::pi, std::numbers::pi); }

GateKind random_kind(const GateSet& gate_set, Rng& rng) {
    return pick<GateKind>(rng, gate_set.kinds());
}

namespace {

Gate random_single(const GateSet& gate_set, Rng& rng) {
    const auto kinds = gate_set.single_qubit_kinds();
    const GateKind kind = pick<GateKind>(rng, kinds);
    return Gate::single(kind, is_parameterized(kind) ? std::optional(random_angle(rng)) : std::nullopt);
}

}  // namespace

void fill_random_column(Circuit& circuit, int col, const GateSet& gate_set, Rng& rng) {
    const int n = circuit.n_qubits();
    std::vector<int> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);
    std::ranges::shuffle(rows, rng);
    std::vector<bool> free(static_cast<std::size_t>(n), true);

    for (int row : rows) {
        if (!free[row]) continue;
        GateKind kind = random_kind(gate_set, rng);
        if (arity(kind) == 2) {
            std::vector<int> others;
            for (int r = 0; r < n; ++r) {
                if (r != row && free[r]) others.push_back(r);
            }
            if (!others.empty()) {
                const int partner = pick<int>(rng, others);
                circuit.place_two(kind, row, partner, col);
                free[row] = free[partner] = false;
                continue;
            }
            circuit.set(row, col, random_single(gate_set, rng));
        } else {
            circuit.place(row, col, kind, is_parameterized(kind) ? std::optional(random_angle(rng)) : std::nullopt);
        }
        free[row] = false;
    }
}

Circuit random_circuit(int n_qubits, int depth, const GateSet& gate_set, Rng& rng) {
    if (gate_set.empty()) throw ConfigError("gate set is empty");
    const bool has_single = std::ranges::any_of(gate_set.kinds(), [](GateKind k) { return arity(k) == 1; });
    if (n_qubits == 1 && !has_single) {
        throw ConfigError("a 1-qubit circuit cannot be filled from a gate set with only 2-qubit gates");
    }
    Circuit circuit(n_qubits, depth);
    for (int col = 0; col < depth; ++col) fill_random_column(circuit, col, gate_set, rng);
    return circuit;
}

Circuit pad_to(const Circuit& circuit, int n_qubits, int depth) {
    if (n_qubits < circuit.n_qubits() || depth < circuit.depth()) {
        throw ContractViolation("pad_to cannot shrink a " + std::to_string(circuit.n_qubits()) + "x" +
                                std::to_string(circuit.depth()) + " circuit to " + std::to_string(n_qubits) +
                                "x" + std::to_string(depth));
    }
    Circuit out(n_qubits, depth);
    for (int row = 0; row < circuit.n_qubits(); ++row) {
        for (int col = 0; col < circuit.depth(); ++col) out.set(row, col, circuit.at(row, col));
    }
    return out;
}

Circuit repair(const Circuit& circuit, const GateSet& gate_set, Rng& rng) {
    if (circuit.is_valid()) return circuit;
    Circuit out = circuit;
    const int n = out.n_qubits();

    for (int col = 0; col < out.depth(); ++col) {
        for (int row = 0; row < n; ++row) {
            Gate& g = out.at(row, col);
            if (arity(g.kind) == 1) {
                // stray roles or angles on 1-qubit cells
                if (g.role != Role::Single || g.partner || is_parameterized(g.kind) != g.theta.has_value()) {
                    const bool param = is_parameterized(g.kind);
                    g = Gate::single(g.kind, param ? std::optional(g.theta.value_or(random_angle(rng))) : std::nullopt);
                }
                continue;
            }
            if (pair_intact(out, row, col)) continue;

            const Role role = g.is_two_qubit() ? g.role : Role::Control;
            int partner = -1;
            for (int dist = 1; dist < n && partner < 0; ++dist) {
                for (int cand : {row - dist, row + dist}) {
                    if (cand >= 0 && cand < n && out.at(cand, col).is_identity()) {
                        partner = cand;
                        break;
                    }
                }
            }
            if (partner < 0) {
                std::vector<int> singles;
                std::vector<int> dangling;
                for (int r = 0; r < n; ++r) {
                    if (r == row) continue;
                    const Gate& o = out.at(r, col);
                    if (arity(o.kind) == 1) singles.push_back(r);
                    else if (!pair_intact(out, r, col)) dangling.push_back(r);
                }
                if (!singles.empty()) partner = pick<int>(rng, singles);
                else if (!dangling.empty()) partner = pick<int>(rng, dangling);
            }
            if (partner < 0) {
                out.set(row, col, random_single(gate_set, rng));
                continue;
            }
            out.set(row, col, Gate{g.kind, role, std::nullopt, partner});
            out.set(partner, col, Gate{out.at(row, col).kind, complement(role), std::nullopt, row});
        }
    }
    return out;
}

}  // namespace qga
