#pragma once

#include "qga/gates.hpp"
#include "qga/random.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qga {

/// How a grid cell takes part in its gate. Affected is reserved for gates on more than two
/// qubits, which no supported gate set contains; the checker rejects it.
enum class Role { Single, Control, Target, Affected };

std::string_view role_name(Role role);
Role parse_role(std::string_view name);

/// One cell of the grid. Two-qubit gates occupy two cells of the same column that name each
/// other through `partner`.
struct Gate {
    GateKind kind = GateKind::Id;
    Role role = Role::Single;
    std::optional<double> theta;
    std::optional<int> partner;

    static Gate single(GateKind kind, std::optional<double> theta = std::nullopt) {
        return {kind, Role::Single, theta, std::nullopt};
    }
    static Gate identity() { return {}; }

    [[nodiscard]] bool is_identity() const { return kind == GateKind::Id; }
    [[nodiscard]] bool is_two_qubit() const { return role == Role::Control || role == Role::Target; }

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// An individual: n_qubits rows by depth columns of gates, executed column by column.
class Circuit {
public:
    /// All-identity grid. ConfigError when n_qubits is outside [1, 20] or depth < 1.
    Circuit(int n_qubits, int depth);

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] int depth() const { return depth_; }

    [[nodiscard]] const Gate& at(int row, int col) const { return cells_[index(row, col)]; }
    Gate& at(int row, int col) { return cells_[index(row, col)]; }

    /// Overwrites one cell without touching any partner.
    Circuit& set(int row, int col, Gate gate);
    Circuit& place(int row, int col, GateKind kind, std::optional<double> theta = std::nullopt);
    Circuit& place_two(GateKind kind, int control, int target, int col);

    /// First invariant violation as "cell (row, col): reason", or nullopt.
    [[nodiscard]] std::optional<std::string> find_violation() const;
    [[nodiscard]] bool is_valid() const { return !find_violation(); }
    /// Throws StructuralError naming the offending cell.
    void validate() const;

    /// Angles of the parameterized cells in row-major order.
    [[nodiscard]] std::vector<double> parameters() const;
    [[nodiscard]] Circuit with_parameters(std::span<const double> values) const;

    friend bool operator==(const Circuit&, const Circuit&) = default;

private:
    [[nodiscard]] std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(depth_) + static_cast<std::size_t>(col);
    }

    int n_qubits_;
    int depth_;
    std::vector<Gate> cells_;  // row-major
};

/// Angle for a freshly drawn parameterized gate: uniform in [-pi, pi].
double random_angle(Rng& rng);

/// Gate kind drawn uniformly from `gate_set`.
GateKind random_kind(const GateSet& gate_set, Rng& rng);

/// Refills column `col` with random gates: 2-qubit kinds land on two free rows, leftover
/// rows get 1-qubit kinds (Id when the set has none).
void fill_random_column(Circuit& circuit, int col, const GateSet& gate_set, Rng& rng);

Circuit random_circuit(int n_qubits, int depth, const GateSet& gate_set, Rng& rng);

/// Grows the grid to n_qubits x depth, anchoring existing cells top-left and filling with Id.
Circuit pad_to(const Circuit& circuit, int n_qubits, int depth);

/// Completes every dangling two-qubit cell. A dangling cell keeps its kind and role and
/// gets the nearest Id row of its column as partner (ties to the lower row), else a random
/// row holding a 1-qubit gate, else another dangling cell. With no candidate at all the cell
/// becomes a random 1-qubit gate from `gate_set`. Valid circuits are returned unchanged
/// without consuming randomness.
Circuit repair(const Circuit& circuit, const GateSet& gate_set, Rng& rng);

}  // namespace qga
