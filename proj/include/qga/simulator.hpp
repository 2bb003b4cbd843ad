#pragma once

#include "qga/gates.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace qga {

class Circuit;

inline constexpr int kMaxSimulatedQubits = 20;

/// Normalized pure state of n qubits. Qubit k is bit k of the amplitude index.
class StateVector {
public:
    /// Validates length (a power of two, 1..2^20) and normalization within `tolerance`.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes, double tolerance = 1e-9);

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dimension() const { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const { return amplitudes_; }
    [[nodiscard]] Complex operator[](std::size_t index) const { return amplitudes_[index]; }

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    StateVector(int n_qubits, std::vector<Complex> amplitudes)
        : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

    int n_qubits_ = 0;
    std::vector<Complex> amplitudes_;

    friend StateVector zero_state(int);
    friend StateVector apply_gate(const StateVector&, GateKind, std::optional<double>, std::span<const int>);
    friend StateVector simulate(const Circuit&, const StateVector&);
};

/// Reduced state of a subset of qubits.
class DensityMatrix {
public:
    /// Checks dimension 2^n_qubits, Hermiticity and unit trace within `tolerance`.
    static DensityMatrix from_matrix(Eigen::MatrixXcd entries, double tolerance = 1e-9);

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] const Eigen::MatrixXcd& entries() const { return entries_; }

private:
    DensityMatrix(int n_qubits, Eigen::MatrixXcd entries)
        : n_qubits_(n_qubits), entries_(std::move(entries)) {}

    int n_qubits_ = 0;
    Eigen::MatrixXcd entries_;

    friend DensityMatrix partial_trace(const StateVector&, std::span<const int>);
};

/// |0...0> on n qubits, 1 <= n <= 20; ConfigError otherwise.
StateVector zero_state(int n_qubits);

/// Applies one gate. For 2-qubit kinds targets = {control, target}.
StateVector apply_gate(const StateVector& state, GateKind kind, std::optional<double> theta,
                       std::span<const int> targets);

/// Runs the circuit column by column from |0...0>.
StateVector simulate(const Circuit& circuit);

/// Runs the circuit on `initial`, which must have the circuit's width.
StateVector simulate(const Circuit& circuit, const StateVector& initial);

/// Squared overlap |<a|b>|^2, clamped to [0, 1].
double fidelity(const StateVector& a, const StateVector& b);

/// Density matrix of the qubits in `keep` (nonempty proper subset). Kept qubits are re-indexed
/// in ascending order, again little-endian.
DensityMatrix partial_trace(const StateVector& state, std::span<const int> keep);

/// -sum(l * log2 l) over eigenvalues; eigenvalues below 1e-12 count as zero.
double von_neumann_entropy(const DensityMatrix& rho);

/// <Z> on a single qubit.
double expectation_z(const StateVector& state, int qubit);

}  // namespace qga
