#include "qga/simulator.hpp"

#include "qga/circuit.hpp"
#include "qga/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace qga {

namespace {

void apply_single(std::vector<Complex>& amps, const Eigen::Matrix2cd& u, int qubit) {
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + stride;
            const Complex a0 = amps[i0];
            const Complex a1 = amps[i1];
            amps[i0] = u(0, 0) * a0 + u(0, 1) * a1;
            amps[i1] = u(1, 0) * a0 + u(1, 1) * a1;
        }
    }
}

void apply_controlled(std::vector<Complex>& amps, GateKind kind, int control, int target) {
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (!(i & cmask)) continue;
        if (kind == GateKind::CX) {
            if (!(i & tmask)) std::swap(amps[i], amps[i | tmask]);
        } else if (i & tmask) {
            amps[i] = -amps[i];
        }
    }
}

void apply_in_place(std::vector<Complex>& amps, GateKind kind, std::optional<double> theta, int q0, int q1) {
    if (kind == GateKind::Id) return;
    if (arity(kind) == 2) {
        apply_controlled(amps, kind, q0, q1);
        return;
    }
    const Eigen::Matrix2cd u = gate_matrix(kind, theta);
    apply_single(amps, u, q0);
}

}  // namespace

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes, double tolerance) {
    const std::size_t dim = amplitudes.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) {
        throw ContractViolation("statevector length " + std::to_string(dim) + " is not a power of two >= 2");
    }
    const int n = std::countr_zero(dim);
    if (n > kMaxSimulatedQubits) throw ConfigError("statevector exceeds 20 qubits");
    double norm = 0.0;
    for (const Complex& a : amplitudes) norm += std::norm(a);
    if (std::abs(norm - 1.0) > tolerance) {
        throw ContractViolation("statevector is not normalized (squared norm " + std::to_string(norm) + ")");
    }
    return StateVector(n, std::move(amplitudes));
}

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd entries, double tolerance) {
    const auto dim = static_cast<std::size_t>(entries.rows());
    if (entries.rows() != entries.cols() || dim < 2 || (dim & (dim - 1)) != 0) {
        throw ContractViolation("density matrix must be square with power-of-two dimension");
    }
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > tolerance) {
        throw ContractViolation("density matrix is not Hermitian");
    }
    if (std::abs(entries.trace() - Complex(1.0)) > tolerance) {
        throw ContractViolation("density matrix trace is not 1");
    }
    return DensityMatrix(std::countr_zero(dim), std::move(entries));
}

StateVector zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxSimulatedQubits) {
        throw ConfigError("qubit count must be in [1, 20], got " + std::to_string(n_qubits));
    }
    std::vector<Complex> amps(std::size_t{1} << n_qubits, Complex{});
    amps[0] = 1.0;
    return StateVector(n_qubits, std::move(amps));
}

StateVector apply_gate(const StateVector& state, GateKind kind, std::optional<double> theta,
                       std::span<const int> targets) {
    const int want = arity(kind);
    if (static_cast<int>(targets.size()) != want) {
        throw ContractViolation(std::string(gate_name(kind)) + " acts on " + std::to_string(want) + " qubit(s)");
    }
    for (int t : targets) {
        if (t < 0 || t >= state.n_qubits()) throw ContractViolation("qubit index " + std::to_string(t) + " out of range");
    }
    if (want == 2 && targets[0] == targets[1]) throw ContractViolation("duplicate qubit in two-qubit gate");
    if (is_parameterized(kind) != theta.has_value()) {
        gate_matrix(kind, theta);  // throws the matching ContractViolation
    }
    std::vector<Complex> amps = state.amplitudes_;
    apply_in_place(amps, kind, theta, targets[0], want == 2 ? targets[1] : -1);
    return StateVector(state.n_qubits(), std::move(amps));
}

StateVector simulate(const Circuit& circuit) { return simulate(circuit, zero_state(circuit.n_qubits())); }

StateVector simulate(const Circuit& circuit, const StateVector& initial) {
    circuit.validate();
    if (initial.n_qubits() != circuit.n_qubits()) {
        throw ContractViolation("initial state width differs from the circuit width");
    }
    std::vector<Complex> amps = initial.amplitudes_;
    for (int col = 0; col < circuit.depth(); ++col) {
        for (int row = 0; row < circuit.n_qubits(); ++row) {
            const Gate& g = circuit.at(row, col);
            switch (g.role) {
                case Role::Single: apply_in_place(amps, g.kind, g.theta, row, -1); break;
                case Role::Control: apply_in_place(amps, g.kind, std::nullopt, row, *g.partner); break;
                default: break;
            }
        }
    }
    return StateVector(circuit.n_qubits(), std::move(amps));
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw ContractViolation("fidelity between " + std::to_string(a.n_qubits()) + "- and " +
                                std::to_string(b.n_qubits()) + "-qubit states");
    }
    Complex overlap{};
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) overlap += std::conj(x[i]) * y[i];
    return std::clamp(std::norm(overlap), 0.0, 1.0);
}

DensityMatrix partial_trace(const StateVector& state, std::span<const int> keep) {
    const int n = state.n_qubits();
    std::vector<int> kept(keep.begin(), keep.end());
    std::ranges::sort(kept);
    if (kept.empty() || static_cast<int>(kept.size()) >= n) {
        throw ContractViolation("partial trace needs a nonempty proper subset of the qubits");
    }
    if (std::ranges::adjacent_find(kept) != kept.end()) throw ContractViolation("duplicate qubit in keep set");
    if (kept.front() < 0 || kept.back() >= n) throw ContractViolation("keep set qubit out of range");

    std::vector<int> traced;
    for (int q = 0; q < n; ++q) {
        if (!std::ranges::binary_search(kept, q)) traced.push_back(q);
    }
    auto scatter = [](std::size_t local, const std::vector<int>& qubits) {
        std::size_t full = 0;
        for (std::size_t b = 0; b < qubits.size(); ++b) {
            if (local >> b & 1U) full |= std::size_t{1} << qubits[b];
        }
        return full;
    };

    const std::size_t dk = std::size_t{1} << kept.size();
    const std::size_t de = std::size_t{1} << traced.size();
    std::vector<std::size_t> kept_bits(dk), env_bits(de);
    for (std::size_t i = 0; i < dk; ++i) kept_bits[i] = scatter(i, kept);
    for (std::size_t e = 0; e < de; ++e) env_bits[e] = scatter(e, traced);

    const auto amps = state.amplitudes();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t e = 0; e < de; ++e) {
        for (std::size_t i = 0; i < dk; ++i) {
            const Complex ai = amps[kept_bits[i] | env_bits[e]];
            if (ai == Complex{}) continue;
            for (std::size_t j = 0; j < dk; ++j) {
                rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                    ai * std::conj(amps[kept_bits[j] | env_bits[e]]);
            }
        }
    }
    return DensityMatrix(static_cast<int>(kept.size()), std::move(rho));
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const auto& m = rho.entries();
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw ContractViolation("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    double entropy = 0.0;
    for (double lambda : solver.eigenvalues()) {
        if (lambda < 1e-12) continue;
        entropy -= lambda * std::log2(lambda);
    }
    return std::clamp(entropy, 0.0, static_cast<double>(rho.n_qubits()));
}

double expectation_z(const StateVector& state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits()) throw ContractViolation("qubit index out of range");
    const std::size_t mask = std::size_t{1} << qubit;
    double z = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) z += (i & mask) ? -std::norm(amps[i]) : std::norm(amps[i]);
    return z;
}

}  // namespace qga
