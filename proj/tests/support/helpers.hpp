#pragma once

#include "qga/circuit.hpp"

#include <map>
#include <tuple>

namespace qga::support {

inline Circuit bell_circuit() {
    Circuit c(2, 2);
    c.place(0, 0, GateKind::H);
    c.place_two(GateKind::CX, 0, 1, 1);
    return c;
}

inline Circuit ghz_circuit(int n) {
    Circuit c(n, n);
    c.place(0, 0, GateKind::H);
    for (int q = 1; q < n; ++q) c.place_two(GateKind::CX, q - 1, q, q);
    return c;
}

/// Multiset of non-Id cells keyed by (kind, role, theta bits).
inline std::map<std::tuple<int, int, double>, int> non_id_cells(const Circuit& c) {
    std::map<std::tuple<int, int, double>, int> out;
    for (int r = 0; r < c.n_qubits(); ++r) {
        for (int col = 0; col < c.depth(); ++col) {
            const Gate& g = c.at(r, col);
            if (!g.is_identity()) ++out[{static_cast<int>(g.kind), static_cast<int>(g.role), g.theta.value_or(0.0)}];
        }
    }
    return out;
}

inline void merge_into(std::map<std::tuple<int, int, double>, int>& a, const std::map<std::tuple<int, int, double>, int>& b) {
    for (const auto& [k, v] : b) a[k] += v;
}

}  // namespace qga::support
