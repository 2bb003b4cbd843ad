#pragma once

#include "qga/circuit.hpp"

#include <string>
#include <string_view>

namespace qga {

inline constexpr int kCircuitFormatVersion = 1;

/// JSON circuit document:
///   {"format": "qga-circuit", "version": 1, "n_qubits": n, "depth": m,
///    "cells": [[{"kind": "cx", "role": "control", "partner": 1}, ...], ...]}
/// cells[row][col]; "theta" only on rx/ry/rz, "partner" only on two-qubit cells.
std::string serialize(const Circuit& circuit);

/// Inverse of serialize(). Throws ParseError with the row/column or field at fault, including
/// documents that parse but violate the circuit invariants.
Circuit deserialize(std::string_view text);

/// OpenQASM 2.0 with the qelib1.inc header; one statement per gate, column by column.
std::string export_qasm(const Circuit& circuit);

}  // namespace qga
