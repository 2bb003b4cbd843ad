#include "qga/circuit_io.hpp"

#include "qga/errors.hpp"

#include <json.hpp>

#include <cstdio>

namespace qga {

using nlohmann::json;

std::string serialize(const Circuit& circuit) {
    json rows = json::array();
    for (int row = 0; row < circuit.n_qubits(); ++row) {
        json cells = json::array();
        for (int col = 0; col < circuit.depth(); ++col) {
            const Gate& g = circuit.at(row, col);
            json cell{{"kind", gate_name(g.kind)}, {"role", role_name(g.role)}};
            if (g.theta) cell["theta"] = *g.theta;
            if (g.partner) cell["partner"] = *g.partner;
            cells.push_back(std::move(cell));
        }
        rows.push_back(std::move(cells));
    }
    json doc{{"format", "qga-circuit"},
             {"version", kCircuitFormatVersion},
             {"n_qubits", circuit.n_qubits()},
             {"depth", circuit.depth()},
             {"cells", std::move(rows)}};
    return doc.dump(1) + "\n";
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    return obj.at(key);
}

int require_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) throw ParseError(where + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

}  // namespace

Circuit deserialize(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("circuit document: ") + e.what());
    }
    const std::string top = "circuit document";
    const json& format = require(doc, "format", top);
    if (format != "qga-circuit") throw ParseError(top + ": field 'format' must be \"qga-circuit\"");
    if (const int v = require_int(doc, "version", top); v != kCircuitFormatVersion) {
        throw ParseError(top + ": unsupported version " + std::to_string(v));
    }
    const int n = require_int(doc, "n_qubits", top);
    const int m = require_int(doc, "depth", top);
    const json& rows = require(doc, "cells", top);
    if (!rows.is_array() || rows.empty()) throw ParseError(top + ": field 'cells' must be a nonempty array");
    if (static_cast<int>(rows.size()) != n) {
        throw ParseError(top + ": 'cells' has " + std::to_string(rows.size()) + " rows, n_qubits is " + std::to_string(n));
    }

    std::optional<Circuit> circuit;
    try {
        circuit.emplace(n, m);
    } catch (const ConfigError& e) {
        throw ParseError(top + ": " + e.what());
    }
    for (int row = 0; row < n; ++row) {
        const json& cells = rows[static_cast<std::size_t>(row)];
        if (!cells.is_array() || static_cast<int>(cells.size()) != m) {
            throw ParseError(top + ": row " + std::to_string(row) + " must hold " + std::to_string(m) + " cells");
        }
        for (int col = 0; col < m; ++col) {
            const json& cell = cells[static_cast<std::size_t>(col)];
            const std::string where = "cells[" + std::to_string(row) + "][" + std::to_string(col) + "]";
            Gate g;
            try {
                const json& kind = require(cell, "kind", where);
                const json& role = require(cell, "role", where);
                if (!kind.is_string() || !role.is_string()) throw ParseError(where + ": kind and role must be strings");
                g.kind = parse_gate_kind(kind.get<std::string>());
                g.role = parse_role(role.get<std::string>());
            } catch (const ConfigError& e) {
                throw ParseError(where + ": " + e.what());
            } catch (const ParseError& e) {
                throw ParseError(where + ": " + e.what());
            }
            if (cell.contains("theta")) {
                if (!cell["theta"].is_number()) throw ParseError(where + ": field 'theta' must be a number");
                g.theta = cell["theta"].get<double>();
            }
            if (cell.contains("partner")) g.partner = require_int(cell, "partner", where);
            for (const auto& [key, _] : cell.items()) {
                if (key != "kind" && key != "role" && key != "theta" && key != "partner") {
                    throw ParseError(where + ": unknown field '" + key + "'");
                }
            }
            circuit->set(row, col, g);
        }
    }
    if (auto v = circuit->find_violation()) throw ParseError(top + ": " + *v);
    return *circuit;
}

std::string export_qasm(const Circuit& circuit) {
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    out += "qreg q[" + std::to_string(circuit.n_qubits()) + "];\n";
    char angle[64];
    for (int col = 0; col < circuit.depth(); ++col) {
        for (int row = 0; row < circuit.n_qubits(); ++row) {
            const Gate& g = circuit.at(row, col);
            const std::string name(gate_name(g.kind));
            if (g.role == Role::Control) {
                out += name + " q[" + std::to_string(row) + "],q[" + std::to_string(*g.partner) + "];\n";
            } else if (g.role == Role::Single) {
                out += name;
                if (g.theta) {
                    std::snprintf(angle, sizeof angle, "(%.17g)", *g.theta);
                    out += angle;
                }
                out += " q[" + std::to_string(row) + "];\n";
            }
        }
    }
    return out;
}

}  // namespace qga
