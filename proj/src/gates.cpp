#include "qga/gates.hpp"

#include "qga/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace qga {

GateInfo gate_info(GateKind kind) {
    switch (kind) {
        case GateKind::Id: return {"id", 1, false};
        case GateKind::X: return {"x", 1, false};
        case GateKind::Y: return {"y", 1, false};
        case GateKind::Z: return {"z", 1, false};
        case GateKind::H: return {"h", 1, false};
        case GateKind::SX: return {"sx", 1, false};
        case GateKind::RX: return {"rx", 1, true};
        case GateKind::RY: return {"ry", 1, true};
        case GateKind::RZ: return {"rz", 1, true};
        case GateKind::CX: return {"cx", 2, false};
        case GateKind::CZ: return {"cz", 2, false};
    }
    throw ContractViolation("unknown gate kind");
}

GateKind parse_gate_kind(std::string_view name) {
    std::string lower(name);
    std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (GateKind kind : kAllGateKinds) {
        if (gate_name(kind) == lower) return kind;
    }
    std::string known;
    for (GateKind kind : kAllGateKinds) {
        if (!known.empty()) known += ", ";
        known += gate_name(kind);
    }
    throw ConfigError("unknown gate '" + std::string(name) + "' (known: " + known + ")");
}

Eigen::MatrixXcd gate_matrix(GateKind kind, std::optional<double> theta) {
    const auto info = gate_info(kind);
    if (info.parameterized && !theta) {
        throw ContractViolation(std::string(info.name) + " requires a rotation angle");
    }
    if (!info.parameterized && theta) {
        throw ContractViolation(std::string(info.name) + " takes no rotation angle");
    }
    const Complex i{0.0, 1.0};
    Eigen::MatrixXcd m;
    switch (kind) {
        case GateKind::Id:
            m = Eigen::MatrixXcd::Identity(2, 2);
            break;
        case GateKind::X:
            m.resize(2, 2);
            m << 0, 1, 1, 0;
            break;
        case GateKind::Y:
            m.resize(2, 2);
            m << 0, -i, i, 0;
            break;
        case GateKind::Z:
            m.resize(2, 2);
            m << 1, 0, 0, -1;
            break;
        case GateKind::H: {
            const double s = 1.0 / std::sqrt(2.0);
            m.resize(2, 2);
            m << s, s, s, -s;
            break;
        }
        case GateKind::SX:
            m.resize(2, 2);
            m << 0.5 * (1.0 + i), 0.5 * (1.0 - i), 0.5 * (1.0 - i), 0.5 * (1.0 + i);
            break;
        case GateKind::RX: {
            const double c = std::cos(*theta / 2), s = std::sin(*theta / 2);
            m.resize(2, 2);
            m << c, -i * s, -i * s, c;
            break;
        }
        case GateKind::RY: {
            const double c = std::cos(*theta / 2), s = std::sin(*theta / 2);
            m.resize(2, 2);
            m << c, -s, s, c;
            break;
        }
        case GateKind::RZ:
            m.resize(2, 2);
            m << std::exp(-i * (*theta / 2)), 0, 0, std::exp(i * (*theta / 2));
            break;
        case GateKind::CX:
            // control is bit 0: |c=1,t=0> (1) <-> |c=1,t=1> (3)
            m = Eigen::MatrixXcd::Zero(4, 4);
            m(0, 0) = m(2, 2) = 1;
            m(1, 3) = m(3, 1) = 1;
            break;
        case GateKind::CZ:
            m = Eigen::MatrixXcd::Identity(4, 4);
            m(3, 3) = -1;
            break;
    }
    return m;
}

GateSet::GateSet(std::span<const GateKind> kinds) : kinds_(kinds.begin(), kinds.end()) {
    std::ranges::sort(kinds_);
    kinds_.erase(std::unique(kinds_.begin(), kinds_.end()), kinds_.end());
}

GateSet::GateSet(std::initializer_list<GateKind> kinds)
    : GateSet(std::span<const GateKind>(kinds.begin(), kinds.size())) {}

GateSet GateSet::full() { return GateSet(kAllGateKinds); }

GateSet GateSet::restricted() {
    return {GateKind::Id, GateKind::RZ, GateKind::SX, GateKind::X, GateKind::CX};
}

GateSet GateSet::parse(std::string_view list) {
    std::vector<GateKind> kinds;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = list.find(',', start);
        auto token = list.substr(start, comma == std::string_view::npos ? list.npos : comma - start);
        while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
        while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
        if (token.empty()) throw ConfigError("empty entry in gate list '" + std::string(list) + "'");
        kinds.push_back(parse_gate_kind(token));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return GateSet(kinds);
}

bool GateSet::contains(GateKind kind) const { return std::ranges::binary_search(kinds_, kind); }

std::vector<GateKind> GateSet::single_qubit_kinds() const {
    std::vector<GateKind> out;
    for (GateKind k : kinds_) {
        if (arity(k) == 1) out.push_back(k);
    }
    if (out.empty()) out.push_back(GateKind::Id);
    return out;
}

bool GateSet::has_two_qubit_kinds() const {
    return std::ranges::any_of(kinds_, [](GateKind k) { return arity(k) == 2; });
}

std::string GateSet::to_string() const {
    std::string out;
    for (GateKind k : kinds_) {
        if (!out.empty()) out += ',';
        out += gate_name(k);
    }
    return out;
}

}  // namespace qga
