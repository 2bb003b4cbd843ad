#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qga {

using Complex = std::complex<double>;

enum class GateKind { Id, X, Y, Z, H, SX, RX, RY, RZ, CX, CZ };

inline constexpr std::array<GateKind, 11> kAllGateKinds{
    GateKind::Id, GateKind::X,  GateKind::Y,  GateKind::Z,  GateKind::H, GateKind::SX,
    GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::CX, GateKind::CZ};

struct GateInfo {
    std::string_view name;  // OpenQASM 2.0 mnemonic
    int arity;
    bool parameterized;
};

GateInfo gate_info(GateKind kind);
inline int arity(GateKind kind) { return gate_info(kind).arity; }
inline bool is_parameterized(GateKind kind) { return gate_info(kind).parameterized; }
inline std::string_view gate_name(GateKind kind) { return gate_info(kind).name; }

/// Case-insensitive lookup by mnemonic ("cx", "RZ", ...). Throws ConfigError on unknown names.
GateKind parse_gate_kind(std::string_view name);

/// Unitary for `kind`. 1-qubit kinds give a 2x2 matrix. 2-qubit kinds give a 4x4 matrix in
/// the basis index = b0 + 2*b1, where b0 is the bit of the first operand (the control).
/// Throws ContractViolation when `theta` presence does not match the kind.
Eigen::MatrixXcd gate_matrix(GateKind kind, std::optional<double> theta = std::nullopt);

/// Sorted, duplicate-free collection of gate kinds an individual may draw from.
class GateSet {
public:
    GateSet() = default;
    explicit GateSet(std::span<const GateKind> kinds);
    GateSet(std::initializer_list<GateKind> kinds);

    static GateSet full();
    static GateSet restricted();  // {id, rz, sx, x, cx}
    /// Parses "id,rz,sx,x,cx".
    static GateSet parse(std::string_view list);

    [[nodiscard]] bool empty() const { return kinds_.empty(); }
    [[nodiscard]] bool contains(GateKind kind) const;
    [[nodiscard]] const std::vector<GateKind>& kinds() const { return kinds_; }
    /// 1-qubit members; {Id} when the set has none, since Id is always a legal filler.
    [[nodiscard]] std::vector<GateKind> single_qubit_kinds() const;
    [[nodiscard]] bool has_two_qubit_kinds() const;
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const GateSet&, const GateSet&) = default;

private:
    std::vector<GateKind> kinds_;
};

}  // namespace qga
