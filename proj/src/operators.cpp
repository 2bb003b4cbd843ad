#include "qga/operators.hpp"

#include "qga/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qga {

namespace {

void require_nonempty(const Population& pop) {
    if (pop.members.empty()) throw ContractViolation("selection from an empty population");
}

double evaluated_fitness(const Individual& ind) {
    if (!ind.fitness) throw ContractViolation("selection needs evaluated fitness values");
    return *ind.fitness;
}

int random_index(const Population& pop, Rng& rng) {
    return uniform_int(rng, 0, static_cast<int>(pop.members.size()) - 1);
}

}  // namespace

std::vector<Individual> select_random(const Population& pop, int count, Rng& rng) {
    require_nonempty(pop);
    if (count < 1) throw ContractViolation("selection count must be >= 1");
    std::vector<Individual> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(pop.members[static_cast<std::size_t>(random_index(pop, rng))]);
    return out;
}

std::vector<Individual> select_tournament(const Population& pop, int count, int tournament_size, Rng& rng) {
    require_nonempty(pop);
    if (count < 1) throw ContractViolation("selection count must be >= 1");
    if (tournament_size < 1) throw ContractViolation("tournament size must be >= 1");
    std::vector<Individual> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        int winner = random_index(pop, rng);
        double best = evaluated_fitness(pop.members[static_cast<std::size_t>(winner)]);
        int ties = 1;
        for (int k = 1; k < tournament_size; ++k) {
            const int idx = random_index(pop, rng);
            const double f = evaluated_fitness(pop.members[static_cast<std::size_t>(idx)]);
            if (f > best) {
                best = f;
                winner = idx;
                ties = 1;
            } else if (f == best) {
                // reservoir pick among equal-fitness contestants
                if (uniform_int(rng, 1, ++ties) == 1) winner = idx;
            }
        }
        out.push_back(pop.members[static_cast<std::size_t>(winner)]);
    }
    return out;
}

std::vector<Individual> select_roulette(const Population& pop, int count, Rng& rng) {
    require_nonempty(pop);
    if (count < 1) throw ContractViolation("selection count must be >= 1");
    std::vector<double> weights;
    weights.reserve(pop.members.size());
    for (const auto& ind : pop.members) weights.push_back(evaluated_fitness(ind));
    const auto [lo, hi] = std::ranges::minmax(weights);
    if (lo <= 0.0) {
        // shift non-positive populations so every weight is > 0
        const double eps = 1e-9 * (hi - lo + 1.0);
        for (double& w : weights) w = w - lo + eps;
    }
    std::discrete_distribution<int> wheel(weights.begin(), weights.end());
    std::vector<Individual> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(pop.members[static_cast<std::size_t>(wheel(rng))]);
    return out;
}

namespace {

std::pair<Circuit, Circuit> pad_pair(const Circuit& a, const Circuit& b) {
    const int n = std::max(a.n_qubits(), b.n_qubits());
    const int m = std::max(a.depth(), b.depth());
    return {pad_to(a, n, m), pad_to(b, n, m)};
}

void copy_column(Circuit& dst, const Circuit& src, int col) {
    for (int row = 0; row < dst.n_qubits(); ++row) dst.set(row, col, src.at(row, col));
}

}  // namespace

Children crossover_single_point_at(const Circuit& a, const Circuit& b, int cut) {
    const int cuts[] = {cut};
    return crossover_multi_point_at(a, b, cuts);
}

Children crossover_multi_point_at(const Circuit& a, const Circuit& b, std::span<const int> cuts) {
    auto [pa, pb] = pad_pair(a, b);
    const int m = pa.depth();
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i] < 1 || cuts[i] > m - 1 || (i > 0 && cuts[i] <= cuts[i - 1])) {
            throw ContractViolation("crossover cuts must be strictly increasing within [1, depth-1]");
        }
    }
    Circuit c1 = pa;
    Circuit c2 = pb;
    std::size_t next = 0;
    bool swapped = false;
    for (int col = 0; col < m; ++col) {
        while (next < cuts.size() && cuts[next] == col) {
            swapped = !swapped;
            ++next;
        }
        if (swapped) {
            copy_column(c1, pb, col);
            copy_column(c2, pa, col);
        }
    }
    return {std::move(c1), std::move(c2)};
}

Children crossover_single_point(const Circuit& a, const Circuit& b, const GateSet& gate_set, Rng& rng) {
    const int m = std::max(a.depth(), b.depth());
    if (m < 2) {
        auto [pa, pb] = pad_pair(a, b);
        return {repair(pa, gate_set, rng), repair(pb, gate_set, rng)};
    }
    auto [c1, c2] = crossover_single_point_at(a, b, uniform_int(rng, 1, m - 1));
    return {repair(c1, gate_set, rng), repair(c2, gate_set, rng)};
}

Children crossover_multi_point(const Circuit& a, const Circuit& b, int n_points, const GateSet& gate_set, Rng& rng) {
    const int m = std::max(a.depth(), b.depth());
    if (n_points < 2 || n_points > m - 1) {
        throw ConfigError("multi-point crossover needs 2 <= points <= depth-1; got " + std::to_string(n_points) +
                          " points for depth " + std::to_string(m));
    }
    std::vector<int> candidates(static_cast<std::size_t>(m - 1));
    std::iota(candidates.begin(), candidates.end(), 1);
    std::ranges::shuffle(candidates, rng);
    candidates.resize(static_cast<std::size_t>(n_points));
    std::ranges::sort(candidates);
    auto [c1, c2] = crossover_multi_point_at(a, b, candidates);
    return {repair(c1, gate_set, rng), repair(c2, gate_set, rng)};
}

Children crossover_blockwise_at(const Circuit& a, const Circuit& b, int row_cut, int col_cut,
                                const GateSet& gate_set, Rng& rng) {
    auto [pa, pb] = pad_pair(a, b);
    if (row_cut < 1 || row_cut > pa.n_qubits() - 1) throw ContractViolation("row cut must lie in [1, n_qubits-1]");
    if (col_cut < 1 || col_cut > pa.depth()) throw ContractViolation("column cut must lie in [1, depth]");
    Circuit c1 = pa;
    Circuit c2 = pb;
    for (int row = 0; row < row_cut; ++row) {
        for (int col = 0; col < col_cut; ++col) {
            c1.set(row, col, pb.at(row, col));
            c2.set(row, col, pa.at(row, col));
        }
    }
    return {repair(c1, gate_set, rng), repair(c2, gate_set, rng)};
}

Children crossover_blockwise(const Circuit& a, const Circuit& b, const GateSet& gate_set, Rng& rng) {
    const int n = std::max(a.n_qubits(), b.n_qubits());
    const int m = std::max(a.depth(), b.depth());
    if (n < 2) return crossover_single_point(a, b, gate_set, rng);
    const int row_cut = uniform_int(rng, 1, n - 1);
    const int col_cut = m >= 2 ? uniform_int(rng, 1, m - 1) : 1;
    return crossover_blockwise_at(a, b, row_cut, col_cut, gate_set, rng);
}

std::string_view mutation_name(MutationKind kind) {
    switch (kind) {
        case MutationKind::GateFlip: return "gate_flip";
        case MutationKind::SwapControl: return "swap_control";
        case MutationKind::QubitCount: return "qubit_count";
        case MutationKind::GateCount: return "gate_count";
        case MutationKind::SwapColumns: return "swap_columns";
        case MutationKind::Parameter: return "parameter";
    }
    return "?";
}

namespace {

Gate random_single_gate(const GateSet& gate_set, Rng& rng) {
    const auto kinds = gate_set.single_qubit_kinds();
    const GateKind kind = pick<GateKind>(rng, kinds);
    return Gate::single(kind, is_parameterized(kind) ? std::optional(random_angle(rng)) : std::nullopt);
}

}  // namespace

Circuit mutate_single_gate_flip(const Circuit& c, const MutationContext& ctx, Rng& rng) {
    Circuit out = c;
    const int row = uniform_int(rng, 0, c.n_qubits() - 1);
    const int col = uniform_int(rng, 0, c.depth() - 1);
    std::optional<int> old_partner;
    if (c.at(row, col).is_two_qubit()) {
        old_partner = c.at(row, col).partner;
        out.set(*old_partner, col, Gate::identity());
    }
    out.set(row, col, Gate::identity());

    const GateKind kind = random_kind(ctx.gate_set, rng);
    std::optional<int> new_partner;
    if (arity(kind) == 2) {
        std::vector<int> rows;
        for (int r = 0; r < c.n_qubits(); ++r) {
            if (r != row && !out.at(r, col).is_two_qubit()) rows.push_back(r);
        }
        if (!rows.empty()) {
            new_partner = pick<int>(rng, rows);
            if (uniform_int(rng, 0, 1) == 0) out.place_two(kind, row, *new_partner, col);
            else out.place_two(kind, *new_partner, row, col);
        }
    }
    if (!new_partner) {
        out.set(row, col,
                arity(kind) == 1 ? Gate::single(kind, is_parameterized(kind) ? std::optional(random_angle(rng)) : std::nullopt)
                                 : random_single_gate(ctx.gate_set, rng));
    }
    if (old_partner && old_partner != new_partner) out.set(*old_partner, col, random_single_gate(ctx.gate_set, rng));
    return out;
}

Circuit mutate_swap_control(const Circuit& c, Rng& rng) {
    std::vector<std::pair<int, int>> controls;
    for (int col = 0; col < c.depth(); ++col) {
        for (int row = 0; row < c.n_qubits(); ++row) {
            if (c.at(row, col).role == Role::Control) controls.emplace_back(row, col);
        }
    }
    if (controls.empty()) return c;
    const auto [row, col] = controls[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(controls.size()) - 1))];
    Circuit out = c;
    const int target = *c.at(row, col).partner;
    out.place_two(c.at(row, col).kind, target, row, col);
    return out;
}

Circuit remove_qubit(const Circuit& c, int row, const GateSet& gate_set, Rng& rng) {
    if (c.n_qubits() < 2) throw ContractViolation("cannot remove the only qubit");
    if (row < 0 || row >= c.n_qubits()) throw ContractViolation("row out of range");
    Circuit out(c.n_qubits() - 1, c.depth());
    for (int r = 0; r < c.n_qubits(); ++r) {
        if (r == row) continue;
        const int dst = r > row ? r - 1 : r;
        for (int col = 0; col < c.depth(); ++col) {
            Gate g = c.at(r, col);
            if (g.partner) {
                if (*g.partner == row) g.partner.reset();
                else if (*g.partner > row) g.partner = *g.partner - 1;
            }
            out.set(dst, col, g);
        }
    }
    return repair(out, gate_set, rng);
}

Circuit mutate_qubit_count(const Circuit& c, const MutationContext& ctx, Rng& rng) {
    const bool can_add = c.n_qubits() < ctx.max_qubits;
    const bool can_remove = c.n_qubits() > std::max(ctx.min_qubits, 1);
    if (!can_add && !can_remove) return c;
    const bool add = can_add && (!can_remove || uniform_int(rng, 0, 1) == 0);
    if (add) return pad_to(c, c.n_qubits() + 1, c.depth());
    return remove_qubit(c, uniform_int(rng, 0, c.n_qubits() - 1), ctx.gate_set, rng);
}

Circuit mutate_gate_count(const Circuit& c, const MutationContext& ctx, Rng& rng) {
    const bool can_add = c.depth() < ctx.max_depth;
    const bool can_remove = c.depth() > std::max(ctx.min_depth, 1);
    if (!can_add && !can_remove) return c;
    const bool add = can_add && (!can_remove || uniform_int(rng, 0, 1) == 0);
    if (add) {
        const int pos = uniform_int(rng, 0, c.depth());
        Circuit out(c.n_qubits(), c.depth() + 1);
        for (int col = 0; col < c.depth(); ++col) {
            for (int row = 0; row < c.n_qubits(); ++row) out.set(row, col < pos ? col : col + 1, c.at(row, col));
        }
        fill_random_column(out, pos, ctx.gate_set, rng);
        return out;
    }
    const int drop = uniform_int(rng, 0, c.depth() - 1);
    Circuit out(c.n_qubits(), c.depth() - 1);
    for (int col = 0; col < c.depth(); ++col) {
        if (col == drop) continue;
        for (int row = 0; row < c.n_qubits(); ++row) out.set(row, col < drop ? col : col - 1, c.at(row, col));
    }
    return out;
}

Circuit mutate_swap_columns(const Circuit& c, Rng& rng) {
    if (c.depth() < 2) return c;
    const int first = uniform_int(rng, 0, c.depth() - 1);
    int second = uniform_int(rng, 0, c.depth() - 2);
    if (second >= first) ++second;
    Circuit out = c;
    for (int row = 0; row < c.n_qubits(); ++row) {
        out.set(row, first, c.at(row, second));
        out.set(row, second, c.at(row, first));
    }
    return out;
}

Circuit mutate_parameter(const Circuit& c, const MutationContext& ctx, Rng& rng) {
    std::vector<std::pair<int, int>> cells;
    for (int row = 0; row < c.n_qubits(); ++row) {
        for (int col = 0; col < c.depth(); ++col) {
            if (c.at(row, col).theta) cells.emplace_back(row, col);
        }
    }
    if (cells.empty()) return c;
    const auto [row, col] = cells[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(cells.size()) - 1))];
    Circuit out = c;
    out.at(row, col).theta = *c.at(row, col).theta + std::normal_distribution<double>(0.0, ctx.parameter_sigma)(rng);
    return out;
}

MutationOutcome mutate(const Circuit& c, const MutationContext& ctx, const MutationWeights& weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ContractViolation("mutation weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0.0) throw ContractViolation("mutation weights must not all be zero");
    std::discrete_distribution<int> choose(weights.begin(), weights.end());
    const MutationKind kind = kAllMutations[static_cast<std::size_t>(choose(rng))];
    switch (kind) {
        case MutationKind::GateFlip: return {mutate_single_gate_flip(c, ctx, rng), kind};
        case MutationKind::SwapControl: return {mutate_swap_control(c, rng), kind};
        case MutationKind::QubitCount: return {mutate_qubit_count(c, ctx, rng), kind};
        case MutationKind::GateCount: return {mutate_gate_count(c, ctx, rng), kind};
        case MutationKind::SwapColumns: return {mutate_swap_columns(c, rng), kind};
        case MutationKind::Parameter: return {mutate_parameter(c, ctx, rng), kind};
    }
    return {c, kind};
}

}  // namespace qga
