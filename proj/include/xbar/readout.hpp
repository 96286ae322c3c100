#pragma once

#include "xbar/crossbar.hpp"
#include "xbar/solver.hpp"

#include <cstddef>
#include <utility>

namespace xbar {

struct ReadResult {
    double v_out_lrs = 0.0;
    double v_out_hrs = 0.0;
    double read_margin = 0.0; // (v_out_lrs - v_out_hrs) / v_ws
    double power_lrs = 0.0;   // W
    double power_hrs = 0.0;   // W
    std::pair<std::size_t, std::size_t> iterations{0, 0};
};

/// Power delivered by all sources, sense-resistor dissipation included.
inline double power(const Solution& solution, const Network& network) {
    double total = 0.0;
    for (std::size_t k = 0; k < network.sources.size(); ++k)
        total += network.sources[k].volts * solution.source_currents[k];
    return total;
}

/// Power dissipated in every branch and leak; equals power() at convergence.
inline double dissipation(const Solution& solution, const Network& network) {
    const auto& v = solution.node_voltages;
    double total = 0.0;
    for (std::size_t k = 0; k < network.resistors.size(); ++k) {
        const auto& r = network.resistors[k];
        total += (v[r.a] - v[r.b]) * solution.branch_currents[k];
    }
    for (std::size_t k = 0; k < network.cells.size(); ++k) {
        const auto& c = network.cells[k];
        total += (v[c.word_line] - v[c.bit_line]) * solution.branch_currents[network.resistors.size() + k];
    }
    std::vector<bool> driven(network.node_count(), false);
    for (const auto& s : network.sources)
        driven[s.node] = true;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!driven[i])
            total += kLeakConductance * v[i] * v[i];
    return total;
}

struct SingleRead {
    Network network;
    Solution solution;
    double v_out;
    double power;
};

inline SingleRead read_one(const CrossbarConfig& config, const CellTechnology& tech, TargetState state,
                           const SolveOptions& options = {}) {
    Network net = build(config, tech, state);
    try {
        Solution sol = solve(net, options);
        const double v_out = sol.node_voltages[net.sense];
        const double p = power(sol, net);
        return {std::move(net), std::move(sol), v_out, p};
    } catch (const Error& e) {
        throw ReadFailure(state == TargetState::LRS, e.what());
    }
}

/// Reads the target cell in LRS and then in HRS with everything else equal.
inline ReadResult read(const CrossbarConfig& config, const CellTechnology& tech, const SolveOptions& options = {}) {
    const SingleRead lrs = read_one(config, tech, TargetState::LRS, options);
    const SingleRead hrs = read_one(config, tech, TargetState::HRS, options);
    ReadResult r;
    r.v_out_lrs = lrs.v_out;
    r.v_out_hrs = hrs.v_out;
    r.read_margin = (lrs.v_out - hrs.v_out) / config.v_ws;
    r.power_lrs = lrs.power;
    r.power_hrs = hrs.power;
    r.iterations = {lrs.solution.iterations, hrs.solution.iterations};
    return r;
}

} // namespace xbar
