#pragma once

// DC operating point of a crossbar network by damped Newton-Raphson.
//
// Source nodes are eliminated: only free nodes are unknowns. Each iteration
// stamps the linearization of every branch into a symmetric nodal Jacobian
// whose sparsity pattern is fixed, so the symbolic analysis is done once and
// only the numeric LDL^T factorization is repeated.

#include "xbar/crossbar.hpp"
#include "xbar/device.hpp"
#include "xbar/errors.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <variant>
#include <vector>

namespace xbar {

/// Conductance from every free node to ground, so a floating subgraph stays
/// solvable.
inline constexpr double kLeakConductance = 1e-15;

struct SolveOptions {
    enum class Guess { Zero, LinearizedNetwork, Provided };

    std::size_t max_iters = 100;
    double v_tol = 1e-9;
    double i_tol = 1e-12;
    double damping = 1.0;
    int max_halvings = 8;
    Guess initial_guess = Guess::LinearizedNetwork;
    std::vector<double> provided; // node voltages, used with Guess::Provided

    void validate() const {
        if (max_iters < 1 || !(v_tol > 0.0) || !(i_tol > 0.0))
            throw InvalidConfig("solver requires max_iters >= 1 and positive tolerances");
        if (!(damping > 0.0 && damping <= 1.0))
            throw InvalidConfig("damping must lie in (0, 1]");
    }
};

struct Solution {
    std::vector<double> node_voltages;
    std::vector<double> branch_currents; // resistors first, then cells; a -> b / word -> bit
    std::vector<double> source_currents; // delivered by each source into the network
    std::size_t iterations = 0;
    double residual = 0.0;               // max |KCL| over free nodes
    bool converged = false;

    double cell_current(const Network& net, std::size_t cell) const {
        return branch_currents[net.resistors.size() + cell];
    }
};

namespace detail {

// Numbering of free nodes and the precomputed value slots of every stamp.
class NodalSystem {
public:
    static constexpr std::ptrdiff_t kFixed = -1;

    explicit NodalSystem(const Network& net) : net_(net) {
        const std::size_t n = net.node_count();
        fixed_.assign(n, std::numeric_limits<double>::quiet_NaN());
        std::vector<bool> is_fixed(n, false);
        for (const auto& s : net.sources) {
            if (s.node >= n)
                throw InvalidConfig("source stamp on unknown node");
            if (is_fixed[s.node] && fixed_[s.node] != s.volts)
                throw InvalidConfig("conflicting sources on node " + net.node_name(s.node));
            is_fixed[s.node] = true;
            fixed_[s.node] = s.volts;
        }
        if (!is_fixed[net.ground] || fixed_[net.ground] != 0.0)
            throw InvalidConfig("network has no ground reference");

        unknown_.assign(n, kFixed);
        for (std::size_t i = 0; i < n; ++i)
            if (!is_fixed[i])
                unknown_[i] = static_cast<std::ptrdiff_t>(free_nodes_.size()), free_nodes_.push_back(i);

        const auto m = static_cast<Eigen::Index>(free_nodes_.size());
        std::vector<Eigen::Triplet<double>> pattern;
        pattern.reserve(free_nodes_.size() + 2 * net.branch_count());
        for (Eigen::Index i = 0; i < m; ++i)
            pattern.emplace_back(i, i, 1.0);
        auto add_edge = [&](std::size_t a, std::size_t b) {
            const auto ua = unknown_[a], ub = unknown_[b];
            if (ua != kFixed && ub != kFixed && ua != ub)
                pattern.emplace_back(std::max(ua, ub), std::min(ua, ub), 1.0);
        };
        for (const auto& r : net.resistors)
            add_edge(r.a, r.b);
        for (const auto& c : net.cells)
            add_edge(c.word_line, c.bit_line);
        jacobian_.resize(m, m);
        jacobian_.setFromTriplets(pattern.begin(), pattern.end());
        jacobian_.makeCompressed();

        diag_slot_.resize(free_nodes_.size());
        for (Eigen::Index i = 0; i < m; ++i)
            diag_slot_[static_cast<std::size_t>(i)] = slot(i, i);
        resistor_slots_.reserve(net.resistors.size());
        for (const auto& r : net.resistors)
            resistor_slots_.push_back(edge_slots(r.a, r.b));
        cell_slots_.reserve(net.cells.size());
        for (const auto& c : net.cells)
            cell_slots_.push_back(edge_slots(c.word_line, c.bit_line));
    }

    std::size_t size() const noexcept { return free_nodes_.size(); }
    const std::vector<std::size_t>& free_nodes() const noexcept { return free_nodes_; }
    std::ptrdiff_t unknown(std::size_t node) const noexcept { return unknown_[node]; }
    Eigen::SparseMatrix<double>& jacobian() noexcept { return jacobian_; }

    /// Full node-voltage vector with fixed nodes at their source values.
    std::vector<double> with_sources(std::vector<double> v) const {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (unknown_[i] == kFixed)
                v[i] = fixed_[i];
        return v;
    }

    // Assembles KCL residual (current leaving each free node) and, when
    // requested, the Jacobian values. `cell_stamp(cell, v)` returns {i, g}.
    template <typename CellStamp>
    void assemble(const std::vector<double>& v, Eigen::VectorXd& residual, bool with_jacobian,
                  CellStamp&& cell_stamp) {
        residual.setZero(static_cast<Eigen::Index>(size()));
        double* values = jacobian_.valuePtr();
        if (with_jacobian)
            std::fill(values, values + jacobian_.nonZeros(), 0.0);
        for (std::size_t i = 0; i < free_nodes_.size(); ++i) {
            residual[static_cast<Eigen::Index>(i)] += kLeakConductance * v[free_nodes_[i]];
            if (with_jacobian)
                values[diag_slot_[i]] += kLeakConductance;
        }
        for (std::size_t k = 0; k < net_.resistors.size(); ++k) {
            const auto& r = net_.resistors[k];
            const double g = 1.0 / r.resistance;
            stamp(r.a, r.b, g * (v[r.a] - v[r.b]), g, resistor_slots_[k], residual, values, with_jacobian);
        }
        for (std::size_t k = 0; k < net_.cells.size(); ++k) {
            const auto& c = net_.cells[k];
            const CurrentAndConductance iv = cell_stamp(c, v[c.word_line] - v[c.bit_line]);
            stamp(c.word_line, c.bit_line, iv.current, iv.conductance, cell_slots_[k], residual, values,
                  with_jacobian);
        }
    }

private:
    struct EdgeSlots {
        std::ptrdiff_t aa = -1, bb = -1, ab = -1;
    };

    std::ptrdiff_t slot(Eigen::Index row, Eigen::Index col) const {
        // Lower triangle, column-major: search column `col` for `row`.
        const auto* outer = jacobian_.outerIndexPtr();
        const auto* inner = jacobian_.innerIndexPtr();
        const auto* begin = inner + outer[col];
        const auto* end = inner + outer[col + 1];
        const auto* it = std::lower_bound(begin, end, static_cast<int>(row));
        return it - inner;
    }

    EdgeSlots edge_slots(std::size_t a, std::size_t b) const {
        EdgeSlots s;
        const auto ua = unknown_[a], ub = unknown_[b];
        if (ua != kFixed)
            s.aa = diag_slot_[static_cast<std::size_t>(ua)];
        if (ub != kFixed)
            s.bb = diag_slot_[static_cast<std::size_t>(ub)];
        if (ua != kFixed && ub != kFixed && ua != ub)
            s.ab = slot(std::max(ua, ub), std::min(ua, ub));
        return s;
    }

    void stamp(std::size_t a, std::size_t b, double current, double g, const EdgeSlots& s,
               Eigen::VectorXd& residual, double* values, bool with_jacobian) const {
        const auto ua = unknown_[a], ub = unknown_[b];
        if (ua != kFixed)
            residual[ua] += current;
        if (ub != kFixed)
            residual[ub] -= current;
        if (!with_jacobian)
            return;
        if (s.aa >= 0)
            values[s.aa] += g;
        if (s.bb >= 0)
            values[s.bb] += g;
        if (s.ab >= 0)
            values[s.ab] -= g;
    }

    const Network& net_;
    std::vector<double> fixed_;
    std::vector<std::ptrdiff_t> unknown_;
    std::vector<std::size_t> free_nodes_;
    Eigen::SparseMatrix<double> jacobian_;
    std::vector<std::ptrdiff_t> diag_slot_;
    std::vector<EdgeSlots> resistor_slots_;
    std::vector<EdgeSlots> cell_slots_;
};

using Factorization = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>>;

inline void factorize(Factorization& ldlt, const Eigen::SparseMatrix<double>& jacobian) {
    ldlt.factorize(jacobian);
    if (ldlt.info() != Eigen::Success)
        throw SingularSystem("nodal Jacobian factorization failed");
    const Eigen::VectorXd d = ldlt.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (!(d[i] > 0.0) || !std::isfinite(d[i]))
            throw SingularSystem("nodal Jacobian is singular (pivot " + std::to_string(d[i]) + ")");
}

inline double max_abs(const Eigen::VectorXd& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

inline std::vector<double> solve_linearized(const Network& net, NodalSystem& system, Factorization& ldlt) {
    if (!(net.guess_conductance > 0.0))
        throw InvalidConfig("network carries no linearized cell conductance");
    std::vector<double> v = system.with_sources(std::vector<double>(net.node_count(), 0.0));
    Eigen::VectorXd residual;
    const double g = net.guess_conductance;
    system.assemble(v, residual, true,
                    [g](const Network::Cell&, double dv) -> CurrentAndConductance { return {g * dv, g}; });
    factorize(ldlt, system.jacobian());
    const Eigen::VectorXd step = ldlt.solve(-residual);
    for (std::size_t i = 0; i < system.free_nodes().size(); ++i)
        v[system.free_nodes()[i]] += step[static_cast<Eigen::Index>(i)];
    return v;
}

inline CurrentAndConductance network_cell_iv(const Network::Cell& c, double dv) { return cell_iv(c.model, dv); }

} // namespace detail

/// Node voltages of the linear network in which every cell is replaced by
/// the fixed conductance 1/sqrt(r_on * r_off).
inline std::vector<double> linearized_initial_guess(const Network& net) {
    detail::NodalSystem system(net);
    detail::Factorization ldlt;
    ldlt.analyzePattern(system.jacobian());
    return detail::solve_linearized(net, system, ldlt);
}

/// Newton-Raphson DC solve. Throws NonConvergence or SingularSystem.
inline Solution solve(const Network& net, const SolveOptions& options = {}) {
    options.validate();
    detail::NodalSystem system(net);
    detail::Factorization ldlt;
    ldlt.analyzePattern(system.jacobian());

    std::vector<double> v;
    switch (options.initial_guess) {
    case SolveOptions::Guess::Zero: v.assign(net.node_count(), 0.0); break;
    case SolveOptions::Guess::Provided:
        if (options.provided.size() != net.node_count())
            throw InvalidConfig("provided initial guess has wrong length");
        v = options.provided;
        break;
    case SolveOptions::Guess::LinearizedNetwork: v = detail::solve_linearized(net, system, ldlt); break;
    }
    v = system.with_sources(std::move(v));

    Eigen::VectorXd residual, trial_residual;
    std::vector<double> trial(v.size());
    system.assemble(v, residual, true, detail::network_cell_iv);
    double norm = residual.norm();

    Solution sol;
    for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
        detail::factorize(ldlt, system.jacobian());
        const Eigen::VectorXd step = ldlt.solve(-residual);

        double scale = options.damping;
        double trial_norm = 0.0;
        for (int halving = 0;; ++halving) {
            trial = v;
            for (std::size_t i = 0; i < system.free_nodes().size(); ++i)
                trial[system.free_nodes()[i]] += scale * step[static_cast<Eigen::Index>(i)];
            system.assemble(trial, trial_residual, false, detail::network_cell_iv);
            trial_norm = trial_residual.norm();
            // Once KCL holds to tolerance the residual sits at roundoff and
            // cannot guide damping; take the Newton step as is.
            if (trial_norm < norm || halving >= options.max_halvings || !(trial_norm > 0.0) ||
                detail::max_abs(residual) <= options.i_tol)
                break;
            scale *= 0.5;
        }
        const double max_step = detail::max_abs(step); // undamped, so damping cannot fake convergence
        v.swap(trial);
        norm = trial_norm;
        sol.iterations = iter;
        system.assemble(v, residual, true, detail::network_cell_iv);
        sol.residual = detail::max_abs(residual);
        if (max_step <= options.v_tol && sol.residual <= options.i_tol) {
            sol.converged = true;
            break;
        }
    }
    if (!sol.converged)
        throw NonConvergence(sol.iterations, sol.residual);

    sol.node_voltages = std::move(v);
    const auto& nv = sol.node_voltages;
    sol.branch_currents.reserve(net.branch_count());
    for (const auto& r : net.resistors)
        sol.branch_currents.push_back((nv[r.a] - nv[r.b]) / r.resistance);
    for (const auto& c : net.cells)
        sol.branch_currents.push_back(cell_current(c.model, nv[c.word_line] - nv[c.bit_line]));

    // Current a source pushes into the network equals the current leaving its
    // node through the attached branches.
    std::vector<double> outflow(net.node_count(), 0.0);
    for (std::size_t k = 0; k < net.resistors.size(); ++k) {
        outflow[net.resistors[k].a] += sol.branch_currents[k];
        outflow[net.resistors[k].b] -= sol.branch_currents[k];
    }
    for (std::size_t k = 0; k < net.cells.size(); ++k) {
        const double i = sol.branch_currents[net.resistors.size() + k];
        outflow[net.cells[k].word_line] += i;
        outflow[net.cells[k].bit_line] -= i;
    }
    for (std::size_t node : system.free_nodes())
        outflow[net.ground] -= kLeakConductance * nv[node];
    sol.source_currents.reserve(net.sources.size());
    std::vector<bool> counted(net.node_count(), false);
    for (const auto& s : net.sources) {
        // A node driven by two equal stamps reports its current once.
        sol.source_currents.push_back(counted[s.node] ? 0.0 : outflow[s.node]);
        counted[s.node] = true;
    }
    return sol;
}

} // namespace xbar
