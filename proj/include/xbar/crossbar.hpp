#pragma once

// Resistive network of an N x M crossbar under read bias.
//
// Orientation: word line i is driven from its left end (column 0 side), bit
// line j terminates at its bottom end (row n_rows-1 side). Every line is a
// ladder with one r_wire segment per crosspoint, the first segment running
// from the driver/terminal node to the nearest crosspoint. The selected bit
// line terminates in r_sense to ground; the sense node is that terminal.

#include "xbar/device.hpp"
#include "xbar/errors.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xbar {

enum class Scheme { V2, V3, FF };
enum class Variant { Rectifying, Linear, Selector };
enum class TargetState { LRS, HRS };

inline std::string_view to_string(Scheme s) {
    switch (s) {
    case Scheme::V2: return "v2";
    case Scheme::V3: return "v3";
    case Scheme::FF: return "ff";
    }
    return "?";
}

inline std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::Rectifying: return "rectifying";
    case Variant::Linear: return "linear";
    case Variant::Selector: return "selector";
    }
    return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view s) {
    if (s == "v2" || s == "V2") return Scheme::V2;
    if (s == "v3" || s == "V3") return Scheme::V3;
    if (s == "ff" || s == "FF") return Scheme::FF;
    return std::nullopt;
}

inline std::optional<Variant> parse_variant(std::string_view s) {
    if (s == "rectifying") return Variant::Rectifying;
    if (s == "linear") return Variant::Linear;
    if (s == "selector" || s == "1s1m") return Variant::Selector;
    return std::nullopt;
}

struct CellIndex {
    std::size_t row = 0;
    std::size_t col = 0;
    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Stored data of the non-target cells.
struct Pattern {
    enum class Kind { AllLrs, AllHrs, Checkerboard, Random };
    Kind kind = Kind::AllLrs;
    std::uint64_t seed = 0;

    /// Row-major bits, true = LRS.
    std::vector<bool> materialize(std::size_t rows, std::size_t cols) const {
        std::vector<bool> bits(rows * cols, true);
        switch (kind) {
        case Kind::AllLrs: break;
        case Kind::AllHrs: bits.assign(bits.size(), false); break;
        case Kind::Checkerboard:
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c)
                    bits[r * cols + c] = (r + c) % 2 == 0;
            break;
        case Kind::Random: {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
            std::mt19937_64 rng(seq);
            for (std::size_t i = 0; i < bits.size(); ++i)
                bits[i] = (rng() >> 63) != 0;
            break;
        }
        }
        return bits;
    }
};

inline std::string_view to_string(Pattern::Kind k) {
    switch (k) {
    case Pattern::Kind::AllLrs: return "lrs";
    case Pattern::Kind::AllHrs: return "hrs";
    case Pattern::Kind::Checkerboard: return "checkerboard";
    case Pattern::Kind::Random: return "random";
    }
    return "?";
}

inline std::optional<Pattern::Kind> parse_pattern(std::string_view s) {
    if (s == "lrs") return Pattern::Kind::AllLrs;
    if (s == "hrs") return Pattern::Kind::AllHrs;
    if (s == "checkerboard") return Pattern::Kind::Checkerboard;
    if (s == "random") return Pattern::Kind::Random;
    return std::nullopt;
}

/// Optimal sense resistor: geometric mean of the two states.
inline double sense_resistance(double r_on, double r_off) {
    if (!(r_on > 0.0) || !(r_off >= r_on))
        throw InvalidConfig("sense_resistance requires r_off >= r_on > 0");
    return std::sqrt(r_on * r_off);
}

struct CrossbarConfig {
    std::size_t n_rows = 64;
    std::size_t n_cols = 64;
    double r_wire = 5.0;
    Pattern pattern;
    std::optional<CellIndex> target; // worst case when unset
    Scheme scheme = Scheme::V2;
    double v_ws = 1.0;
    std::optional<double> r_sense;   // sqrt(r_on * r_off) when unset

    void validate() const {
        if (n_rows < 1 || n_cols < 1)
            throw InvalidConfig("crossbar needs at least one row and one column");
        if (!(r_wire >= 0.0) || !std::isfinite(r_wire))
            throw InvalidConfig("r_wire must be a finite value >= 0");
        if (!(v_ws > 0.0) || !std::isfinite(v_ws))
            throw InvalidConfig("v_ws must be > 0");
        if (r_sense && !(*r_sense > 0.0))
            throw InvalidConfig("r_sense must be > 0");
        if (target && (target->row >= n_rows || target->col >= n_cols))
            throw InvalidConfig("target cell out of bounds");
    }
};

/// Far corner from both the word-line drivers and the bit-line terminals.
inline CellIndex worst_case_target(const CrossbarConfig& config) {
    return {0, config.n_cols - 1};
}

/// Which cell model sits at every crosspoint, plus its parameters.
struct CellTechnology {
    Variant variant = Variant::Rectifying;
    DeviceParams device;
    SelectorParams selector;

    void validate() const {
        device.validate();
        if (variant == Variant::Selector)
            selector.validate();
    }

    CellModel cell(bool lrs) const {
        DeviceParams params = device;
        switch (variant) {
        case Variant::Rectifying:
            params.rectifying = true;
            return RectifyingMemristor{params, lrs ? DeviceState::lrs() : DeviceState::hrs()};
        case Variant::Linear:
            params.rectifying = false;
            return LinearMemristor{params, lrs ? DeviceState::lrs() : DeviceState::hrs()};
        case Variant::Selector:
            return SelectorPlusResistor{selector, lrs ? device.r_on : device.r_off};
        }
        throw InvalidConfig("unknown cell variant");
    }
};

struct Network {
    enum class NodeKind { WordLineDriver, WordLine, BitLine, BitLineTerminal, Ground };

    struct Node {
        NodeKind kind;
        std::size_t line;     // row for word-line nodes, column for bit-line nodes
        std::size_t position; // crosspoint index along the line
    };

    struct Resistor {
        std::size_t a;
        std::size_t b;
        double resistance;
    };

    /// Cell voltage is V(word_line) - V(bit_line).
    struct Cell {
        std::size_t word_line;
        std::size_t bit_line;
        CellIndex index;
        CellModel model;
    };

    struct Source {
        std::size_t node;
        double volts;
    };

    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Node> nodes;
    std::vector<Resistor> resistors;
    std::vector<Cell> cells;
    std::vector<Source> sources;
    std::size_t ground = 0;
    std::size_t sense = 0;
    CellIndex target;
    double guess_conductance = 0.0; // 1/sqrt(r_on * r_off), for the linearized start

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t branch_count() const noexcept { return resistors.size() + cells.size(); }

    std::string node_name(std::size_t i) const {
        const Node& n = nodes[i];
        switch (n.kind) {
        case NodeKind::WordLineDriver: return "wl" + std::to_string(n.line) + ".drv";
        case NodeKind::WordLine: return "wl" + std::to_string(n.line) + "." + std::to_string(n.position);
        case NodeKind::BitLine: return "bl" + std::to_string(n.line) + "." + std::to_string(n.position);
        case NodeKind::BitLineTerminal: return "bl" + std::to_string(n.line) + ".term";
        case NodeKind::Ground: return "gnd";
        }
        return "?";
    }

    /// Plain-text adjacency listing, one element per line.
    std::string adjacency() const {
        std::ostringstream out;
        out.precision(17);
        out << "# nodes " << nodes.size() << " resistors " << resistors.size() << " cells " << cells.size()
            << " sources " << sources.size() << "\n";
        for (std::size_t i = 0; i < resistors.size(); ++i)
            out << "R" << i << " " << node_name(resistors[i].a) << " " << node_name(resistors[i].b) << " "
                << resistors[i].resistance << "\n";
        for (const auto& c : cells)
            out << "X" << c.index.row << "_" << c.index.col << " " << node_name(c.word_line) << " "
                << node_name(c.bit_line) << "\n";
        for (const auto& s : sources)
            out << "V " << node_name(s.node) << " " << s.volts << "\n";
        out << "sense " << node_name(sense) << "\n";
        return out.str();
    }
};

namespace detail {

struct Bias {
    std::optional<double> unselected_word;
    std::optional<double> unselected_bit;
};

inline Bias scheme_bias(Scheme scheme, double v) {
    switch (scheme) {
    case Scheme::V2: return {v / 2.0, v / 2.0};
    case Scheme::V3: return {v / 3.0, 2.0 * v / 3.0};
    case Scheme::FF: return {};
    }
    return {};
}

} // namespace detail

/// Builds the read network with the target cell forced to `target_state` and
/// every other cell taken from the stored pattern.
inline Network build(const CrossbarConfig& config, const CellTechnology& tech, TargetState target_state) {
    config.validate();
    tech.validate();

    const std::size_t rows = config.n_rows;
    const std::size_t cols = config.n_cols;
    const bool ladders = config.r_wire > 0.0;
    const CellIndex target = config.target.value_or(worst_case_target(config));
    const double r_sense = config.r_sense.value_or(sense_resistance(tech.device.r_on, tech.device.r_off));

    Network net;
    net.rows = rows;
    net.cols = cols;
    net.target = target;
    net.guess_conductance = 1.0 / std::sqrt(tech.device.r_on * tech.device.r_off);

    using Kind = Network::NodeKind;
    // With zero wire resistance a whole line is one electrical node.
    std::vector<std::size_t> wl_driver(rows), bl_terminal(cols);
    std::vector<std::size_t> wl_node(rows * cols), bl_node(rows * cols);

    for (std::size_t r = 0; r < rows; ++r) {
        if (ladders) {
            wl_driver[r] = net.nodes.size();
            net.nodes.push_back({Kind::WordLineDriver, r, 0});
            for (std::size_t c = 0; c < cols; ++c) {
                wl_node[r * cols + c] = net.nodes.size();
                net.nodes.push_back({Kind::WordLine, r, c});
            }
        } else {
            wl_driver[r] = net.nodes.size();
            net.nodes.push_back({Kind::WordLine, r, 0});
            for (std::size_t c = 0; c < cols; ++c)
                wl_node[r * cols + c] = wl_driver[r];
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (ladders) {
            for (std::size_t r = 0; r < rows; ++r) {
                bl_node[r * cols + c] = net.nodes.size();
                net.nodes.push_back({Kind::BitLine, c, r});
            }
            bl_terminal[c] = net.nodes.size();
            net.nodes.push_back({Kind::BitLineTerminal, c, rows});
        } else {
            bl_terminal[c] = net.nodes.size();
            net.nodes.push_back({Kind::BitLine, c, 0});
            for (std::size_t r = 0; r < rows; ++r)
                bl_node[r * cols + c] = bl_terminal[c];
        }
    }
    net.ground = net.nodes.size();
    net.nodes.push_back({Kind::Ground, 0, 0});
    net.sense = bl_terminal[target.col];

    if (ladders) {
        for (std::size_t r = 0; r < rows; ++r) {
            net.resistors.push_back({wl_driver[r], wl_node[r * cols], config.r_wire});
            for (std::size_t c = 1; c < cols; ++c)
                net.resistors.push_back({wl_node[r * cols + c - 1], wl_node[r * cols + c], config.r_wire});
        }
        for (std::size_t c = 0; c < cols; ++c) {
            for (std::size_t r = 1; r < rows; ++r)
                net.resistors.push_back({bl_node[(r - 1) * cols + c], bl_node[r * cols + c], config.r_wire});
            net.resistors.push_back({bl_node[(rows - 1) * cols + c], bl_terminal[c], config.r_wire});
        }
    }
    net.resistors.push_back({net.sense, net.ground, r_sense});

    const std::vector<bool> bits = config.pattern.materialize(rows, cols);
    const CellModel lrs_cell = tech.cell(true);
    const CellModel hrs_cell = tech.cell(false);
    net.cells.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const CellIndex idx{r, c};
            const bool lrs = idx == target ? target_state == TargetState::LRS : bits[r * cols + c];
            net.cells.push_back({wl_node[r * cols + c], bl_node[r * cols + c], idx, lrs ? lrs_cell : hrs_cell});
        }
    }

    net.sources.push_back({net.ground, 0.0});
    net.sources.push_back({wl_driver[target.row], config.v_ws});
    const detail::Bias bias = detail::scheme_bias(config.scheme, config.v_ws);
    if (bias.unselected_word)
        for (std::size_t r = 0; r < rows; ++r)
            if (r != target.row)
                net.sources.push_back({wl_driver[r], *bias.unselected_word});
    if (bias.unselected_bit)
        for (std::size_t c = 0; c < cols; ++c)
            if (c != target.col)
                net.sources.push_back({bl_terminal[c], *bias.unselected_bit});
    return net;
}

} // namespace xbar
