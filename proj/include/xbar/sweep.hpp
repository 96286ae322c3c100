#pragma once

// Declarative parameter sweeps: one read() per (axis value, scheme), rows
// independent of each other and collected in axis order.

#include "xbar/crossbar.hpp"
#include "xbar/readout.hpp"
#include "xbar/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace xbar {

enum class Axis { Size, WireResistance, ROn, RectRatio, SelectorK };

inline std::string_view to_string(Axis a) {
    switch (a) {
    case Axis::Size: return "n";
    case Axis::WireResistance: return "r_wire";
    case Axis::ROn: return "r_on";
    case Axis::RectRatio: return "ratio";
    case Axis::SelectorK: return "k";
    }
    return "?";
}

struct SweepSpec {
    Axis axis = Axis::Size;
    std::vector<double> values;
    std::vector<Scheme> schemes{Scheme::V2, Scheme::V3, Scheme::FF};
    CrossbarConfig base;      // scheme and (for Size) dimensions are overwritten per row
    CellTechnology tech;      // variant selects the cell model
    double fixed_ratio = 1e3; // r_off / r_on held during an ROn sweep
    SolveOptions options;
    std::uint64_t seed = 0;
    unsigned jobs = 1;

    void validate() const {
        if (values.empty())
            throw InvalidConfig("sweep needs at least one axis value");
        const bool up = values.size() < 2 || values[1] > values[0];
        for (std::size_t i = 1; i < values.size(); ++i)
            if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1]))
                throw InvalidConfig("sweep values must be strictly monotone");
        if (schemes.empty())
            throw InvalidConfig("sweep needs at least one read scheme");
        if (axis == Axis::Size)
            for (double v : values)
                if (!(v >= 1.0) || v != std::floor(v))
                    throw InvalidConfig("size sweep values must be positive integers");
        if (axis == Axis::SelectorK && tech.variant != Variant::Selector)
            throw InvalidConfig("selector sweep requires the selector cell variant");
        if (axis == Axis::ROn && !(fixed_ratio >= 1.0))
            throw InvalidConfig("r_on sweep requires a ratio >= 1");
    }
};

struct SweepRow {
    Scheme scheme = Scheme::V2;
    Variant variant = Variant::Rectifying;
    std::size_t n = 0;
    double r_wire = 0.0;
    double r_on = 0.0;
    double r_off = 0.0;
    double ratio = 0.0;
    double k = 0.0;
    double r_sense = 0.0;
    ReadResult result;
    std::optional<std::string> error; // set on a failed row; result is then meaningless
};

inline constexpr const char* kCsvHeader =
    "scheme,variant,n,r_wire,r_on,r_off,ratio,k,v_out_lrs,v_out_hrs,read_margin,power_lrs,power_hrs";

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct RowSetup {
    CrossbarConfig config;
    CellTechnology tech;
};

inline RowSetup row_setup(const SweepSpec& spec, double value, Scheme scheme, std::size_t row_index) {
    RowSetup s{spec.base, spec.tech};
    s.config.scheme = scheme;
    s.config.pattern.seed = splitmix64(spec.seed ^ splitmix64(row_index));
    switch (spec.axis) {
    case Axis::Size:
        s.config.n_rows = s.config.n_cols = static_cast<std::size_t>(value);
        s.config.target.reset();
        break;
    case Axis::WireResistance: s.config.r_wire = value; break;
    case Axis::ROn:
        s.tech.device.r_on = value;
        s.tech.device.r_off = spec.fixed_ratio * value;
        s.config.r_sense.reset();
        break;
    case Axis::RectRatio:
        s.tech.device.r_off = value * s.tech.device.r_on;
        s.config.r_sense.reset();
        break;
    case Axis::SelectorK: s.tech.selector.k = value; break;
    }
    return s;
}

inline SweepRow run_row(const SweepSpec& spec, double value, Scheme scheme, std::size_t row_index) {
    const RowSetup s = row_setup(spec, value, scheme, row_index);
    SweepRow row;
    row.scheme = scheme;
    row.variant = s.tech.variant;
    row.n = s.config.n_rows;
    row.r_wire = s.config.r_wire;
    row.r_on = s.tech.device.r_on;
    row.r_off = s.tech.device.r_off;
    row.ratio = s.tech.device.r_off / s.tech.device.r_on;
    row.k = s.tech.selector.k;
    try {
        row.r_sense = s.config.r_sense.value_or(sense_resistance(row.r_on, row.r_off));
        row.result = read(s.config, s.tech, spec.options);
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

} // namespace detail

/// Runs every (value, scheme) pair. Failed rows carry `error` instead of
/// aborting the sweep. Output order is value-major, scheme-minor.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t count = spec.values.size() * spec.schemes.size();
    std::vector<SweepRow> rows(count);
    auto task = [&](std::size_t i) {
        rows[i] = detail::run_row(spec, spec.values[i / spec.schemes.size()], spec.schemes[i % spec.schemes.size()], i);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            task(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                task(i);
        });
    for (auto& t : pool)
        t.join();
    return rows;
}

// Default experiment definitions. Grids cover the visible ranges of the
// published curves; every field can be overridden before running.

inline SweepSpec size_sweep_spec() {
    SweepSpec s;
    s.axis = Axis::Size;
    s.values = {4, 8, 16, 32, 64, 128};
    return s;
}

inline SweepSpec wire_sweep_spec() {
    SweepSpec s;
    s.axis = Axis::WireResistance;
    s.values = {5, 10, 20, 40, 80, 160, 320};
    s.schemes = {Scheme::V2};
    return s;
}

inline SweepSpec ron_sweep_spec() {
    SweepSpec s;
    s.axis = Axis::ROn;
    s.values = {1e5, 2e5, 5e5, 1e6, 2e6, 5e6};
    s.schemes = {Scheme::V2};
    return s;
}

inline SweepSpec ratio_sweep_spec() {
    SweepSpec s;
    s.axis = Axis::RectRatio;
    s.values = {1e1, 1e2, 1e3, 1e4};
    return s;
}

inline SweepSpec selector_sweep_spec() {
    SweepSpec s;
    s.axis = Axis::SelectorK;
    s.values = {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0};
    s.schemes = {Scheme::V2, Scheme::V3};
    s.tech.variant = Variant::Selector;
    return s;
}

inline SweepSpec linear_sweep_spec() {
    SweepSpec s = size_sweep_spec();
    s.tech.variant = Variant::Linear;
    return s;
}

namespace detail {
inline std::vector<SweepRow> run_checked(SweepSpec spec, Axis axis) {
    if (spec.axis != axis)
        throw InvalidConfig("sweep spec axis does not match the requested sweep");
    return run_sweep(spec);
}
} // namespace detail

inline std::vector<SweepRow> sweep_size(const SweepSpec& spec) { return detail::run_checked(spec, Axis::Size); }
inline std::vector<SweepRow> sweep_wire(const SweepSpec& spec) { return detail::run_checked(spec, Axis::WireResistance); }
inline std::vector<SweepRow> sweep_ron(const SweepSpec& spec) { return detail::run_checked(spec, Axis::ROn); }
inline std::vector<SweepRow> sweep_ratio(const SweepSpec& spec) { return detail::run_checked(spec, Axis::RectRatio); }
inline std::vector<SweepRow> sweep_selector(const SweepSpec& spec) { return detail::run_checked(spec, Axis::SelectorK); }

/// Linear-device rows followed by the rectifying-device rows on the same grid.
inline std::vector<SweepRow> sweep_linear_comparison(const SweepSpec& spec) {
    SweepSpec linear = spec;
    linear.tech.variant = Variant::Linear;
    SweepSpec rectifying = spec;
    rectifying.tech.variant = Variant::Rectifying;
    std::vector<SweepRow> rows = detail::run_checked(linear, Axis::Size);
    std::vector<SweepRow> paired = detail::run_checked(rectifying, Axis::Size);
    rows.insert(rows.end(), paired.begin(), paired.end());
    return rows;
}

inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_line(const SweepRow& r) {
    std::string line;
    line += to_string(r.scheme);
    line += ',';
    line += to_string(r.variant);
    line += ',' + std::to_string(r.n);
    line += ',' + format_number(r.r_wire);
    line += ',' + format_number(r.r_on);
    line += ',' + format_number(r.r_off);
    line += ',' + format_number(r.ratio);
    line += ',';
    if (r.variant == Variant::Selector)
        line += format_number(r.k);
    line += ',' + format_number(r.result.v_out_lrs);
    line += ',' + format_number(r.result.v_out_hrs);
    line += ',' + format_number(r.result.read_margin);
    line += ',' + format_number(r.result.power_lrs);
    line += ',' + format_number(r.result.power_hrs);
    return line;
}

/// Writes the header and every successful row; returns the number of failed
/// rows skipped.
inline std::size_t write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kCsvHeader << '\n';
    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (r.error) {
            ++failed;
            continue;
        }
        out << csv_line(r) << '\n';
    }
    return failed;
}

/// gnuplot script plotting read margin and power against the swept column.
inline void write_plot_script(std::ostream& out, const std::string& csv_path, Axis axis,
                              const std::vector<Scheme>& schemes, Variant variant) {
    static constexpr int kColumn[] = {3, 4, 5, 7, 8}; // n, r_wire, r_on, ratio, k
    const int x = kColumn[static_cast<int>(axis)];
    const bool log_x = axis != Axis::SelectorK;
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set terminal pngcairo size 900,700\n";
    if (log_x)
        out << "set logscale x\n";
    auto plot = [&](const char* file, const char* ylabel, const std::string& columns, bool log_y) {
        out << "set output '" << file << "'\n"
            << "set xlabel '" << to_string(axis) << "'\n"
            << "set ylabel '" << ylabel << "'\n"
            << (log_y ? "set logscale y\n" : "unset logscale y\n") << "plot ";
        bool first = true;
        for (Scheme s : schemes) {
            if (!first)
                out << ", \\\n     ";
            first = false;
            out << "'" << csv_path << "' using (strcol(1) eq '" << to_string(s) << "' && strcol(2) eq '"
                << to_string(variant) << "' ? $" << x << " : 1/0):" << columns << " with linespoints title '"
                << to_string(s) << "'";
        }
        out << "\n";
    };
    plot("read_margin.png", "read margin", "11", false);
    plot("power.png", "power (W)", "(($12+$13)/2)", true);
}

} // namespace xbar
