#pragma once

// Flat key=value run configuration. Unspecified keys keep their defaults,
// unknown keys are rejected. Later layers (file, then command line) override
// earlier ones.

#include "xbar/crossbar.hpp"
#include "xbar/device.hpp"
#include "xbar/errors.hpp"
#include "xbar/solver.hpp"
#include "xbar/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace xbar {

struct ConfigKey {
    std::string_view name;
    std::string_view default_value; // empty: derived or subcommand default
    std::string_view help;
};

inline constexpr ConfigKey kConfigKeys[] = {
    {"r_off", "5e8", "high resistance state R_OFF (Ohm)"},
    {"r_on", "5e5", "low resistance state R_ON (Ohm)"},
    {"ratio", "1e3", "R_OFF/R_ON; sets r_off when r_off is not given, fixed ratio of sweep-ron"},
    {"r_sense", "", "sense resistor (Ohm); default sqrt(r_on*r_off) = 1.58e7"},
    {"r_wire", "5", "interconnect resistance per segment (Ohm)"},
    {"v_th", "1.5", "threshold voltage V_TH (V)"},
    {"alpha", "2.5e8", "programming rate above threshold (1/(V s))"},
    {"beta", "0", "programming rate below threshold (1/(V s))"},
    {"gamma", "1e-8", "selector current prefactor (A)"},
    {"k", "1", "selector nonlinearity multiplier"},
    {"p", "18.4", "selector nonlinearity base (1/V)"},
    {"variant", "rectifying", "cell model: rectifying, linear, selector"},
    {"n", "64", "array size N (rows = cols = N)"},
    {"n_rows", "", "row count; default n"},
    {"n_cols", "", "column count; default n"},
    {"scheme", "v2", "read scheme for `read`: v2, v3, ff"},
    {"schemes", "", "comma-separated schemes for sweeps; default per sweep"},
    {"v_ws", "1", "read voltage on the selected word line (V)"},
    {"pattern", "lrs", "stored data of non-target cells: lrs, hrs, checkerboard, random"},
    {"seed", "0", "global seed for random patterns"},
    {"target_row", "", "target row; default worst case (0)"},
    {"target_col", "", "target column; default worst case (n_cols-1)"},
    {"max_iters", "100", "Newton iteration limit"},
    {"v_tol", "1e-9", "Newton voltage-step tolerance (V)"},
    {"i_tol", "1e-12", "KCL residual tolerance (A)"},
    {"damping", "1", "initial Newton step scale in (0,1]"},
    {"jobs", "1", "worker threads for sweeps"},
    {"sizes", "4,8,16,32,64,128", "grid of sweep-size and sweep-linear"},
    {"wires", "5,10,20,40,80,160,320", "grid of sweep-wire (Ohm)"},
    {"rons", "1e5,2e5,5e5,1e6,2e6,5e6", "grid of sweep-ron (Ohm)"},
    {"ratios", "1e1,1e2,1e3,1e4", "grid of sweep-ratio"},
    {"ks", "0.05,0.1,0.2,0.3,0.5,0.7,1,1.5,2,3,5", "grid of sweep-selector"},
    {"amplitude", "2.0", "iv: peak drive voltage (V)"},
    {"freq", "1e7", "iv: drive frequency (Hz)"},
    {"cycles", "1", "iv: number of drive periods"},
    {"steps_per_cycle", "10000", "iv: integration steps per period"},
    {"w_init", "0", "iv: initial state variable"},
    {"out", "", "output CSV path; stdout when empty"},
    {"plot", "", "optional gnuplot script path for sweeps"},
};

inline const ConfigKey* find_key(std::string_view name) {
    for (const auto& k : kConfigKeys)
        if (k.name == name)
            return &k;
    return nullptr;
}

class RunConfig {
public:
    struct Origin {
        std::string path;
        std::size_t line = 0;
    };

    /// Sets a value; unknown keys and empty values are errors.
    void set(std::string_view key, std::string value, Origin origin = {"<command line>", 0}) {
        if (!find_key(key))
            throw ConfigError(origin.path, origin.line, std::string(key), "unknown key");
        values_[std::string(key)] = {std::move(value), std::move(origin)};
    }

    bool has(std::string_view key) const { return values_.count(std::string(key)) != 0; }

    /// Layer a `key = value` document over the current values.
    void load(std::istream& in, const std::string& path) {
        std::string line;
        std::size_t number = 0;
        std::map<std::string, std::size_t> seen;
        while (std::getline(in, line)) {
            ++number;
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            const std::string text = trim(line);
            if (text.empty())
                continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path, number, "", "expected key = value");
            const std::string key = trim(text.substr(0, eq));
            const std::string value = trim(text.substr(eq + 1));
            if (key.empty())
                throw ConfigError(path, number, "", "missing key");
            if (value.empty())
                throw ConfigError(path, number, key, "missing value");
            if (auto prev = seen.find(key); prev != seen.end())
                throw ConfigError(path, number, key, "duplicate key (first set on line " + std::to_string(prev->second) + ")");
            seen[key] = number;
            set(key, value, {path, number});
        }
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw ConfigError(path, 0, "", "cannot open config file");
        load(in, path);
    }

    std::string text(std::string_view key) const {
        if (auto it = values_.find(std::string(key)); it != values_.end())
            return it->second.value;
        const ConfigKey* k = find_key(key);
        if (!k)
            throw ConfigError("<internal>", 0, std::string(key), "unknown key");
        return std::string(k->default_value);
    }

    double number(std::string_view key) const {
        const std::string s = text(key);
        double x = 0.0;
        if (!parse_double(s, x))
            fail(key, "expected a number, got '" + s + "'");
        return x;
    }

    std::size_t count(std::string_view key) const {
        const double x = number(key);
        if (!(x >= 0.0) || x != std::floor(x) || x > 1e12)
            fail(key, "expected a non-negative integer");
        return static_cast<std::size_t>(x);
    }

    std::vector<double> grid(std::string_view key) const {
        std::vector<double> out;
        for (const auto& item : split(text(key))) {
            double x = 0.0;
            if (!parse_double(item, x))
                fail(key, "expected comma-separated numbers, got '" + item + "'");
            out.push_back(x);
        }
        if (out.empty())
            fail(key, "empty grid");
        return out;
    }

    std::optional<std::vector<Scheme>> schemes() const {
        if (text("schemes").empty())
            return std::nullopt;
        std::vector<Scheme> out;
        for (const auto& item : split(text("schemes"))) {
            const auto s = parse_scheme(item);
            if (!s)
                fail("schemes", "unknown scheme '" + item + "'");
            out.push_back(*s);
        }
        return out;
    }

    CellTechnology technology() const {
        CellTechnology t;
        const auto variant = parse_variant(text("variant"));
        if (!variant)
            fail("variant", "expected rectifying, linear or selector");
        t.variant = *variant;
        t.device.r_on = number("r_on");
        const double ratio = number("ratio");
        if (has("r_off")) {
            t.device.r_off = number("r_off");
            if (has("ratio") && std::abs(t.device.r_off / t.device.r_on - ratio) > 1e-9 * ratio)
                fail("ratio", "inconsistent with r_off/r_on");
        } else if (has("ratio")) {
            t.device.r_off = ratio * t.device.r_on;
        } else {
            t.device.r_off = number("r_off");
        }
        t.device.v_th = number("v_th");
        t.device.alpha = number("alpha");
        t.device.beta = number("beta");
        t.device.rectifying = t.variant != Variant::Linear;
        t.selector.gamma = number("gamma");
        t.selector.k = number("k");
        t.selector.p = number("p");
        try {
            t.validate();
        } catch (const InvalidConfig& e) {
            fail("", e.what());
        }
        return t;
    }

    CrossbarConfig crossbar() const {
        CrossbarConfig c;
        const std::size_t n = count("n");
        c.n_rows = has("n_rows") ? count("n_rows") : n;
        c.n_cols = has("n_cols") ? count("n_cols") : n;
        c.r_wire = number("r_wire");
        c.v_ws = number("v_ws");
        const auto scheme = parse_scheme(text("scheme"));
        if (!scheme)
            fail("scheme", "expected v2, v3 or ff");
        c.scheme = *scheme;
        const auto pattern = parse_pattern(text("pattern"));
        if (!pattern)
            fail("pattern", "expected lrs, hrs, checkerboard or random");
        c.pattern.kind = *pattern;
        c.pattern.seed = static_cast<std::uint64_t>(count("seed"));
        if (has("r_sense"))
            c.r_sense = number("r_sense");
        if (has("target_row") || has("target_col")) {
            const CellIndex worst = worst_case_target(c);
            c.target = CellIndex{has("target_row") ? count("target_row") : worst.row,
                                 has("target_col") ? count("target_col") : worst.col};
        }
        try {
            c.validate();
        } catch (const InvalidConfig& e) {
            fail("", e.what());
        }
        return c;
    }

    SolveOptions solve_options() const {
        SolveOptions o;
        o.max_iters = count("max_iters");
        o.v_tol = number("v_tol");
        o.i_tol = number("i_tol");
        o.damping = number("damping");
        try {
            o.validate();
        } catch (const InvalidConfig& e) {
            fail("", e.what());
        }
        return o;
    }

    Waveform waveform() const { return {number("amplitude"), number("freq"), number("cycles")}; }

    /// Fills a default sweep definition with the configured values.
    SweepSpec apply(SweepSpec spec, std::string_view grid_key) const {
        spec.values = grid(grid_key);
        if (auto s = schemes())
            spec.schemes = *s;
        const Variant variant = spec.tech.variant;
        spec.tech = technology();
        if (!has("variant"))
            spec.tech.variant = variant;
        spec.tech.device.rectifying = spec.tech.variant != Variant::Linear;
        spec.base = crossbar();
        spec.fixed_ratio = number("ratio");
        spec.options = solve_options();
        spec.seed = static_cast<std::uint64_t>(count("seed"));
        spec.jobs = static_cast<unsigned>(std::max<std::size_t>(1, count("jobs")));
        try {
            spec.validate();
        } catch (const InvalidConfig& e) {
            fail(grid_key, e.what());
        }
        return spec;
    }

private:
    struct Entry {
        std::string value;
        Origin origin;
    };

    [[noreturn]] void fail(std::string_view key, const std::string& msg) const {
        if (auto it = values_.find(std::string(key)); it != values_.end())
            throw ConfigError(it->second.origin.path, it->second.origin.line, std::string(key), msg);
        throw ConfigError(key.empty() ? "<config>" : "<defaults>", 0, std::string(key), msg);
    }

    static std::string trim(std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string_view::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return std::string(s.substr(b, e - b + 1));
    }

    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            if (auto t = trim(item); !t.empty())
                out.push_back(t);
        return out;
    }

    static bool parse_double(const std::string& s, double& out) {
        const char* first = s.data();
        const char* last = s.data() + s.size();
        if (first != last && *first == '+')
            ++first;
        const auto [ptr, ec] = std::from_chars(first, last, out);
        return ec == std::errc() && ptr == last && std::isfinite(out);
    }

    std::map<std::string, Entry> values_;
};

} // namespace xbar
