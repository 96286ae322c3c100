#pragma once

#include "xbar/xbar.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

namespace xbar::cli {

inline constexpr const char* kConfigEnv = "XBAR_CONFIG";

enum ExitCode : int { kOk = 0, kError = 1, kUsage = 2, kRowsFailed = 3 };

namespace detail {

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw Error("cannot open output file " + path);
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

inline void describe(std::ostream& err, const SweepRow& row) {
    err << "row failed: scheme=" << to_string(row.scheme) << " variant=" << to_string(row.variant) << " n=" << row.n
        << " r_wire=" << format_number(row.r_wire) << " r_on=" << format_number(row.r_on)
        << " r_off=" << format_number(row.r_off) << " k=" << format_number(row.k) << ": " << *row.error << "\n";
}

inline int run_iv(const RunConfig& cfg, std::ostream& out) {
    CellTechnology tech = cfg.technology();
    DeviceParams params = tech.device;
    params.rectifying = tech.variant != Variant::Linear;
    const double w = cfg.number("w_init");
    if (!(w >= 0.0 && w <= 1.0))
        throw ConfigError("<config>", 0, "w_init", "must lie in [0, 1]");
    const auto samples = trace_iv(params, {w}, cfg.waveform(), cfg.count("steps_per_cycle"));
    Output o(cfg.text("out"), out);
    *o << "t,v,i,w\n";
    for (const auto& s : samples)
        *o << format_number(s.t) << ',' << format_number(s.v) << ',' << format_number(s.i) << ','
           << format_number(s.w) << '\n';
    return kOk;
}

inline int run_read(const RunConfig& cfg, std::ostream& out) {
    const CrossbarConfig config = cfg.crossbar();
    const CellTechnology tech = cfg.technology();
    const ReadResult r = read(config, tech, cfg.solve_options());
    char summary[512];
    std::snprintf(summary, sizeof summary,
                  "read %zux%zu scheme=%s variant=%s RM = %.4f v_out_lrs = %.6g V v_out_hrs = %.6g V "
                  "power_lrs = %.6g W power_hrs = %.6g W iterations = %zu/%zu\n",
                  config.n_rows, config.n_cols, std::string(to_string(config.scheme)).c_str(),
                  std::string(to_string(tech.variant)).c_str(), r.read_margin, r.v_out_lrs, r.v_out_hrs, r.power_lrs,
                  r.power_hrs, r.iterations.first, r.iterations.second);
    out << summary;
    if (!cfg.text("out").empty()) {
        SweepRow row;
        row.scheme = config.scheme;
        row.variant = tech.variant;
        row.n = config.n_rows;
        row.r_wire = config.r_wire;
        row.r_on = tech.device.r_on;
        row.r_off = tech.device.r_off;
        row.ratio = tech.device.r_off / tech.device.r_on;
        row.k = tech.selector.k;
        row.result = r;
        Output o(cfg.text("out"), out);
        write_csv(*o, {row});
    }
    return kOk;
}

inline int run_sweep_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    SweepSpec spec;
    std::vector<SweepRow> rows;
    if (name == "sweep-size") {
        spec = cfg.apply(size_sweep_spec(), "sizes");
        rows = sweep_size(spec);
    } else if (name == "sweep-wire") {
        spec = cfg.apply(wire_sweep_spec(), "wires");
        rows = sweep_wire(spec);
    } else if (name == "sweep-ron") {
        spec = cfg.apply(ron_sweep_spec(), "rons");
        rows = sweep_ron(spec);
    } else if (name == "sweep-ratio") {
        spec = cfg.apply(ratio_sweep_spec(), "ratios");
        rows = sweep_ratio(spec);
    } else if (name == "sweep-selector") {
        spec = cfg.apply(selector_sweep_spec(), "ks");
        rows = sweep_selector(spec);
    } else {
        spec = cfg.apply(linear_sweep_spec(), "sizes");
        rows = sweep_linear_comparison(spec);
    }
    std::size_t failed = 0;
    {
        Output o(cfg.text("out"), out);
        failed = write_csv(*o, rows);
    }
    if (const std::string plot = cfg.text("plot"); !plot.empty()) {
        std::ofstream script(plot);
        if (!script)
            throw Error("cannot open plot script " + plot);
        const std::string csv = cfg.text("out").empty() ? "sweep.csv" : cfg.text("out");
        write_plot_script(script, csv, spec.axis, spec.schemes, spec.tech.variant);
        if (name == "sweep-linear")
            write_plot_script(script, csv, spec.axis, spec.schemes, Variant::Rectifying);
    }
    for (const auto& r : rows)
        if (r.error)
            describe(err, r);
    return failed == 0 ? kOk : kRowsFailed;
}

} // namespace detail

/// Runs one CLI invocation, writing results to `out` and diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Crossbar read-margin and read-power simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path,
                   std::string("key=value config file; default from $") + kConfigEnv);
    std::map<std::string, std::string> flags;
    for (const auto& key : kConfigKeys) {
        std::string help(key.help);
        if (!key.default_value.empty())
            help += " [" + std::string(key.default_value) + "]";
        app.add_option("--" + std::string(key.name), flags[std::string(key.name)], help);
    }

    const char* commands[][2] = {
        {"iv", "trace the I-V loop of one device under a sinusoidal drive"},
        {"read", "read the target cell in LRS and HRS; print read margin and power"},
        {"sweep-size", "read margin and power against array size"},
        {"sweep-wire", "read margin and power against interconnect resistance"},
        {"sweep-ron", "read margin and power against R_ON at a fixed ratio"},
        {"sweep-ratio", "read margin and power against the rectification ratio"},
        {"sweep-selector", "1S1M cell: read margin and power against selector nonlinearity k"},
        {"sweep-linear", "linear device against the rectifying device over array size"},
    };
    for (const auto& c : commands)
        app.add_subcommand(c[0], c[1]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        RunConfig cfg;
        if (config_path.empty())
            if (const char* env = std::getenv(kConfigEnv); env && *env)
                config_path = env;
        if (!config_path.empty())
            cfg.load_file(config_path);
        for (const auto& key : kConfigKeys) {
            const std::string name(key.name);
            if (app.count("--" + name) > 0)
                cfg.set(name, flags[name]);
        }

        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "iv")
            return detail::run_iv(cfg, out);
        if (name == "read")
            return detail::run_read(cfg, out);
        return detail::run_sweep_command(name, cfg, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    }
}

} // namespace xbar::cli
