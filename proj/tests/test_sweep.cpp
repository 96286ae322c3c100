#include "xbar/sweep.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace xbar;

namespace {

SweepSpec small_size_sweep() {
    SweepSpec s = size_sweep_spec();
    s.values = {1, 2, 4, 8};
    return s;
}

std::string csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    write_csv(out, rows);
    return out.str();
}

} // namespace

TEST(Sweep, RowsAreValueMajor) {
    const auto rows = sweep_size(small_size_sweep());
    ASSERT_EQ(rows.size(), 12u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].n, std::size_t{1} << (i / 3));
        EXPECT_EQ(rows[i].scheme, (std::vector<Scheme>{Scheme::V2, Scheme::V3, Scheme::FF})[i % 3]);
        EXPECT_FALSE(rows[i].error);
    }
}

TEST(Sweep, SingleCellRowsShareTheDivider) {
    const auto rows = sweep_size(small_size_sweep());
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_NEAR(rows[i].result.read_margin, 0.93869, 1e-5);
}

TEST(Sweep, CoupledSenseResistor) {
    SweepSpec s = ratio_sweep_spec();
    s.base.n_rows = s.base.n_cols = 4;
    for (const auto& r : sweep_ratio(s)) {
        EXPECT_EQ(r.r_sense, std::sqrt(r.r_on * r.r_off));
        EXPECT_DOUBLE_EQ(r.ratio, r.r_off / r.r_on);
    }
    s = ron_sweep_spec();
    s.base.n_rows = s.base.n_cols = 4;
    s.fixed_ratio = 100.0;
    const auto rows = sweep_ron(s);
    ASSERT_EQ(rows.size(), s.values.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].r_on, s.values[i]);
        EXPECT_DOUBLE_EQ(rows[i].r_off, 100.0 * s.values[i]);
        EXPECT_EQ(rows[i].r_sense, std::sqrt(rows[i].r_on * rows[i].r_off));
    }
}

TEST(Sweep, WorkerCountDoesNotChangeOutput) {
    SweepSpec s = small_size_sweep();
    s.base.pattern.kind = Pattern::Kind::Random;
    s.seed = 99;
    const std::string serial = csv(run_sweep(s));
    s.jobs = 3;
    EXPECT_EQ(csv(run_sweep(s)), serial);
}

TEST(Sweep, RandomPatternFollowsSeed) {
    SweepSpec s = small_size_sweep();
    s.values = {8};
    s.base.pattern.kind = Pattern::Kind::Random;
    s.seed = 1;
    const std::string a = csv(run_sweep(s));
    EXPECT_EQ(csv(run_sweep(s)), a);
    s.seed = 2;
    EXPECT_NE(csv(run_sweep(s)), a);
}

TEST(Sweep, FailedRowsAreSkippedAndCounted) {
    SweepSpec s = small_size_sweep();
    s.options.max_iters = 1;
    s.options.initial_guess = SolveOptions::Guess::Zero;
    const auto rows = run_sweep(s);
    std::size_t failed = 0;
    for (const auto& r : rows)
        failed += r.error.has_value();
    EXPECT_GT(failed, 0u);
    std::ostringstream out;
    EXPECT_EQ(write_csv(out, rows), failed);
    std::size_t lines = 0;
    for (char ch : out.str())
        lines += ch == '\n';
    EXPECT_EQ(lines, 1 + rows.size() - failed);
}

TEST(Sweep, ValidatesSpec) {
    SweepSpec s = small_size_sweep();
    s.values = {4, 4};
    EXPECT_THROW(run_sweep(s), InvalidConfig);
    s.values = {2.5};
    EXPECT_THROW(run_sweep(s), InvalidConfig);
    s = small_size_sweep();
    s.schemes.clear();
    EXPECT_THROW(run_sweep(s), InvalidConfig);
    s = selector_sweep_spec();
    s.tech.variant = Variant::Rectifying;
    EXPECT_THROW(run_sweep(s), InvalidConfig);
    EXPECT_THROW(sweep_wire(small_size_sweep()), InvalidConfig);
}

TEST(Csv, HeaderAndNumberFormat) {
    SweepRow r;
    r.n = 4;
    r.r_wire = 5;
    r.r_on = 5e5;
    r.r_off = 5e8;
    r.ratio = 1000;
    r.k = 2;
    r.result.read_margin = 0.1;
    std::ostringstream out;
    write_csv(out, {r});
    EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\nv2,rectifying,4,5,500000,500000000,1000,,0,0,"
                                                   "0.10000000000000001,0,0\n");
    r.variant = Variant::Selector;
    EXPECT_NE(csv_line(r).find(",1000,2,"), std::string::npos);
    EXPECT_EQ(format_number(1.0 / 3.0), "0.33333333333333331");
}

TEST(Trends, WireResistanceLowersMargin) {
    SweepSpec s = wire_sweep_spec();
    s.base.n_rows = s.base.n_cols = 16;
    s.values = {5, 80, 320};
    const auto rows = sweep_wire(s);
    EXPECT_GT(rows[0].result.read_margin, rows[1].result.read_margin);
    EXPECT_GT(rows[1].result.read_margin, rows[2].result.read_margin);
}

TEST(Trends, LinearComparisonPairsRows) {
    SweepSpec s = linear_sweep_spec();
    s.values = {8, 16};
    s.schemes = {Scheme::V2};
    const auto rows = sweep_linear_comparison(s);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].variant, Variant::Linear);
    EXPECT_EQ(rows[2].variant, Variant::Rectifying);
    for (std::size_t i = 0; i < 2; ++i)
        EXPECT_LT(rows[i].result.read_margin, rows[i + 2].result.read_margin);
}

TEST(Trends, SelectorNeedsSomeNonlinearity) {
    SweepSpec s = selector_sweep_spec();
    s.base.n_rows = s.base.n_cols = 16;
    s.values = {0.05, 1.0};
    s.schemes = {Scheme::V2};
    const auto rows = sweep_selector(s);
    EXPECT_LT(rows[0].result.read_margin, rows[1].result.read_margin);
    EXPECT_EQ(rows[1].k, 1.0);
}

TEST(Plot, ScriptSelectsSchemeRows) {
    std::ostringstream out;
    write_plot_script(out, "size.csv", Axis::Size, {Scheme::V2, Scheme::FF}, Variant::Rectifying);
    const std::string text = out.str();
    EXPECT_NE(text.find("set logscale x"), std::string::npos);
    EXPECT_NE(text.find("strcol(1) eq 'ff'"), std::string::npos);
    EXPECT_NE(text.find("$3 : 1/0):11"), std::string::npos);
    EXPECT_EQ(text.find("strcol(1) eq 'v3'"), std::string::npos);
}
