#include "xbar/device.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace xbar;

namespace {

DeviceParams table_defaults() { return DeviceParams{}; }

CellModel rectifying(double w) { return RectifyingMemristor{table_defaults(), {w}}; }

CellModel linear(double w) {
    DeviceParams p = table_defaults();
    p.rectifying = false;
    return LinearMemristor{p, {w}};
}

CellModel selector_cell(double k, double resistance) {
    SelectorParams s;
    s.k = k;
    return SelectorPlusResistor{s, resistance};
}

double central_difference(const CellModel& m, double v) {
    const double h = 1e-6 * std::abs(v);
    return (cell_current(m, v + h) - cell_current(m, v - h)) / (2.0 * h);
}

} // namespace

TEST(Memristance, StateEndpointsAndReverseBranch) {
    const DeviceParams p = table_defaults();
    EXPECT_DOUBLE_EQ(memristance(p, {0.0}, 0.5), 5e8);
    EXPECT_DOUBLE_EQ(memristance(p, {1.0}, 0.5), 5e5);
    EXPECT_DOUBLE_EQ(memristance(p, {1.0}, -0.5), 5e8);
}

TEST(Memristance, HalfStateIsGeometricMean) {
    EXPECT_NEAR(memristance(table_defaults(), {0.5}, 0.5), std::sqrt(5e5 * 5e8), 1e-6);
    EXPECT_NEAR(memristance(table_defaults(), {0.5}, 0.5), 1.5811e7, 1e3);
}

TEST(Memristance, LinearIgnoresSign) {
    DeviceParams p = table_defaults();
    p.rectifying = false;
    EXPECT_DOUBLE_EQ(memristance(p, {1.0}, -0.5), 5e5);
}

TEST(Memristance, MonotoneNonincreasingInState) {
    const DeviceParams p = table_defaults();
    double prev = memristance(p, {0.0}, 0.3);
    for (int i = 1; i <= 100; ++i) {
        const double r = memristance(p, {i / 100.0}, 0.3);
        EXPECT_LE(r, prev);
        prev = r;
    }
}

TEST(CellCurrent, ZeroBiasGivesZeroCurrent) {
    EXPECT_EQ(cell_current(rectifying(0.7), 0.0), 0.0);
    EXPECT_EQ(cell_current(linear(0.7), 0.0), 0.0);
    EXPECT_EQ(cell_current(selector_cell(1.0, 5e5), 0.0), 0.0);
}

TEST(CellCurrent, ReverseBiasSeesROff) {
    EXPECT_DOUBLE_EQ(cell_current(rectifying(1.0), -1.0), -2e-9);
    EXPECT_DOUBLE_EQ(cell_current(linear(1.0), -1.0), -2e-6);
}

TEST(CellCurrent, SelectorSmallSignalIsLinear) {
    SelectorParams s;
    const double v = 1e-7;
    const double expected = s.gamma * s.k * s.p * v;
    EXPECT_NEAR(selector_current(s, v), expected, 1e-9 * expected);
    // Zero series resistance reduces the pair to the selector alone.
    EXPECT_NEAR(cell_current(selector_cell(1.0, 0.0), v), expected, 1e-9 * expected);
}

TEST(CellCurrent, SeriesPairSatisfiesKcl) {
    const SelectorParams s;
    for (double r : {5e5, 5e8})
        for (double v : {0.01, 0.3, 0.5, 1.0, 2.0}) {
            const double i = cell_current(SelectorPlusResistor{s, r}, v);
            const double v_sel = v - i * r;
            EXPECT_GE(v_sel, 0.0);
            EXPECT_NEAR(selector_current(s, v_sel), i, 1e-12) << "r=" << r << " v=" << v;
        }
}

TEST(CellCurrent, StrongSelectorApproachesResistor) {
    const double i = cell_current(selector_cell(5.0, 5e5), 1.0);
    EXPECT_GT(i, 0.8 * 1.0 / 5e5);
    EXPECT_LT(i, 1.0 / 5e5);
}

TEST(CellConductance, BranchSlopes) {
    EXPECT_DOUBLE_EQ(cell_conductance(rectifying(1.0), 0.1), 2e-6);
    EXPECT_DOUBLE_EQ(cell_conductance(rectifying(1.0), -0.1), 2e-9);
    SelectorParams s;
    EXPECT_NEAR(cell_conductance(selector_cell(1.0, 0.0), 0.0), s.gamma * s.k * s.p, 1e-20);
    const double g0 = s.gamma * s.k * s.p;
    EXPECT_NEAR(cell_conductance(selector_cell(1.0, 5e5), 0.0), g0 / (1.0 + g0 * 5e5), 1e-22);
}

TEST(CellConductance, ContinuousAcrossRectificationWindow) {
    const CellModel m = rectifying(1.0);
    EXPECT_NEAR(cell_conductance(m, -1e-18), cell_conductance(m, 1e-18), 1e-12 * 2e-6);
    EXPECT_NEAR(cell_conductance(m, kRectifyWindow * (1 - 1e-12)), cell_conductance(m, kRectifyWindow), 1e-9 * 2e-6);
}

TEST(CellConductance, NeverNegative) {
    const CellModel m = rectifying(1.0);
    for (int i = -100; i <= 200; ++i)
        EXPECT_GE(cell_conductance(m, i * kRectifyWindow / 100.0), 0.0);
}

TEST(CellProperties, ReverseCurrentIsExactlyOhmicROff) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::uniform_real_distribution<double> logv(std::log(kRectifyWindow), std::log(5.0));
    for (int i = 0; i < 20000; ++i) {
        const double v = -std::exp(logv(rng));
        ASSERT_EQ(cell_current(rectifying(w(rng)), v), v / 5e8) << v;
    }
}

TEST(CellProperties, CurrentIsContinuousAtZero) {
    for (const CellModel& m : {rectifying(1.0), linear(1.0), selector_cell(1.0, 5e5)}) {
        EXPECT_NEAR(cell_current(m, 1e-12), 0.0, 1e-17);
        EXPECT_NEAR(cell_current(m, -1e-12), 0.0, 1e-17);
    }
}

TEST(CellProperties, ConductanceMatchesFiniteDifference) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::uniform_real_distribution<double> logv(std::log(kRectifyWindow), std::log(2.0));
    std::uniform_real_distribution<double> logk(std::log(0.1), std::log(3.0));
    for (int i = 0; i < 3000; ++i) {
        const double mag = std::exp(logv(rng));
        const double state = w(rng);
        const double k = std::exp(logk(rng));
        for (double v : {mag, -mag})
            for (const CellModel& m :
                 {rectifying(state), linear(state), selector_cell(k, 5e5), selector_cell(k, 5e8)}) {
                const double g = cell_conductance(m, v);
                ASSERT_NEAR(central_difference(m, v), g, 1e-4 * g) << "v=" << v << " w=" << state << " k=" << k;
            }
    }
}

TEST(CellProperties, SelectorCurrentIsOdd) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(0.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = v(rng);
        for (const CellModel& m : {selector_cell(0.3, 5e5), selector_cell(2.0, 5e8), selector_cell(1.0, 0.0)})
            ASSERT_EQ(cell_current(m, -x), -cell_current(m, x));
        SelectorParams s;
        ASSERT_NEAR(selector_current(s, -x), -selector_current(s, x), 1e-12 * std::abs(selector_current(s, x)));
    }
}

TEST(StepState, SubThresholdDriveLeavesStateUnchanged) {
    const DeviceParams p = table_defaults();
    for (double dt : {1e-12, 1e-9, 1e-3})
        EXPECT_EQ(step_state(p, {0.37}, 1.0, dt).w, 0.37);
}

TEST(StepState, ConstantDriveCrossesAfterEightNanoseconds) {
    const DeviceParams p = table_defaults();
    const double dt = 1e-12;
    DeviceState s{0.0};
    int steps = 0;
    while (s.w < 1.0 && steps < 100000) {
        s = step_state(p, s, 2.0, dt);
        ++steps;
    }
    // dw/dt = alpha * (2.0 - 1.5) = 1.25e8 / s
    EXPECT_NEAR(steps * dt, 8e-9, dt);
}

TEST(StepState, UpperBoundHoldsUnderPositiveDrive) {
    EXPECT_EQ(step_state(table_defaults(), {1.0}, 2.0, 1e-6).w, 1.0);
    EXPECT_EQ(step_state(table_defaults(), {0.0}, -2.0, 1e-6).w, 0.0);
}

TEST(StepState, NegativeDriveAboveThresholdResets) {
    const DeviceState s = step_state(table_defaults(), {1.0}, -2.0, 1e-9);
    EXPECT_NEAR(s.w, 1.0 - 2.5e8 * 0.5 * 1e-9, 1e-12);
}

TEST(StepState, RejectsNonPositiveStep) {
    EXPECT_THROW(step_state(table_defaults(), {0.5}, 2.0, 0.0), InvalidConfig);
}

TEST(StepState, StaysInUnitInterval) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> w(0.0, 1.0), v(-4.0, 4.0), logdt(std::log(1e-12), std::log(1e-6));
    DeviceParams p = table_defaults();
    p.beta = 1e6;
    for (int i = 0; i < 20000; ++i) {
        const double out = step_state(p, {w(rng)}, v(rng), std::exp(logdt(rng))).w;
        ASSERT_GE(out, 0.0);
        ASSERT_LE(out, 1.0);
    }
}

TEST(StepState, HalvingTheStepIsFirstOrderConsistent) {
    // Ramped drive v = V_TH + 1e8 t gives w(t) = alpha * 1e8 * t^2 / 2 before
    // saturation; explicit Euler error must halve with the step.
    const DeviceParams p = table_defaults();
    auto integrate = [&](double t_end, int steps) {
        const double dt = t_end / steps;
        DeviceState s{0.0};
        for (int k = 0; k < steps; ++k)
            s = step_state(p, s, 1.5 + 1e8 * (k * dt), dt);
        return s.w;
    };
    const double t_end = 5e-9;
    const double exact = 2.5e8 * 1e8 * t_end * t_end / 2.0;
    const double e1 = std::abs(integrate(t_end, 100) - exact);
    const double e2 = std::abs(integrate(t_end, 200) - exact);
    const double e4 = std::abs(integrate(t_end, 400) - exact);
    EXPECT_NEAR(e1 / e2, 2.0, 0.05);
    EXPECT_NEAR(e2 / e4, 2.0, 0.05);
}

TEST(TraceIv, SubThresholdLoopCollapsesToROffLine) {
    const auto samples = trace_iv(table_defaults(), {0.0}, {1.0, 1e7, 1.0}, 10000);
    ASSERT_EQ(samples.size(), 10001u);
    EXPECT_EQ(samples.back().w, 0.0);
    for (const auto& s : samples)
        ASSERT_EQ(s.i, s.v / 5e8);
}

TEST(TraceIv, TwoVoltPeakSwitchesDuringPositiveHalfCycle) {
    const auto samples = trace_iv(table_defaults(), {0.0}, {2.0, 1e7, 1.0}, 10000);
    double first_on = -1.0;
    for (const auto& s : samples) {
        if (s.w >= 1.0 && first_on < 0.0)
            first_on = s.t;
        if (s.v < 0.0) {
            ASSERT_EQ(s.i, s.v / 5e8);
        }
    }
    ASSERT_GT(first_on, 0.0);
    EXPECT_LT(first_on, 50e-9);
    // Reverse half-cycle beyond -V_TH drives the state back down.
    EXPECT_LT(samples.back().w, 1.0);
}

TEST(TraceIv, HighFrequencyFreezesState) {
    double prev = 2.0;
    for (double f : {1e7, 1e8, 1e9, 1e10}) {
        const auto samples = trace_iv(table_defaults(), {0.0}, {2.0, f, 0.5}, 10000);
        double w_max = 0.0;
        for (const auto& s : samples)
            w_max = std::max(w_max, s.w);
        EXPECT_LE(w_max, prev);
        prev = w_max;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(TraceIv, RejectsCoarseIntegration) {
    EXPECT_THROW(trace_iv(table_defaults(), {0.0}, {2.0, 1e7, 1.0}, 999), InvalidConfig);
}
