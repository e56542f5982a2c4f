#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "apc/flow.hpp"

using namespace apc;

namespace {
FlowConfig default_flow() { return FlowConfig{}; }
}

TEST_CASE("most upstream turbine sees the free stream") {
    WakeField wake(default_flow(), 0.1);
    wake.reset({0.3, 0.3, 0.3});
    CHECK(wake.effective_wind(0, 9.0) == 9.0);
}

TEST_CASE("zero induction leaves no deficit") {
    WakeField wake(default_flow(), 0.1);
    wake.reset({0.0, 0.0, 0.0});
    CHECK(wake.effective_wind(1, 9.0) == 9.0);
    CHECK(wake.effective_wind(2, 9.0) == 9.0);
}

TEST_CASE("single-wake deficit matches the hand-evaluated Jensen formula") {
    FlowConfig cfg = default_flow();
    cfg.positions_d = {0.0, 5.0};
    WakeField wake(cfg, 0.1);
    wake.reset({0.25, 0.0});
    // delta = 2 * 0.25 / (1 + 2 * 0.05 * 5)^2 = 0.5 / 2.25
    CHECK(wake.effective_wind(1, 9.0) == Catch::Approx(9.0 * (1.0 - 0.5 / 2.25)).epsilon(1e-12));
    CHECK(wake.effective_wind(1, 9.0) == Catch::Approx(7.0).epsilon(1e-3));
}

TEST_CASE("deficits superpose by root sum of squares") {
    FlowConfig cfg = default_flow();
    WakeField wake(cfg, 0.1);
    wake.reset({0.2, 0.1, 0.0});
    const double d1 = 2.0 * 0.2 / std::pow(1.0 + 0.1 * 10.0, 2);  // 10 D upstream
    const double d2 = 2.0 * 0.1 / std::pow(1.0 + 0.1 * 5.0, 2);   // 5 D upstream
    const double expect = 9.0 * (1.0 - std::sqrt(d1 * d1 + d2 * d2));
    CHECK(wake.effective_wind(2, 9.0) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("an induction impulse arrives after exactly the quantized delay") {
    FlowConfig cfg = default_flow();
    cfg.positions_d = {0.0, 5.0};
    const double dt = 0.1;
    WakeField wake(cfg, dt);
    const std::size_t expected = static_cast<std::size_t>(
        std::ceil(5.0 * cfg.rotor_diameter / cfg.u_mean / dt));
    CHECK(wake.delay_steps(1, 0) == expected);

    wake.reset({0.0, 0.0});
    const double clean = wake.effective_wind(1, 9.0);
    // Simulation order is read-then-push; an impulse pushed at step 1 is first
    // visible to the read of step 1 + delay. Here each push at loop index k is
    // followed by the read belonging to step k + 1.
    std::size_t arrival = 0;
    for (std::size_t k = 1; k <= expected + 5; ++k) {
        wake.push({k == 1 ? 0.25 : 0.0, 0.0});
        if (wake.effective_wind(1, 9.0) != clean && arrival == 0) arrival = k + 1;
    }
    CHECK(arrival == 1 + expected);
}

TEST_CASE("downstream wind is ordered under equal induction") {
    WakeField wake(default_flow(), 0.1);
    wake.reset({0.2, 0.2, 0.2});
    const double u0 = wake.effective_wind(0, 9.0);
    const double u1 = wake.effective_wind(1, 9.0);
    const double u2 = wake.effective_wind(2, 9.0);
    CHECK(u1 < u0);
    CHECK(u2 < u1);
}

TEST_CASE("lowering upstream induction raises the downstream wind") {
    WakeField wake(default_flow(), 0.1);
    wake.reset({0.25, 0.2, 0.0});
    const double u1_before = wake.effective_wind(1, 9.0);
    const double u2_before = wake.effective_wind(2, 9.0);
    wake.reset({0.15, 0.2, 0.0});
    CHECK(wake.effective_wind(1, 9.0) > u1_before);
    CHECK(wake.effective_wind(2, 9.0) > u2_before);
}

TEST_CASE("zero turbulence intensity is identically zero") {
    Turbulence turb(0.0, 10.0, 42);
    for (int k = 0; k < 1000; ++k) CHECK(turb.step(0.1) == 0.0);
}

TEST_CASE("stationary standard deviation approaches the intensity") {
    const double ti = 0.05;
    Turbulence turb(ti, 10.0, 9001);
    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const double x = turb.step(0.1);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(sd == Catch::Approx(ti).epsilon(0.10));
}

TEST_CASE("identical seeds give identical sequences") {
    Turbulence a(0.05, 10.0, 77), b(0.05, 10.0, 77);
    for (int k = 0; k < 2000; ++k) CHECK(a.step(0.1) == b.step(0.1));
    Turbulence c(0.05, 10.0, 78);
    bool differs = false;
    for (int k = 0; k < 100; ++k)
        if (a.step(0.1) != c.step(0.1)) differs = true;
    CHECK(differs);
}

TEST_CASE("flow configuration validation") {
    FlowConfig bad = default_flow();
    bad.positions_d = {0.0, 5.0, 5.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = default_flow();
    bad.u_mean = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
