#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "apc/sim.hpp"

namespace apc {

// Log-scan checks shared by the `validate` subcommand and the test suite.
// Returns one message per violated invariant; empty means clean.
inline std::vector<std::string> scan_invariants(const std::vector<StepRecord>& records,
                                                const ScenarioConfig& cfg) {
    std::vector<std::string> violations;
    auto report = [&](std::size_t k, const std::string& msg) {
        if (violations.size() < 50)
            violations.push_back("step " + std::to_string(k) + ": " + msg);
    };

    const double dt = cfg.dt;
    const double tau_rate_tol = cfg.ctrl.max_torque_rate * dt * (1.0 + 1e-12) + 1e-9;
    const double pitch_rate_tol = cfg.ctrl.max_pitch_rate * dt * (1.0 + 1e-12) + 1e-12;

    for (std::size_t k = 0; k < records.size(); ++k) {
        const StepRecord& rec = records[k];
        double p_bar = 0.0;
        for (const auto& tr : rec.turbines) p_bar += tr.p_gen;
        if (p_bar != rec.p_bar)
            report(k, "P_bar does not equal the sum of per-turbine P_gen");
        if (rec.e != rec.r - rec.p_bar)
            report(k, "farm error e does not equal r - P_bar");

        for (std::size_t i = 0; i < rec.turbines.size(); ++i) {
            const auto& tr = rec.turbines[i];
            if (tr.saturated != tr.mode)
                report(k, "turbine " + std::to_string(i) +
                              " saturation flag inconsistent with control mode");
            if (tr.pitch < cfg.ctrl.theta_fine - 1e-12 ||
                tr.pitch > cfg.ctrl.theta_max + 1e-12)
                report(k, "turbine " + std::to_string(i) + " pitch outside actuator range");
            if (tr.omega_r < 0.0)
                report(k, "turbine " + std::to_string(i) + " negative rotor speed");
            if (tr.thrust < 0.0)
                report(k, "turbine " + std::to_string(i) + " negative thrust");

            if (k > 0) {
                const auto& prev = records[k - 1].turbines[i];
                if (std::abs(tr.tau_gen - prev.tau_gen) > tau_rate_tol)
                    report(k, "turbine " + std::to_string(i) + " torque rate limit violated");
                if (std::abs(tr.pitch - prev.pitch) > pitch_rate_tol)
                    report(k, "turbine " + std::to_string(i) + " pitch rate limit violated");
                // Power identity: this step's production comes from the torque
                // commanded last step at this step's speed.
                const double expect = prev.tau_gen * tr.omega_r *
                                      cfg.turbine.gearbox_ratio *
                                      cfg.turbine.generator_efficiency;
                const double scale = std::max({std::abs(expect), std::abs(tr.p_gen), 1.0});
                if (std::abs(tr.p_gen - expect) > 1e-9 * scale)
                    report(k, "turbine " + std::to_string(i) +
                                  " power identity P = tau * omega * eta violated");
            }
        }
    }
    return violations;
}

}  // namespace apc
