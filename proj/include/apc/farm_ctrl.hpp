#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "apc/errors.hpp"

namespace apc {

struct CaseSetup {
    std::vector<double> alpha;
    bool feedback = true;
    bool greedy = false;
};

// Table of case studies: 0 open-loop baseline, 1-3 closed loop with distinct
// nominal distributions, 4 greedy operation without a reference.
inline CaseSetup select_case(int case_id) {
    switch (case_id) {
        case 0: return {{1.0 / 3, 1.0 / 3, 1.0 / 3}, false, false};
        case 1: return {{1.0 / 3, 1.0 / 3, 1.0 / 3}, true, false};
        case 2: return {{0.500, 0.333, 0.167}, true, false};
        case 3: return {{0.167, 0.333, 0.500}, true, false};
        case 4: return {{}, false, true};
        default: throw UnknownCase("unknown case id " + std::to_string(case_id));
    }
}

// Supervisory dispatch: feedforward nominal split plus a pure integrator on the
// farm tracking error, with anti-windup under full saturation and reset when
// no turbine is saturated.
class FarmController {
public:
    FarmController(std::vector<double> alpha, double dt, double rated_power,
                   bool feedback = true, bool rescale_over_unsaturated = false,
                   bool* normalized_warning = nullptr)
        : alpha_(std::move(alpha)), dt_(dt), rated_power_(rated_power),
          feedback_(feedback), rescale_(rescale_over_unsaturated) {
        if (alpha_.empty()) throw DimensionMismatch("alpha vector is empty");
        for (double a : alpha_)
            if (a < 0.0) throw ConfigError("alpha entries must be non-negative");
        const double sum = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
        if (sum <= 0.0) throw ConfigError("alpha entries sum to zero");
        if (std::abs(sum - 1.0) > 1e-9) {
            if (normalized_warning) *normalized_warning = true;
            for (double& a : alpha_) a /= sum;
        }
        k_i_ = 1.0 / (static_cast<double>(alpha_.size()) * dt_);
    }

    std::size_t n_turbines() const { return alpha_.size(); }
    const std::vector<double>& alpha() const { return alpha_; }
    double integrator_gain() const { return k_i_; }
    double integrator_state() const { return u_; }
    double last_error() const { return e_; }

    std::vector<double> step(double r, std::span<const double> p_gen,
                             std::span<const char> saturated) {
        if (r < 0.0) throw NegativeReference("farm reference must be non-negative");
        if (p_gen.size() != alpha_.size() || saturated.size() != alpha_.size())
            throw DimensionMismatch("farm_step vector length does not match alpha");

        const double p_bar = std::accumulate(p_gen.begin(), p_gen.end(), 0.0);
        e_ = r - p_bar;

        const std::size_t n_sat = static_cast<std::size_t>(
            std::count(saturated.begin(), saturated.end(), char{1}));
        if (feedback_) {
            if (n_sat == 0)
                u_ = 0.0;
            else if (n_sat < alpha_.size() || e_ < 0.0)
                u_ += k_i_ * e_ * dt_;
            // All saturated with a shortfall: u frozen. A negative error under
            // full saturation unwinds the integrator instead; holding u there
            // would keep demands inflated and prolong the overproduction.
        } else {
            u_ = 0.0;
        }

        std::vector<double> p_dem(alpha_.size());
        for (std::size_t i = 0; i < alpha_.size(); ++i) {
            double du = u_;
            if (rescale_ && n_sat > 0 && n_sat < alpha_.size())
                du = saturated[i] ? 0.0
                                  : u_ * static_cast<double>(alpha_.size()) /
                                        static_cast<double>(alpha_.size() - n_sat);
            p_dem[i] = std::clamp(alpha_[i] * r + du, 0.0, rated_power_);
        }
        return p_dem;
    }

private:
    std::vector<double> alpha_;
    double dt_;
    double rated_power_;
    bool feedback_;
    bool rescale_;
    double k_i_ = 0.0;
    double u_ = 0.0;
    double e_ = 0.0;
};

}  // namespace apc
