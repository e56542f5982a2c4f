#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "apc/errors.hpp"

namespace apc {

struct FlowConfig {
    double u_mean = 9.0;                       // m/s
    double ti = 0.0;                           // turbulence intensity, fraction
    std::vector<double> positions_d = {0.0, 5.0, 10.0};  // downstream, rotor diameters
    double rotor_diameter = 178.3;             // m
    double wake_decay = 0.05;
    double turb_corr_time = 10.0;              // s
    std::uint64_t seed = 1;

    void validate() const {
        if (u_mean <= 0.0) throw ConfigError("u_mean must be > 0");
        if (ti < 0.0) throw ConfigError("ti must be >= 0");
        if (turb_corr_time <= 0.0) throw ConfigError("turb_corr_time must be > 0");
        for (std::size_t i = 1; i < positions_d.size(); ++i)
            if (positions_d[i] <= positions_d[i - 1])
                throw ConfigError("turbine positions must be strictly increasing");
    }
};

// First-order autoregressive fractional wind perturbation with stationary
// standard deviation equal to the configured turbulence intensity.
class Turbulence {
public:
    Turbulence(double ti, double corr_time, std::uint64_t seed)
        : ti_(ti), corr_time_(corr_time), rng_(seed) {}

    double step(double dt) {
        if (ti_ == 0.0) return 0.0;
        const double phi = std::exp(-dt / corr_time_);
        x_ = phi * x_ + ti_ * std::sqrt(1.0 - phi * phi) * normal_(rng_);
        return x_;
    }

    double value() const { return x_; }

private:
    double ti_;
    double corr_time_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    double x_ = 0.0;
};

// Jensen top-hat wake deficits with root-sum-square superposition. Upstream
// inductions travel down the row through per-pair delay lines advected at the
// mean wind speed, quantized to whole controller steps.
class WakeField {
public:
    WakeField(const FlowConfig& cfg, double dt) : cfg_(cfg) {
        cfg_.validate();
        const std::size_t n = cfg_.positions_d.size();
        delay_steps_.assign(n, std::vector<std::size_t>(n, 0));
        std::size_t max_delay = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                const double x = (cfg_.positions_d[i] - cfg_.positions_d[j]) * cfg_.rotor_diameter;
                const std::size_t d = static_cast<std::size_t>(std::ceil(x / cfg_.u_mean / dt));
                delay_steps_[i][j] = d;
                max_delay = std::max(max_delay, d);
            }
        }
        buf_len_ = max_delay + 1;
        history_.assign(n, std::vector<double>(buf_len_, 0.0));
    }

    // Fill all delay lines with a constant induction per turbine.
    void reset(const std::vector<double>& induction) {
        if (induction.size() != history_.size())
            throw DimensionMismatch("induction vector length mismatch");
        for (std::size_t j = 0; j < history_.size(); ++j)
            std::fill(history_[j].begin(), history_[j].end(), induction[j]);
        head_ = 0;
    }

    // Record this step's inductions; call once per simulation step, after
    // effective winds have been read.
    void push(const std::vector<double>& induction) {
        if (induction.size() != history_.size())
            throw DimensionMismatch("induction vector length mismatch");
        head_ = (head_ + 1) % buf_len_;
        for (std::size_t j = 0; j < history_.size(); ++j)
            history_[j][head_] = induction[j];
    }

    double effective_wind(std::size_t i, double u_inf) const {
        double sum_sq = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            const double x = (cfg_.positions_d[i] - cfg_.positions_d[j]) * cfg_.rotor_diameter;
            // reads happen before this step's push, so the newest entry is
            // already one step old
            const double a = delayed_induction(j, delay_steps_[i][j] - 1);
            const double denom = 1.0 + 2.0 * cfg_.wake_decay * x / cfg_.rotor_diameter;
            const double d = 2.0 * a / (denom * denom);
            sum_sq += d * d;
        }
        return u_inf * (1.0 - std::sqrt(sum_sq));
    }

    std::size_t delay_steps(std::size_t i, std::size_t j) const { return delay_steps_[i][j]; }

private:
    double delayed_induction(std::size_t j, std::size_t lag) const {
        const std::size_t idx = (head_ + buf_len_ - lag % buf_len_) % buf_len_;
        return history_[j][idx];
    }

    FlowConfig cfg_;
    std::vector<std::vector<std::size_t>> delay_steps_;
    std::vector<std::vector<double>> history_;
    std::size_t buf_len_ = 1;
    std::size_t head_ = 0;
};

}  // namespace apc
