#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "apc/errors.hpp"
#include "apc/turbine.hpp"

namespace apc {

inline double rpm_to_rad(double rpm) { return rpm * std::numbers::pi / 30.0; }
inline double rad_to_rpm(double rad) { return rad * 30.0 / std::numbers::pi; }

enum class ControlLaw { ModeI, ModeII };

struct ControllerConfig {
    double k_greedy = 79.43986;          // N m / (rad/s)^2
    double omega_cut_in_rpm = 200.0;
    double omega_r15_to_2_rpm = 300.0;
    double omega_r2_to_25_rpm = 405.0;
    double slip_pct = 10.0;
    double omega_rated_rpm = 445.67;
    double region3_entry_pct = 95.0;     // % of rated generator speed
    double rated_power = 10.0e6;         // W
    double generator_efficiency = 1.0;
    double max_torque_rate = 15000.0;    // N m / s
    double max_pitch_rate = 10.0;        // deg / s
    double theta_fine = 0.75;            // deg
    double theta_switch = 1.0;           // deg
    double theta_max = 45.0;             // deg
    double lpf_corner_hz = 0.1798;
    double pid_kp_min = 0.039, pid_kp_max = 1.41;   // s
    double pid_ki_min = 0.067, pid_ki_max = 0.28;   // s
    double pid_kd = 0.0;
    double gain_sched_pitch_max = 25.0;  // deg; gains bottom out here
    double fallback_exit_ratio = 1.02;
    double fallback_exit_dwell = 0.5;    // s
    double min_gen_speed = 5.0;          // rad/s, tracking-law guard

    double omega_rated() const { return rpm_to_rad(omega_rated_rpm); }
    double omega_region3_entry() const {
        return rpm_to_rad(omega_rated_rpm) * region3_entry_pct / 100.0;
    }

    void validate() const {
        const double entry = omega_region3_entry();
        if (!(rpm_to_rad(omega_cut_in_rpm) < rpm_to_rad(omega_r15_to_2_rpm) &&
              rpm_to_rad(omega_r15_to_2_rpm) < rpm_to_rad(omega_r2_to_25_rpm) &&
              rpm_to_rad(omega_r2_to_25_rpm) < entry &&
              entry < omega_rated() * (1.0 + slip_pct / 100.0)))
            throw ConfigError("generator speed breakpoints out of order");
        if (k_greedy <= 0.0 || max_torque_rate <= 0.0 || max_pitch_rate <= 0.0 ||
            rated_power <= 0.0 || lpf_corner_hz <= 0.0 ||
            pid_kp_min <= 0.0 || pid_ki_min <= 0.0)
            throw ConfigError("controller rates and gains must be strictly positive");
        if (pid_kd != 0.0) throw ConfigError("pid_kd must be 0");
        if (theta_fine >= theta_switch) throw ConfigError("theta_fine must be below theta_switch");
    }
};

// Piecewise generator torque-vs-speed law of greedy operation. Region 2.5 is
// the straight line joining the region-2 value at its upper breakpoint to the
// constant-power value at the region-3 entry speed, so the curve is continuous
// at every boundary.
class GreedyCurve {
public:
    explicit GreedyCurve(const ControllerConfig& cfg)
        : w_cut_in_(rpm_to_rad(cfg.omega_cut_in_rpm)),
          w_15_(rpm_to_rad(cfg.omega_r15_to_2_rpm)),
          w_2_(rpm_to_rad(cfg.omega_r2_to_25_rpm)),
          w_3_(cfg.omega_region3_entry()),
          k_(cfg.k_greedy),
          rated_power_(cfg.rated_power),
          eta_(cfg.generator_efficiency) {
        tau_15_ = k_ * w_15_ * w_15_;
        tau_2_ = k_ * w_2_ * w_2_;
        tau_3_ = rated_power_ / (eta_ * w_3_);
        slope_15_ = tau_15_ / (w_15_ - w_cut_in_);
        slope_25_ = (tau_3_ - tau_2_) / (w_3_ - w_2_);
    }

    double torque(double omega_gen) const {
        if (omega_gen < w_cut_in_) return 0.0;
        if (omega_gen < w_15_) return slope_15_ * (omega_gen - w_cut_in_);
        if (omega_gen < w_2_) return k_ * omega_gen * omega_gen;
        if (omega_gen < w_3_) return tau_2_ + slope_25_ * (omega_gen - w_2_);
        return rated_power_ / (eta_ * omega_gen);
    }

    double power(double omega_gen) const { return torque(omega_gen) * omega_gen * eta_; }

    double cut_in_speed() const { return w_cut_in_; }
    double region3_entry_speed() const { return w_3_; }

private:
    double w_cut_in_, w_15_, w_2_, w_3_;
    double k_, rated_power_, eta_;
    double tau_15_, tau_2_, tau_3_, slope_15_, slope_25_;
};

inline double greedy_torque(double omega_gen, const ControllerConfig& cfg) {
    return GreedyCurve(cfg).torque(omega_gen);
}

// Torque meeting a power demand at the measured generator speed.
inline double tracking_torque(double p_dem, double omega_gen, const ControllerConfig& cfg) {
    if (omega_gen <= cfg.min_gen_speed)
        throw RotorStopped("generator speed " + std::to_string(omega_gen) +
                           " rad/s at or below tracking guard");
    return p_dem / (omega_gen * cfg.generator_efficiency);
}

inline double combined_torque(double p_dem, double omega_gen, const ControllerConfig& cfg) {
    return std::min(greedy_torque(omega_gen, cfg), tracking_torque(p_dem, omega_gen, cfg));
}

// Monotone lookup from demanded power to the generator speed the greedy curve
// would produce it at. Built once by bisecting the power-speed map on a dense
// grid; queries interpolate linearly.
class SetpointTable {
public:
    SetpointTable(const GreedyCurve& curve, const ControllerConfig& cfg,
                  std::size_t grid_points = 2048)
        : rated_power_(cfg.rated_power), omega_rated_(cfg.omega_rated()) {
        const double w_lo = curve.cut_in_speed();
        const double w_hi = curve.region3_entry_speed();
        power_.reserve(grid_points + 1);
        speed_.reserve(grid_points + 1);
        power_.push_back(0.0);
        speed_.push_back(w_lo);
        for (std::size_t i = 1; i <= grid_points; ++i) {
            const double p = rated_power_ * static_cast<double>(i) / grid_points;
            double lo = w_lo, hi = w_hi;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (curve.power(mid) < p ? lo : hi) = mid;
            }
            const double w = 0.5 * (lo + hi);
            if (w <= speed_.back())
                throw NonMonotonicCurve("power-speed map not strictly increasing at P = " +
                                        std::to_string(p));
            power_.push_back(p);
            speed_.push_back(w);
        }
    }

    // P >= rated maps to the rated generator speed.
    double speed_reference(double p_dem) const {
        if (p_dem >= rated_power_) return omega_rated_;
        if (p_dem <= 0.0) return speed_.front();
        const auto it = std::upper_bound(power_.begin(), power_.end(), p_dem);
        const std::size_t j = static_cast<std::size_t>(it - power_.begin());
        const double t = (p_dem - power_[j - 1]) / (power_[j] - power_[j - 1]);
        return speed_[j - 1] + t * (speed_[j] - speed_[j - 1]);
    }

private:
    double rated_power_, omega_rated_;
    std::vector<double> power_, speed_;
};

struct PitchPidState {
    double integral = 0.0;       // deg, integral contribution to the command
    double filt_speed = 0.0;     // rad/s
    double prev_pitch = 0.0;     // deg
    double prev_torque = 0.0;    // N m
    bool filt_init = false;
};

// Gains interpolate linearly in the current pitch angle, largest at fine pitch.
inline std::pair<double, double> scheduled_gains(double pitch, const ControllerConfig& cfg) {
    const double t = std::clamp((pitch - cfg.theta_fine) /
                                (cfg.gain_sched_pitch_max - cfg.theta_fine), 0.0, 1.0);
    return {cfg.pid_kp_max + t * (cfg.pid_kp_min - cfg.pid_kp_max),
            cfg.pid_ki_max + t * (cfg.pid_ki_min - cfg.pid_ki_max)};
}

// One sample of the gain-scheduled pitch PID: low-pass the measured speed,
// clamp the integral term to the output range, clamp and rate-limit the output.
inline double pitch_pid_step(PitchPidState& pid, double omega_ref, double omega_meas,
                             double dt, const ControllerConfig& cfg) {
    const double tau_f = 1.0 / (2.0 * std::numbers::pi * cfg.lpf_corner_hz);
    if (!pid.filt_init) {
        pid.filt_speed = omega_meas;
        pid.filt_init = true;
    } else {
        pid.filt_speed += dt / (tau_f + dt) * (omega_meas - pid.filt_speed);
    }
    const double err = pid.filt_speed - omega_ref;
    const auto [kp, ki] = scheduled_gains(pid.prev_pitch, cfg);
    pid.integral = std::clamp(pid.integral + ki * err * dt, cfg.theta_fine, cfg.theta_max);
    double u = kp * err + pid.integral;
    u = std::clamp(u, cfg.theta_fine, cfg.theta_max);
    u = std::clamp(u, pid.prev_pitch - cfg.max_pitch_rate * dt,
                   pid.prev_pitch + cfg.max_pitch_rate * dt);
    pid.prev_pitch = u;
    return u;
}

struct ActuatorCommand {
    double gen_torque = 0.0;  // N m
    double pitch = 0.0;       // deg
};

// Per-turbine power tracking controller: setpoint lookup, torque law selection,
// pitch PID, saturation state machine, actuator rate limits.
class TurbineControl {
public:
    TurbineControl(const ControllerConfig& cfg, ControlLaw law)
        : cfg_(cfg), law_(law), curve_(cfg), table_(curve_, cfg) {
        cfg_.validate();
    }

    const ControllerConfig& config() const { return cfg_; }
    const GreedyCurve& greedy_curve() const { return curve_; }
    const SetpointTable& setpoint_table() const { return table_; }
    CtrlMode mode() const { return mode_; }

    // A turbine reports saturated exactly while it runs the greedy fallback,
    // i.e. its demand exceeds the greedy-power estimate for its current wind.
    bool saturated() const { return mode_ == CtrlMode::GreedyFallback; }

    void init(double omega_gen, double pitch, double gen_torque) {
        pid_.prev_pitch = pitch;
        pid_.integral = std::clamp(pitch, cfg_.theta_fine, cfg_.theta_max);
        pid_.prev_torque = gen_torque;
        pid_.filt_speed = omega_gen;
        pid_.filt_init = true;
        mode_ = CtrlMode::Tracking;
        exit_dwell_ = 0.0;
    }

    // Saturation state machine on demand versus the greedy-power estimate at
    // the current wind. Entry is immediate when the demand cannot be met; exit
    // needs the availability margin sustained for the dwell time so turbulence
    // does not chatter the mode.
    void update_mode(double p_dem, double p_avail, double dt) {
        if (mode_ == CtrlMode::Tracking) {
            if (p_dem > p_avail) {
                mode_ = CtrlMode::GreedyFallback;
                exit_dwell_ = 0.0;
            }
        } else {
            if (p_avail > cfg_.fallback_exit_ratio * p_dem) {
                exit_dwell_ += dt;
                if (exit_dwell_ >= cfg_.fallback_exit_dwell) {
                    mode_ = CtrlMode::Tracking;
                    exit_dwell_ = 0.0;
                }
            } else {
                exit_dwell_ = 0.0;
            }
        }
    }

    ActuatorCommand step(double p_dem, double omega_gen, double p_avail, double dt) {
        const double omega_ref = table_.speed_reference(p_dem);
        if (law_ == ControlLaw::ModeII) update_mode(p_dem, p_avail, dt);

        double tau_target;
        double pid_ref;
        if (law_ == ControlLaw::ModeII && mode_ == CtrlMode::GreedyFallback) {
            tau_target = curve_.torque(omega_gen);
            pid_ref = cfg_.omega_rated();  // greedy convention: pitch floors at fine below rated
        } else if (law_ == ControlLaw::ModeII) {
            tau_target = combined_torque(p_dem, omega_gen, cfg_);
            pid_ref = omega_ref;
        } else {
            tau_target = tracking_torque(p_dem, omega_gen, cfg_);
            pid_ref = omega_ref;
        }

        ActuatorCommand cmd;
        cmd.gen_torque = std::clamp(tau_target,
                                    pid_.prev_torque - cfg_.max_torque_rate * dt,
                                    pid_.prev_torque + cfg_.max_torque_rate * dt);
        cmd.gen_torque = std::max(cmd.gen_torque, 0.0);
        pid_.prev_torque = cmd.gen_torque;
        cmd.pitch = pitch_pid_step(pid_, pid_ref, omega_gen, dt, cfg_);
        return cmd;
    }

private:
    ControllerConfig cfg_;
    ControlLaw law_;
    GreedyCurve curve_;
    SetpointTable table_;
    PitchPidState pid_;
    CtrlMode mode_ = CtrlMode::Tracking;
    double exit_dwell_ = 0.0;
};

}  // namespace apc
