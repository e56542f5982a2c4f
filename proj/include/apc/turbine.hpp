#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "apc/errors.hpp"

namespace apc {

enum class CtrlMode { Tracking, GreedyFallback };

struct TurbineParams {
    double rotor_radius = 89.15;        // m
    double gearbox_ratio = 50.0;
    double rotor_inertia = 1.6e8;       // kg m^2, lumped at rotor side
    double air_density = 1.225;         // kg/m^3
    double rated_power = 10.0e6;        // W
    double generator_efficiency = 1.0;
    double lambda_opt = 8.0;
    double theta_fine = 0.75;           // deg

    double rotor_area() const { return std::numbers::pi * rotor_radius * rotor_radius; }

    void validate() const {
        if (rotor_radius <= 0.0) throw ConfigError("rotor_radius must be > 0");
        if (gearbox_ratio < 1.0) throw ConfigError("gearbox_ratio must be >= 1");
        if (rotor_inertia <= 0.0) throw ConfigError("rotor_inertia must be > 0");
        if (lambda_opt <= 0.0) throw ConfigError("lambda_opt must be > 0");
        if (air_density <= 0.0) throw ConfigError("air_density must be > 0");
    }
};

struct TurbineState {
    double rotor_speed = 0.0;   // rad/s
    double pitch = 0.75;        // deg
    double gen_torque = 0.0;    // N m, generator side
    double gen_power = 0.0;     // W
    double thrust = 0.0;        // N
    CtrlMode mode = CtrlMode::Tracking;
    bool speed_clamped = false; // set once if the speed clamp at zero ever fires
};

// Rotor speed guard: below this the quasi-steady torque division is meaningless.
inline constexpr double kRotorSpeedGuard = 0.1;  // rad/s

inline constexpr double kBetzLimit = 16.0 / 27.0;

// Region-2 optimality ties the greedy torque constant to the aerodynamic
// surface: the K*omega^2 law is the exact fixed point of the model when
// cp_max = K N^3 lambda_opt^3 / (0.5 rho A R^3).
inline double calibrate_cp_max(const TurbineParams& p, double k_greedy) {
    const double denom = 0.5 * p.air_density * p.rotor_area() *
                         p.rotor_radius * p.rotor_radius * p.rotor_radius;
    const double n3 = p.gearbox_ratio * p.gearbox_ratio * p.gearbox_ratio;
    const double l3 = p.lambda_opt * p.lambda_opt * p.lambda_opt;
    const double cp_max = k_greedy * n3 * l3 / denom;
    if (!(cp_max > 0.40 && cp_max < 0.55))
        throw CalibrationOutOfRange("calibrated cp_max = " + std::to_string(cp_max) +
                                    " outside (0.40, 0.55); check lambda_opt/gearbox_ratio");
    return cp_max;
}

namespace detail {

// Exponential power-coefficient surface (Heier/Slootweg constants), evaluated
// with pitch measured from the fine-pitch angle.
inline double cp_raw(double lambda, double theta) {
    constexpr double c1 = 0.5176, c2 = 116.0, c3 = 0.4, c4 = 5.0, c5 = 21.0, c6 = 0.0068;
    const double inv_li = 1.0 / (lambda + 0.08 * theta) - 0.035 / (theta * theta * theta + 1.0);
    return c1 * (c2 * inv_li - c3 * theta - c4) * std::exp(-c5 * inv_li) + c6 * lambda;
}

inline double find_cp_raw_peak_lambda() {
    // Golden-section over the single interior maximum at zero pitch offset.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 4.0, hi = 14.0;
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double fa = cp_raw(a, 0.0), fb = cp_raw(b, 0.0);
    for (int i = 0; i < 200; ++i) {
        if (fa > fb) {
            hi = b; b = a; fb = fa;
            a = hi - phi * (hi - lo);
            fa = cp_raw(a, 0.0);
        } else {
            lo = a; a = b; fa = fb;
            b = lo + phi * (hi - lo);
            fb = cp_raw(b, 0.0);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Quasi-steady aerodynamic model of one rotor plus a rigid single-state
// drivetrain. The power surface is rescaled so that its maximum sits exactly
// at (lambda_opt, theta_fine) with the calibrated cp_max, keeping the model
// self-consistent with the region-2 greedy torque constant.
class TurbineModel {
public:
    TurbineModel(const TurbineParams& params, double k_greedy)
        : p_(params),
          cp_max_(calibrate_cp_max(params, k_greedy)),
          lambda_peak_raw_(detail::find_cp_raw_peak_lambda()),
          cp_scale_(cp_max_ / detail::cp_raw(lambda_peak_raw_, 0.0)) {
        p_.validate();
    }

    const TurbineParams& params() const { return p_; }
    double cp_max() const { return cp_max_; }

    // Power coefficient; out-of-range inputs clamp to the surface domain.
    double cp(double lambda, double pitch) const {
        const double lam = std::clamp(lambda, 1e-3, 40.0);
        const double theta = std::max(0.0, pitch - p_.theta_fine);
        const double c = cp_scale_ * detail::cp_raw(lam * lambda_peak_raw_ / p_.lambda_opt, theta);
        return std::clamp(c, 0.0, std::nextafter(kBetzLimit, 0.0));
    }

    // Axial induction from momentum theory: the [0, 1/3] root of cp = 4a(1-a)^2.
    double axial_induction(double lambda, double pitch) const {
        return induction_from_cp(cp(lambda, pitch));
    }

    static double induction_from_cp(double cp_val) {
        if (cp_val <= 0.0) return 0.0;
        if (cp_val >= kBetzLimit) return 1.0 / 3.0;
        double lo = 0.0, hi = 1.0 / 3.0;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double f = 4.0 * mid * (1.0 - mid) * (1.0 - mid);
            (f < cp_val ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double ct(double lambda, double pitch) const {
        const double a = axial_induction(lambda, pitch);
        return 4.0 * a * (1.0 - a);
    }

    double tip_speed_ratio(double wind_speed, double rotor_speed) const {
        return rotor_speed * p_.rotor_radius / wind_speed;
    }

    // Aerodynamic power the greedy controller would extract at this wind,
    // uncapped; saturation bookkeeping caps it at rated on the electric side.
    double available_power(double wind_speed) const {
        return 0.5 * p_.air_density * p_.rotor_area() * cp_max_ *
               wind_speed * wind_speed * wind_speed;
    }

    // Rotor-side aerodynamic torque from the quasi-steady power balance.
    double aero_torque(double wind_speed, const TurbineState& s) const {
        if (s.rotor_speed <= kRotorSpeedGuard)
            throw RotorStopped("rotor speed " + std::to_string(s.rotor_speed) +
                               " rad/s at or below guard " + std::to_string(kRotorSpeedGuard));
        const double lambda = tip_speed_ratio(wind_speed, s.rotor_speed);
        const double power = 0.5 * p_.air_density * p_.rotor_area() *
                             cp(lambda, s.pitch) * wind_speed * wind_speed * wind_speed;
        return power / s.rotor_speed;
    }

    double thrust(double wind_speed, double lambda, double pitch) const {
        return 0.5 * p_.air_density * p_.rotor_area() * ct(lambda, pitch) *
               wind_speed * wind_speed;
    }

    // Explicit Euler on the rigid drivetrain, clamped at zero speed.
    TurbineState step_drivetrain(const TurbineState& s, double tau_aero,
                                 double tau_gen, double dt) const {
        TurbineState out = s;
        out.rotor_speed = s.rotor_speed +
                          dt * (tau_aero - p_.gearbox_ratio * tau_gen) / p_.rotor_inertia;
        if (out.rotor_speed < 0.0) {
            out.rotor_speed = 0.0;
            out.speed_clamped = true;
        }
        out.gen_torque = tau_gen;
        out.gen_power = tau_gen * out.rotor_speed * p_.gearbox_ratio * p_.generator_efficiency;
        return out;
    }

private:
    TurbineParams p_;
    double cp_max_;
    double lambda_peak_raw_;
    double cp_scale_;
};

}  // namespace apc
