#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "apc/errors.hpp"
#include "apc/sim.hpp"

namespace apc {

// Flat key/value text with [section] headers; '#' starts a comment.
class IniFile {
public:
    static IniFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        IniFile ini;
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
            ini.values_[section][key] = value;
        }
        return ini;
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = values_.find(section);
        return s != values_.end() && s->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        return has(section, key) ? values_.at(section).at(key) : fallback;
    }

    double get_double(const std::string& section, const std::string& key,
                      double fallback) const {
        if (!has(section, key)) return fallback;
        return parse_double(values_.at(section).at(key), section + "." + key);
    }

    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const {
        if (!has(section, key)) return fallback;
        const std::string& v = values_.at(section).at(key);
        try {
            std::size_t pos = 0;
            const std::int64_t r = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw ConfigError("invalid integer for " + section + "." + key + ": '" + v + "'");
        }
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) return fallback;
        const std::string& v = values_.at(section).at(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("invalid boolean for " + section + "." + key + ": '" + v + "'");
    }

    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const {
        if (!has(section, key)) return fallback;
        std::vector<double> out;
        std::istringstream ss(values_.at(section).at(key));
        std::string cell;
        while (std::getline(ss, cell, ','))
            out.push_back(parse_double(trim(cell), section + "." + key));
        if (out.empty()) throw ConfigError("empty list for " + section + "." + key);
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    static double parse_double(const std::string& v, const std::string& where) {
        try {
            std::size_t pos = 0;
            const double r = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw ConfigError("invalid number for " + where + ": '" + v + "'");
        }
    }

    std::map<std::string, std::map<std::string, std::string>> values_;
};

// Parses "t0:v0, t1:v1, ..." into a piecewise-constant schedule.
inline ReferenceSchedule parse_reference(const std::string& text) {
    ReferenceSchedule sched;
    sched.points.clear();
    std::istringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto colon = cell.find(':');
        if (colon == std::string::npos)
            throw ConfigError("reference entries must be t:value, got '" + cell + "'");
        try {
            sched.points.emplace_back(std::stod(cell.substr(0, colon)),
                                      std::stod(cell.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ConfigError("invalid reference entry '" + cell + "'");
        }
    }
    if (sched.points.empty()) throw ConfigError("empty reference schedule");
    return sched;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    const IniFile ini = IniFile::load(path);
    ScenarioConfig cfg;

    cfg.n_turbines = static_cast<std::size_t>(
        ini.get_int("scenario", "n_turbines", static_cast<std::int64_t>(cfg.n_turbines)));
    cfg.dt = ini.get_double("scenario", "dt", cfg.dt);
    cfg.duration = ini.get_double("scenario", "duration", cfg.duration);
    cfg.case_id = static_cast<int>(ini.get_int("scenario", "case", cfg.case_id));
    cfg.transient_skip = ini.get_double("scenario", "transient_skip", cfg.transient_skip);
    cfg.output_path = ini.get_string("scenario", "output", cfg.output_path);
    if (ini.has("scenario", "reference"))
        cfg.reference = parse_reference(ini.get_string("scenario", "reference", ""));
    const std::string mode = ini.get_string("scenario", "mode", "II");
    if (mode == "I") cfg.law = ControlLaw::ModeI;
    else if (mode == "II") cfg.law = ControlLaw::ModeII;
    else throw ConfigError("scenario.mode must be I or II");

    FlowConfig& f = cfg.flow;
    f.u_mean = ini.get_double("flow", "u_mean", f.u_mean);
    f.ti = ini.get_double("flow", "ti", f.ti);
    f.positions_d = ini.get_doubles("flow", "spacing_d", f.positions_d);
    f.rotor_diameter = ini.get_double("flow", "rotor_diameter", f.rotor_diameter);
    f.wake_decay = ini.get_double("flow", "wake_decay", f.wake_decay);
    f.turb_corr_time = ini.get_double("flow", "corr_time", f.turb_corr_time);
    f.seed = static_cast<std::uint64_t>(
        ini.get_int("flow", "seed", static_cast<std::int64_t>(f.seed)));

    ControllerConfig& c = cfg.ctrl;
    c.k_greedy = ini.get_double("controller", "k_greedy", c.k_greedy);
    c.omega_cut_in_rpm = ini.get_double("controller", "omega_cut_in_rpm", c.omega_cut_in_rpm);
    c.omega_r15_to_2_rpm =
        ini.get_double("controller", "omega_r15_to_2_rpm", c.omega_r15_to_2_rpm);
    c.omega_r2_to_25_rpm =
        ini.get_double("controller", "omega_r2_to_25_rpm", c.omega_r2_to_25_rpm);
    c.slip_pct = ini.get_double("controller", "slip_pct", c.slip_pct);
    c.omega_rated_rpm = ini.get_double("controller", "omega_rated_rpm", c.omega_rated_rpm);
    c.region3_entry_pct =
        ini.get_double("controller", "region3_entry_pct", c.region3_entry_pct);
    c.rated_power = ini.get_double("controller", "rated_power", c.rated_power);
    c.generator_efficiency =
        ini.get_double("controller", "generator_efficiency", c.generator_efficiency);
    c.max_torque_rate = ini.get_double("controller", "max_torque_rate", c.max_torque_rate);
    c.max_pitch_rate = ini.get_double("controller", "max_pitch_rate", c.max_pitch_rate);
    c.theta_fine = ini.get_double("controller", "theta_fine", c.theta_fine);
    c.theta_switch = ini.get_double("controller", "theta_switch", c.theta_switch);
    c.theta_max = ini.get_double("controller", "theta_max", c.theta_max);
    c.lpf_corner_hz = ini.get_double("controller", "lpf_corner_hz", c.lpf_corner_hz);
    c.pid_kp_min = ini.get_double("controller", "pid_kp_min", c.pid_kp_min);
    c.pid_kp_max = ini.get_double("controller", "pid_kp_max", c.pid_kp_max);
    c.pid_ki_min = ini.get_double("controller", "pid_ki_min", c.pid_ki_min);
    c.pid_ki_max = ini.get_double("controller", "pid_ki_max", c.pid_ki_max);
    c.pid_kd = ini.get_double("controller", "pid_kd", c.pid_kd);
    c.fallback_exit_ratio =
        ini.get_double("controller", "fallback_exit_ratio", c.fallback_exit_ratio);
    c.fallback_exit_dwell =
        ini.get_double("controller", "fallback_exit_dwell", c.fallback_exit_dwell);

    TurbineParams& t = cfg.turbine;
    t.rotor_radius = ini.get_double("turbine", "rotor_radius", t.rotor_radius);
    t.gearbox_ratio = ini.get_double("turbine", "gearbox_ratio", t.gearbox_ratio);
    t.rotor_inertia = ini.get_double("turbine", "rotor_inertia", t.rotor_inertia);
    t.air_density = ini.get_double("turbine", "air_density", t.air_density);
    t.lambda_opt = ini.get_double("turbine", "lambda_opt", t.lambda_opt);
    t.rated_power = c.rated_power;
    t.generator_efficiency = c.generator_efficiency;
    t.theta_fine = c.theta_fine;

    if (ini.has("farm", "alpha")) cfg.alpha = ini.get_doubles("farm", "alpha", {});
    if (ini.has("farm", "feedback")) cfg.feedback = ini.get_bool("farm", "feedback", true);
    cfg.rescale_du_over_unsaturated =
        ini.get_bool("farm", "rescale_du_unsaturated", cfg.rescale_du_over_unsaturated);

    cfg.validate();
    return cfg;
}

}  // namespace apc
