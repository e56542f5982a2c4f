#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "apc/errors.hpp"
#include "apc/farm_ctrl.hpp"
#include "apc/flow.hpp"
#include "apc/turbine.hpp"
#include "apc/turbine_ctrl.hpp"

namespace apc {

// Piecewise-constant reference signal r(t).
struct ReferenceSchedule {
    std::vector<std::pair<double, double>> points = {{0.0, 10.0e6}};  // (t, value)

    double at(double t) const {
        double v = points.front().second;
        for (const auto& [tp, vp] : points) {
            if (tp > t) break;
            v = vp;
        }
        return v;
    }

    void validate(double duration) const {
        if (points.empty()) throw ConfigError("reference schedule is empty");
        if (points.front().first > 0.0)
            throw ConfigError("reference schedule must start at t = 0");
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i].first <= points[i - 1].first)
                throw ConfigError("reference schedule times must be strictly increasing");
        (void)duration;
    }
};

struct ScenarioConfig {
    std::size_t n_turbines = 3;
    double dt = 0.1;
    double duration = 1000.0;
    ReferenceSchedule reference;
    int case_id = 1;
    std::optional<std::vector<double>> alpha;   // overrides the case table
    std::optional<bool> feedback;               // overrides the case table
    bool rescale_du_over_unsaturated = false;
    ControlLaw law = ControlLaw::ModeII;
    double transient_skip = 200.0;              // s, metrics window start
    FlowConfig flow;
    ControllerConfig ctrl;
    TurbineParams turbine;
    std::string output_path;

    void validate() const {
        if (dt <= 0.0) throw ConfigError("dt must be > 0");
        if (duration < dt) throw ConfigError("duration must cover at least one step");
        if (n_turbines == 0) throw ConfigError("n_turbines must be >= 1");
        if (flow.positions_d.size() != n_turbines)
            throw ConfigError("flow layout length must equal n_turbines");
        reference.validate(duration);
        ctrl.validate();
        turbine.validate();
        flow.validate();
    }
};

struct TurbineRecord {
    double u_eff = 0.0;
    double omega_r = 0.0;
    double pitch = 0.0;
    double tau_gen = 0.0;
    double p_dem = 0.0;
    double p_gen = 0.0;
    double thrust = 0.0;
    int mode = 0;       // 0 tracking, 1 greedy fallback
    int saturated = 0;
};

struct StepRecord {
    double t = 0.0;
    std::vector<TurbineRecord> turbines;
    double r = 0.0;
    double p_bar = 0.0;
    double e = 0.0;
    double u = 0.0;
};

struct Metrics {
    double mean_power = 0.0;                 // W
    std::optional<double> pct_change;        // vs baseline mean power
    double rms_error = 0.0;                  // W
    std::vector<double> mean_thrust;         // N
    std::vector<double> saturation_duty;     // fraction
};

// One sequential closed-loop scenario: flow -> measurements -> farm dispatch
// -> per-turbine control -> rotor physics -> log.
class Simulation {
public:
    explicit Simulation(const ScenarioConfig& cfg)
        : cfg_(cfg),
          model_(cfg.turbine, cfg.ctrl.k_greedy),
          wake_(cfg.flow, cfg.dt),
          turbulence_(cfg.flow.ti, cfg.flow.turb_corr_time, cfg.flow.seed),
          u_mean_(cfg.flow.u_mean) {
        cfg_.validate();
        CaseSetup setup = select_case(cfg_.case_id);
        greedy_case_ = setup.greedy;
        std::vector<double> alpha =
            cfg_.alpha ? *cfg_.alpha
                       : (setup.alpha.empty() ? std::vector<double>(cfg_.n_turbines,
                                                                    1.0 / cfg_.n_turbines)
                                              : setup.alpha);
        if (alpha.size() != cfg_.n_turbines)
            throw ConfigError("alpha length must equal n_turbines");
        const bool feedback = cfg_.feedback ? *cfg_.feedback : setup.feedback;
        farm_.emplace(alpha, cfg_.dt, cfg_.ctrl.rated_power, feedback,
                      cfg_.rescale_du_over_unsaturated, &alpha_normalized_);

        for (std::size_t i = 0; i < cfg_.n_turbines; ++i)
            controls_.emplace_back(cfg_.ctrl, cfg_.law);
        init_states();
    }

    // Initializes every turbine at its greedy operating point for the initial
    // laminar inflow, walking down the row so wakes are consistent.
    void init_states() {
        const auto& p = model_.params();
        states_.assign(cfg_.n_turbines, TurbineState{});
        std::vector<double> induction(cfg_.n_turbines, 0.0);
        wake_.reset(induction);
        for (std::size_t i = 0; i < cfg_.n_turbines; ++i) {
            wake_.reset(induction);
            const double u = wake_.effective_wind(i, u_mean_);
            TurbineState& s = states_[i];
            s.rotor_speed = std::max(p.lambda_opt * u / p.rotor_radius,
                                     rpm_to_rad(cfg_.ctrl.omega_cut_in_rpm) / p.gearbox_ratio +
                                         0.05);
            s.pitch = p.theta_fine;
            const double omega_gen = s.rotor_speed * p.gearbox_ratio;
            s.gen_torque = controls_[i].greedy_curve().torque(omega_gen);
            s.gen_power = s.gen_torque * omega_gen * p.generator_efficiency;
            const double lambda = model_.tip_speed_ratio(u, s.rotor_speed);
            s.thrust = model_.thrust(u, lambda, s.pitch);
            induction[i] = model_.axial_induction(lambda, s.pitch);
            controls_[i].init(omega_gen, s.pitch, s.gen_torque);
        }
        wake_.reset(induction);
    }

    // Mid-run inflow change, for saturation/recovery experiments. Wake
    // advection delays stay at their construction-time quantization.
    void set_mean_wind(double u_mean) { u_mean_ = u_mean; }

    const std::vector<TurbineState>& states() const { return states_; }
    const FarmController& farm() const { return *farm_; }
    double time() const { return static_cast<double>(step_index_) * cfg_.dt; }
    std::size_t step_index() const { return step_index_; }
    bool alpha_normalized() const { return alpha_normalized_; }

    StepRecord step() {
        const auto& p = model_.params();
        const double t = time();
        const double u_inf = u_mean_ * (1.0 + turbulence_.step(cfg_.dt));

        std::vector<double> u_eff(cfg_.n_turbines);
        for (std::size_t i = 0; i < cfg_.n_turbines; ++i)
            u_eff[i] = wake_.effective_wind(i, u_inf);

        std::vector<double> p_gen(cfg_.n_turbines);
        std::vector<char> sat(cfg_.n_turbines);
        for (std::size_t i = 0; i < cfg_.n_turbines; ++i) {
            p_gen[i] = states_[i].gen_power;
            sat[i] = controls_[i].saturated() ? 1 : 0;
        }

        const double r = cfg_.reference.at(t);
        std::vector<double> p_dem;
        if (greedy_case_) {
            // dispatch bypassed; rated demand forces the min law onto the greedy branch
            p_dem.assign(cfg_.n_turbines, cfg_.ctrl.rated_power);
        } else {
            p_dem = farm_->step(r, p_gen, sat);
        }

        StepRecord rec;
        rec.t = t;
        rec.turbines.resize(cfg_.n_turbines);
        rec.r = r;
        rec.p_bar = std::accumulate(p_gen.begin(), p_gen.end(), 0.0);
        rec.e = greedy_case_ ? r - rec.p_bar : farm_->last_error();
        rec.u = greedy_case_ ? 0.0 : farm_->integrator_state();

        std::vector<double> induction(cfg_.n_turbines);
        for (std::size_t i = 0; i < cfg_.n_turbines; ++i) {
            TurbineState& s = states_[i];
            const double omega_gen = s.rotor_speed * p.gearbox_ratio;
            ActuatorCommand cmd;
            double tau_aero, lambda;
            const double p_avail =
                std::min(model_.available_power(u_eff[i]) * p.generator_efficiency,
                         cfg_.ctrl.rated_power);
            try {
                cmd = controls_[i].step(p_dem[i], omega_gen, p_avail, cfg_.dt);
                s.pitch = cmd.pitch;
                tau_aero = model_.aero_torque(u_eff[i], s);
                lambda = model_.tip_speed_ratio(u_eff[i], s.rotor_speed);
            } catch (const std::exception& ex) {
                throw ModelError(step_index_, "turbine " + std::to_string(i) + ": " + ex.what());
            }

            TurbineRecord& tr = rec.turbines[i];
            tr.u_eff = u_eff[i];
            tr.omega_r = s.rotor_speed;
            tr.pitch = cmd.pitch;
            tr.tau_gen = cmd.gen_torque;
            tr.p_dem = p_dem[i];
            tr.p_gen = p_gen[i];
            tr.thrust = model_.thrust(u_eff[i], lambda, cmd.pitch);
            tr.mode = controls_[i].mode() == CtrlMode::GreedyFallback ? 1 : 0;
            tr.saturated = tr.mode;

            s.thrust = tr.thrust;
            induction[i] = model_.axial_induction(lambda, cmd.pitch);
            s = model_.step_drivetrain(s, tau_aero, cmd.gen_torque, cfg_.dt);
        }
        wake_.push(induction);
        ++step_index_;
        return rec;
    }

    std::vector<StepRecord> run() {
        const std::size_t n_steps = static_cast<std::size_t>(cfg_.duration / cfg_.dt + 0.5);
        std::vector<StepRecord> records;
        records.reserve(n_steps);
        for (std::size_t k = 0; k < n_steps; ++k) records.push_back(step());
        return records;
    }

private:
    ScenarioConfig cfg_;
    TurbineModel model_;
    WakeField wake_;
    Turbulence turbulence_;
    double u_mean_;
    bool greedy_case_ = false;
    bool alpha_normalized_ = false;
    std::optional<FarmController> farm_;
    std::vector<TurbineControl> controls_;
    std::vector<TurbineState> states_;
    std::size_t step_index_ = 0;
};

inline Metrics compute_metrics(const std::vector<StepRecord>& records,
                               double transient_skip,
                               const Metrics* baseline = nullptr) {
    if (records.empty()) throw WindowTooShort("no records");
    const std::size_t n_t = records.front().turbines.size();
    Metrics m;
    m.mean_thrust.assign(n_t, 0.0);
    m.saturation_duty.assign(n_t, 0.0);
    double sum_p = 0.0, sum_e2 = 0.0;
    std::size_t n = 0;
    for (const auto& rec : records) {
        if (rec.t < transient_skip) continue;
        sum_p += rec.p_bar;
        const double e = rec.r - rec.p_bar;
        sum_e2 += e * e;
        for (std::size_t i = 0; i < n_t; ++i) {
            m.mean_thrust[i] += rec.turbines[i].thrust;
            m.saturation_duty[i] += rec.turbines[i].saturated;
        }
        ++n;
    }
    if (n == 0)
        throw WindowTooShort("evaluation window is empty: duration <= transient_skip");
    m.mean_power = sum_p / n;
    m.rms_error = std::sqrt(sum_e2 / n);
    for (std::size_t i = 0; i < n_t; ++i) {
        m.mean_thrust[i] /= n;
        m.saturation_duty[i] /= n;
    }
    if (baseline && baseline->mean_power != 0.0)
        m.pct_change = 100.0 * (m.mean_power - baseline->mean_power) / baseline->mean_power;
    return m;
}

inline std::string csv_header(std::size_t n_turbines) {
    std::string h = "t";
    for (std::size_t i = 1; i <= n_turbines; ++i) {
        const std::string s = std::to_string(i);
        h += ",U_eff_" + s + ",omega_r_" + s + ",pitch_" + s + ",tau_gen_" + s +
             ",P_dem_" + s + ",P_gen_" + s + ",thrust_" + s + ",mode_" + s + ",sat_" + s;
    }
    h += ",r,P_bar,e,u";
    return h;
}

inline void write_records(const std::vector<StepRecord>& records, std::size_t n_turbines,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << csv_header(n_turbines) << "\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        out << buf << sep;
    };
    for (const auto& rec : records) {
        put(rec.t, ',');
        for (const auto& tr : rec.turbines) {
            put(tr.u_eff, ',');
            put(tr.omega_r, ',');
            put(tr.pitch, ',');
            put(tr.tau_gen, ',');
            put(tr.p_dem, ',');
            put(tr.p_gen, ',');
            put(tr.thrust, ',');
            out << tr.mode << ',' << tr.saturated << ',';
        }
        put(rec.r, ',');
        put(rec.p_bar, ',');
        put(rec.e, ',');
        std::snprintf(buf, sizeof(buf), "%.9g", rec.u);
        out << buf << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<StepRecord> read_records(const std::string& path, std::size_t& n_turbines) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("missing CSV header: " + path);
    const std::size_t n_cols = static_cast<std::size_t>(
        std::count(line.begin(), line.end(), ',') + 1);
    if (n_cols < 5 || (n_cols - 5) % 9 != 0)
        throw std::runtime_error("unexpected CSV column count in " + path);
    n_turbines = (n_cols - 5) / 9;

    std::vector<StepRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        auto next = [&]() -> double {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("short CSV row");
            return std::stod(cell);
        };
        StepRecord rec;
        rec.t = next();
        rec.turbines.resize(n_turbines);
        for (auto& tr : rec.turbines) {
            tr.u_eff = next();
            tr.omega_r = next();
            tr.pitch = next();
            tr.tau_gen = next();
            tr.p_dem = next();
            tr.p_gen = next();
            tr.thrust = next();
            tr.mode = static_cast<int>(next());
            tr.saturated = static_cast<int>(next());
        }
        rec.r = next();
        rec.p_bar = next();
        rec.e = next();
        rec.u = next();
        records.push_back(std::move(rec));
    }
    return records;
}

struct ScenarioResult {
    std::vector<StepRecord> records;
    Metrics metrics;
};

inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    Simulation sim(cfg);
    ScenarioResult res;
    res.records = sim.run();
    res.metrics = compute_metrics(res.records, cfg.transient_skip);
    if (!cfg.output_path.empty())
        write_records(res.records, cfg.n_turbines, cfg.output_path);
    return res;
}

// Single-turbine demanded-power step experiment: steady level, an up-step,
// then a down-step, under laminar or turbulent inflow.
inline std::vector<StepRecord> step_test(ScenarioConfig cfg, ControlLaw law) {
    cfg.n_turbines = 1;
    cfg.flow.positions_d = {0.0};
    cfg.case_id = 0;
    cfg.alpha = std::vector<double>{1.0};
    cfg.feedback = false;
    cfg.law = law;
    cfg.output_path.clear();
    Simulation sim(cfg);
    return sim.run();
}

}  // namespace apc
