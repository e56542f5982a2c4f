#include <cstdio>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apc/config.hpp"
#include "apc/sim.hpp"
#include "apc/validate.hpp"

namespace {

void print_metrics(const std::string& label, const apc::Metrics& m) {
    std::printf("%-18s mean power %.4f MW", label.c_str(), m.mean_power / 1e6);
    if (m.pct_change) std::printf("  (%+.2f%%)", *m.pct_change);
    std::printf("  RMS error %.4f MW  thrust [", m.rms_error / 1e6);
    for (std::size_t i = 0; i < m.mean_thrust.size(); ++i)
        std::printf("%s%.2f", i ? ", " : "", m.mean_thrust[i] / 1e5);
    std::printf("] x1e5 N  sat duty [");
    for (std::size_t i = 0; i < m.saturation_duty.size(); ++i)
        std::printf("%s%.2f", i ? ", " : "", m.saturation_duty[i]);
    std::printf("]\n");
}

int cmd_run(const std::string& config_path) {
    apc::ScenarioConfig cfg = apc::load_scenario(config_path);
    if (cfg.output_path.empty()) cfg.output_path = "run.csv";
    const apc::ScenarioResult res = apc::run_scenario(cfg);
    print_metrics("case " + std::to_string(cfg.case_id), res.metrics);
    std::printf("wrote %zu steps to %s\n", res.records.size(), cfg.output_path.c_str());
    return 0;
}

int cmd_steptest(const std::string& config_path) {
    apc::ScenarioConfig cfg = apc::load_scenario(config_path);
    std::string base = cfg.output_path.empty() ? "steptest" : cfg.output_path;
    if (base.size() > 4 && base.substr(base.size() - 4) == ".csv")
        base.erase(base.size() - 4);
    for (const double ti : {0.0, 0.05}) {
        for (const apc::ControlLaw law : {apc::ControlLaw::ModeI, apc::ControlLaw::ModeII}) {
            apc::ScenarioConfig c = cfg;
            c.flow.ti = ti;
            const auto records = apc::step_test(c, law);
            const std::string name = base + (law == apc::ControlLaw::ModeI ? "_modeI" : "_modeII") +
                                     "_ti" + std::to_string(static_cast<int>(ti * 100)) + ".csv";
            apc::write_records(records, 1, name);
            std::printf("wrote %s\n", name.c_str());
        }
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<int>& cases, int seeds) {
    const apc::ScenarioConfig base = apc::load_scenario(config_path);
    std::string stem = base.output_path.empty() ? "sweep" : base.output_path;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") stem.erase(stem.size() - 4);

    struct Job {
        int case_id;
        int seed;
        std::string path;
        std::future<apc::Metrics> metrics;
    };
    std::vector<Job> jobs;
    for (const int c : cases) {
        for (int s = 0; s < seeds; ++s) {
            apc::ScenarioConfig cfg = base;
            cfg.case_id = c;
            cfg.alpha.reset();
            cfg.feedback.reset();
            cfg.flow.seed = base.flow.seed + static_cast<std::uint64_t>(s);
            cfg.output_path = stem + "_case" + std::to_string(c) + "_seed" +
                              std::to_string(s) + ".csv";
            Job job{c, s, cfg.output_path, {}};
            job.metrics = std::async(std::launch::async, [cfg]() {
                return apc::run_scenario(cfg).metrics;
            });
            jobs.push_back(std::move(job));
        }
    }
    for (auto& job : jobs)
        print_metrics("case " + std::to_string(job.case_id) + " seed " +
                          std::to_string(job.seed),
                      job.metrics.get());
    std::printf("wrote %zu files (%s_case*_seed*.csv)\n", jobs.size(), stem.c_str());
    return 0;
}

int cmd_validate(const std::string& config_path) {
    apc::ScenarioConfig cfg = apc::load_scenario(config_path);
    cfg.output_path.clear();
    apc::Simulation sim(cfg);
    const auto records = sim.run();
    const auto violations = apc::scan_invariants(records, cfg);
    if (violations.empty()) {
        std::printf("OK: %zu steps, no invariant violations\n", records.size());
        return 0;
    }
    for (const auto& v : violations) std::fprintf(stderr, "VIOLATION %s\n", v.c_str());
    std::fprintf(stderr, "%zu invariant violations\n", violations.size());
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale wind farm active power control simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<int> cases = {0, 1, 2, 3, 4};
    int seeds = 1;

    auto* run = app.add_subcommand("run", "Run a single scenario");
    run->add_option("config", config_path, "scenario config file")->required();

    auto* steptest = app.add_subcommand("steptest",
                                        "Single-turbine power step tests, both control modes");
    steptest->add_option("config", config_path, "scenario config file")->required();

    auto* sweep = app.add_subcommand("sweep", "Case/seed sweep with independent outputs");
    sweep->add_option("config", config_path, "scenario config file")->required();
    sweep->add_option("--cases", cases, "case ids to run")->delimiter(',');
    sweep->add_option("--seeds", seeds, "number of seeds per case")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Run the invariant suite on a fresh simulation");
    validate->add_option("config", config_path, "scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (steptest->parsed()) return cmd_steptest(config_path);
        if (sweep->parsed()) return cmd_sweep(config_path, cases, seeds);
        if (validate->parsed()) return cmd_validate(config_path);
    } catch (const apc::ConfigError& ex) {
        std::fprintf(stderr, "configuration error: %s\n", ex.what());
        return 1;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    }
    return 0;
}
