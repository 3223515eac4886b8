// Batch experiment runner: executes scenario configs and writes trace CSVs,
// cost/verifier JSON and summary tables.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ssim/ssim.hpp"

namespace {

void print_run_summary(const ssim::json& summary) {
    std::cout << "scenario: " << summary.at("scenario").get<std::string>() << "  (seed "
              << summary.at("seed") << ")\n";
    std::cout << std::left << std::setw(44) << "policy" << std::setw(12) << "flow"
              << std::setw(12) << "energy" << std::setw(12) << "total" << std::setw(10)
              << "ratio" << "verifier\n";
    for (const auto& row : summary.at("runs")) {
        if (row.contains("error")) {
            std::cout << std::left << std::setw(44) << row.at("policy").get<std::string>()
                      << "ERROR: " << row.at("error").get<std::string>() << "\n";
            continue;
        }
        if (row.contains("outcome")) {
            const auto& oc = row.at("outcome");
            std::cout << std::left << std::setw(44) << row.at("policy").get<std::string>()
                      << "adversary branch=" << oc.at("branch").get<std::string>()
                      << " ratio_lower=" << oc.at("ratio_lower").get<double>() << "\n";
            continue;
        }
        std::ostringstream flow, energy, total, r;
        flow.precision(5);
        energy.precision(5);
        total.precision(5);
        r.precision(4);
        flow << row.at("flow").get<double>();
        energy << row.at("energy").get<double>();
        total << row.at("total").get<double>();
        if (row.contains("ratio")) r << row.at("ratio").get<double>();
        std::string verdict = "-";
        if (row.contains("verifier")) {
            verdict = row.at("verifier").at("passed").get<bool>() ? "pass" : "FAIL";
        }
        std::cout << std::left << std::setw(44) << row.at("policy").get<std::string>()
                  << std::setw(12) << flow.str() << std::setw(12) << energy.str()
                  << std::setw(12) << total.str() << std::setw(10) << r.str() << verdict
                  << "\n";
    }
    const auto& agg = summary.at("aggregate");
    if (agg.contains("max_ratio")) {
        std::cout << "max ratio: " << agg.at("max_ratio").get<double>() << "\n";
    }
    if (agg.contains("max_violation")) {
        std::cout << "max verifier violation: " << agg.at("max_violation").get<double>() << "\n";
    }
}

void print_compare_table(const ssim::json& summary) {
    std::cout << "scenario: " << summary.at("scenario").get<std::string>() << "  ("
              << summary.at("workloads") << " workloads)\n";
    std::cout << std::left << std::setw(44) << "policy" << std::setw(12) << "flow"
              << std::setw(12) << "energy" << std::setw(12) << "total" << "ratio_vs_oracle\n";
    for (const auto& row : summary.at("table")) {
        if (row.contains("error")) {
            std::cout << std::left << std::setw(44) << row.at("policy").get<std::string>()
                      << "ERROR: " << row.at("error").get<std::string>() << "\n";
            continue;
        }
        std::ostringstream flow, energy, total, r;
        flow.precision(5);
        energy.precision(5);
        total.precision(5);
        r.precision(4);
        flow << row.at("flow").get<double>();
        energy << row.at("energy").get<double>();
        total << row.at("total").get<double>();
        if (row.contains("ratio_vs_oracle")) r << row.at("ratio_vs_oracle").get<double>();
        std::cout << std::left << std::setw(44) << row.at("policy").get<std::string>()
                  << std::setw(12) << flow.str() << std::setw(12) << energy.str()
                  << std::setw(12) << total.str() << r.str() << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonclairvoyant speed scaling simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_events;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "scenario config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the scenario seed");
        cmd->add_option("--max-events", max_events, "event-count guard per simulation");
    };
    CLI::App* run_cmd = app.add_subcommand("run", "execute every policy x workload pair");
    CLI::App* compare_cmd = app.add_subcommand("compare", "cross-policy cost table");
    add_common(run_cmd);
    add_common(compare_cmd);

    CLI11_PARSE(app, argc, argv);

    ssim::Scenario scenario;
    try {
        if (seed) {
            // reload with the overridden seed so generated workloads follow it
            std::ifstream in(config_path);
            if (!in) throw std::invalid_argument("cannot open config " + config_path);
            ssim::json doc;
            in >> doc;
            doc["seed"] = *seed;
            scenario =
                ssim::load_scenario(doc, std::filesystem::path(config_path).parent_path());
        } else {
            scenario = ssim::load_scenario_file(config_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    if (max_events) scenario.sim.max_events = *max_events;

    try {
        if (run_cmd->parsed()) {
            ssim::RunOutput out = ssim::run_scenario(scenario, out_dir);
            print_run_summary(out.summary);
            if (out.had_errors) return 2;
            return out.contracts_passed ? 0 : 3;
        }
        ssim::RunOutput out = ssim::compare_policies(scenario, out_dir);
        print_compare_table(out.summary);
        return out.had_errors ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
