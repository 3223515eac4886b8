#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "ssim/io.hpp"
#include "ssim/random.hpp"

namespace ssim {

// ---------------------------------------------------------------------------
// Policy specs: {"policy":"laps","delta":1.0,"beta":0.1667,"alpha":3.0},
// {"policy":"srpt_power_jobs","offset":1}, {"policy":"rr_fixed","speed":1.0}, ...
// ---------------------------------------------------------------------------

inline Policy policy_from_json(const json& spec, const PowerFunction& P) {
    const std::string name = spec.at("policy").get<std::string>();
    if (name == "laps") {
        if (!P.is_polynomial()) {
            throw std::invalid_argument(
                "policy \"laps\" is defined only for polynomial power functions");
        }
        const double alpha = spec.contains("alpha") ? spec.at("alpha").get<double>() : P.alpha();
        if (std::abs(alpha - P.alpha()) > 1e-12) {
            throw std::invalid_argument("laps alpha does not match the power function");
        }
        return make_laps(spec.at("delta").get<double>(), spec.at("beta").get<double>(), alpha);
    }
    const int offset = spec.contains("offset") ? spec.at("offset").get<int>() : 1;
    if (name == "rr_power_jobs") return make_rr_power_jobs(P, offset);
    if (name == "setf_power_jobs") return make_setf_power_jobs(P, offset);
    if (name == "srpt_power_jobs") return make_srpt_power_jobs(P, offset);
    if (name == "rr_fixed") return make_rr_fixed(spec.at("speed").get<double>());
    throw std::invalid_argument("unknown policy \"" + name + "\"");
}

// ---------------------------------------------------------------------------
// Scenario configs
// ---------------------------------------------------------------------------

struct AnalysisSpec {
    bool verify = false;
    bool oracle = false;
    int samples = 16;
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    PowerFunction power = PowerFunction::polynomial(3.0);
    std::vector<json> policy_specs;
    std::vector<Instance> instances;                 // static workload set
    std::optional<AdversaryParams> adversary;        // adaptive workload
    AnalysisSpec analysis;
    SimOptions sim;
};

/// Parse and validate a scenario document. Relative workload file paths are
/// resolved against base_dir.
inline Scenario load_scenario(const json& doc, const std::filesystem::path& base_dir = ".") {
    Scenario sc;
    if (doc.contains("name")) sc.name = doc.at("name").get<std::string>();
    if (doc.contains("seed")) sc.seed = doc.at("seed").get<std::uint64_t>();
    sc.power = power_from_json(doc.at("power"));
    if (!doc.contains("policies") || !doc.at("policies").is_array() ||
        doc.at("policies").empty()) {
        throw std::invalid_argument("scenario.policies: need a non-empty array");
    }
    for (const json& p : doc.at("policies")) {
        policy_from_json(p, sc.power);  // validate eagerly, before any run starts
        sc.policy_specs.push_back(p);
    }
    if (doc.contains("max_events")) sc.sim.max_events = doc.at("max_events").get<std::size_t>();
    if (doc.contains("max_time") && !doc.at("max_time").is_null()) {
        sc.sim.max_time = doc.at("max_time").get<double>();
    }
    if (doc.contains("analysis")) {
        const json& a = doc.at("analysis");
        if (a.contains("verify")) sc.analysis.verify = a.at("verify").get<bool>();
        if (a.contains("oracle")) sc.analysis.oracle = a.at("oracle").get<bool>();
        if (a.contains("samples")) sc.analysis.samples = a.at("samples").get<int>();
        if (sc.analysis.verify && !sc.analysis.oracle) {
            throw std::invalid_argument("analysis.verify requires analysis.oracle");
        }
        if (sc.analysis.verify && !sc.power.is_polynomial()) {
            throw std::invalid_argument("analysis.verify needs a polynomial power function");
        }
    }

    const json& w = doc.at("workload");
    if (w.contains("file")) {
        const auto path = base_dir / w.at("file").get<std::string>();
        std::ifstream in(path);
        if (!in) {
            throw std::invalid_argument("workload.file: cannot open " + path.string());
        }
        json j;
        in >> j;
        sc.instances.push_back(instance_from_json(j));
    } else if (w.contains("batch")) {
        const json& b = w.at("batch");
        std::optional<double> size;
        if (!b.at("size").is_string()) size = b.at("size").get<double>();
        sc.instances.push_back(batch(b.at("n").get<int>(), size,
                                     b.contains("t0") ? b.at("t0").get<double>() : 0.0));
    } else if (w.contains("stream")) {
        const json& s = w.at("stream");
        sc.instances.push_back(stream(s.at("start").get<double>(), s.at("interval").get<double>(),
                                      s.at("size").get<double>(), s.at("count").get<int>()));
    } else if (w.contains("random")) {
        const json& r = w.at("random");
        if (!doc.contains("seed")) {
            throw std::invalid_argument("workload.random requires an explicit scenario seed");
        }
        sc.instances = random_instances(sc.seed, r.at("instances").get<int>(),
                                        r.contains("max_jobs") ? r.at("max_jobs").get<int>() : 5);
    } else if (w.contains("adversary")) {
        const json& a = w.at("adversary");
        std::optional<double> eps;
        if (a.contains("epsilon") && !a.at("epsilon").is_null()) {
            eps = a.at("epsilon").get<double>();
        }
        sc.adversary = AdversaryParams::make(a.at("k").get<double>(), a.at("v").get<double>(),
                                             sc.power, eps);
    } else {
        throw std::invalid_argument(
            "scenario.workload: need one of file|batch|stream|random|adversary");
    }
    return sc;
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    try {
        return load_scenario(doc, path.parent_path());
    } catch (const std::exception& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

struct RunOutput {
    json summary;           // deterministic; reruns with one seed are byte-identical
    bool contracts_passed = true;
    bool had_errors = false;
};

namespace detail {

inline bool is_calibrated_laps(const PolicyInfo& info, double alpha) {
    return info.kind == "laps" && std::abs(info.delta - 3.0 / alpha) <= 1e-9 &&
           std::abs(info.beta - 1.0 / (2.0 * alpha)) <= 1e-9;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

} // namespace detail

/// Execute every (policy x workload) pair of the scenario. Per-run failures
/// are recorded without aborting sibling runs. Trace/cost files are written
/// for single-workload scenarios; random suites get one summary row per
/// instance instead.
inline RunOutput run_scenario(const Scenario& sc, const std::filesystem::path& out_dir,
                              bool write_files = true) {
    RunOutput out;
    if (write_files) std::filesystem::create_directories(out_dir);

    json summary;
    summary["scenario"] = sc.name;
    summary["seed"] = sc.seed;
    summary["power"] = power_to_json(sc.power);
    json runs = json::array();

    double max_ratio = 0.0;
    double max_violation = -kInf;
    bool any_ratio = false;

    const bool single = sc.instances.size() == 1;
    for (std::size_t pi = 0; pi < sc.policy_specs.size(); ++pi) {
        const Policy policy = policy_from_json(sc.policy_specs[pi], sc.power);
        const std::string tag = "p" + std::to_string(pi) + "_" + policy.info().kind;

        if (sc.adversary) {
            json row;
            row["policy"] = policy.name();
            row["workload"] = "adversary";
            try {
                AdversaryOutcome oc = run_adversary(*sc.adversary, policy, sc.sim);
                row["outcome"] = adversary_outcome_to_json(oc);
                max_ratio = std::max(max_ratio, oc.ratio_lower);
                any_ratio = true;
                if (write_files) {
                    detail::write_json(out_dir / (tag + "_adversary.json"),
                                       adversary_outcome_to_json(oc));
                    detail::write_text(out_dir / (tag + "_alg_trace.csv"),
                                       trace_to_csv(oc.alg_trace));
                    detail::write_json(out_dir / (tag + "_alg_events.json"),
                                       events_to_json(oc.alg_trace));
                    if (oc.opt_trace) {
                        detail::write_text(out_dir / (tag + "_opt_trace.csv"),
                                           trace_to_csv(*oc.opt_trace));
                    }
                }
            } catch (const std::exception& e) {
                row["error"] = e.what();
                out.had_errors = true;
            }
            runs.push_back(std::move(row));
            continue;
        }

        for (std::size_t wi = 0; wi < sc.instances.size(); ++wi) {
            const Instance& inst = sc.instances[wi];
            json row;
            row["policy"] = policy.name();
            row["workload"] = single ? json("instance") : json(wi);
            try {
                Trace trace = simulate(inst, policy, sc.power, sc.sim);
                CostSummary c = cost(trace);
                row["flow"] = c.total_flow;
                row["energy"] = c.total_energy;
                row["total"] = c.total;

                std::optional<OracleResult> oracle;
                if (sc.analysis.oracle) {
                    oracle = oracle_opt(inst, sc.power);
                    row["oracle"] = oracle->cost;
                    const double r = ratio(c, oracle->cost);
                    row["ratio"] = r;
                    max_ratio = std::max(max_ratio, r);
                    any_ratio = true;
                }
                if (sc.analysis.verify) {
                    if (!oracle) {
                        throw std::invalid_argument("analysis.verify requires analysis.oracle");
                    }
                    const PotentialParams params = PotentialParams::for_alpha(sc.power.alpha());
                    VerifierReport report;
                    if (detail::is_calibrated_laps(policy.info(), sc.power.alpha())) {
                        report = verify_traces(trace, oracle->trace, params,
                                               sc.analysis.samples);
                    } else {
                        // boundary and event conditions are policy-agnostic;
                        // the running condition needs the calibrated LAPS
                        const double end = std::max(trace.end_time, oracle->trace.end_time);
                        report.phi_start = potential(
                            ssim::detail::snapshot_clamped(trace, 0.0, EventSide::before),
                            ssim::detail::snapshot_clamped(oracle->trace, 0.0, EventSide::before),
                            params);
                        report.phi_end = potential(
                            ssim::detail::snapshot_clamped(trace, end, EventSide::after),
                            ssim::detail::snapshot_clamped(oracle->trace, end, EventSide::after),
                            params);
                        report.boundary_ok = std::abs(report.phi_start) <= 1e-12 &&
                                             std::abs(report.phi_end) <= 1e-12;
                        report.event_jumps = check_events(trace, oracle->trace, params);
                        report.max_violation = -kInf;
                        for (const auto& e : report.event_jumps) {
                            report.max_violation = std::max(report.max_violation, e.violation);
                        }
                    }
                    row["verifier"] = verifier_report_to_json(report, &trace, &oracle->trace);
                    if (!report.passed()) out.contracts_passed = false;
                    max_violation = std::max(max_violation, report.max_violation);
                }
                if (write_files && single) {
                    detail::write_text(out_dir / (tag + "_trace.csv"), trace_to_csv(trace));
                    detail::write_json(out_dir / (tag + "_events.json"), events_to_json(trace));
                    detail::write_json(out_dir / (tag + "_cost.json"), cost_to_json(c));
                }
            } catch (const std::exception& e) {
                row["error"] = e.what();
                out.had_errors = true;
            }
            runs.push_back(std::move(row));
        }
    }

    summary["runs"] = std::move(runs);
    json agg;
    if (any_ratio) agg["max_ratio"] = max_ratio;
    if (max_violation > -kInf) agg["max_violation"] = max_violation;
    agg["contracts_passed"] = out.contracts_passed;
    agg["errors"] = out.had_errors;
    summary["aggregate"] = std::move(agg);
    out.summary = std::move(summary);
    if (write_files) detail::write_json(out_dir / "summary.json", out.summary);
    return out;
}

/// Cross-policy comparison over the shared workload set: one row per policy
/// with totals summed over the set and the ratio against the oracle total.
inline RunOutput compare_policies(const Scenario& sc, const std::filesystem::path& out_dir,
                                  bool write_files = true) {
    RunOutput out;
    if (write_files) std::filesystem::create_directories(out_dir);
    if (sc.adversary) {
        throw std::invalid_argument("compare expects a static workload set");
    }

    json table = json::array();
    double oracle_total = 0.0;
    bool have_oracle = false;
    if (sc.instances.empty()) {
        json summary;
        summary["scenario"] = sc.name;
        summary["seed"] = sc.seed;
        summary["power"] = power_to_json(sc.power);
        summary["workloads"] = 0;
        summary["warning"] = "empty workload set";
        summary["table"] = std::move(table);
        out.summary = std::move(summary);
        if (write_files) detail::write_json(out_dir / "compare.json", out.summary);
        return out;
    }
    if (sc.analysis.oracle) {
        for (const Instance& inst : sc.instances) {
            oracle_total += oracle_opt(inst, sc.power).cost;
        }
        have_oracle = true;
    }

    for (const json& spec : sc.policy_specs) {
        const Policy policy = policy_from_json(spec, sc.power);
        json row;
        row["policy"] = policy.name();
        try {
            double flow = 0.0;
            double energy = 0.0;
            for (const Instance& inst : sc.instances) {
                CostSummary c = cost(simulate(inst, policy, sc.power, sc.sim));
                flow += c.total_flow;
                energy += c.total_energy;
            }
            row["flow"] = flow;
            row["energy"] = energy;
            row["total"] = flow + energy;
            if (have_oracle && oracle_total > 0.0) {
                row["ratio_vs_oracle"] = (flow + energy) / oracle_total;
            }
        } catch (const std::exception& e) {
            row["error"] = e.what();
            out.had_errors = true;
        }
        table.push_back(std::move(row));
    }

    json summary;
    summary["scenario"] = sc.name;
    summary["seed"] = sc.seed;
    summary["power"] = power_to_json(sc.power);
    summary["workloads"] = sc.instances.size();
    if (have_oracle) summary["oracle_total"] = oracle_total;
    summary["table"] = std::move(table);
    out.summary = std::move(summary);
    if (write_files) detail::write_json(out_dir / "compare.json", out.summary);
    return out;
}

} // namespace ssim
