#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "ssim/adversary.hpp"
#include "ssim/analysis.hpp"
#include "ssim/engine.hpp"
#include "ssim/power.hpp"
#include "ssim/workload.hpp"

namespace ssim {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Power functions: {"kind":"polynomial","alpha":3.0} or {"kind":"pathological"}
// ---------------------------------------------------------------------------

inline json power_to_json(const PowerFunction& P) {
    json j;
    if (P.is_polynomial()) {
        j["kind"] = "polynomial";
        j["alpha"] = P.alpha();
    } else {
        j["kind"] = "pathological";
    }
    return j;
}

inline PowerFunction power_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polynomial") {
        return PowerFunction::polynomial(j.at("alpha").get<double>());
    }
    if (kind == "pathological") {
        return PowerFunction::pathological();
    }
    throw std::invalid_argument("power kind must be \"polynomial\" or \"pathological\", got \"" +
                                kind + "\"");
}

// ---------------------------------------------------------------------------
// Instances: {"jobs":[{"id":1,"release":0.0,"size":1.0}, ...]}, "size":"open"
// ---------------------------------------------------------------------------

inline json instance_to_json(const Instance& inst) {
    json jobs = json::array();
    for (const JobSpec& j : inst.jobs) {
        json job;
        job["id"] = j.id;
        job["release"] = j.release;
        if (j.size) {
            job["size"] = *j.size;
        } else {
            job["size"] = "open";
        }
        jobs.push_back(std::move(job));
    }
    json out;
    out["jobs"] = std::move(jobs);
    return out;
}

inline Instance instance_from_json(const json& j) {
    Instance inst;
    for (const json& job : j.at("jobs")) {
        JobSpec spec;
        spec.id = job.at("id").get<int>();
        spec.release = job.at("release").get<double>();
        const json& size = job.at("size");
        if (size.is_string()) {
            if (size.get<std::string>() != "open") {
                throw std::invalid_argument("job size must be a number or \"open\"");
            }
        } else {
            spec.size = size.get<double>();
        }
        inst.jobs.push_back(spec);
    }
    auto violations = validate(inst);
    if (!violations.empty()) {
        throw std::invalid_argument("invalid instance: " + violations.front());
    }
    return inst;
}

inline std::string instance_to_csv(const Instance& inst) {
    std::ostringstream out;
    out << "id,release,size\n";
    out.precision(17);
    for (const JobSpec& j : inst.jobs) {
        out << j.id << ',' << j.release << ',';
        if (j.size) {
            out << *j.size;
        } else {
            out << "open";
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Traces and costs
// ---------------------------------------------------------------------------

inline std::string trace_to_csv(const Trace& trace) {
    std::ostringstream out;
    out << "t_start,t_end,n_active,speed,energy_rate\n";
    out.precision(17);
    for (const Interval& iv : trace.intervals) {
        out << iv.t_start << ',' << iv.t_end << ',' << iv.active.size() << ',' << iv.speed << ','
            << iv.energy_rate << '\n';
    }
    return out.str();
}

inline json events_to_json(const Trace& trace) {
    json events = json::array();
    for (const Event& e : trace.events) {
        json entry;
        entry["time"] = e.time;
        switch (e.kind) {
            case Event::Kind::arrival: entry["kind"] = "arrival"; break;
            case Event::Kind::completion: entry["kind"] = "completion"; break;
            case Event::Kind::adaptive: entry["kind"] = "adaptive"; break;
        }
        entry["jobs"] = e.ids;
        events.push_back(std::move(entry));
    }
    json out;
    out["policy"] = trace.policy_name;
    out["end_time"] = trace.end_time;
    out["truncated"] = trace.truncated;
    out["events"] = std::move(events);
    return out;
}

inline json cost_to_json(const CostSummary& c) {
    json out;
    out["flow"] = c.total_flow;
    out["energy"] = c.total_energy;
    out["total"] = c.total;
    return out;
}

// ---------------------------------------------------------------------------
// Verifier reports; failing entries carry full snapshots for debugging
// ---------------------------------------------------------------------------

inline json snapshot_to_json(const Snapshot& s) {
    json jobs = json::array();
    for (const auto& j : s.jobs) {
        json row;
        row["id"] = j.id;
        row["release"] = j.release;
        if (j.size) row["size"] = *j.size;
        row["processed"] = j.processed;
        if (j.remaining) row["remaining"] = *j.remaining;
        row["active"] = j.active;
        jobs.push_back(std::move(row));
    }
    json out;
    out["time"] = s.time;
    out["cost"] = s.cost;
    out["jobs"] = std::move(jobs);
    return out;
}

inline json verifier_report_to_json(const VerifierReport& report, const Trace* trace_a = nullptr,
                                    const Trace* trace_o = nullptr, bool full_samples = false) {
    json out;
    out["boundary_ok"] = report.boundary_ok;
    out["phi_start"] = report.phi_start;
    out["phi_end"] = report.phi_end;
    out["max_violation"] = report.max_violation;
    out["passed"] = report.passed();
    out["event_count"] = report.event_jumps.size();
    out["sample_count"] = report.running_samples.size();

    json jumps = json::array();
    for (const EventJump& e : report.event_jumps) {
        const bool failing = e.violation > 0.0;
        if (!full_samples && !failing) continue;
        json row;
        row["time"] = e.time;
        row["jobs"] = e.ids;
        row["phi_before"] = e.phi_before;
        row["phi_after"] = e.phi_after;
        row["dphi"] = e.dphi;
        row["violation"] = e.violation;
        if (failing && trace_a != nullptr && trace_o != nullptr) {
            row["snapshot_a"] = snapshot_to_json(state_at(*trace_a, std::min(e.time, trace_a->end_time)));
            row["snapshot_o"] = snapshot_to_json(state_at(*trace_o, std::min(e.time, trace_o->end_time)));
        }
        jumps.push_back(std::move(row));
    }
    out["event_jumps"] = std::move(jumps);

    json samples = json::array();
    for (const RunningSample& s : report.running_samples) {
        const bool failing = s.violation > 0.0;
        if (!full_samples && !failing) continue;
        json row;
        row["time"] = s.time;
        row["lhs"] = s.lhs;
        row["rhs"] = s.rhs;
        row["dphi_dt"] = s.dphi_dt;
        row["violation"] = s.violation;
        if (failing && trace_a != nullptr && trace_o != nullptr) {
            row["snapshot_a"] = snapshot_to_json(state_at(*trace_a, std::min(s.time, trace_a->end_time)));
            row["snapshot_o"] = snapshot_to_json(state_at(*trace_o, std::min(s.time, trace_o->end_time)));
        }
        samples.push_back(std::move(row));
    }
    out["running_samples"] = std::move(samples);
    return out;
}

// ---------------------------------------------------------------------------
// Adversary outcomes
// ---------------------------------------------------------------------------

inline json adversary_outcome_to_json(const AdversaryOutcome& o) {
    json out;
    out["branch"] = o.branch == OpenJobsAdversary::Branch::big_cost ? "big_cost" : "lagging";
    out["T"] = o.trigger_time;
    out["cost_at_T"] = o.cost_at_trigger;
    out["trigger_job"] = o.trigger_job;
    out["n"] = o.n;
    out["epsilon"] = o.epsilon;
    out["sizes"] = o.sizes;
    out["alg_cost"] = cost_to_json(o.alg_cost);
    out["opt_bound"] = o.opt_bound;
    if (o.opt_cost) {
        out["opt_cost"] = *o.opt_cost;
    } else {
        out["opt_cost"] = nullptr;
    }
    out["opt_reference"] = o.opt_reference;
    out["ratio_lower"] = o.ratio_lower;
    return out;
}

} // namespace ssim
