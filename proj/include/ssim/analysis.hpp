#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssim/engine.hpp"
#include "ssim/errors.hpp"
#include "ssim/power.hpp"

namespace ssim {

// ---------------------------------------------------------------------------
// Potential function
// ---------------------------------------------------------------------------

/// Constants of the amortized analysis for a given speed exponent.
/// gamma = alpha*(1+(1+3/alpha)^alpha) and c = 4*alpha^3*(1+(1+3/alpha)^alpha),
/// so gamma == c / (4 alpha^2) as an algebraic identity.
struct PotentialParams {
    double alpha = 0.0;
    double gamma = 0.0;
    double c = 0.0;

    static PotentialParams for_alpha(double alpha) {
        if (!(alpha > 1.0)) {
            throw std::invalid_argument("PotentialParams: alpha must be > 1");
        }
        const double base = 1.0 + std::pow(1.0 + 3.0 / alpha, alpha);
        PotentialParams p;
        p.alpha = alpha;
        p.gamma = alpha * base;
        p.c = 4.0 * alpha * alpha * alpha * base;
        return p;
    }

    /// The LAPS parameters the running-condition constants are calibrated to.
    double calibrated_delta() const { return 3.0 / alpha; }
    double calibrated_beta() const { return 1.0 / (2.0 * alpha); }
};

namespace detail {

inline const Snapshot::Job* find_snap_job(const Snapshot& s, int id) {
    auto it = std::lower_bound(s.jobs.begin(), s.jobs.end(), id,
                               [](const Snapshot::Job& j, int v) { return j.id < v; });
    return (it != s.jobs.end() && it->id == id) ? &*it : nullptr;
}

/// The algorithm's active jobs ordered by (release, id); index i (1-based) in
/// this order carries coefficient i^(1-1/alpha).
inline std::vector<const Snapshot::Job*> ordered_active(const Snapshot& s) {
    std::vector<const Snapshot::Job*> jobs;
    for (const auto& j : s.jobs) {
        if (j.active) jobs.push_back(&j);
    }
    std::sort(jobs.begin(), jobs.end(), [](const Snapshot::Job* a, const Snapshot::Job* b) {
        if (a->release != b->release) return a->release < b->release;
        return a->id < b->id;
    });
    return jobs;
}

} // namespace detail

/// Phi = gamma * sum_i i^(1-1/alpha) * max(0, q_a(j_i) - q_o(j_i)) over the
/// algorithm's active jobs ordered by release time (ties by id). Jobs the
/// algorithm already finished contribute nothing; jobs absent from the
/// reference snapshot count as having remaining 0 there.
inline double potential(const Snapshot& state_a, const Snapshot& state_o,
                        const PotentialParams& params) {
    const auto jobs = detail::ordered_active(state_a);
    double phi = 0.0;
    int i = 0;
    for (const Snapshot::Job* ja : jobs) {
        ++i;
        if (!ja->remaining.has_value()) {
            throw input_error("potential: job " + std::to_string(ja->id) +
                              " has no known remaining work");
        }
        const Snapshot::Job* jo = detail::find_snap_job(state_o, ja->id);
        if (jo == nullptr) {
            throw input_error("potential: job " + std::to_string(ja->id) +
                              " missing from the reference snapshot");
        }
        const double q_o = jo->remaining.value_or(0.0);
        const double lag = *ja->remaining - q_o;
        if (lag > 0.0) {
            phi += std::pow(static_cast<double>(i), 1.0 - 1.0 / params.alpha) * lag;
        }
    }
    return params.gamma * phi;
}

// ---------------------------------------------------------------------------
// Event and running-condition checks
// ---------------------------------------------------------------------------

struct EventJump {
    double time = 0.0;
    std::vector<int> ids;
    double phi_before = 0.0;
    double phi_after = 0.0;
    double dphi = 0.0;
    double violation = 0.0;  // dphi - 1e-7*max(1, phi_before); <= 0 is a pass
};

struct RunningSample {
    double time = 0.0;
    double lhs = 0.0;   // dG_a/dt + dPhi/dt
    double rhs = 0.0;   // c * dG_o/dt
    double dphi_dt = 0.0;
    double violation = 0.0;  // lhs - rhs - 1e-6*max(1, rhs); <= 0 is a pass
};

struct VerifierReport {
    bool boundary_ok = false;
    double phi_start = 0.0;
    double phi_end = 0.0;
    std::vector<EventJump> event_jumps;
    std::vector<RunningSample> running_samples;
    double max_violation = -kInf;

    bool passed() const { return boundary_ok && max_violation <= 0.0; }
};

namespace detail {

inline void require_same_instance(const Trace& a, const Trace& o) {
    if (a.jobs.size() != o.jobs.size()) {
        throw input_error("verifier: traces cover different job sets");
    }
    for (std::size_t i = 0; i < a.jobs.size(); ++i) {
        const JobRecord& ja = a.jobs[i];
        const JobRecord& jo = o.jobs[i];
        if (ja.id != jo.id || ja.release != jo.release) {
            throw input_error("verifier: traces cover different job sets");
        }
        if (ja.size.has_value() != jo.size.has_value()) {
            throw input_error("verifier: job " + std::to_string(ja.id) +
                              " sizes disagree between traces");
        }
        if (ja.size && std::abs(*ja.size - *jo.size) > 1e-9 * std::max(1.0, *ja.size)) {
            throw input_error("verifier: job " + std::to_string(ja.id) +
                              " sizes disagree between traces");
        }
    }
}

/// state_at extended past the trace end: processed work and memberships are
/// frozen there (complete traces have no active jobs after their end).
inline Snapshot snapshot_clamped(const Trace& tr, double t, EventSide side) {
    if (t <= tr.end_time) return state_at(tr, t, side);
    Snapshot s = state_at(tr, tr.end_time, EventSide::after);
    s.time = t;
    for (auto& j : s.jobs) {
        if (!j.size.has_value()) continue;
        j.active = j.release <= t && !(j.remaining && *j.remaining <= 0.0);
    }
    return s;
}

} // namespace detail

/// Delta-Phi across every arrival/completion instant of either trace.
/// The potential may only decrease at events (up to rounding).
inline std::vector<EventJump> check_events(const Trace& trace_a, const Trace& trace_o,
                                           const PotentialParams& params) {
    detail::require_same_instance(trace_a, trace_o);
    std::vector<std::pair<double, std::vector<int>>> raw;
    for (const Trace* tr : {&trace_a, &trace_o}) {
        for (const Event& e : tr->events) {
            if (e.kind == Event::Kind::arrival || e.kind == Event::Kind::completion) {
                raw.emplace_back(e.time, e.ids);
            }
        }
    }
    std::sort(raw.begin(), raw.end());
    std::vector<EventJump> out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!out.empty() && out.back().time == raw[i].first) {
            for (int id : raw[i].second) out.back().ids.push_back(id);
            continue;
        }
        EventJump j;
        j.time = raw[i].first;
        j.ids = raw[i].second;
        out.push_back(std::move(j));
    }
    for (EventJump& j : out) {
        std::sort(j.ids.begin(), j.ids.end());
        j.ids.erase(std::unique(j.ids.begin(), j.ids.end()), j.ids.end());
        j.phi_before = potential(detail::snapshot_clamped(trace_a, j.time, EventSide::before),
                                 detail::snapshot_clamped(trace_o, j.time, EventSide::before),
                                 params);
        j.phi_after = potential(detail::snapshot_clamped(trace_a, j.time, EventSide::after),
                                detail::snapshot_clamped(trace_o, j.time, EventSide::after),
                                params);
        j.dphi = j.phi_after - j.phi_before;
        j.violation = j.dphi - 1e-7 * std::max(1.0, j.phi_before);
    }
    return out;
}

/// Samples of dG_a/dt + dPhi/dt <= c * dG_o/dt between events. The traces'
/// event grids are merged and each merged span is further split at the times
/// where a job's lag q_a - q_o changes sign, so Phi is linear on every
/// sampled sub-span and its slope is exact.
///
/// trace_a must come from the LAPS instantiation the constants are derived
/// for (delta = 3/alpha, beta = 1/(2 alpha)); trace_o may be any feasible
/// schedule of the same instance.
inline std::vector<RunningSample> check_running(const Trace& trace_a, const Trace& trace_o,
                                                const PotentialParams& params,
                                                int samples_per_interval = 16) {
    detail::require_same_instance(trace_a, trace_o);
    const PolicyInfo& info = trace_a.policy_info;
    if (info.kind != "laps" || std::abs(info.delta - params.calibrated_delta()) > 1e-9 ||
        std::abs(info.beta - params.calibrated_beta()) > 1e-9) {
        throw input_error("check_running: trace_a is not laps(delta=3/alpha, beta=1/(2 alpha))");
    }
    if (!trace_a.power.is_polynomial() ||
        std::abs(trace_a.power.alpha() - params.alpha) > 1e-12) {
        throw input_error("check_running: trace_a power function does not match alpha");
    }

    // merged event grid
    std::vector<double> bounds{0.0};
    for (const Trace* tr : {&trace_a, &trace_o}) {
        for (const Interval& iv : tr->intervals) {
            bounds.push_back(iv.t_start);
            bounds.push_back(iv.t_end);
        }
    }
    const double end = std::max(trace_a.end_time, trace_o.end_time);
    bounds.push_back(end);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    // universe: release and size per id
    std::map<int, const JobRecord*> universe;
    for (const JobRecord& j : trace_a.jobs) universe[j.id] = &j;

    struct Cursor {
        const Trace* tr;
        std::size_t idx = 0;
        std::map<int, double> processed;

        const Interval* interval_at(double u) {
            while (idx < tr->intervals.size() && tr->intervals[idx].t_end <= u) ++idx;
            if (idx >= tr->intervals.size()) return nullptr;
            const Interval& iv = tr->intervals[idx];
            return iv.t_start <= u ? &iv : nullptr;
        }

        void accumulate(const Interval* iv, double len) {
            if (iv == nullptr) return;
            for (const auto& [id, f] : iv->allocation) processed[id] += iv->speed * f * len;
        }

        double done(int id) const {
            auto it = processed.find(id);
            return it == processed.end() ? 0.0 : it->second;
        }
    };
    Cursor ca{&trace_a};
    Cursor co{&trace_o};

    std::vector<RunningSample> out;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        const double u = bounds[b];
        const double w = bounds[b + 1];
        if (!(w > u)) continue;
        const Interval* iva = ca.interval_at(u);
        const Interval* ivo = co.interval_at(u);

        const double n_a = iva ? static_cast<double>(iva->active.size()) : 0.0;
        const double n_o = ivo ? static_cast<double>(ivo->active.size()) : 0.0;
        const double er_a = iva ? iva->energy_rate : 0.0;
        const double er_o = ivo ? ivo->energy_rate : 0.0;

        // algorithm's active jobs ordered by (release, id); lag line per job
        struct Lag {
            double at_u = 0.0;  // q_a - q_o at u
            double slope = 0.0;
            double coef = 0.0;
        };
        std::vector<std::pair<std::pair<double, int>, Lag>> lags;
        if (iva) {
            auto rate_in = [](const Interval* iv, int id) {
                if (iv == nullptr) return 0.0;
                for (const auto& [jid, f] : iv->allocation) {
                    if (jid == id) return iv->speed * f;
                }
                return 0.0;
            };
            for (int id : iva->active) {
                const JobRecord* rec = universe.at(id);
                if (!rec->size) {
                    throw input_error("check_running: open-sized job in trace");
                }
                const double q_a = *rec->size - ca.done(id);
                const double q_o = *rec->size - co.done(id);
                Lag lag;
                lag.at_u = q_a - q_o;
                lag.slope = rate_in(ivo, id) - rate_in(iva, id);
                lags.push_back({{rec->release, id}, lag});
            }
            std::sort(lags.begin(), lags.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            for (std::size_t i = 0; i < lags.size(); ++i) {
                lags[i].second.coef =
                    std::pow(static_cast<double>(i + 1), 1.0 - 1.0 / params.alpha);
            }
        }

        auto dphi_at = [&](double t) {
            double rate = 0.0;
            for (const auto& [key, lag] : lags) {
                const double d = lag.at_u + lag.slope * (t - u);
                if (d > 0.0) rate += lag.coef * lag.slope;
            }
            return params.gamma * rate;
        };

        // split at interior sign changes of the lag lines
        std::vector<double> cuts{u, w};
        for (const auto& [key, lag] : lags) {
            if (lag.slope == 0.0) continue;
            const double t_star = u - lag.at_u / lag.slope;
            if (t_star > u && t_star < w) cuts.push_back(t_star);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        const double rhs = params.c * (n_o + er_o);
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double x = cuts[s];
            const double y = cuts[s + 1];
            const double width = y - x;
            for (int m = 0; m <= samples_per_interval + 1; ++m) {
                const double t = x + width * static_cast<double>(m) / (samples_per_interval + 1);
                // evaluate the slope strictly inside the sub-span, where the
                // lag signs are settled; each sample re-derives it on its own
                const double t_in =
                    std::min(std::max(t, x + width * 1e-9), y - width * 1e-9);
                const double slope = dphi_at(t_in);
                RunningSample sample;
                sample.time = t;
                sample.dphi_dt = slope;
                sample.lhs = n_a + er_a + slope;
                sample.rhs = rhs;
                sample.violation = sample.lhs - rhs - 1e-6 * std::max(1.0, rhs);
                out.push_back(sample);
            }
        }

        ca.accumulate(iva, w - u);
        co.accumulate(ivo, w - u);
    }
    return out;
}

/// Phi at one instant, straight from post-event snapshots of both traces.
inline double potential_at(const Trace& trace_a, const Trace& trace_o,
                           const PotentialParams& params, double t) {
    return potential(detail::snapshot_clamped(trace_a, t, EventSide::after),
                     detail::snapshot_clamped(trace_o, t, EventSide::after), params);
}

/// Boundary, event and running conditions in one report.
inline VerifierReport verify_traces(const Trace& trace_a, const Trace& trace_o,
                                    const PotentialParams& params,
                                    int samples_per_interval = 16) {
    VerifierReport report;
    const double end = std::max(trace_a.end_time, trace_o.end_time);
    report.phi_start = potential(detail::snapshot_clamped(trace_a, 0.0, EventSide::before),
                                 detail::snapshot_clamped(trace_o, 0.0, EventSide::before), params);
    report.phi_end = potential(detail::snapshot_clamped(trace_a, end, EventSide::after),
                               detail::snapshot_clamped(trace_o, end, EventSide::after), params);
    report.boundary_ok = std::abs(report.phi_start) <= 1e-12 && std::abs(report.phi_end) <= 1e-12;

    report.event_jumps = check_events(trace_a, trace_o, params);
    report.running_samples = check_running(trace_a, trace_o, params, samples_per_interval);

    report.max_violation = -kInf;
    for (const EventJump& j : report.event_jumps) {
        report.max_violation = std::max(report.max_violation, j.violation);
    }
    for (const RunningSample& s : report.running_samples) {
        report.max_violation = std::max(report.max_violation, s.violation);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Young's inequality instrument
// ---------------------------------------------------------------------------

struct YoungCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

/// With f(x) = x^(alpha-1): integral_0^g f + integral_0^h f^{-1} >= g*h.
/// Both integrals are taken in closed form.
inline YoungCheck young_check(double alpha, double g, double h) {
    if (!(alpha > 1.0) || g < 0.0 || h < 0.0) {
        throw std::invalid_argument("young_check: need alpha > 1 and g, h >= 0");
    }
    YoungCheck y;
    y.lhs = std::pow(g, alpha) / alpha +
            std::pow(h, alpha / (alpha - 1.0)) * (alpha - 1.0) / alpha;
    y.rhs = g * h;
    y.ok = y.lhs >= y.rhs - 1e-9;
    return y;
}

// ---------------------------------------------------------------------------
// Reference optimum
// ---------------------------------------------------------------------------

struct SingleJobOpt {
    double speed = 0.0;
    double cost = 0.0;
};

/// Closed-form minimizer of p/s + p*s^(alpha-1): the best constant speed for
/// a lone job, used as the oracle's scale anchor and convergence target.
inline SingleJobOpt single_job_opt(double p, double alpha) {
    if (!(p > 0.0) || !(alpha > 1.0)) {
        throw std::invalid_argument("single_job_opt: need p > 0 and alpha > 1");
    }
    SingleJobOpt r;
    r.speed = std::pow(alpha - 1.0, -1.0 / alpha);
    r.cost = p * (1.0 / r.speed + std::pow(r.speed, alpha - 1.0));
    return r;
}

struct OracleGrid {
    double dt = 0.0;       // 0 = total work / 200
    int speed_levels = 64;
    double span_lo = 0.1;  // multipliers on the anchor speed
    double span_hi = 4.0;
    int climb_passes = 2;
    // Warm start from a previous (typically coarser) solve: (dt, speeds).
    // The profile is re-expressed on the new grid and kept as a candidate, so
    // refining a solve can never return a worse cost.
    std::optional<std::pair<double, std::vector<double>>> warm_start;
};

struct OracleResult {
    double cost = 0.0;
    Trace trace;
    double dt = 0.0;
    std::vector<double> profile;  // per-step speeds
};

namespace detail {

struct ProfileSim {
    const Instance* inst;
    const PowerFunction* P;
    double dt;

    // Exact event-driven run of a piecewise-constant speed profile with SRPT
    // selection; the profile extends past its last entry by its last value.
    double eval(const std::vector<double>& speeds, Trace* out) const {
        struct Live {
            int id;
            double release;
            double size;
            double remaining;
        };
        std::vector<Live> active;
        std::size_t next_arrival = 0;
        double t = 0.0;
        double flow = 0.0;
        double energy = 0.0;
        if (out != nullptr) {
            out->power = *P;
            out->policy_name = "oracle_profile";
            out->policy_info.kind = "oracle";
            for (const JobSpec& j : inst->jobs) {
                JobRecord rec;
                rec.id = j.id;
                rec.release = j.release;
                rec.size = j.size;
                out->jobs.push_back(rec);
            }
        }
        auto emit = [&](double t0, double t1, double speed, int job) {
            if (out == nullptr || !(t1 > t0)) return;
            Interval iv;
            iv.t_start = t0;
            iv.t_end = t1;
            iv.speed = speed;
            iv.energy_rate = speed > 0.0 ? P->eval(speed) : 0.0;
            for (const Live& l : active) iv.active.push_back(l.id);
            std::sort(iv.active.begin(), iv.active.end());
            if (job >= 0) iv.allocation.emplace_back(job, 1.0);
            if (!out->intervals.empty()) {
                Interval& prev = out->intervals.back();
                if (prev.t_end == t0 && prev.speed == speed && prev.active == iv.active &&
                    prev.allocation == iv.allocation) {
                    prev.t_end = t1;
                    return;
                }
            }
            out->intervals.push_back(std::move(iv));
        };
        auto record_event = [&](double time, Event::Kind kind, int id) {
            if (out == nullptr) return;
            if (!out->events.empty() && out->events.back().time == time &&
                out->events.back().kind == kind) {
                out->events.back().ids.push_back(id);
                return;
            }
            out->events.push_back(Event{time, kind, {id}});
        };

        auto retire = [&](std::size_t pos) {
            const Live l = active[pos];
            if (out != nullptr) {
                for (JobRecord& rec : out->jobs) {
                    if (rec.id == l.id) {
                        rec.completed = true;
                        rec.completion = t;
                        rec.flow = t - rec.release;
                    }
                }
            }
            record_event(t, Event::Kind::completion, l.id);
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(pos));
        };

        while (true) {
            while (next_arrival < inst->jobs.size() &&
                   inst->jobs[next_arrival].release <= t) {
                const JobSpec& j = inst->jobs[next_arrival];
                active.push_back({j.id, j.release, *j.size, *j.size});
                record_event(t, Event::Kind::arrival, j.id);
                ++next_arrival;
            }
            for (std::size_t i = active.size(); i-- > 0;) {
                if (active[i].remaining <= kCompletionTol) retire(i);
            }
            if (active.empty()) {
                if (next_arrival >= inst->jobs.size()) break;
                const double t2 = inst->jobs[next_arrival].release;
                emit(t, t2, 0.0, -1);
                t = t2;
                continue;
            }
            // SRPT pick, ties toward the smaller id
            Live* job = &active.front();
            for (Live& l : active) {
                if (l.remaining < job->remaining ||
                    (l.remaining == job->remaining && l.id < job->id)) {
                    job = &l;
                }
            }
            std::size_t k = static_cast<std::size_t>(t / dt);
            if (static_cast<double>(k + 1) * dt <= t) ++k;  // boundary rounding
            const double speed =
                speeds[k < speeds.size() ? k : speeds.size() - 1];
            double t2 = kInf;
            if (k + 1 < speeds.size()) t2 = static_cast<double>(k + 1) * dt;
            if (next_arrival < inst->jobs.size()) {
                t2 = std::min(t2, inst->jobs[next_arrival].release);
            }
            bool completes = false;
            if (speed > 0.0) {
                const double t_done = t + job->remaining / speed;
                if (t_done <= t2) {
                    t2 = t_done;
                    completes = true;
                }
            }
            if (t2 == kInf || !(t2 > t)) {
                throw stall_error("oracle profile stalls at t=" + std::to_string(t));
            }
            const double len = t2 - t;
            flow += static_cast<double>(active.size()) * len;
            energy += (speed > 0.0 ? P->eval(speed) : 0.0) * len;
            emit(t, t2, speed, speed > 0.0 ? job->id : -1);
            if (speed > 0.0) job->remaining -= speed * len;
            t = t2;
            if (completes || job->remaining <= kCompletionTol) {
                retire(static_cast<std::size_t>(job - active.data()));
            }
        }
        if (out != nullptr) out->end_time = t;
        return flow + energy;
    }
};

} // namespace detail

/// Best piecewise-constant speed profile on a dt-grid with SRPT selection:
/// seeded with every constant-speed profile (plus any warm start), then
/// improved by single-step moves between adjacent grid levels. The result is
/// a feasible schedule, hence an upper bound on the true optimum, and it
/// converges from above as the grid refines.
inline OracleResult oracle_opt(const Instance& inst, const PowerFunction& P,
                               OracleGrid grid = {}) {
    if (inst.jobs.size() > 5) {
        throw std::invalid_argument("oracle_opt: instance limited to 5 jobs");
    }
    double total_work = 0.0;
    for (const JobSpec& j : inst.jobs) {
        if (!j.size) throw std::invalid_argument("oracle_opt: open job sizes not supported");
        total_work += *j.size;
    }
    if (total_work > 10.0) {
        throw std::invalid_argument("oracle_opt: total work limited to 10");
    }
    OracleResult result;
    if (inst.jobs.empty()) {
        result.trace.power = P;
        result.trace.policy_name = "oracle_profile";
        return result;
    }

    const double anchor =
        P.is_polynomial() ? single_job_opt(1.0, P.alpha()).speed : 1.0;
    double lo = grid.span_lo * anchor;
    double hi = grid.span_hi * anchor;
    if (!std::isinf(P.domain_upper())) hi = std::min(hi, 0.98 * P.domain_upper());
    if (!(hi > lo)) lo = hi / 16.0;
    const int m = std::max(grid.speed_levels, 2);
    std::vector<double> levels(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        levels[static_cast<std::size_t>(i)] =
            lo * std::pow(hi / lo, static_cast<double>(i) / (m - 1));
    }
    const double dt = grid.dt > 0.0 ? grid.dt : total_work / 200.0;

    detail::ProfileSim sim{&inst, &P, dt};

    // constant-speed seeds
    double best_cost = kInf;
    std::vector<double> best_profile;
    int best_level = -1;
    for (int i = 0; i < m; ++i) {
        const std::vector<double> profile{levels[static_cast<std::size_t>(i)]};
        const double c = sim.eval(profile, nullptr);
        if (c < best_cost) {
            best_cost = c;
            best_profile = profile;
            best_level = i;
        }
    }

    // warm start re-expressed on this grid
    if (grid.warm_start && !grid.warm_start->second.empty()) {
        const double wdt = grid.warm_start->first;
        const std::vector<double>& ws = grid.warm_start->second;
        // long enough to cover the warm profile's own horizon
        const std::size_t len =
            static_cast<std::size_t>(std::ceil(wdt * static_cast<double>(ws.size()) / dt));
        std::vector<double> re(std::max<std::size_t>(len, 1));
        for (std::size_t k = 0; k < re.size(); ++k) {
            const double mid = (static_cast<double>(k) + 0.5) * dt;
            std::size_t src = static_cast<std::size_t>(mid / wdt);
            if (src >= ws.size()) src = ws.size() - 1;
            re[k] = ws[src];
        }
        const double c = sim.eval(re, nullptr);
        if (c < best_cost) {
            best_cost = c;
            best_profile = re;
            best_level = -1;
        }
    }

    // local improvement between adjacent levels, restricted to the horizon
    // the incumbent actually uses
    if (best_level >= 0) {
        Trace probe;
        sim.eval(best_profile, &probe);
        const std::size_t len =
            static_cast<std::size_t>(std::ceil(probe.end_time / dt)) + 1;
        std::vector<int> idx(len, best_level);
        auto speeds_of = [&](const std::vector<int>& ix) {
            std::vector<double> s(ix.size());
            for (std::size_t k = 0; k < ix.size(); ++k) {
                s[k] = levels[static_cast<std::size_t>(ix[k])];
            }
            return s;
        };
        for (int pass = 0; pass < grid.climb_passes; ++pass) {
            bool improved = false;
            for (std::size_t k = 0; k < idx.size(); ++k) {
                for (int d : {-1, 1}) {
                    const int cand = idx[k] + d;
                    if (cand < 0 || cand >= m) continue;
                    std::vector<int> trial = idx;
                    trial[k] = cand;
                    const double c = sim.eval(speeds_of(trial), nullptr);
                    if (c < best_cost - 1e-15) {
                        best_cost = c;
                        idx = std::move(trial);
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) break;
        }
        best_profile = speeds_of(idx);
    }

    result.cost = sim.eval(best_profile, &result.trace);
    result.dt = dt;
    result.profile = std::move(best_profile);
    return result;
}

/// Competitive ratio of a measured run against a reference cost.
inline double ratio(const CostSummary& alg_cost, double ref_cost) {
    if (!(ref_cost > 0.0)) {
        throw std::domain_error("ratio: reference cost must be positive");
    }
    return alg_cost.total / ref_cost;
}

} // namespace ssim
