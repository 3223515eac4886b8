#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssim/errors.hpp"
#include "ssim/policy.hpp"
#include "ssim/power.hpp"
#include "ssim/workload.hpp"

namespace ssim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Remaining work below this (absolute; sizes are normalized O(1)) is clamped
/// to zero so floating-point residue cannot create spurious micro-intervals.
inline constexpr double kCompletionTol = 1e-12;

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

/// A maximal span of time over which speed, allocation and the active set are
/// all constant. No arrival, completion or watch crossing lies strictly inside.
struct Interval {
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<int> active;                         // sorted ids
    double speed = 0.0;
    double energy_rate = 0.0;                        // P(speed), 0 when idle
    std::vector<std::pair<int, double>> allocation;  // (id, fraction), sorted by id
};

struct Event {
    enum class Kind { arrival, completion, adaptive };
    double time = 0.0;
    Kind kind = Kind::arrival;
    std::vector<int> ids;
};

struct JobRecord {
    int id = 0;
    double release = 0.0;
    std::optional<double> size;   // final size; nullopt if still open at end of run
    double completion = kInf;     // kInf when not completed
    double flow = 0.0;            // completion - release, or end - release if incomplete
    bool completed = false;
};

/// Complete piecewise-constant record of one simulation run.
struct Trace {
    std::vector<Interval> intervals;
    std::vector<Event> events;
    std::vector<JobRecord> jobs;  // sorted by id
    double end_time = 0.0;
    bool truncated = false;       // opts.max_time cut the run short

    PowerFunction power = PowerFunction::polynomial(2.0);
    std::string policy_name;
    PolicyInfo policy_info;

    const JobRecord* find_job(int id) const {
        auto it = std::lower_bound(jobs.begin(), jobs.end(), id,
                                   [](const JobRecord& r, int v) { return r.id < v; });
        return (it != jobs.end() && it->id == id) ? &*it : nullptr;
    }
};

struct CostSummary {
    double total_flow = 0.0;     // sum of per-job flows
    double flow_integral = 0.0;  // integral of n(t) dt; equals total_flow up to rounding
    double total_energy = 0.0;
    double total = 0.0;          // total_flow + total_energy
    std::vector<std::pair<int, double>> per_job_flow;
};

struct SimOptions {
    std::size_t max_events = 10'000'000;
    double max_time = kInf;
};

// ---------------------------------------------------------------------------
// next event computation
// ---------------------------------------------------------------------------

/// Everything that can end the current interval, reduced to linear depletion
/// lanes. A lane with distance d and rate r crosses after d/r.
struct IntervalQuery {
    struct Lane {
        double remaining = 0.0;
        double rate = 0.0;
    };
    std::optional<double> next_arrival_gap;
    std::vector<Lane> depletions;  // allocated jobs with finite remaining work
    std::vector<Lane> watches;     // distance to each watch threshold and rate toward it
};

/// Time until the earliest pending event; +inf when the interval is open-ended.
inline double next_event_dt(const IntervalQuery& q) {
    double dt = kInf;
    if (q.next_arrival_gap.has_value()) dt = std::min(dt, *q.next_arrival_gap);
    for (const auto& lane : q.depletions) {
        if (lane.rate > 0.0) dt = std::min(dt, lane.remaining / lane.rate);
    }
    for (const auto& lane : q.watches) {
        if (lane.rate > 0.0) dt = std::min(dt, lane.remaining / lane.rate);
    }
    return dt;
}

// ---------------------------------------------------------------------------
// Simulation core
// ---------------------------------------------------------------------------

namespace detail {

struct RunJob {
    int id = 0;
    double release = 0.0;
    std::optional<double> size;
    double processed = 0.0;

    bool open() const { return !size.has_value(); }
    double remaining() const { return size ? *size - processed : kInf; }
};

class Simulation {
public:
    Simulation(const Policy& policy, const PowerFunction& power, SimOptions opts,
               AdaptiveWorkload* adaptive)
        : policy_(policy), power_(power), opts_(opts), adaptive_(adaptive) {
        trace_.power = power;
        trace_.policy_name = policy.name();
        trace_.policy_info = policy.info();
    }

    Trace run(const Instance& initial) {
        seed_pending(initial);
        while (true) {
            process_due_events();
            if (active_.empty() && pending_.empty() && adaptive_exhausted()) break;

            const Decision dec = decide();
            double speed = dec.speed;
            double next = next_event_time(dec);

            bool truncate_here = false;
            if (next > opts_.max_time) {
                if (!(opts_.max_time > now_)) {
                    trace_.truncated = true;
                    break;
                }
                next = opts_.max_time;
                truncate_here = true;
            }
            if (next == kInf) {
                throw stall_error("simulate: no reachable event at t=" + std::to_string(now_) +
                                  " with " + std::to_string(active_.size()) +
                                  " active jobs (open sizes or zero progress)");
            }
            if (!(next > now_)) {
                throw std::logic_error("simulate: non-advancing interval at t=" +
                                       std::to_string(now_));
            }
            emit_interval(now_, next, speed, dec.allocation);
            now_ = next;
            if (truncate_here) {
                trace_.truncated = true;
                break;
            }
            if (++steps_ > opts_.max_events) {
                throw divergence_error("simulate: event count exceeded max_events=" +
                                       std::to_string(opts_.max_events));
            }
        }
        return finish();
    }

private:
    bool adaptive_exhausted() const { return adaptive_ == nullptr || adaptive_->exhausted(); }

    void seed_pending(const Instance& initial) {
        auto violations = validate(initial);
        if (!violations.empty()) {
            throw std::invalid_argument("simulate: invalid instance: " + violations.front());
        }
        pending_ = initial.jobs;
        for (const JobSpec& j : pending_) {
            if (j.open() && policy_.clairvoyant()) {
                throw clairvoyance_error("simulate: open job sizes with a clairvoyant policy");
            }
            max_id_ = std::max(max_id_, j.id);
        }
    }

    // Event processing at one instant, in pinned order: completions, then
    // adaptive directives (which may enable further completions), then
    // arrivals. Re-decision happens after this returns.
    void process_due_events() {
        while (true) {
            if (complete_due_jobs()) continue;
            if (fire_due_watches()) continue;
            if (admit_due_arrivals()) continue;
            break;
        }
    }

    bool complete_due_jobs() {
        std::vector<int> done;
        for (auto& [id, job] : active_) {
            if (job.size && job.remaining() <= kCompletionTol) done.push_back(id);
        }
        if (done.empty()) return false;
        for (int id : done) {
            RunJob job = active_.at(id);
            active_.erase(id);
            JobRecord rec;
            rec.id = id;
            rec.release = job.release;
            rec.size = job.size;
            rec.completion = now_;
            rec.flow = now_ - job.release;
            rec.completed = true;
            finished_.push_back(rec);
        }
        push_event(Event::Kind::completion, done);
        return true;
    }

    bool fire_due_watches() {
        if (adaptive_ == nullptr) return false;
        bool any_due = false;
        for (const Watch& w : adaptive_->watches()) {
            if (watch_satisfied(w)) {
                any_due = true;
                break;
            }
        }
        if (!any_due) return false;
        Directives dir = adaptive_->on_event(make_view());
        apply_directives(dir);
        push_event(Event::Kind::adaptive, {});
        return true;
    }

    bool admit_due_arrivals() {
        std::vector<int> arrived;
        while (!pending_.empty() && pending_.front().release <= now_) {
            JobSpec spec = pending_.front();
            pending_.erase(pending_.begin());
            RunJob job;
            job.id = spec.id;
            job.release = spec.release;
            job.size = spec.size;
            active_.emplace(job.id, job);
            arrived.push_back(job.id);
        }
        if (arrived.empty()) return false;
        push_event(Event::Kind::arrival, arrived);
        return true;
    }

    bool watch_satisfied(const Watch& w) const {
        switch (w.kind) {
            case Watch::Kind::job_processed: {
                auto it = active_.find(w.job_id);
                if (it != active_.end()) return it->second.processed >= w.threshold - kCompletionTol;
                for (const JobRecord& r : finished_) {
                    if (r.id == w.job_id) return r.size && *r.size >= w.threshold - kCompletionTol;
                }
                return false;
            }
            case Watch::Kind::max_processed: {
                for (const auto& [id, job] : active_) {
                    if (job.processed >= w.threshold - kCompletionTol) return true;
                }
                for (const JobRecord& r : finished_) {
                    if (r.size && *r.size >= w.threshold - kCompletionTol) return true;
                }
                return false;
            }
            case Watch::Kind::at_time:
                return now_ >= w.threshold - kCompletionTol;
        }
        return false;
    }

    EngineView make_view() const {
        EngineView view;
        view.now = now_;
        view.cost_so_far = flow_acc_ + energy_acc_;
        for (const JobRecord& r : finished_) {
            view.jobs.push_back({r.id, r.release, r.size ? *r.size : 0.0, r.size, false});
        }
        for (const auto& [id, job] : active_) {
            view.jobs.push_back({id, job.release, job.processed, job.size, true});
        }
        std::sort(view.jobs.begin(), view.jobs.end(),
                  [](const EngineView::Job& a, const EngineView::Job& b) { return a.id < b.id; });
        return view;
    }

    void apply_directives(const Directives& dir) {
        for (const auto& [id, size] : dir.finalizations) {
            auto it = active_.find(id);
            if (it == active_.end()) {
                throw input_error("adaptive finalization: job " + std::to_string(id) +
                                  " not active");
            }
            RunJob& job = it->second;
            if (!job.open()) {
                throw input_error("adaptive finalization: job " + std::to_string(id) +
                                  " already has a size");
            }
            if (size < job.processed - kCompletionTol) {
                throw input_error("adaptive finalization: size " + std::to_string(size) +
                                  " below processed work " + std::to_string(job.processed));
            }
            job.size = std::max(size, job.processed);
        }
        double last_release = now_;
        for (const JobSpec& spec : dir.releases) {
            if (spec.release < now_ - kCompletionTol) {
                throw input_error("adaptive release: job " + std::to_string(spec.id) +
                                  " released in the past");
            }
            if (spec.release < last_release) {
                throw input_error("adaptive release: ids must increase with release time");
            }
            last_release = spec.release;
            if (spec.id <= max_id_) {
                throw input_error("adaptive release: id " + std::to_string(spec.id) +
                                  " not above existing ids");
            }
            if (spec.open() && policy_.clairvoyant()) {
                throw clairvoyance_error("adaptive release: open size with a clairvoyant policy");
            }
            if (spec.size && !(*spec.size > 0.0)) {
                throw input_error("adaptive release: nonpositive size");
            }
            max_id_ = spec.id;
            pending_.push_back(spec);
        }
        std::stable_sort(pending_.begin(), pending_.end(), workload_order);
    }

    static bool workload_order(const JobSpec& a, const JobSpec& b) {
        if (a.release != b.release) return a.release < b.release;
        return a.id < b.id;
    }

    Decision decide() {
        VisibleState vs;
        vs.now = now_;
        vs.clairvoyant = policy_.clairvoyant();
        vs.active.reserve(active_.size());
        for (const auto& [id, job] : active_) {
            VisibleState::Job j;
            j.id = id;
            j.release = job.release;
            j.elapsed = job.processed;
            if (vs.clairvoyant && job.size) j.remaining = job.remaining();
            vs.active.push_back(j);
        }
        std::sort(vs.active.begin(), vs.active.end(),
                  [](const VisibleState::Job& a, const VisibleState::Job& b) {
                      if (a.release != b.release) return a.release < b.release;
                      return a.id < b.id;
                  });

        Decision dec = policy_.decide(vs);
        validate_decision(dec);
        return dec;
    }

    void validate_decision(const Decision& dec) const {
        if (!(dec.speed >= 0.0) || !std::isfinite(dec.speed)) {
            throw std::domain_error("policy returned invalid speed");
        }
        if (dec.speed > 0.0 && !power_.in_domain(dec.speed)) {
            throw std::domain_error("policy speed " + std::to_string(dec.speed) +
                                    " outside power function domain [0, " +
                                    std::to_string(power_.domain_upper()) + ")");
        }
        double sum = 0.0;
        for (const auto& [id, f] : dec.allocation) {
            if (active_.find(id) == active_.end()) {
                throw std::domain_error("policy allocated to inactive job " + std::to_string(id));
            }
            if (!(f >= 0.0 && f <= 1.0 + 1e-12)) {
                throw std::domain_error("policy allocation fraction out of [0,1]");
            }
            sum += f;
        }
        if (dec.speed > 0.0 && !active_.empty()) {
            if (std::abs(sum - 1.0) > 1e-12) {
                throw std::domain_error("policy allocation fractions sum to " +
                                        std::to_string(sum) + ", expected 1");
            }
        } else if (sum > 1e-12) {
            throw std::domain_error("idle decision carries a nonzero allocation");
        }
    }

    // Absolute time of the earliest pending event under this decision; the
    // result is snapped to exact arrival / watch times when they attain the
    // minimum so that accumulated rounding never drifts event timestamps.
    double next_event_time(const Decision& dec) {
        IntervalQuery q;
        if (!pending_.empty()) q.next_arrival_gap = pending_.front().release - now_;

        std::map<int, double> rate;
        for (const auto& [id, f] : dec.allocation) rate[id] = dec.speed * f;

        for (const auto& [id, job] : active_) {
            auto it = rate.find(id);
            if (it == rate.end() || it->second <= 0.0) continue;
            if (job.size) q.depletions.push_back({job.remaining(), it->second});
        }

        std::optional<double> time_watch_gap;
        double time_watch_abs = kInf;
        if (adaptive_ != nullptr) {
            for (const Watch& w : adaptive_->watches()) {
                switch (w.kind) {
                    case Watch::Kind::job_processed: {
                        auto it = active_.find(w.job_id);
                        if (it == active_.end()) break;
                        auto r = rate.find(w.job_id);
                        if (r == rate.end() || r->second <= 0.0) break;
                        q.watches.push_back({w.threshold - it->second.processed, r->second});
                        break;
                    }
                    case Watch::Kind::max_processed: {
                        for (const auto& [id, job] : active_) {
                            auto r = rate.find(id);
                            if (r == rate.end() || r->second <= 0.0) continue;
                            q.watches.push_back({w.threshold - job.processed, r->second});
                        }
                        break;
                    }
                    case Watch::Kind::at_time: {
                        const double gap = w.threshold - now_;
                        q.watches.push_back({gap, 1.0});
                        if (!time_watch_gap || gap < *time_watch_gap) {
                            time_watch_gap = gap;
                            time_watch_abs = w.threshold;
                        }
                        break;
                    }
                }
            }
        }

        const double dt = next_event_dt(q);
        if (dt == kInf) return kInf;
        // Snap to exact timestamps where the minimum comes from a known time.
        if (q.next_arrival_gap && dt == *q.next_arrival_gap) return pending_.front().release;
        if (time_watch_gap && dt == *time_watch_gap) return time_watch_abs;
        return now_ + dt;
    }

    void emit_interval(double t0, double t1, double speed,
                       const std::vector<std::pair<int, double>>& allocation) {
        Interval iv;
        iv.t_start = t0;
        iv.t_end = t1;
        iv.speed = speed;
        iv.energy_rate = speed > 0.0 ? power_.eval(speed) : 0.0;
        iv.active.reserve(active_.size());
        for (const auto& [id, job] : active_) iv.active.push_back(id);
        iv.allocation = allocation;
        std::sort(iv.allocation.begin(), iv.allocation.end());

        const double len = t1 - t0;
        flow_acc_ += static_cast<double>(active_.size()) * len;
        energy_acc_ += iv.energy_rate * len;
        for (const auto& [id, f] : iv.allocation) {
            active_.at(id).processed += speed * f * len;
        }
        trace_.intervals.push_back(std::move(iv));
    }

    void push_event(Event::Kind kind, std::vector<int> ids) {
        std::sort(ids.begin(), ids.end());
        trace_.events.push_back(Event{now_, kind, std::move(ids)});
        if (trace_.events.size() > opts_.max_events) {
            throw divergence_error("simulate: event count exceeded max_events");
        }
    }

    Trace finish() {
        trace_.end_time = now_;
        for (const auto& [id, job] : active_) {
            JobRecord rec;
            rec.id = id;
            rec.release = job.release;
            rec.size = job.size;
            rec.flow = now_ - job.release;
            finished_.push_back(rec);
        }
        for (const JobSpec& spec : pending_) {
            JobRecord rec;
            rec.id = spec.id;
            rec.release = spec.release;
            rec.size = spec.size;
            rec.flow = 0.0;
            finished_.push_back(rec);
        }
        std::sort(finished_.begin(), finished_.end(),
                  [](const JobRecord& a, const JobRecord& b) { return a.id < b.id; });
        trace_.jobs = std::move(finished_);
        return std::move(trace_);
    }

    const Policy& policy_;
    PowerFunction power_;
    SimOptions opts_;
    AdaptiveWorkload* adaptive_;

    double now_ = 0.0;
    double flow_acc_ = 0.0;
    double energy_acc_ = 0.0;
    int max_id_ = 0;
    std::size_t steps_ = 0;
    std::vector<JobSpec> pending_;
    std::map<int, RunJob> active_;
    std::vector<JobRecord> finished_;
    Trace trace_;
};

} // namespace detail

/// Simulate a static instance to completion (or truncation at opts.max_time).
inline Trace simulate(const Instance& instance, const Policy& policy, const PowerFunction& power,
                      SimOptions opts = {}) {
    detail::Simulation sim(policy, power, opts, nullptr);
    return sim.run(instance);
}

/// Simulate an adaptive workload. The workload is consumed by the run.
inline Trace simulate(AdaptiveWorkload& workload, const Policy& policy,
                      const PowerFunction& power, SimOptions opts = {}) {
    detail::Simulation sim(policy, power, opts, &workload);
    return sim.run(workload.initial());
}

// ---------------------------------------------------------------------------
// Cost accounting and snapshots
// ---------------------------------------------------------------------------

inline constexpr double kTraceEnd = kInf;

/// Flow and energy accrued up to `up_to` (clamped to the trace end). Flow is
/// computed both from per-job records and as the integral of n(t); the two
/// agree to rounding on every legal trace.
inline CostSummary cost(const Trace& trace, double up_to = kTraceEnd) {
    CostSummary out;
    const double horizon = std::min(up_to, trace.end_time);
    for (const Interval& iv : trace.intervals) {
        if (iv.t_start >= horizon) break;
        const double len = std::min(iv.t_end, horizon) - iv.t_start;
        out.flow_integral += static_cast<double>(iv.active.size()) * len;
        out.total_energy += iv.energy_rate * len;
    }
    for (const JobRecord& job : trace.jobs) {
        if (job.release >= horizon) continue;
        const double done_at = job.completed ? job.completion : trace.end_time;
        const double f = std::min(done_at, horizon) - job.release;
        out.per_job_flow.emplace_back(job.id, f);
        out.total_flow += f;
    }
    out.total = out.total_flow + out.total_energy;
    return out;
}

/// Which side of the events at time t a snapshot reflects. Processed work is
/// continuous; only active-set membership differs across an instant.
enum class EventSide { before, after };

struct Snapshot {
    struct Job {
        int id = 0;
        double release = 0.0;
        std::optional<double> size;
        double processed = 0.0;
        std::optional<double> remaining;
        bool active = false;
    };
    double time = 0.0;
    std::vector<Job> jobs;  // sorted by id, covers every job of the run
    double flow = 0.0;
    double energy = 0.0;
    double cost = 0.0;
};

/// Exact state at time t: per-job processed work interpolates linearly within
/// the containing interval. With EventSide::after (the default), a job
/// completing exactly at t is already excluded from the active set and a job
/// released exactly at t is already present.
inline Snapshot state_at(const Trace& trace, double t, EventSide side = EventSide::after) {
    if (t < 0.0 || t > trace.end_time) {
        throw std::domain_error("state_at: t=" + std::to_string(t) + " outside [0, " +
                                std::to_string(trace.end_time) + "]");
    }
    std::map<int, double> processed;
    Snapshot snap;
    snap.time = t;
    for (const Interval& iv : trace.intervals) {
        if (iv.t_start >= t) break;
        const double len = std::min(iv.t_end, t) - iv.t_start;
        snap.flow += static_cast<double>(iv.active.size()) * len;
        snap.energy += iv.energy_rate * len;
        for (const auto& [id, f] : iv.allocation) {
            processed[id] += iv.speed * f * len;
        }
    }
    snap.cost = snap.flow + snap.energy;
    for (const JobRecord& job : trace.jobs) {
        Snapshot::Job sj;
        sj.id = job.id;
        sj.release = job.release;
        sj.size = job.size;
        auto it = processed.find(job.id);
        sj.processed = it == processed.end() ? 0.0 : it->second;
        if (job.completed && job.completion <= t) sj.processed = *job.size;
        if (job.size) sj.remaining = std::max(0.0, *job.size - sj.processed);
        const bool released = side == EventSide::after ? job.release <= t : job.release < t;
        const bool finished =
            job.completed && (side == EventSide::after ? job.completion <= t : job.completion < t);
        sj.active = released && !finished;
        snap.jobs.push_back(sj);
    }
    return snap;
}

// ---------------------------------------------------------------------------
// Trace validation (shared by tests, the adversary scheduler and the oracle)
// ---------------------------------------------------------------------------

/// Structural and accounting invariants every trace must satisfy: gapless
/// tiling of [0, end), work conservation for completed jobs, and agreement of
/// the two flow computations. Empty result means the trace is sound.
inline std::vector<std::string> validate_trace(const Trace& trace, double rel_tol = 1e-9) {
    std::vector<std::string> out;
    double t = 0.0;
    for (std::size_t i = 0; i < trace.intervals.size(); ++i) {
        const Interval& iv = trace.intervals[i];
        if (!(iv.t_end > iv.t_start)) {
            out.push_back("interval " + std::to_string(i) + ": non-positive length");
        }
        if (std::abs(iv.t_start - t) > rel_tol * std::max(1.0, std::abs(t))) {
            out.push_back("interval " + std::to_string(i) + ": gap or overlap at t=" +
                          std::to_string(iv.t_start));
        }
        double sum = 0.0;
        for (const auto& [id, f] : iv.allocation) {
            sum += f;
            if (!std::binary_search(iv.active.begin(), iv.active.end(), id)) {
                out.push_back("interval " + std::to_string(i) + ": allocation to inactive job " +
                              std::to_string(id));
            }
        }
        if (iv.speed > 0.0 && !iv.active.empty() && !iv.allocation.empty() &&
            std::abs(sum - 1.0) > 1e-9) {
            out.push_back("interval " + std::to_string(i) + ": allocation sums to " +
                          std::to_string(sum));
        }
        t = iv.t_end;
    }
    if (!trace.intervals.empty() &&
        std::abs(t - trace.end_time) > rel_tol * std::max(1.0, trace.end_time)) {
        out.push_back("intervals do not reach end_time");
    }

    // work conservation
    std::map<int, double> work;
    for (const Interval& iv : trace.intervals) {
        for (const auto& [id, f] : iv.allocation) {
            work[id] += iv.speed * f * (iv.t_end - iv.t_start);
        }
    }
    for (const JobRecord& job : trace.jobs) {
        if (!job.completed) continue;
        const double got = work.count(job.id) ? work[job.id] : 0.0;
        if (std::abs(got - *job.size) > rel_tol * std::max(1.0, *job.size)) {
            out.push_back("job " + std::to_string(job.id) + ": processed " + std::to_string(got) +
                          " != size " + std::to_string(*job.size));
        }
    }

    // flow identity
    const CostSummary c = cost(trace);
    if (std::abs(c.total_flow - c.flow_integral) > rel_tol * std::max(1.0, c.flow_integral)) {
        out.push_back("flow identity violated: per-job " + std::to_string(c.total_flow) +
                      " vs integral " + std::to_string(c.flow_integral));
    }

    // events may only sit on interval boundaries, never strictly inside one
    std::vector<double> boundaries;
    boundaries.reserve(trace.intervals.size() + 1);
    for (const Interval& iv : trace.intervals) boundaries.push_back(iv.t_start);
    if (!trace.intervals.empty()) boundaries.push_back(trace.intervals.back().t_end);
    for (const Event& e : trace.events) {
        if (!std::binary_search(boundaries.begin(), boundaries.end(), e.time)) {
            out.push_back("event at t=" + std::to_string(e.time) +
                          " lies strictly inside an interval");
        }
    }
    return out;
}

} // namespace ssim
