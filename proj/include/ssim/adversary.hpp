#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ssim/engine.hpp"
#include "ssim/errors.hpp"
#include "ssim/power.hpp"
#include "ssim/workload.hpp"

namespace ssim {

// ---------------------------------------------------------------------------
// Adaptive lower-bound construction
// ---------------------------------------------------------------------------

/// Parameters of the open-jobs adversary. n = ceil(k * P(v)) jobs of unknown
/// size are released together; the adversary reacts the first time the
/// scheduler has processed any single job for n units of work.
struct AdversaryParams {
    double k = 1.0;
    double v = 1.0;
    PowerFunction P = PowerFunction::polynomial(3.0);
    int n = 1;
    double epsilon = 0.0;  // small-job spacing, must stay below 1/(n^5 v^2)

    static AdversaryParams make(double k, double v, PowerFunction P,
                                std::optional<double> epsilon = std::nullopt) {
        if (!(k >= 1.0) || !(v >= 1.0)) {
            throw std::invalid_argument("AdversaryParams: need k >= 1 and v >= 1");
        }
        if (!P.in_domain(v) || !(P.eval(v) >= 1.0)) {
            throw std::invalid_argument("AdversaryParams: need P(v) >= 1 with v in the domain");
        }
        AdversaryParams p;
        p.k = k;
        p.v = v;
        p.P = P;
        p.n = static_cast<int>(std::ceil(k * P.eval(v)));
        const double n5v2 = std::pow(static_cast<double>(p.n), 5.0) * v * v;
        const double cap = 1.0 / n5v2;
        p.epsilon = epsilon.value_or(0.5 * cap);  // half the strict bound for margin
        if (!(p.epsilon > 0.0) || !(p.epsilon < cap)) {
            throw std::invalid_argument("AdversaryParams: epsilon must lie in (0, 1/(n^5 v^2))");
        }
        return p;
    }

    double trigger_threshold() const { return static_cast<double>(n); }
    long long stream_count() const {
        return static_cast<long long>(
            std::ceil(std::pow(static_cast<double>(n), 4.0) / epsilon));
    }
};

/// Cost the adversary's explicit schedule is guaranteed not to exceed:
/// k n^3 + 2 n^4 + n^4 P(v) + n + n P(1).
inline double adversary_opt_bound(const AdversaryParams& p) {
    const double n = static_cast<double>(p.n);
    return p.k * n * n * n + 2.0 * std::pow(n, 4.0) + std::pow(n, 4.0) * p.P.eval(p.v) + n +
           n * p.P.eval(1.0);
}

/// The adaptive workload itself. Releases n open jobs at time zero, watches
/// for any job to accumulate n units of processed work, then branches on the
/// scheduler's accumulated cost G(T):
///   - G(T) >= k n^3 ("big cost"): every size is revealed as n; the watched
///     job completes on the spot.
///   - G(T) <  k n^3 ("lagging"): every job's size is revealed as one unit
///     more than its processed work, and a stream of ceil(n^4/epsilon) jobs
///     of size epsilon*v, spaced epsilon apart, starts immediately.
class OpenJobsAdversary : public AdaptiveWorkload {
public:
    enum class Branch { big_cost, lagging };

    explicit OpenJobsAdversary(AdversaryParams params) : params_(std::move(params)) {}

    Instance initial() const override { return batch(params_.n, kOpenSize, 0.0); }

    std::vector<Watch> watches() const override {
        if (triggered_) return {};
        Watch w;
        w.kind = Watch::Kind::max_processed;
        w.threshold = params_.trigger_threshold();
        return {w};
    }

    Directives on_event(const EngineView& view) override {
        if (triggered_) {
            throw input_error("OpenJobsAdversary: adversary is single-shot");
        }
        triggered_ = true;
        trigger_time_ = view.now;
        cost_at_trigger_ = view.cost_so_far;

        // the watched job: maximal processed work, ties toward the smaller id
        const EngineView::Job* trigger = nullptr;
        std::vector<const EngineView::Job*> initial_jobs;
        for (const auto& j : view.jobs) {
            if (j.id > params_.n) continue;
            initial_jobs.push_back(&j);
            if (trigger == nullptr || j.processed > trigger->processed) trigger = &j;
        }
        if (trigger == nullptr ||
            trigger->processed < params_.trigger_threshold() - 1e-9) {
            throw input_error("OpenJobsAdversary: event fired before the watch threshold");
        }
        trigger_id_ = trigger->id;

        Directives dir;
        const double n = params_.trigger_threshold();
        sizes_.assign(static_cast<std::size_t>(params_.n), 0.0);
        if (cost_at_trigger_ >= params_.k * n * n * n) {
            branch_ = Branch::big_cost;
            for (const auto* j : initial_jobs) {
                dir.finalizations.emplace_back(j->id, n);
                sizes_[static_cast<std::size_t>(j->id - 1)] = n;
            }
        } else {
            branch_ = Branch::lagging;
            for (const auto* j : initial_jobs) {
                const double size = j->processed + 1.0;
                dir.finalizations.emplace_back(j->id, size);
                sizes_[static_cast<std::size_t>(j->id - 1)] = size;
            }
            const long long m = params_.stream_count();
            dir.releases.reserve(static_cast<std::size_t>(m));
            for (long long i = 0; i < m; ++i) {
                JobSpec s;
                s.id = params_.n + 1 + static_cast<int>(i);
                s.release = trigger_time_ + static_cast<double>(i) * params_.epsilon;
                s.size = params_.epsilon * params_.v;
                dir.releases.push_back(s);
            }
        }
        return dir;
    }

    bool exhausted() const override { return triggered_; }

    bool triggered() const { return triggered_; }
    double trigger_time() const { return trigger_time_; }
    double cost_at_trigger() const { return cost_at_trigger_; }
    int trigger_job() const { return trigger_id_; }
    Branch branch() const { return branch_; }
    const std::vector<double>& finalized_sizes() const { return sizes_; }

private:
    AdversaryParams params_;
    bool triggered_ = false;
    double trigger_time_ = 0.0;
    double cost_at_trigger_ = 0.0;
    int trigger_id_ = 0;
    Branch branch_ = Branch::big_cost;
    std::vector<double> sizes_;
};

// ---------------------------------------------------------------------------
// The adversary's explicit near-optimal schedule (lagging branch)
// ---------------------------------------------------------------------------

/// Builds the reference schedule for a lagging-branch run: mirror the
/// scheduler's speed profile over [0, T] while redistributing the work it
/// sank into the watched job, so every other job finishes by T and the
/// watched job has n units left; then speed v across the small-job stream,
/// finishing each small job within its slot; then speed 1 to finish the
/// watched job. The result satisfies every trace invariant and never exceeds
/// speed max(mirrored speed, v, 1).
inline Trace adversary_opt_schedule(const Trace& alg_trace, const AdversaryParams& params,
                                    double trigger_time, int trigger_id) {
    const double T = trigger_time;
    Trace out;
    out.power = params.P;
    out.policy_name = "adversary_opt";
    out.policy_info.kind = "adversary_opt";

    // job universe from the scheduler's trace: initial jobs + stream
    std::vector<const JobRecord*> initial_jobs;
    std::vector<const JobRecord*> stream_jobs;
    for (const JobRecord& j : alg_trace.jobs) {
        if (j.id <= params.n) {
            initial_jobs.push_back(&j);
        } else {
            stream_jobs.push_back(&j);
        }
    }
    if (static_cast<int>(initial_jobs.size()) != params.n) {
        throw feasibility_error("adversary_opt_schedule: trace does not match params");
    }
    for (const JobRecord* j : initial_jobs) {
        if (!j->size) {
            throw feasibility_error("adversary_opt_schedule: open job size in trace");
        }
    }

    // processed work per initial job at T
    Snapshot at_T = state_at(alg_trace, T, EventSide::before);
    double available = 0.0;
    std::vector<double> processed_at_T(static_cast<std::size_t>(params.n), 0.0);
    for (const auto& j : at_T.jobs) {
        if (j.id <= params.n) {
            processed_at_T[static_cast<std::size_t>(j.id - 1)] = j.processed;
            available += j.processed;
        }
    }

    // sequential quotas: non-watched jobs get their full size, the watched
    // job absorbs the leftover
    struct Quota {
        int id;
        double amount;
        bool completes;
    };
    std::vector<Quota> quotas;
    double spoken_for = 0.0;
    for (const JobRecord* j : initial_jobs) {
        if (j->id == trigger_id) continue;
        quotas.push_back({j->id, *j->size, true});
        spoken_for += *j->size;
    }
    const double leftover = available - spoken_for;
    if (leftover < -1e-9) {
        throw feasibility_error("adversary_opt_schedule: cannot finish all jobs by T");
    }
    const JobRecord* watched = nullptr;
    for (const JobRecord* j : initial_jobs) {
        if (j->id == trigger_id) watched = j;
    }
    if (watched == nullptr) {
        throw feasibility_error("adversary_opt_schedule: watched job missing");
    }
    if (leftover > 0.0) quotas.push_back({trigger_id, leftover, false});

    std::vector<int> active;
    for (const JobRecord* j : initial_jobs) active.push_back(j->id);
    std::sort(active.begin(), active.end());

    auto emit = [&out](double t0, double t1, std::vector<int> act, double speed, int job,
                       const PowerFunction& P) {
        if (!(t1 > t0)) return;
        Interval iv;
        iv.t_start = t0;
        iv.t_end = t1;
        iv.active = std::move(act);
        iv.speed = speed;
        iv.energy_rate = speed > 0.0 ? P.eval(speed) : 0.0;
        if (job >= 0 && speed > 0.0) iv.allocation.emplace_back(job, 1.0);
        out.intervals.push_back(std::move(iv));
    };

    out.events.push_back(Event{0.0, Event::Kind::arrival, active});

    // phase 1: mirror the scheduler's speeds, draining quotas in order
    double t = 0.0;
    std::size_t q = 0;
    std::vector<JobRecord> records;
    for (const Interval& iv : alg_trace.intervals) {
        if (iv.t_start >= T || t >= T) break;
        const double seg_end = std::min(iv.t_end, T);
        if (iv.speed <= 0.0) {
            emit(t, seg_end, active, 0.0, -1, params.P);
            t = seg_end;
            continue;
        }
        while (t < seg_end && q < quotas.size()) {
            const double avail = (seg_end - t) * iv.speed;  // work available here
            const double take = std::min(quotas[q].amount, avail);
            const double t_next = take == avail ? seg_end : t + take / iv.speed;
            emit(t, t_next, active, iv.speed, quotas[q].id, params.P);
            quotas[q].amount -= take;
            t = t_next;
            if (quotas[q].amount <= kCompletionTol) {
                if (quotas[q].completes) {
                    JobRecord rec = *initial_jobs[0];
                    for (const JobRecord* j : initial_jobs) {
                        if (j->id == quotas[q].id) rec = *j;
                    }
                    rec.completed = true;
                    rec.completion = t;
                    rec.flow = t - rec.release;
                    records.push_back(rec);
                    out.events.push_back(Event{t, Event::Kind::completion, {quotas[q].id}});
                    active.erase(std::remove(active.begin(), active.end(), quotas[q].id),
                                 active.end());
                }
                ++q;
            }
        }
        if (t < seg_end) {
            emit(t, seg_end, active, 0.0, -1, params.P);
            t = seg_end;
        }
    }
    if (q < quotas.size() || std::abs(t - T) > 1e-9 * std::max(1.0, T)) {
        throw feasibility_error("adversary_opt_schedule: mirror phase did not consume quotas");
    }
    t = T;
    if (active != std::vector<int>{trigger_id}) {
        throw feasibility_error("adversary_opt_schedule: jobs other than the watched one "
                                "survive past T");
    }

    // phase 2: the stream, one small job per slot at speed v
    std::sort(stream_jobs.begin(), stream_jobs.end(),
              [](const JobRecord* a, const JobRecord* b) { return a->id < b->id; });
    for (std::size_t i = 0; i < stream_jobs.size(); ++i) {
        const JobRecord* j = stream_jobs[i];
        const double slot_end = i + 1 < stream_jobs.size() ? stream_jobs[i + 1]->release
                                                           : j->release + params.epsilon;
        out.events.push_back(Event{j->release, Event::Kind::arrival, {j->id}});
        emit(j->release, slot_end, {trigger_id, j->id}, params.v, j->id, params.P);
        out.events.push_back(Event{slot_end, Event::Kind::completion, {j->id}});
        JobRecord rec = *j;
        rec.completed = true;
        rec.completion = slot_end;
        rec.flow = slot_end - rec.release;
        records.push_back(rec);
        t = slot_end;
    }

    // phase 3: finish the watched job at speed 1
    const double tail = *watched->size - leftover;
    emit(t, t + tail, {trigger_id}, 1.0, trigger_id, params.P);
    out.events.push_back(Event{t + tail, Event::Kind::completion, {trigger_id}});
    JobRecord rec = *watched;
    rec.completed = true;
    rec.completion = t + tail;
    rec.flow = rec.completion - rec.release;
    records.push_back(rec);
    out.end_time = t + tail;

    std::sort(records.begin(), records.end(),
              [](const JobRecord& a, const JobRecord& b) { return a.id < b.id; });
    out.jobs = std::move(records);
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });

    auto violations = validate_trace(out);
    if (!violations.empty()) {
        throw feasibility_error("adversary_opt_schedule: " + violations.front());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full adversary run
// ---------------------------------------------------------------------------

struct AdversaryOutcome {
    OpenJobsAdversary::Branch branch = OpenJobsAdversary::Branch::big_cost;
    double trigger_time = 0.0;
    double cost_at_trigger = 0.0;
    int trigger_job = 0;
    int n = 0;
    double epsilon = 0.0;
    std::vector<double> sizes;  // finalized sizes of the initial jobs, by id

    CostSummary alg_cost;
    double opt_bound = 0.0;             // analytic bound on the adversary's schedule
    std::optional<double> opt_cost;     // measured cost of the built schedule (lagging)
    double opt_reference = 0.0;         // denominator used for the ratio
    double ratio_lower = 0.0;

    Trace alg_trace;
    std::optional<Trace> opt_trace;
};

/// Run a policy against the open-jobs adversary and assemble the outcome.
/// In the lagging branch the explicit reference schedule is constructed and
/// costed; in the big-cost branch the analytic reference 2 n^3 is used (the
/// schedule there is one job after another at speed 1 and is not built).
inline AdversaryOutcome run_adversary(const AdversaryParams& params, const Policy& policy,
                                      SimOptions opts = {}) {
    OpenJobsAdversary adv(params);
    Trace alg = simulate(adv, policy, params.P, opts);
    if (!adv.triggered()) {
        throw stall_error("run_adversary: the policy never processed any job to " +
                          std::to_string(params.n) + " units within max_time");
    }
    AdversaryOutcome out;
    out.branch = adv.branch();
    out.trigger_time = adv.trigger_time();
    out.cost_at_trigger = adv.cost_at_trigger();
    out.trigger_job = adv.trigger_job();
    out.n = params.n;
    out.epsilon = params.epsilon;
    out.sizes = adv.finalized_sizes();
    out.alg_cost = cost(alg);
    out.opt_bound = adversary_opt_bound(params);

    const double n = static_cast<double>(params.n);
    if (out.branch == OpenJobsAdversary::Branch::lagging) {
        Trace opt = adversary_opt_schedule(alg, params, out.trigger_time, out.trigger_job);
        out.opt_cost = cost(opt).total;
        out.opt_reference = std::min(out.opt_bound, *out.opt_cost);
        out.opt_trace = std::move(opt);
    } else {
        out.opt_reference = 2.0 * n * n * n;
    }
    out.ratio_lower = out.alg_cost.total / out.opt_reference;
    out.alg_trace = std::move(alg);
    return out;
}

// ---------------------------------------------------------------------------
// Parameterizations
// ---------------------------------------------------------------------------

/// Adversary parameters for the polynomial power function: k = alpha^(1/3 -
/// eps) with v = 1 pins the competitive-ratio lower bound's growth in alpha.
inline AdversaryParams polynomial_lower_bound_params(double alpha, double eps) {
    if (!(alpha > 1.0)) {
        throw std::invalid_argument("polynomial_lower_bound_params: alpha must be > 1");
    }
    if (!(eps > 0.0 && eps < 1.0 / 3.0)) {
        throw std::invalid_argument("polynomial_lower_bound_params: eps must be in (0, 1/3)");
    }
    const double k = std::pow(alpha, 1.0 / 3.0 - eps);
    return AdversaryParams::make(k, 1.0, PowerFunction::polynomial(alpha));
}

/// The speed at which the pathological function draws power 16 k^4, in
/// closed form: v = 2 - (16 k^4)^(-4) / 4.
inline double pathological_lower_bound_speed(double k) {
    if (!(k >= 1.0)) {
        throw std::invalid_argument("pathological_lower_bound_speed: k must be >= 1");
    }
    const double demand = 16.0 * k * k * k * k;
    const double v = 2.0 - 0.25 * std::pow(demand, -4.0);
    auto P = PowerFunction::pathological();
    if (!(P.eval(v) >= demand - 1e-6) || !(v >= 1.0)) {
        throw std::logic_error("pathological_lower_bound_speed: postcondition failed");
    }
    return v;
}

/// Growth factor P(v + 1/(16 (k P(v))^3)) / P(v) at v from
/// pathological_lower_bound_speed. With P(v) = 16 k^4 the shifted speed
/// always lands beyond the domain's upper end, where the demanded power is
/// unattainable; the convexity bound (P(v) + P'(v) d) / P(v) is then reported
/// instead, which the derivative identity P' = P^5 collapses to exactly 1+k.
inline double pathological_growth_ratio(double k) {
    auto P = PowerFunction::pathological();
    const double v = pathological_lower_bound_speed(k);
    const double pv = P.eval(v);
    const double d = 1.0 / (16.0 * std::pow(k * pv, 3.0));
    if (P.in_domain(v + d)) {
        return P.eval(v + d) / pv;
    }
    return (pv + P.derivative(v) * d) / pv;
}

} // namespace ssim
