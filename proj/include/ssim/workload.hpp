#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssim {

/// One job: release time plus work requirement. A missing size marks an OPEN
/// job whose size has not been revealed yet; open sizes are a distinguished
/// state rather than a huge sentinel so that accidental completion is
/// impossible and finalization stays auditable.
struct JobSpec {
    int id = 0;                  // assigned in release order, 1-based
    double release = 0.0;        // seconds
    std::optional<double> size;  // work units; nullopt = OPEN

    bool open() const { return !size.has_value(); }
};

constexpr std::optional<double> kOpenSize = std::nullopt;

/// An ordered job sequence, sorted by (release, id).
struct Instance {
    std::vector<JobSpec> jobs;

    bool empty() const { return jobs.empty(); }
    std::size_t size() const { return jobs.size(); }
};

namespace detail {
inline bool release_order(const JobSpec& a, const JobSpec& b) {
    if (a.release != b.release) return a.release < b.release;
    return a.id < b.id;
}
} // namespace detail

/// n jobs released together at t0, ids 1..n.
inline Instance batch(int n, std::optional<double> size, double t0) {
    if (n < 0) throw std::invalid_argument("batch: n must be >= 0");
    if (t0 < 0.0) throw std::invalid_argument("batch: t0 must be >= 0");
    if (size.has_value() && !(*size > 0.0)) {
        throw std::invalid_argument("batch: size must be positive or open");
    }
    Instance out;
    out.jobs.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        out.jobs.push_back(JobSpec{i, t0, size});
    }
    return out;
}

/// count jobs of equal size released every `interval` seconds from `start`.
inline Instance stream(double start, double interval, double size, int count) {
    if (!(interval > 0.0)) throw std::invalid_argument("stream: interval must be > 0");
    if (!(size > 0.0)) throw std::invalid_argument("stream: size must be > 0");
    if (count < 1) throw std::invalid_argument("stream: count must be >= 1");
    if (start < 0.0) throw std::invalid_argument("stream: start must be >= 0");
    Instance out;
    out.jobs.reserve(static_cast<std::size_t>(count));
    for (int i = 1; i <= count; ++i) {
        out.jobs.push_back(JobSpec{i, start + (i - 1) * interval, size});
    }
    return out;
}

/// Union of two instances, re-sorted by (release, id) with ids reassigned in
/// release order. Relative order of equal-release jobs is preserved.
inline Instance merge(const Instance& a, const Instance& b) {
    Instance out;
    out.jobs.reserve(a.jobs.size() + b.jobs.size());
    out.jobs.insert(out.jobs.end(), a.jobs.begin(), a.jobs.end());
    out.jobs.insert(out.jobs.end(), b.jobs.begin(), b.jobs.end());
    std::stable_sort(out.jobs.begin(), out.jobs.end(),
                     [](const JobSpec& x, const JobSpec& y) { return x.release < y.release; });
    for (std::size_t i = 0; i < out.jobs.size(); ++i) {
        out.jobs[i].id = static_cast<int>(i) + 1;
    }
    return out;
}

/// Structural checks: sortedness, id uniqueness, positive sizes, nonnegative
/// releases. Empty result means the instance is valid.
inline std::vector<std::string> validate(const Instance& inst) {
    std::vector<std::string> violations;
    for (std::size_t i = 0; i < inst.jobs.size(); ++i) {
        const JobSpec& j = inst.jobs[i];
        if (j.release < 0.0) {
            violations.push_back("job " + std::to_string(j.id) + ": negative release");
        }
        if (j.size.has_value() && !(*j.size > 0.0)) {
            violations.push_back("job " + std::to_string(j.id) + ": nonpositive size");
        }
        if (i > 0 && !detail::release_order(inst.jobs[i - 1], j)) {
            violations.push_back("jobs " + std::to_string(inst.jobs[i - 1].id) + "," +
                                 std::to_string(j.id) + ": not sorted by (release, id)");
        }
        for (std::size_t k = 0; k < i; ++k) {
            if (inst.jobs[k].id == j.id) {
                violations.push_back("duplicate id " + std::to_string(j.id));
                break;
            }
        }
    }
    return violations;
}

// ---------------------------------------------------------------------------
// Adaptive workloads
// ---------------------------------------------------------------------------

/// What an adaptive workload is allowed to observe: the composition of the
/// run so far (per-job processed work) and the accumulated cost. It never
/// sees the policy's internals.
struct EngineView {
    struct Job {
        int id = 0;
        double release = 0.0;
        double processed = 0.0;
        std::optional<double> size;  // nullopt while OPEN
        bool active = false;
    };
    double now = 0.0;
    double cost_so_far = 0.0;  // flow + energy accrued up to `now`
    std::vector<Job> jobs;
};

/// Instructions returned from an adaptive workload's event handler.
/// Releases must not lie in the past; finalized sizes must cover the work
/// already processed (equality completes the job at the current instant).
struct Directives {
    std::vector<JobSpec> releases;
    std::vector<std::pair<int, double>> finalizations;  // (job id, size)
};

/// A condition on simulator state at which the engine must split the current
/// interval and hand control to the workload exactly at the crossing time.
/// All watched quantities are linear in time within an interval, so crossing
/// times are solved exactly.
struct Watch {
    enum class Kind {
        job_processed,  // processed work of job `job_id` reaches `threshold`
        max_processed,  // max over jobs of processed work reaches `threshold`
        at_time,        // wall clock reaches `threshold`
    };
    Kind kind = Kind::max_processed;
    int job_id = 0;
    double threshold = 0.0;
};

/// A workload that reacts to the run. Stateful and bound to exactly one
/// simulation; not shareable.
class AdaptiveWorkload {
public:
    virtual ~AdaptiveWorkload() = default;

    /// Jobs present before the simulation starts.
    virtual Instance initial() const = 0;

    /// Currently armed watch predicates. Re-queried after every on_event call.
    virtual std::vector<Watch> watches() const = 0;

    /// Called exactly at a watch crossing.
    virtual Directives on_event(const EngineView& view) = 0;

    /// True once no further releases can come, letting the run terminate.
    virtual bool exhausted() const = 0;
};

} // namespace ssim
