#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ssim/errors.hpp"
#include "ssim/power.hpp"

namespace ssim {

/// Scheduler-visible snapshot of the run. `remaining` is populated only for
/// clairvoyant policies; nonclairvoyant ones see sizes first at completion.
struct VisibleState {
    struct Job {
        int id = 0;
        double release = 0.0;
        double elapsed = 0.0;                // work processed so far on this job
        std::optional<double> remaining;     // nullopt = hidden
    };
    double now = 0.0;
    std::vector<Job> active;  // sorted by (release, id)
    bool clairvoyant = false;
};

/// Instantaneous decision: a speed plus per-job shares of it.
/// Fractions sum to 1 when jobs are active and the speed is positive.
struct Decision {
    double speed = 0.0;
    std::vector<std::pair<int, double>> allocation;  // (id, fraction), sorted by id
};

using SpeedRule = std::function<double(int)>;  // active-job count -> speed
using SelectRule = std::function<std::vector<int>(const VisibleState&)>;

/// Structured description of a policy, carried on traces so analyses can
/// recognize particular instantiations without string parsing.
struct PolicyInfo {
    std::string kind;  // "laps", "rr", "setf", "srpt", "custom"
    double delta = 0.0;
    double beta = 0.0;
    double alpha = 0.0;
    int offset = -1;          // power-equals-jobs offset, -1 when unused
    double fixed_speed = -1;  // fixed-speed rule, -1 when unused
};

// ---------------------------------------------------------------------------
// Speed rules
// ---------------------------------------------------------------------------

/// Speed (1+delta) * n^(1/alpha); idle (0) when no job is active.
/// delta = 3/alpha exceeds 1 for alpha < 3, so any positive delta is accepted.
inline SpeedRule speed_laps(double delta, double alpha) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("speed_laps: delta must be > 0");
    }
    if (!(alpha > 1.0)) {
        throw std::invalid_argument("speed_laps: alpha must be > 1");
    }
    return [delta, alpha](int n) -> double {
        if (n <= 0) return 0.0;
        return (1.0 + delta) * std::pow(static_cast<double>(n), 1.0 / alpha);
    };
}

/// Speed such that power equals the number of unfinished jobs plus `offset`.
inline SpeedRule speed_power_equals_jobs(PowerFunction P, int offset) {
    if (offset != 0 && offset != 1) {
        throw std::invalid_argument("speed_power_equals_jobs: offset must be 0 or 1");
    }
    return [P, offset](int n) -> double {
        if (n <= 0) return 0.0;
        return P.inverse(static_cast<double>(n + offset));
    };
}

inline SpeedRule speed_fixed(double s) {
    if (!(s > 0.0)) throw std::invalid_argument("speed_fixed: speed must be > 0");
    return [s](int n) -> double { return n > 0 ? s : 0.0; };
}

// ---------------------------------------------------------------------------
// Selection rules
// ---------------------------------------------------------------------------

/// The ceil(beta*n) active jobs with the latest release times, ties broken
/// toward larger ids (ids are assigned in release order, so (release, id)
/// lexicographic order realizes "latest release, ties by id").
inline SelectRule select_laps(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("select_laps: beta must be in (0, 1]");
    }
    return [beta](const VisibleState& st) -> std::vector<int> {
        const int n = static_cast<int>(st.active.size());
        if (n == 0) return {};
        const int take = static_cast<int>(std::ceil(beta * n));
        std::vector<int> ids;
        ids.reserve(static_cast<std::size_t>(take));
        // active is sorted ascending by (release, id); the latest are at the back
        for (int i = n - take; i < n; ++i) {
            ids.push_back(st.active[static_cast<std::size_t>(i)].id);
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    };
}

/// All active jobs (round robin / processor sharing).
inline SelectRule select_rr() {
    return [](const VisibleState& st) -> std::vector<int> {
        std::vector<int> ids;
        ids.reserve(st.active.size());
        for (const auto& j : st.active) ids.push_back(j.id);
        std::sort(ids.begin(), ids.end());
        return ids;
    };
}

/// The jobs that have been run the least (exact tie on tracked elapsed work).
inline SelectRule select_setf() {
    return [](const VisibleState& st) -> std::vector<int> {
        if (st.active.empty()) return {};
        double least = st.active.front().elapsed;
        for (const auto& j : st.active) least = std::min(least, j.elapsed);
        std::vector<int> ids;
        for (const auto& j : st.active) {
            if (j.elapsed == least) ids.push_back(j.id);
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    };
}

/// The single job with least remaining work, ties toward the smaller id.
/// Requires remaining work to be visible.
inline SelectRule select_srpt() {
    return [](const VisibleState& st) -> std::vector<int> {
        if (st.active.empty()) return {};
        const VisibleState::Job* best = nullptr;
        for (const auto& j : st.active) {
            if (!j.remaining.has_value()) {
                throw clairvoyance_error("select_srpt: remaining work hidden for job " +
                                         std::to_string(j.id));
            }
            if (!best || *j.remaining < *best->remaining ||
                (*j.remaining == *best->remaining && j.id < best->id)) {
                best = &j;
            }
        }
        return {best->id};
    };
}

// ---------------------------------------------------------------------------
// Policy = speed rule + selection rule
// ---------------------------------------------------------------------------

/// A pure mapping from visible state to decisions. Immutable and shareable;
/// decide() depends only on its argument.
class Policy {
public:
    Policy(std::string name, SpeedRule speed, SelectRule select, bool needs_clairvoyance = false,
           PolicyInfo info = {})
        : name_(std::move(name)),
          speed_(std::move(speed)),
          select_(std::move(select)),
          clairvoyant_(needs_clairvoyance),
          info_(std::move(info)) {}

    Decision decide(const VisibleState& st) const {
        Decision d;
        const int n = static_cast<int>(st.active.size());
        if (n == 0) return d;  // idle: speed 0, empty allocation
        std::vector<int> selected = select_(st);
        d.speed = speed_(n);
        if (selected.empty() || d.speed <= 0.0) {
            d.speed = std::max(d.speed, 0.0);
            return d;
        }
        const double share = 1.0 / static_cast<double>(selected.size());
        d.allocation.reserve(selected.size());
        for (int id : selected) d.allocation.emplace_back(id, share);
        return d;
    }

    const std::string& name() const { return name_; }
    bool clairvoyant() const { return clairvoyant_; }
    const PolicyInfo& info() const { return info_; }

private:
    std::string name_;
    SpeedRule speed_;
    SelectRule select_;
    bool clairvoyant_;
    PolicyInfo info_;
};

inline Policy compose(SpeedRule speed, SelectRule select, std::string name,
                      bool needs_clairvoyance = false, PolicyInfo info = {}) {
    return Policy(std::move(name), std::move(speed), std::move(select), needs_clairvoyance,
                  std::move(info));
}

// Stock policies -------------------------------------------------------------

namespace detail {
inline std::string fmt_num(double x) {
    std::ostringstream out;
    out.precision(6);
    out << x;
    return out.str();
}
} // namespace detail

/// Latest Arrival Processor Sharing with the given speed exponent. Defined
/// only for polynomial power functions; scenario loading enforces that.
inline Policy make_laps(double delta, double beta, double alpha) {
    PolicyInfo info;
    info.kind = "laps";
    info.delta = delta;
    info.beta = beta;
    info.alpha = alpha;
    return compose(speed_laps(delta, alpha), select_laps(beta),
                   "laps(delta=" + detail::fmt_num(delta) + ",beta=" + detail::fmt_num(beta) +
                       ",alpha=" + detail::fmt_num(alpha) + ")",
                   false, std::move(info));
}

inline Policy make_rr_power_jobs(PowerFunction P, int offset) {
    PolicyInfo info;
    info.kind = "rr";
    info.offset = offset;
    return compose(speed_power_equals_jobs(P, offset), select_rr(),
                   "rr_power_jobs(offset=" + std::to_string(offset) + ")", false, std::move(info));
}

inline Policy make_setf_power_jobs(PowerFunction P, int offset) {
    PolicyInfo info;
    info.kind = "setf";
    info.offset = offset;
    return compose(speed_power_equals_jobs(P, offset), select_setf(),
                   "setf_power_jobs(offset=" + std::to_string(offset) + ")", false,
                   std::move(info));
}

inline Policy make_srpt_power_jobs(PowerFunction P, int offset) {
    PolicyInfo info;
    info.kind = "srpt";
    info.offset = offset;
    return compose(speed_power_equals_jobs(P, offset), select_srpt(),
                   "srpt_power_jobs(offset=" + std::to_string(offset) + ")", true,
                   std::move(info));
}

inline Policy make_rr_fixed(double speed) {
    PolicyInfo info;
    info.kind = "rr";
    info.fixed_speed = speed;
    return compose(speed_fixed(speed), select_rr(), "rr_fixed(" + detail::fmt_num(speed) + ")",
                   false, std::move(info));
}

} // namespace ssim
