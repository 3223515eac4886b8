#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ssim/workload.hpp"

namespace ssim {

/// Deterministic 64-bit generator (splitmix64). Self-contained so that seeded
/// suites reproduce bit-identically on any platform and standard library.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [1, n].
    int upto(int n) { return 1 + static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

private:
    std::uint64_t state_;
};

/// Seeded random instances for test suites: job count uniform in 1..max_jobs,
/// sizes uniform in [0.1, 2), releases uniform in [0, 2).
inline std::vector<Instance> random_instances(std::uint64_t seed, int count, int max_jobs) {
    SplitMix64 rng(seed);
    std::vector<Instance> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const int m = rng.upto(max_jobs);
        std::vector<std::pair<double, double>> raw;  // (release, size)
        raw.reserve(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const double release = rng.uniform(0.0, 2.0);
            const double size = rng.uniform(0.1, 2.0);
            raw.emplace_back(release, size);
        }
        std::sort(raw.begin(), raw.end());
        Instance inst;
        for (int i = 0; i < m; ++i) {
            inst.jobs.push_back(JobSpec{i + 1, raw[static_cast<std::size_t>(i)].first,
                                        raw[static_cast<std::size_t>(i)].second});
        }
        out.push_back(std::move(inst));
    }
    return out;
}

} // namespace ssim
