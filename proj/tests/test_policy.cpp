#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ssim/policy.hpp"

using namespace ssim;

namespace {

VisibleState state_with(std::vector<VisibleState::Job> jobs, bool clairvoyant = false) {
    VisibleState st;
    st.active = std::move(jobs);
    st.clairvoyant = clairvoyant;
    std::sort(st.active.begin(), st.active.end(),
              [](const VisibleState::Job& a, const VisibleState::Job& b) {
                  if (a.release != b.release) return a.release < b.release;
                  return a.id < b.id;
              });
    return st;
}

} // namespace

TEST_CASE("laps speed rule") {
    auto rule = speed_laps(1.0, 3.0);
    CHECK(rule(1) == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(rule(8) == Catch::Approx(4.0).epsilon(1e-14));
    CHECK(rule(0) == 0.0);
    CHECK_THROWS_AS(speed_laps(0.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(speed_laps(0.5, 1.0), std::invalid_argument);
    // delta = 3/alpha for alpha = 2 exceeds 1 and must be accepted
    CHECK(speed_laps(1.5, 2.0)(4) == Catch::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("power-equals-jobs speed rule") {
    auto P = make_polynomial(3.0);
    CHECK(speed_power_equals_jobs(P, 0)(8) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(speed_power_equals_jobs(P, 1)(0) == 0.0);
    CHECK(speed_power_equals_jobs(P, 1)(7) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(speed_power_equals_jobs(P, 2), std::invalid_argument);
}

TEST_CASE("laps selection takes the ceil(beta n) latest jobs") {
    std::vector<VisibleState::Job> jobs;
    for (int i = 1; i <= 10; ++i) jobs.push_back({i, 0.0, 0.0, std::nullopt});
    auto st = state_with(jobs);

    auto sel = select_laps(1.0 / 6.0)(st);
    REQUIRE(sel.size() == 2);  // ceil(10/6) = 2, all released together: largest ids
    CHECK(sel[0] == 9);
    CHECK(sel[1] == 10);

    auto one = state_with({{7, 3.0, 0.0, std::nullopt}});
    CHECK(select_laps(1.0 / 6.0)(one) == std::vector<int>{7});

    CHECK(select_laps(0.5)(VisibleState{}).empty());
    CHECK_THROWS_AS(select_laps(0.0), std::invalid_argument);
    CHECK_THROWS_AS(select_laps(1.1), std::invalid_argument);
}

TEST_CASE("laps selection cardinality is ceil(beta n)") {
    for (double beta : {0.05, 1.0 / 6.0, 0.25, 0.5, 0.99, 1.0}) {
        for (int n = 1; n <= 40; ++n) {
            std::vector<VisibleState::Job> jobs;
            for (int i = 1; i <= n; ++i) jobs.push_back({i, 0.1 * i, 0.0, std::nullopt});
            auto sel = select_laps(beta)(state_with(jobs));
            CHECK(static_cast<int>(sel.size()) ==
                  static_cast<int>(std::ceil(beta * n)));
        }
    }
}

TEST_CASE("laps prefers later releases over ids") {
    auto st = state_with({{1, 0.0, 0.0, std::nullopt},
                          {2, 0.0, 0.0, std::nullopt},
                          {3, 1.0, 0.0, std::nullopt}});
    auto sel = select_laps(0.5)(st);  // ceil(1.5) = 2
    REQUIRE(sel.size() == 2);
    CHECK(sel[0] == 2);
    CHECK(sel[1] == 3);
}

TEST_CASE("rr selects everything") {
    CHECK(select_rr()(VisibleState{}).empty());
    auto st = state_with({{1, 0.0, 0.0, std::nullopt},
                          {2, 0.5, 0.0, std::nullopt},
                          {3, 0.2, 0.0, std::nullopt}});
    CHECK(select_rr()(st) == std::vector<int>{1, 2, 3});
}

TEST_CASE("setf selects the least-run jobs") {
    auto st = state_with({{1, 0.0, 0.5, std::nullopt},
                          {2, 0.1, 0.5, std::nullopt},
                          {3, 0.2, 1.0, std::nullopt}});
    CHECK(select_setf()(st) == std::vector<int>{1, 2});

    auto fresh = state_with({{1, 0.0, 0.0, std::nullopt}, {2, 0.0, 0.0, std::nullopt}});
    CHECK(select_setf()(fresh) == std::vector<int>{1, 2});

    auto single = state_with({{5, 0.0, 2.0, std::nullopt}});
    CHECK(select_setf()(single) == std::vector<int>{5});
}

TEST_CASE("srpt selects least remaining, needs clairvoyance") {
    auto st = state_with({{1, 0.0, 0.0, 3.0}, {2, 0.0, 0.0, 1.0}, {3, 0.0, 0.0, 2.0}}, true);
    CHECK(select_srpt()(st) == std::vector<int>{2});

    auto tie = state_with({{1, 0.0, 0.0, 1.0}, {2, 0.0, 0.0, 1.0}}, true);
    CHECK(select_srpt()(tie) == std::vector<int>{1});

    auto hidden = state_with({{1, 0.0, 0.0, std::nullopt}});
    CHECK_THROWS_AS(select_srpt()(hidden), clairvoyance_error);
}

TEST_CASE("composition splits speed equally over the selection") {
    // LAPS(1, 1/6), 10 jobs at t=0, alpha=3: speed 2 * 10^(1/3), half each to
    // the two latest jobs.
    Policy laps = make_laps(1.0, 1.0 / 6.0, 3.0);
    std::vector<VisibleState::Job> jobs;
    for (int i = 1; i <= 10; ++i) jobs.push_back({i, 0.0, 0.0, std::nullopt});
    Decision d = laps.decide(state_with(jobs));
    CHECK(d.speed == Catch::Approx(2.0 * std::cbrt(10.0)).epsilon(1e-12));
    REQUIRE(d.allocation.size() == 2);
    CHECK(d.allocation[0].first == 9);
    CHECK(d.allocation[1].first == 10);
    CHECK(d.allocation[0].second == Catch::Approx(0.5).epsilon(1e-14));

    Policy rr1 = make_rr_fixed(1.0);
    Decision d2 = rr1.decide(state_with({{1, 0.0, 0.0, std::nullopt}, {2, 0.0, 0.0, std::nullopt}}));
    CHECK(d2.speed == 1.0);
    REQUIRE(d2.allocation.size() == 2);
    CHECK(d2.allocation[0].second == Catch::Approx(0.5));

    Decision idle = laps.decide(VisibleState{});
    CHECK(idle.speed == 0.0);
    CHECK(idle.allocation.empty());
}

TEST_CASE("decisions are pure and the allocation is a simplex point") {
    Policy laps = make_laps(0.7, 0.3, 2.0);
    std::uint64_t x = 12345;
    auto next = [&x]() {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        return static_cast<double>(x >> 11) / 9007199254740992.0;
    };
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(next() * 12);
        std::vector<VisibleState::Job> jobs;
        for (int i = 1; i <= n; ++i) jobs.push_back({i, 2.0 * next(), 2.0 * next(), std::nullopt});
        auto st = state_with(jobs);
        Decision a = laps.decide(st);
        Decision b = laps.decide(st);
        CHECK(a.speed == b.speed);
        CHECK(a.allocation == b.allocation);
        double sum = 0.0;
        for (const auto& [id, f] : a.allocation) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            sum += f;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("nonclairvoyant rules ignore hidden remaining work") {
    // The selection/speed rules of nonclairvoyant policies must not change
    // when remaining-work fields are perturbed.
    Policy laps = make_laps(1.0, 0.5, 3.0);
    Policy setf = compose(speed_fixed(1.0), select_setf(), "setf_fixed");
    for (const Policy* pol : {&laps, &setf}) {
        auto visible = state_with({{1, 0.0, 0.3, 5.0}, {2, 0.1, 0.3, 0.5}, {3, 0.2, 0.9, 2.0}});
        auto perturbed = visible;
        for (auto& j : perturbed.active) {
            j.remaining = j.remaining ? std::optional<double>(*j.remaining * 3.0 + 1.0)
                                      : std::nullopt;
        }
        Decision a = pol->decide(visible);
        Decision b = pol->decide(perturbed);
        CHECK(a.speed == b.speed);
        CHECK(a.allocation == b.allocation);
    }
}
