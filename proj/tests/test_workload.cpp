#include <catch2/catch_amalgamated.hpp>

#include "ssim/workload.hpp"

using namespace ssim;

TEST_CASE("batch releases n jobs together") {
    Instance i = batch(2, kOpenSize, 0.0);
    REQUIRE(i.jobs.size() == 2);
    CHECK(i.jobs[0].id == 1);
    CHECK(i.jobs[0].open());
    CHECK(i.jobs[1].id == 2);
    CHECK(i.jobs[1].release == 0.0);

    Instance one = batch(1, 1.0, 0.0);
    REQUIRE(one.jobs.size() == 1);
    CHECK(one.jobs[0].size == 1.0);

    CHECK(batch(0, 1.0, 0.0).empty());
    CHECK_THROWS_AS(batch(3, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("stream spaces jobs evenly") {
    Instance s = stream(0.0, 1.0, 0.5, 3);
    REQUIRE(s.jobs.size() == 3);
    CHECK(s.jobs[0].release == 0.0);
    CHECK(s.jobs[1].release == 1.0);
    CHECK(s.jobs[2].release == 2.0);
    for (const auto& j : s.jobs) CHECK(j.size == 0.5);

    CHECK_THROWS_AS(stream(0.0, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(stream(0.0, 1.0, -1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(stream(0.0, 1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("stream instantiates the adversary's small-job sequence") {
    // 1024 jobs spaced 1/64 apart, each of size 1/64: total work 16,
    // schedulable at constant speed 1 in exactly 16 seconds.
    Instance s = stream(10.0, 1.0 / 64.0, 1.0 / 64.0, 1024);
    REQUIRE(s.jobs.size() == 1024);
    double total = 0.0;
    for (const auto& j : s.jobs) total += *j.size;
    CHECK(total == Catch::Approx(16.0).epsilon(1e-12));
    CHECK(s.jobs.back().release == Catch::Approx(10.0 + 1023.0 / 64.0).epsilon(1e-12));
    CHECK(validate(s).empty());
}

TEST_CASE("merge unions and relabels") {
    Instance m = merge(batch(1, 1.0, 0.0), batch(1, 1.0, 5.0));
    REQUIRE(m.jobs.size() == 2);
    CHECK(m.jobs[0].release == 0.0);
    CHECK(m.jobs[1].release == 5.0);
    CHECK(m.jobs[0].id == 1);
    CHECK(m.jobs[1].id == 2);

    Instance empty;
    Instance x = batch(3, 2.0, 1.0);
    Instance mx = merge(empty, x);
    REQUIRE(mx.jobs.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(mx.jobs[k].release == x.jobs[k].release);
        CHECK(mx.jobs[k].size == x.jobs[k].size);
    }

    // two same-time batches: ids 1..(na+nb) in original order
    Instance both = merge(batch(2, 1.0, 0.0), batch(2, 3.0, 0.0));
    REQUIRE(both.jobs.size() == 4);
    CHECK(both.jobs[0].size == 1.0);
    CHECK(both.jobs[1].size == 1.0);
    CHECK(both.jobs[2].size == 3.0);
    CHECK(both.jobs[3].size == 3.0);
    for (int k = 0; k < 4; ++k) CHECK(both.jobs[static_cast<std::size_t>(k)].id == k + 1);
}

TEST_CASE("merge is associative up to relabeling and preserves the job multiset") {
    Instance a = batch(2, 1.0, 0.0);
    Instance b = stream(0.5, 0.25, 0.7, 3);
    Instance c = batch(1, 2.0, 0.25);
    Instance left = merge(merge(a, b), c);
    Instance right = merge(a, merge(b, c));
    REQUIRE(left.jobs.size() == right.jobs.size());
    auto key = [](const Instance& i) {
        std::vector<std::pair<double, double>> k;
        for (const auto& j : i.jobs) k.emplace_back(j.release, j.size.value_or(-1.0));
        std::sort(k.begin(), k.end());
        return k;
    };
    CHECK(key(left) == key(right));
    CHECK(validate(left).empty());
    CHECK(validate(right).empty());
}

TEST_CASE("validate reports violations") {
    CHECK(validate(batch(2, 1.0, 0.0)).empty());

    Instance dup;
    dup.jobs = {JobSpec{1, 0.0, 1.0}, JobSpec{1, 1.0, 1.0}};
    CHECK_FALSE(validate(dup).empty());

    Instance neg;
    neg.jobs = {JobSpec{1, -1.0, 1.0}};
    CHECK_FALSE(validate(neg).empty());

    Instance unsorted;
    unsorted.jobs = {JobSpec{2, 1.0, 1.0}, JobSpec{1, 0.0, 1.0}};
    CHECK_FALSE(validate(unsorted).empty());
}
