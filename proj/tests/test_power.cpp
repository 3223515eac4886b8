#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ssim/power.hpp"

using namespace ssim;

TEST_CASE("polynomial power evaluates s^alpha") {
    auto P = make_polynomial(3.0);
    CHECK(P.eval(2.0) == Catch::Approx(8.0).epsilon(1e-14));
    CHECK(P.eval(0.0) == 0.0);
    CHECK(P.eval(1.5) == Catch::Approx(3.375).epsilon(1e-14));
    CHECK(make_polynomial(2.5).eval(1.0) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("polynomial requires alpha > 1") {
    CHECK_THROWS_AS(make_polynomial(1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_polynomial(0.5), std::invalid_argument);
    CHECK_NOTHROW(make_polynomial(1.0 + 1e-9));
}

TEST_CASE("pathological power closed form") {
    auto P = make_pathological();
    // 4(2 - 1.75) = 1, and 1^(-1/4) = 1
    CHECK(P.eval(1.75) == Catch::Approx(1.0).epsilon(1e-14));
    // P(0) = 8^(-1/4)
    CHECK(P.eval(0.0) == Catch::Approx(std::pow(8.0, -0.25)).epsilon(1e-14));
    CHECK(P.domain_upper() == 2.0);
    CHECK_THROWS_AS(P.eval(2.0), std::domain_error);
    CHECK_THROWS_AS(P.eval(2.5), std::domain_error);
}

TEST_CASE("domain violations are hard errors") {
    auto P = make_polynomial(3.0);
    CHECK_THROWS_AS(P.eval(-1.0), std::domain_error);
    CHECK_THROWS_AS(P.derivative(-0.5), std::domain_error);
    CHECK_THROWS_AS(make_pathological().derivative(2.0), std::domain_error);
}

TEST_CASE("inverse closed forms") {
    auto poly = make_polynomial(3.0);
    CHECK(poly.inverse(8.0) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(poly.inverse(0.0) == 0.0);
    auto path = make_pathological();
    CHECK(path.inverse(1.0) == Catch::Approx(1.75).epsilon(1e-12));
    CHECK_THROWS_AS(path.inverse(0.1), std::domain_error);  // below P(0)
    CHECK_THROWS_AS(poly.inverse(-1.0), std::domain_error);
}

TEST_CASE("derivative closed forms") {
    auto poly = make_polynomial(3.0);
    CHECK(poly.derivative(2.0) == Catch::Approx(12.0).epsilon(1e-12));
    auto path = make_pathological();
    CHECK(path.derivative(1.75) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(path.derivative(0.0) == Catch::Approx(std::pow(8.0, -1.25)).epsilon(1e-12));
}

TEST_CASE("monotonicity on a domain grid") {
    for (auto P : {make_polynomial(2.0), make_polynomial(3.0), make_pathological()}) {
        const double hi = std::isinf(P.domain_upper()) ? 5.0 : P.domain_upper() - 0.01;
        double prev = P.eval(0.0);
        for (int i = 1; i <= 200; ++i) {
            const double s = hi * i / 200.0;
            const double v = P.eval(s);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("inverse round-trips eval across the domain") {
    for (auto P : {make_polynomial(2.0), make_polynomial(3.0), make_polynomial(7.5),
                   make_pathological()}) {
        const double hi = std::isinf(P.domain_upper()) ? 8.0 : P.domain_upper() - 0.01;
        for (int i = 0; i <= 500; ++i) {
            const double s = hi * i / 500.0;
            const double back = P.inverse(P.eval(s));
            CHECK(std::abs(back - s) <= 1e-9 * std::max(1.0, s));
        }
    }
}

TEST_CASE("pathological derivative satisfies P' = P^5") {
    auto P = make_pathological();
    for (int i = 0; i <= 1000; ++i) {
        const double s = 1.99 * i / 1000.0;
        const double p5 = std::pow(P.eval(s), 5.0);
        CHECK(std::abs(P.derivative(s) - p5) <= 1e-9 * std::max(1.0, p5));
    }
}

TEST_CASE("pathological derivative matches central finite differences") {
    auto P = make_pathological();
    const double h = 1e-6;
    for (int i = 0; i <= 1000; ++i) {
        const double s = h + (1.99 - 2.0 * h) * i / 1000.0;
        const double fd = (P.eval(s + h) - P.eval(s - h)) / (2.0 * h);
        const double d = P.derivative(s);
        CHECK(std::abs(fd - d) <= 1e-5 * std::max(1.0, std::abs(d)));
    }
}

TEST_CASE("polynomial superlinearity") {
    auto P = make_polynomial(2.2);
    for (double s : {0.1, 0.7, 1.0, 2.3}) {
        for (double c : {1.0, 1.5, 2.0, 4.0}) {
            CHECK(P.eval(c * s) >= c * P.eval(s) - 1e-12);
        }
    }
}
