#include <cmath>
#include <vector>

#include "doctest.h"
#include "rng.hpp"

using namespace ite;

TEST_CASE("identical seed paths reproduce the same stream") {
    RngStream a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different stream indices decorrelate") {
    RngStream a(42, 0), b(42, 1);
    int equal = 0;
    for (int i = 0; i < 64; ++i) equal += (a.next_u64() == b.next_u64());
    CHECK(equal == 0);
}

TEST_CASE("gaussian moments") {
    RngStream rng(7, 0);
    const int n = 200000;
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        s += g;
        ss += g * g;
    }
    const double mean = s / n;
    const double var = ss / n - mean * mean;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gamma variates have the right mean and variance") {
    RngStream rng(11, 3);
    const double shape = 2.5;
    const int n = 100000;
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gamma(shape);
        CHECK(g > 0.0);
        s += g;
        ss += g * g;
    }
    const double mean = s / n;
    const double var = ss / n - mean * mean;
    // Gamma(shape, 1): mean = shape, var = shape.
    CHECK(std::abs(mean - shape) < 5.0 * std::sqrt(shape / n));
    CHECK(std::abs(var - shape) < 0.1);
}

TEST_CASE("gamma supports shapes below one") {
    RngStream rng(5, 9);
    const double shape = 0.2;
    const int n = 100000;
    double s = 0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gamma(shape);
        CHECK(g >= 0.0);
        s += g;
    }
    CHECK(std::abs(s / n - shape) < 5.0 * std::sqrt(shape / n));
}

TEST_CASE("uniform_below stays in range and covers it") {
    RngStream rng(3, 1);
    std::vector<int> hits(10, 0);
    for (int i = 0; i < 10000; ++i) {
        const auto v = rng.uniform_below(10);
        REQUIRE(v < 10);
        ++hits[v];
    }
    for (int h : hits) CHECK(h > 700);
}

TEST_CASE("coin is roughly fair") {
    RngStream rng(17, 0);
    int heads = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) heads += rng.coin();
    CHECK(std::abs(heads - n / 2) < 5 * std::sqrt(n / 4.0));
}
