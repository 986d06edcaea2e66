#include <doctest.h>

#include <random>

#include "splinenas/error.hpp"
#include "splinenas/halton_search.hpp"
#include "test_support.hpp"

using namespace splinenas;

TEST_CASE("halton prefixes are exact") {
    CHECK(halton(1, 2) == 0.5);
    CHECK(halton(2, 2) == 0.25);
    CHECK(halton(3, 2) == 0.75);
    CHECK(halton(4, 2) == 0.125);
    CHECK(halton(1, 3) == 1.0 / 3.0);
    CHECK(halton(2, 3) == 2.0 / 3.0);
    CHECK(halton(3, 3) == 1.0 / 9.0);
}

TEST_CASE("halton_point uses consecutive primes") {
    CHECK(nth_prime(0) == 2);
    CHECK(nth_prime(5) == 13);
    CHECK(nth_prime(63) == 311);
    const auto p = halton_point(1, 4);
    CHECK(p == std::vector<double>{1.0 / 2, 1.0 / 3, 1.0 / 5, 1.0 / 7});
    CHECK(halton_point(7, kMaxHaltonDims).size() == kMaxHaltonDims);
    try {
        halton_point(1, kMaxHaltonDims + 1);
        FAIL("expected DimensionTooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionTooLarge);
    }
}

TEST_CASE("halton values lie in (0,1)") {
    for (std::uint64_t i = 1; i < 5000; ++i) {
        const auto p = halton_point(i, 8);
        for (double v : p) CHECK((v > 0.0 && v < 1.0));
    }
}

TEST_CASE("SearchConfig validation") {
    SearchConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.shrink_factor = 1.0;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.levels = 0;
    CHECK_THROWS_AS(validate(cfg), Error);
}

TEST_CASE("search recovers the optimum of a quadratic") {
    // Closed-form optimum of y = -Σ (x_k - c_k)², interpolated on a dense design.
    std::mt19937_64 rng(53);
    const auto s = testing::unit_space(2);
    const Point c{0.37, 0.62};
    std::vector<SupportPoint> pts;
    for (int i = 0; i <= 6; ++i)
        for (int j = 0; j <= 6; ++j) {
            const Point x{i / 6.0, j / 6.0};
            pts.push_back({x, -((x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]))});
        }
    const auto m = fit(s, pts);
    const auto rep = search(m, Box::of(s), Direction::Maximize, SearchConfig{});
    CHECK(std::abs(rep.best_x[0] - c[0]) <= 0.01);
    CHECK(std::abs(rep.best_x[1] - c[1]) <= 0.01);

    const auto mn = search(m, Box::of(s), Direction::Minimize, SearchConfig{});
    CHECK(mn.best_value <= evaluate(m, Point{1, 1}) + 1e-9);
}

TEST_CASE("search is deterministic, monotone and contained") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 1 + trial % 5;
        const auto s = testing::random_space(rng, d);
        const auto m = fit(s, testing::random_support(rng, s, 2 * d + 4));
        SearchConfig cfg;
        cfg.samples_per_level = 512;
        cfg.levels = 5;
        cfg.max_total_samples = 2000;
        const auto dir = trial % 2 ? Direction::Minimize : Direction::Maximize;
        std::vector<SearchSample> trace;
        const auto a = search(m, Box::of(s), dir, cfg, &trace);
        const auto b = search(m, Box::of(s), dir, cfg);
        CHECK(a.best_x == b.best_x);
        CHECK(a.best_value == b.best_value);
        CHECK(a.level_best == b.level_best);
        CHECK(a.samples_used <= cfg.max_total_samples);
        CHECK(trace.size() == a.samples_used);
        CHECK(Box::of(s).contains(a.best_x));
        for (std::size_t l = 1; l < a.level_best.size(); ++l) CHECK_FALSE(better(dir, a.level_best[l - 1], a.level_best[l]));
        for (const auto& lb : a.level_boxes) {
            CHECK(Box::of(s).contains(lb.lo));
            CHECK(Box::of(s).contains(lb.hi));
        }
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i].index == trace[i - 1].index + 1);
        std::size_t at = 0;
        for (std::size_t l = 0; l < a.level_boxes.size(); ++l) {
            const std::size_t count = std::min(cfg.samples_per_level, cfg.max_total_samples - l * cfg.samples_per_level);
            for (std::size_t i = 0; i < count && at < trace.size(); ++i, ++at) CHECK(a.level_boxes[l].contains(trace[at].x));
        }
    }
}

TEST_CASE("search beats a 50-per-axis grid on small splines") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + trial % 3;
        const auto s = testing::random_space(rng, d);
        const auto m = fit(s, testing::random_support(rng, s, 2 * d + 3 + trial % 4));
        const auto rep = search(m, Box::of(s), Direction::Maximize, SearchConfig{});
        const double oracle = testing::grid_best([&](const Point& x) { return evaluate(m, x); }, s, 50, true);
        CHECK(rep.best_value >= oracle - 1e-3);
    }
}

TEST_CASE("search stalls on a constant model") {
    const auto s = testing::unit_space(2);
    std::vector<SupportPoint> pts;
    for (const auto& x : initial_design(s)) pts.push_back({x, 5.0});
    const auto m = fit(s, pts);
    const auto rep = search(m, Box::of(s), Direction::Maximize, SearchConfig{});
    CHECK(rep.stalled);
    CHECK(rep.levels_run == 2);
    CHECK(rep.best_value == doctest::Approx(5.0));
}

TEST_CASE("search rejects a box outside the space") {
    const auto s = testing::unit_space(1);
    const auto m = fit(s, std::vector<SupportPoint>{{{0.0}, 1}, {{0.5}, 2}, {{1.0}, 4}});
    try {
        search(m, Box{{-1.0}, {0.5}}, Direction::Maximize, SearchConfig{});
        FAIL("expected OutOfBox");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfBox);
    }
}
