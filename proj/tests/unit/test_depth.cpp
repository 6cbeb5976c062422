#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/rng.hpp"
#include "curvegnn/gnn/depth.hpp"
#include "doctest.h"

using namespace curvegnn;

TEST_CASE("stopping depths on a ten-vertex example") {
    // κ descending: vertex 0 has rank fraction 0.1, vertex 4 has 0.5.
    std::vector<double> kappa{9, 8, 7, 6, 5, 4, 3, 2, 1, 0};
    DepthAssignment d = assign_depths(kappa, 20.0, 10);
    CHECK(d.depth[0] == 1);
    CHECK(d.depth[1] == 1);  // 0.2 ≤ 0.2
    CHECK(d.depth[4] == 3);  // 0.5 ≤ 0.6
    CHECK(d.depth[9] == 5);
    CHECK(d.depth == oracle::depths(kappa, 20, 10));
}

TEST_CASE("k = 100 stops everyone after one layer") {
    std::vector<double> kappa{3, -1, 0.5, 2, -INFINITY};
    auto d = assign_depths(kappa, 100.0, 4);
    CHECK(std::all_of(d.depth.begin(), d.depth.end(), [](int t) { return t == 1; }));
    CHECK(saturating_depth(100.0) == 1);
    CHECK(saturating_depth(20.0) == 5);
    CHECK(saturating_depth(30.0) == 4);
}

TEST_CASE("exact threshold comparison") {
    // 3 of 10 vertices tie at the top: p = 0.3 must meet k·t/100 = 0.3 exactly.
    std::vector<double> kappa{1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    auto d = assign_depths(kappa, 10.0, 20);
    CHECK(d.depth[0] == 3);
    CHECK(d.depth[5] == 10);
}

TEST_CASE("ties share depth and negative infinity ranks last") {
    std::vector<double> kappa{2, 2, -INFINITY, 1};
    auto d = assign_depths(kappa, 25.0, 8);
    CHECK(d.depth[0] == d.depth[1]);
    CHECK(d.depth[2] == 4);
    CHECK(d.depth[3] == 3);
}

TEST_CASE("cap and errors") {
    std::vector<double> kappa{5, 4, 3, 2, 1};
    auto d = assign_depths(kappa, 20.0, 2);
    CHECK(d.max() == 2);
    CHECK_THROWS_AS(assign_depths({}, 20.0, 3), ValidationError);
    CHECK_THROWS_AS(assign_depths(kappa, 0.0, 3), ValidationError);
    CHECK_THROWS_AS(assign_depths(kappa, 150.0, 3), ValidationError);
    CHECK_THROWS_AS(assign_depths({1.0, std::nan("")}, 20.0, 3), ValidationError);
}

TEST_CASE("brute force agreement and monotonicity on random vectors") {
    Rng rng = make_rng(42, "depth");
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 50);
        std::vector<double> kappa(n);
        for (auto& k : kappa) k = std::round(uniform01(rng) * 8.0) / 2.0 - 2.0;  // plenty of ties
        for (int k : {5, 10, 20, 100}) {
            int cap = 1 + static_cast<int>(uniform01(rng) * 25);
            auto d = assign_depths(kappa, static_cast<double>(k), static_cast<std::size_t>(cap));
            CHECK(d.depth == oracle::depths(kappa, k, cap));
            for (std::size_t x = 0; x < n; ++x) {
                for (std::size_t y = 0; y < n; ++y) {
                    if (kappa[x] >= kappa[y]) CHECK(d.depth[x] <= d.depth[y]);
                }
            }
        }
    }
}

TEST_CASE("threshold schedules") {
    auto fixed = layer_thresholds(ThresholdSchedule::Fixed, 10.0, 4, 0);
    CHECK(fixed == std::vector<double>{10, 10, 10, 10});
    auto lin = layer_thresholds(ThresholdSchedule::Linear, 10.0, 4, 0);
    CHECK(lin == std::vector<double>{10, 20, 30, 40});
    // Linear: cumulative 10, 30, 60 → p = 0.5 stops at t = 3.
    std::vector<double> kappa{9, 8, 7, 6, 5, 4, 3, 2, 1, 0};
    CHECK(assign_depths(kappa, lin, 4).depth[4] == 3);
    for (auto s : {ThresholdSchedule::Normal, ThresholdSchedule::PowerLaw}) {
        auto ks = layer_thresholds(s, 20.0, 50, 3);
        CHECK(ks == layer_thresholds(s, 20.0, 50, 3));
        for (double k : ks) {
            CHECK(k > 0.0);
            CHECK(k <= 100.0);
        }
    }
    CHECK(parse_schedule("power-law") == ThresholdSchedule::PowerLaw);
    CHECK_THROWS_AS(parse_schedule("cosine"), ValidationError);
}

TEST_CASE("grouped ranks are per group") {
    std::vector<double> kappa{5, 1, 100, 50};
    std::vector<std::uint32_t> group{0, 0, 1, 1};
    auto d = assign_depths_grouped(kappa, group, 2, {50, 50}, 2);
    CHECK(d.depth == std::vector<int>{1, 2, 1, 2});
}
