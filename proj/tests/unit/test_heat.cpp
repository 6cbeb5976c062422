#include <cmath>
#include <algorithm>
#include <numeric>

#include "curvegnn/common/errors.hpp"
#include "curvegnn/curvature/exact.hpp"
#include "curvegnn/curvature/operators.hpp"
#include "curvegnn/dynamics/heat.hpp"
#include "curvegnn/graph/generators.hpp"
#include "doctest.h"

using namespace curvegnn;

TEST_CASE("heat kernel on K2 in closed form") {
    WeightedGraph g = complete_graph(2);
    VertexFunction f0{0.0, 1.0};
    auto r = heat_flow(g, f0, {0.0, 0.25, 1.0});
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        double t = r.times[i], e = std::exp(-2.0 * t);
        CHECK(r.values[i][0] == doctest::Approx(0.5 * (1.0 - e)).epsilon(1e-12));
        CHECK(r.values[i][1] == doctest::Approx(0.5 * (1.0 + e)).epsilon(1e-12));
        CHECK(r.gamma[i][0] == doctest::Approx(0.5 * e * e).epsilon(1e-12));
    }
    CHECK(r.values[0].values == f0.values);
}

TEST_CASE("constant functions are stationary") {
    WeightedGraph g = random_graph({.n = 8, .edge_probability = 0.4}, 3);
    VertexFunction c{std::vector<double>(8, 2.5)};
    auto r = heat_flow(g, c, time_grid(3.0, 6));
    for (const auto& f : r.values) {
        for (double v : f.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
    }
}

TEST_CASE("semigroup, mass conservation and energy decay") {
    WeightedGraph g = random_graph({.n = 10, .edge_probability = 0.3, .min_weight = 0.5, .max_weight = 2.0}, 8);
    HeatKernel k(g);
    VertexFunction f0{std::vector<double>(10)};
    for (std::size_t i = 0; i < 10; ++i) f0[i] = std::sin(1.0 + 3.0 * i);
    auto a = k.apply(k.apply(f0, 0.3), 0.4), b = k.apply(f0, 0.7);
    for (std::size_t i = 0; i < 10; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
    double m0 = std::accumulate(f0.values.begin(), f0.values.end(), 0.0);
    auto r = heat_flow(g, f0, time_grid(2.0, 10));
    double prev = INFINITY;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        CHECK(std::accumulate(r.values[i].values.begin(), r.values[i].values.end(), 0.0) ==
              doctest::Approx(m0).epsilon(1e-10));
        double energy = std::accumulate(r.gamma[i].begin(), r.gamma[i].end(), 0.0);
        CHECK(energy <= prev + 1e-12);
        prev = energy;
    }
    CHECK(k.eigenvalues()[0] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("grid and cap validation") {
    WeightedGraph g = path_graph(4);
    VertexFunction f{1, 0, 0, 0};
    CHECK_THROWS_AS(heat_flow(g, f, {0.1, 0.2}), ValidationError);
    CHECK_THROWS_AS(heat_flow(g, f, {0.0, 0.2, 0.2}), ValidationError);
    CHECK_THROWS_AS(heat_flow(g, f, {0.0, 1.0}, {.dense_cap = 3}), ValidationError);
    auto euler = heat_flow(g, f, {0.0, 1.0}, {.dense_cap = 3, .euler = true, .dt = 1e-4});
    auto exact = heat_flow(g, f, {0.0, 1.0});
    for (std::size_t i = 0; i < 4; ++i) CHECK(euler.values[1][i] == doctest::Approx(exact.values[1][i]).epsilon(1e-3));
    CHECK(time_grid(1.0, 4) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("euler steps on K2") {
    auto steps = euler_heat_steps(complete_graph(2), VertexFunction{0.0, 1.0}, 0.05, 40);
    REQUIRE(steps.size() == 41);
    for (std::size_t l = 0; l <= 40; ++l) {
        CHECK(steps[l][1] - steps[l][0] == doctest::Approx(std::pow(0.9, static_cast<double>(l))).epsilon(1e-12));
    }
}

TEST_CASE("mixing time on K2") {
    WeightedGraph g = complete_graph(2);
    auto times = time_grid(3.0, 30000);
    auto m = mixing_time(g, 0, 0.01, 2.0, default_probes(g, 0, 1), times);
    CHECK(m.empirical == doctest::Approx(std::log(100.0) / 4.0).epsilon(1e-3));
    CHECK(m.bound == doctest::Approx(std::log(100.0) / 2.0).epsilon(1e-12));
    CHECK(m.empirical <= m.bound);
    CHECK(m.probes_used > 0);
    auto instant = mixing_time(g, 0, 1.0, 2.0, default_probes(g, 0, 1), times);
    CHECK(instant.empirical == 0.0);
    CHECK(std::isnan(mixing_bound(0.1, 0.0)));
    CHECK(std::isnan(mixing_bound(0.1, -1.0)));
    CHECK_THROWS_AS(mixing_bound(0.0, 1.0), ValidationError);
}

TEST_CASE("mixing skips probes with no gradient at the vertex") {
    WeightedGraph g = path_graph(3);
    std::vector<VertexFunction> probes{VertexFunction{1, 1, 1}, VertexFunction{0, 1, 0}};
    auto m = mixing_time(g, 0, 0.5, exact_curvature(g, 0), probes, time_grid(10.0, 1000));
    CHECK(m.probes_skipped == 1);
    CHECK(m.probes_used == 1);
}

TEST_CASE("global gradient bound on random graphs") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        WeightedGraph g = random_graph({.n = 9, .edge_probability = 0.4, .min_weight = 0.5, .max_weight = 2.0}, s);
        auto kappa = exact_curvature_all(g).kappa;
        double kmin = *std::min_element(kappa.begin(), kappa.end());
        VertexFunction f0{std::vector<double>(9)};
        for (std::size_t i = 0; i < 9; ++i) f0[i] = std::cos(2.0 * i + s);
        auto rep = semigroup_gradient_check(g, kmin, f0, time_grid(3.0, 30));
        CHECK(rep.passed);
        CHECK(rep.rows.size() == 31);
    }
}

TEST_CASE("feature decay and layer budget") {
    auto layers = euler_heat_steps(complete_graph(2), VertexFunction{0.0, 1.0}, 0.05, 10);
    auto d = feature_decay(complete_graph(2), layers, 0, 3, 1.0, 1.0);
    CHECK(d.defined);
    CHECK(d.bound == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
    CHECK(d.distinctiveness == doctest::Approx(std::pow(0.9, 6.0)).epsilon(1e-12));
    std::vector<VertexFunction> flat{VertexFunction{1.0, 1.0}, VertexFunction{1.0, 1.0}};
    CHECK_FALSE(feature_decay(complete_graph(2), flat, 0, 1, 1.0, 1.0).defined);
    CHECK(layer_budget(0.1, 1.0, 1.0) == 2.0);
    CHECK(std::isinf(layer_budget(0.1, 0.0, 1.0)));
}
