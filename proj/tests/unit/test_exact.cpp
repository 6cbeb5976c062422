#include <cmath>

#include "../support/oracles.hpp"
#include "curvegnn/common/errors.hpp"
#include "curvegnn/curvature/exact.hpp"
#include "curvegnn/graph/generators.hpp"
#include "doctest.h"

using namespace curvegnn;

TEST_CASE("closed-form curvatures") {
    CHECK(exact_curvature(complete_graph(2), 0) == doctest::Approx(2.0).epsilon(1e-12));
    WeightedGraph p3 = path_graph(3);
    CHECK(exact_curvature(p3, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(exact_curvature(p3, 0) == doctest::Approx(1.5).epsilon(1e-12));
    for (double c : {0.5, 3.0}) CHECK(exact_curvature(complete_graph(2, c), 1) == doctest::Approx(2.0 * c).epsilon(1e-12));
}

TEST_CASE("local forms of the path center") {
    LocalFormPair lf = build_local_forms(path_graph(3), 1);
    CHECK(lf.basis == std::vector<VertexId>{1, 0, 2});
    CHECK(lf.n_neighbors == 2);
    ReducedPencil rp = reduce_local_forms(lf);
    REQUIRE(rp.A.rows() == 2);
    CHECK(rp.A(0, 0) == doctest::Approx(0.75));
    CHECK(rp.A(0, 1) == doctest::Approx(0.5));
    CHECK(rp.A(1, 1) == doctest::Approx(0.75));
    CHECK(rp.B_diag(0) == doctest::Approx(0.5));
    CHECK_FALSE(rp.unbounded);
}

TEST_CASE("local forms reproduce the operators") {
    WeightedGraph g = random_graph({.n = 9, .edge_probability = 0.4, .min_weight = 0.5, .max_weight = 2.0}, 21);
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
        auto [a, b] = oracle::full_forms(g, x);
        LocalFormPair lf = build_local_forms(g, x);
        for (std::size_t i = 0; i < lf.basis.size(); ++i) {
            for (std::size_t j = 0; j < lf.basis.size(); ++j) {
                CHECK(lf.A(i, j) == doctest::Approx(a(lf.basis[i], lf.basis[j])).epsilon(1e-10));
                CHECK(lf.B(i, j) == doctest::Approx(b(lf.basis[i], lf.basis[j])).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("exact curvature agrees with the bisection reference") {
    for (std::uint64_t s = 0; s < 15; ++s) {
        std::size_t n = 3 + s % 8;
        WeightedGraph g = random_graph({.n = n, .edge_probability = 0.45, .min_weight = 0.5, .max_weight = 2.0}, s);
        for (VertexId x = 0; x < g.num_vertices(); ++x) {
            double ref = oracle::curvature_by_bisection(g, x);
            CHECK(exact_curvature(g, x) == doctest::Approx(ref).epsilon(1e-7).scale(1.0));
        }
    }
    for (WeightedGraph g : {cycle_graph(4), cycle_graph(5), complete_graph(4), star_graph(3)}) {
        for (VertexId x = 0; x < g.num_vertices(); ++x) {
            CHECK(exact_curvature(g, x) == doctest::Approx(oracle::curvature_by_bisection(g, x)).epsilon(1e-7));
        }
    }
}

TEST_CASE("sampled curvature never undercuts the exact value") {
    WeightedGraph g = random_graph({.n = 8, .edge_probability = 0.4, .min_weight = 0.5, .max_weight = 2.0}, 5);
    CurvatureEstimate ex = exact_curvature_all(g);
    CurvatureEstimate sm = sampled_curvature_all(g, 2000, 1);
    CHECK(sm.provenance == Provenance::Sampled);
    for (VertexId x = 0; x < g.num_vertices(); ++x) CHECK(sm.kappa[x] >= ex.kappa[x] - 1e-9);
    CHECK(sampled_curvature(g, 3, 500, 9) == sampled_curvature(g, 3, 500, 9));
}

TEST_CASE("isolated vertices are rejected") {
    WeightedGraph g(3, {{0, 1, 1.0}});
    CHECK_THROWS_AS(exact_curvature(g, 2), ValidationError);
    CHECK_THROWS_AS(exact_curvature_all(g), ValidationError);
}

TEST_CASE("parallel evaluation is deterministic") {
    WeightedGraph g = random_graph({.n = 12, .edge_probability = 0.3}, 2);
    CHECK(exact_curvature_all(g, 1).kappa == exact_curvature_all(g, 4).kappa);
}
