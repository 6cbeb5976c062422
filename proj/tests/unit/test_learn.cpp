#include <cmath>

#include "../support/oracles.hpp"
#include "curvegnn/common/errors.hpp"
#include "curvegnn/curvature/exact.hpp"
#include "curvegnn/curvature/learn.hpp"
#include "curvegnn/graph/generators.hpp"
#include "doctest.h"

using namespace curvegnn;

TEST_CASE("hinge penalty") {
    CHECK(penalty(3.0, 0.5, 1.0) == 0.5);
    CHECK(penalty(2.0, 0.5, 1.0) == 0.0);
    CHECK(penalty(1e9, 0.0, 1.0) == 0.0);
    // Non-decreasing in κ̂.
    double prev = -1.0;
    for (double k = -5.0; k <= 5.0; k += 0.25) {
        double p = penalty(k, 0.7, 0.9);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("curvature loss values") {
    WeightedGraph g = complete_graph(2);
    ad::Tape tape;
    TapedOperators ops(g, tape);
    ad::Var x = tape.constant(ad::Tensor::matrix(2, 1, {0.0, 1.0}));

    SUBCASE("identity member with kappa 3") {
        // One member f(v) = feature, i.e. f = (0, 1): penalty 0.5 per vertex.
        FunctionFamily family(1, 1, {}, 0);
        auto& layer = family.member(0).layers().front();
        layer.weight.value[0] = 1.0;
        layer.bias.value[0] = 0.0;
        ad::Var kappa = tape.constant(ad::Tensor::column({3.0, 3.0}));
        auto terms = curvature_loss(ops, family, kappa, x, 0.0);
        CHECK(terms.loss.value().item() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("slack inequality") {
        FunctionFamily family(3, 1, {4}, 1);
        ad::Var kappa = tape.constant(ad::Tensor::column({-1e6, -1e6}));
        CHECK(curvature_loss(ops, family, kappa, x, 0.0).loss.value().item() == 0.0);
    }
    SUBCASE("inactive hinge leaves the lambda term") {
        FunctionFamily family(2, 1, {4}, 2);
        ad::Var kappa = tape.constant(ad::Tensor::column({-7.0, -3.0}));
        CHECK(curvature_loss(ops, family, kappa, x, 1.0).loss.value().item() == doctest::Approx(10.0));
    }
}

TEST_CASE("curvature loss gradient in every group") {
    WeightedGraph g = random_graph({.n = 6, .edge_probability = 0.5, .min_weight = 0.5, .max_weight = 2.0}, 4);
    VertexFeatures feats = gaussian_features(6, 3, 1);
    FunctionFamily family(2, 3, {5}, 3);
    LearnedCurvature params(g, 3, KappaMode::Transductive, {5}, 7);
    // κ̂ spread so some hinges are active and none sits on a kink.
    params.set_kappa({-0.3, 0.4, 1.1, 2.3, 0.05, 3.1});
    auto build = [&](ad::Tape& t) {
        ad::Var x = t.constant(ad::to_tensor(feats));
        TapedOperators ops(g, params.edge_weights(t));
        return curvature_loss(ops, family, params.kappa_hat(t, x), x, 1.0).loss;
    };
    std::vector<ad::Parameter*> groups = family.parameters();
    for (auto* p : params.kappa_parameters()) groups.push_back(p);
    groups.push_back(&params.log_weights());
    ad::Tape tape;
    auto grads = tape.backward(build(tape));
    auto num = oracle::finite_difference(groups, [&] {
        ad::Tape t;
        return build(t).value().item();
    });
    for (std::size_t i = 0; i < groups.size(); ++i) {
        INFO(groups[i]->name);
        CHECK(oracle::relative_error(grads.at(*groups[i]), num[i]) < 1e-5);
    }
}

TEST_CASE("lambda zero gives kappa no ascent") {
    CurvatureLearnConfig cfg;
    cfg.lambda = 0.0;
    cfg.epochs = 50;
    WeightedGraph g = path_graph(4);
    auto r = estimate_curvature(g, gaussian_features(4, 3, 0), cfg);
    for (double k : r.estimate.kappa) CHECK(k <= 1e-12);
}

TEST_CASE("learned curvature overestimates the exact value on K2 and P3") {
    CurvatureLearnConfig cfg;
    for (const WeightedGraph& g : {complete_graph(2), path_graph(3)}) {
        auto exact = exact_curvature_all(g);
        auto r = estimate_curvature(g, gaussian_features(g.num_vertices(), 4, 2), cfg);
        CHECK(r.estimate.provenance == Provenance::Learned);
        for (VertexId x = 0; x < g.num_vertices(); ++x) CHECK(r.estimate.kappa[x] >= exact.kappa[x] - 0.05);
    }
}

TEST_CASE("estimation is deterministic and validates input") {
    CurvatureLearnConfig cfg;
    cfg.epochs = 30;
    WeightedGraph g = cycle_graph(5);
    auto x = gaussian_features(5, 2, 3);
    CHECK(estimate_curvature(g, x, cfg).estimate.kappa == estimate_curvature(g, x, cfg).estimate.kappa);
    cfg.n_functions = 0;
    CHECK_THROWS_AS(estimate_curvature(g, x, cfg), ValidationError);
    cfg.n_functions = 2;
    WeightedGraph iso(3, {{0, 1, 1.0}});
    CHECK_THROWS_AS(estimate_curvature(iso, gaussian_features(3, 2, 0), cfg), ValidationError);
}

TEST_CASE("inductive mode and learned weights") {
    CurvatureLearnConfig cfg;
    cfg.epochs = 40;
    cfg.mode = KappaMode::Inductive;
    cfg.learn_edge_weights = true;
    WeightedGraph g = cycle_graph(6);
    auto r = estimate_curvature(g, gaussian_features(6, 3, 4), cfg);
    CHECK(r.estimate.kappa.size() == 6);
    REQUIRE(r.edge_weights.size() == 6);
    for (double w : r.edge_weights) CHECK(w > 0.0);
}

TEST_CASE("family members are sigmoid networks") {
    FunctionFamily family(3, 4, {8, 8}, 0);
    CHECK(family.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(family.member(i).widths() == std::vector<std::size_t>{4, 8, 8, 1});
    }
    // Independent initialisations.
    CHECK_FALSE(family.member(0).layers()[0].weight.value == family.member(1).layers()[0].weight.value);
}
