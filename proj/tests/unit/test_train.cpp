#include <cmath>

#include "curvegnn/autodiff/adam.hpp"
#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/rng.hpp"
#include "curvegnn/gnn/train.hpp"
#include "curvegnn/graph/generators.hpp"
#include "doctest.h"

using namespace curvegnn;

namespace {

struct SbmData {
    BlockModel bm;
    TrainData data;
};

SbmData sbm(std::uint64_t seed, std::size_t per_block = 40) {
    SbmData s;
    s.bm = stochastic_block_model({per_block, per_block}, per_block < 30 ? 0.5 : 0.2, 0.02, seed);
    s.data.graph = &s.bm.graph;
    s.data.features = class_features(s.bm.block, 4, 1.0, derive_seed(seed, "x"));
    for (int b : s.bm.block) s.data.targets.push_back(b);
    s.data.labeled.assign(s.data.targets.size(), 1);
    return s;
}

}  // namespace

TEST_CASE("split fractions and determinism") {
    std::vector<char> labeled(100, 1);
    labeled[3] = 0;
    Split s = make_split(labeled, 0.48, 0.32, 5);
    std::size_t tr = 0, va = 0, te = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(s.train[i] + s.val[i] + s.test[i] == labeled[i]);
        tr += s.train[i];
        va += s.val[i];
        te += s.test[i];
    }
    CHECK(tr == 48);
    CHECK(va == 32);
    CHECK(te == 19);
    CHECK(make_split(labeled, 0.48, 0.32, 5).train == s.train);
    CHECK(make_split(labeled, 0.48, 0.32, 6).train != s.train);
}

TEST_CASE("config validation") {
    TrainConfig c;
    c.k = 150;
    CHECK_THROWS_WITH_AS(c.validate(), "k must lie in (0,100]", ValidationError);
    c = {};
    c.k = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.train_fraction = 0.8;
    c.val_fraction = 0.3;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    CHECK(parse_task("graph-reg") == Task::GraphReg);
    CHECK_THROWS_AS(parse_task("edge"), ValidationError);
}

TEST_CASE("degenerate settings reduce to a one-layer network") {
    auto s = sbm(3, 15);
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.lambda = 0.0;
    cfg.n_functions = 0;
    cfg.k = 100.0;
    cfg.learn_edge_weights = false;
    TrainResult r = train(s.data, cfg);

    // Reference loop: standard 1-layer stack, task loss only.
    GnnModel ref(model_config(s.data, cfg), model_seed(cfg));
    ad::Adam adam(ad::AdamConfig{.learning_rate = cfg.learning_rate});
    adam.add_group(ref.parameters(), cfg.weight_decay);
    const WeightedGraph& g = *s.data.graph;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        ad::Tape t;
        ad::Var x = t.constant(ad::to_tensor(s.data.features));
        ad::Var out = ref.forward_standard(t, g, x, constant_arc_weights(t, g), 1);
        ad::Var loss = task_loss(out, s.data.targets, r.split.train, TaskKind::Classification);
        CHECK(loss.value().item() == doctest::Approx(r.history[epoch].task_loss).epsilon(1e-12));
        CHECK(r.history[epoch].curv_loss == 0.0);
        CHECK(r.history[epoch].mean_depth == 1.0);
        adam.step(t.backward(loss));
    }
}

TEST_CASE("training is deterministic for a seed") {
    auto s = sbm(4, 15);
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.seed = 7;
    auto a = train(s.data, cfg), b = train(s.data, cfg);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].task_loss == b.history[i].task_loss);
        CHECK(a.history[i].curv_loss == b.history[i].curv_loss);
    }
    CHECK(a.kappa_hat == b.kappa_hat);
    CHECK(a.depths.depth == b.depths.depth);
}

TEST_CASE("divergence raises a numerical error") {
    auto s = sbm(5, 10);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.learning_rate = 1e150;
    CHECK_THROWS_AS(train(s.data, cfg), NumericalError);
}

TEST_CASE("small block model is learnable") {
    auto s = sbm(6);
    TrainConfig cfg;
    cfg.epochs = 100;
    auto r = train(s.data, cfg);
    CHECK(r.history.back().train_metric > 0.9);
    CHECK(r.history.back().test_metric > 0.7);
    CHECK(r.kappa_hat.size() == 80);
    CHECK(r.edge_weights.size() == s.bm.graph.num_edges());
    for (int t : r.depths.depth) CHECK((t >= 1 && t <= 3));
}

TEST_CASE("graph-level regression") {
    // Three disjoint cycles; target = cycle length.
    WeightedGraph g = disjoint_union(disjoint_union(cycle_graph(4), cycle_graph(5)), cycle_graph(6));
    TrainData d;
    d.graph = &g;
    d.features = gaussian_features(15, 2, 0);
    for (std::size_t v = 0; v < 15; ++v) d.membership.push_back(v < 4 ? 0 : v < 9 ? 1 : 2);
    d.n_graphs = 3;
    d.targets = {4, 5, 6};
    d.labeled = {1, 1, 1};
    TrainConfig cfg;
    cfg.task = Task::GraphReg;
    cfg.epochs = 5;
    cfg.train_fraction = 0.67;
    cfg.val_fraction = 0.0;
    auto r = train(d, cfg);
    CHECK(r.history.size() == 5);
    d.membership[0] = 7;
    CHECK_THROWS_AS(train(d, cfg), ValidationError);
}
