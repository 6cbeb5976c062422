#pragma once

// Shared set-ups for unit and acceptance tests.

#include <string>
#include <vector>

#include "curvegnn/autodiff/ops.hpp"
#include "curvegnn/common/rng.hpp"
#include "curvegnn/curvature/learn.hpp"
#include "curvegnn/gnn/model.hpp"
#include "curvegnn/graph/generators.hpp"
#include "oracles.hpp"

namespace fixture {

using namespace curvegnn;

struct GroupError {
    std::string name;
    double rel_error;
};

/// Builds 𝓛_task + 𝓛_curv on a small random graph (node classification,
/// learned edge weights, mixed depths) and compares every parameter group's
/// taped gradient with central differences.
inline std::vector<GroupError> total_loss_gradient(Aggregator agg, std::size_t n_functions, std::uint64_t seed,
                                                   std::size_t n_vertices = 6) {
    WeightedGraph g = random_graph({.n = n_vertices, .edge_probability = 0.45, .min_weight = 0.5, .max_weight = 2.0}, seed);
    const std::size_t n = g.num_vertices();
    VertexFeatures feats = gaussian_features(n, 3, derive_seed(seed, "x"));
    GnnModel model({.aggregator = agg, .head = HeadKind::Classifier, .input_dim = 3, .hidden = 5, .layers = 3,
                    .classes = 3},
                   derive_seed(seed, "m"));
    FunctionFamily family(n_functions, 3, {4}, derive_seed(seed, "f"));
    LearnedCurvature curv(g, 3, KappaMode::Transductive, {4}, derive_seed(seed, "k"));
    Rng rng = make_rng(seed, "values");
    std::vector<double> kappa(n), targets(n);
    std::vector<char> mask(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        kappa[i] = 4.0 * uniform01(rng) - 1.0;
        targets[i] = static_cast<double>(i % 3);
    }
    curv.set_kappa(kappa);
    for (std::size_t e = 0; e < curv.log_weights().value.size(); ++e) curv.log_weights().value[e] = 0.3 * uniform01(rng);
    DepthAssignment depths = assign_depths(kappa, 40.0, 3);

    auto build = [&](ad::Tape& t) {
        ad::Var x = t.constant(ad::to_tensor(feats));
        TapedOperators ops(g, curv.edge_weights(t));
        ad::Var out = model.forward_adaptive(t, g, x, ops.arc_weights(), depths);
        ad::Var task = task_loss(out, targets, mask, TaskKind::Classification);
        return ad::add(task, curvature_loss(ops, family, curv.kappa_hat(t, x), x, 1.0).loss);
    };
    std::vector<ad::Parameter*> params = model.parameters();
    for (auto* p : family.parameters()) params.push_back(p);
    for (auto* p : curv.kappa_parameters()) params.push_back(p);
    params.push_back(&curv.log_weights());

    ad::Tape tape;
    ad::Gradients grads = tape.backward(build(tape));
    auto numeric = oracle::finite_difference(params, [&] {
        ad::Tape t;
        return build(t).value().item();
    });
    std::vector<GroupError> out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        ad::Tensor taped = grads.contains(*params[i])
                               ? grads.at(*params[i])
                               : ad::Tensor(params[i]->value.rows(), params[i]->value.cols(), 0.0);
        out.push_back({params[i]->name, oracle::relative_error(taped, numeric[i])});
    }
    return out;
}

}  // namespace fixture
