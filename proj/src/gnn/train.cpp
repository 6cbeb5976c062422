#include "curvegnn/gnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curvegnn/autodiff/adam.hpp"
#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/rng.hpp"

namespace curvegnn {

Task parse_task(const std::string& name) {
    if (name == "node-class") return Task::NodeClass;
    if (name == "node-reg") return Task::NodeReg;
    if (name == "graph-class") return Task::GraphClass;
    if (name == "graph-reg") return Task::GraphReg;
    throw ValidationError("unknown task '" + name + "' (node-class|node-reg|graph-class|graph-reg)");
}

std::string to_string(Task t) {
    switch (t) {
        case Task::NodeClass: return "node-class";
        case Task::NodeReg: return "node-reg";
        case Task::GraphClass: return "graph-class";
        case Task::GraphReg: return "graph-reg";
    }
    return "node-class";
}

void TrainConfig::validate() const {
    auto fail = [](const std::string& m) { throw ValidationError(m); };
    if (epochs == 0) fail("epochs must be positive");
    if (!(learning_rate > 0.0)) fail("lr must be positive");
    if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
    if (!(k > 0.0 && k <= 100.0)) fail("k must lie in (0,100]");
    if (!(lambda >= 0.0)) fail("lambda must be >= 0");
    if (layers == 0) fail("L must be positive");
    if (hidden == 0) fail("hidden must be positive");
    if (depth_refresh == 0) fail("depth_refresh must be positive");
    if (!(dt > 0.0)) fail("dt must be positive");
    if (!(train_fraction > 0.0 && val_fraction >= 0.0 && train_fraction + val_fraction <= 1.0)) {
        fail("split fractions must satisfy 0 < train, 0 <= val, train + val <= 1");
    }
}

Split make_split(const std::vector<char>& labeled, double train_fraction, double val_fraction, std::uint64_t seed) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (labeled[i]) rows.push_back(i);
    }
    if (rows.empty()) throw ValidationError("no labeled rows to split");
    Rng rng = make_rng(seed, "split");
    // Fisher-Yates with our own draws so the order does not depend on the
    // standard library's shuffle.
    for (std::size_t i = rows.size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        std::swap(rows[i - 1], rows[std::min(j, i - 1)]);
    }
    auto n_train = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(train_fraction * rows.size())));
    auto n_val = static_cast<std::size_t>(std::llround(val_fraction * rows.size()));
    n_train = std::min(n_train, rows.size());
    n_val = std::min(n_val, rows.size() - n_train);
    Split s;
    s.train.assign(labeled.size(), 0);
    s.val.assign(labeled.size(), 0);
    s.test.assign(labeled.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i < n_train) {
            s.train[rows[i]] = 1;
        } else if (i < n_train + n_val) {
            s.val[rows[i]] = 1;
        } else {
            s.test[rows[i]] = 1;
        }
    }
    return s;
}

namespace {

void check_data(const TrainData& data, const TrainConfig& cfg) {
    if (data.graph == nullptr) throw ValidationError("train: no graph");
    const WeightedGraph& g = *data.graph;
    check_features(g, data.features);
    std::size_t rows = is_graph_level(cfg.task) ? data.n_graphs : g.num_vertices();
    if (is_graph_level(cfg.task)) {
        if (data.n_graphs == 0) throw ValidationError("graph-level task needs graph membership");
        if (data.membership.size() != g.num_vertices()) throw ValidationError("membership length mismatch");
        std::vector<char> seen(data.n_graphs, 0);
        for (auto m : data.membership) {
            if (m >= data.n_graphs) throw ValidationError("membership graph id out of range");
            seen[m] = 1;
        }
        for (std::size_t i = 0; i < seen.size(); ++i) {
            if (!seen[i]) throw ValidationError("graph " + std::to_string(i) + " has no vertices");
        }
    }
    if (data.targets.size() != rows || data.labeled.size() != rows) {
        throw ValidationError("train: expected " + std::to_string(rows) + " targets, got " +
                              std::to_string(data.targets.size()));
    }
    for (std::size_t i = 0; i < rows; ++i) {
        if (data.labeled[i] && !std::isfinite(data.targets[i])) {
            throw ValidationError("train: non-finite target at row " + std::to_string(i));
        }
    }
    if (cfg.n_functions > 0) {
        for (VertexId x = 0; x < g.num_vertices(); ++x) {
            if (g.degree(x) == 0) throw ValidationError("train: isolated vertex " + g.name(x));
        }
    }
}

std::size_t infer_classes(const TrainData& data, const TrainConfig& cfg) {
    if (task_kind(cfg.task) != TaskKind::Classification) return 2;
    if (cfg.classes > 0) return cfg.classes;
    double top = 0.0;
    for (std::size_t i = 0; i < data.targets.size(); ++i) {
        if (data.labeled[i]) top = std::max(top, data.targets[i]);
    }
    return std::max<std::size_t>(2, static_cast<std::size_t>(top) + 1);
}

}  // namespace

GnnConfig model_config(const TrainData& data, const TrainConfig& cfg) {
    GnnConfig m;
    m.aggregator = cfg.aggregator;
    m.head = task_kind(cfg.task) == TaskKind::Classification ? HeadKind::Classifier : HeadKind::Regressor;
    m.input_dim = data.features.cols;
    m.hidden = cfg.hidden;
    m.layers = cfg.layers;
    m.classes = infer_classes(data, cfg);
    return m;
}

std::uint64_t model_seed(const TrainConfig& cfg) { return derive_seed(cfg.seed, "model"); }

TrainResult train(const TrainData& data, const TrainConfig& cfg) {
    cfg.validate();
    check_data(data, cfg);
    const WeightedGraph& g = *data.graph;
    const bool graph_level = is_graph_level(cfg.task);
    const TaskKind kind = task_kind(cfg.task);

    TrainResult r;
    r.model = GnnModel(model_config(data, cfg), model_seed(cfg));
    r.family = FunctionFamily(cfg.n_functions, data.features.cols, cfg.family_hidden, derive_seed(cfg.seed, "family"));
    r.curvature = LearnedCurvature(g, data.features.cols, cfg.kappa_mode, cfg.family_hidden,
                                   derive_seed(cfg.seed, "kappa"));
    r.split = make_split(data.labeled, cfg.train_fraction, cfg.val_fraction, cfg.seed);
    r.layer_k = layer_thresholds(cfg.schedule, cfg.k, cfg.layers, derive_seed(cfg.seed, "schedule"));

    ad::Adam adam(ad::AdamConfig{.learning_rate = cfg.learning_rate});
    adam.add_group(r.model.parameters(), cfg.weight_decay);
    adam.add_group(r.curvature.kappa_parameters());
    if (cfg.train_family) adam.add_group(r.family.parameters());
    if (cfg.learn_edge_weights) {
        ad::Parameter* lw = &r.curvature.log_weights();
        adam.add_group(std::span<ad::Parameter* const>(&lw, 1));
    }

    std::vector<std::uint32_t> group(g.num_vertices(), 0);
    std::size_t n_groups = 1;
    if (graph_level) {
        group = data.membership;
        n_groups = data.n_graphs;
    }

    const ad::Tensor x_tensor = ad::to_tensor(data.features);
    double best_val = std::nan("");
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (epoch % cfg.depth_refresh == 0) {
            r.depths = assign_depths_grouped(r.curvature.kappa_values(data.features), group, n_groups, r.layer_k,
                                             cfg.layers);
        }
        ad::Tape tape;
        ad::Var x = tape.constant(x_tensor);
        TapedOperators ops = cfg.learn_edge_weights ? TapedOperators(g, r.curvature.edge_weights(tape))
                                                    : TapedOperators(g, tape);
        ad::Var h = r.model.embed_adaptive(tape, g, x, ops.arc_weights(), r.depths);
        if (graph_level) h = ad::segment_mean_rows(h, group, n_groups);
        ad::Var out = r.model.head(tape, h);
        ad::Var l_task = task_loss(out, data.targets, r.split.train, kind);
        ad::Var kappa = r.curvature.kappa_hat(tape, x);
        auto curv = curvature_loss(ops, r.family, kappa, x, cfg.lambda);
        ad::Var total = ad::add(l_task, curv.loss);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.task_loss = l_task.value().item();
        rec.curv_loss = curv.loss.value().item();
        if (!std::isfinite(rec.task_loss) || !std::isfinite(rec.curv_loss)) {
            throw NumericalError("train: loss diverged at epoch " + std::to_string(epoch) +
                                 " (task " + std::to_string(rec.task_loss) + ", curvature " +
                                 std::to_string(rec.curv_loss) + ")");
        }
        rec.train_metric = task_metric(out.value(), data.targets, r.split.train, kind);
        rec.val_metric = task_metric(out.value(), data.targets, r.split.val, kind);
        rec.test_metric = task_metric(out.value(), data.targets, r.split.test, kind);
        rec.mean_depth = std::accumulate(r.depths.depth.begin(), r.depths.depth.end(), 0.0) /
                         static_cast<double>(r.depths.size());
        r.history.push_back(rec);
        if (std::isfinite(rec.val_metric)) {
            bool better = std::isnan(best_val) ||
                          (kind == TaskKind::Classification ? rec.val_metric > best_val : rec.val_metric < best_val);
            if (better) best_val = rec.val_metric;
        }
        adam.step(tape.backward(total));
    }

    r.kappa_hat = r.curvature.kappa_values(data.features);
    r.edge_weights = cfg.learn_edge_weights ? r.curvature.realized_weights() : [&] {
        std::vector<double> w;
        for (const auto& e : g.edges()) w.push_back(e.weight);
        return w;
    }();
    const double last_val = r.history.back().val_metric;
    if (std::isfinite(best_val) && std::isfinite(last_val)) {
        double drop = kind == TaskKind::Classification ? best_val - last_val : last_val - best_val;
        double scale = kind == TaskKind::Classification ? 1.0 : std::max(std::abs(best_val), 1e-12);
        if (drop > 0.05 * scale) {
            r.warnings.push_back("validation metric degraded from best " + std::to_string(best_val) + " to final " +
                                 std::to_string(last_val));
        }
    }
    return r;
}

}  // namespace curvegnn
