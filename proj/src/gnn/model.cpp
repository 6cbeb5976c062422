#include "curvegnn/gnn/model.hpp"

#include <cmath>

#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/rng.hpp"

namespace curvegnn {

Aggregator parse_aggregator(const std::string& name) {
    if (name == "gcn-mean") return Aggregator::GcnMean;
    if (name == "gin-sum") return Aggregator::GinSum;
    throw ValidationError("unknown aggregator '" + name + "' (gcn-mean|gin-sum)");
}

std::string to_string(Aggregator a) { return a == Aggregator::GcnMean ? "gcn-mean" : "gin-sum"; }

GnnModel::GnnModel(const GnnConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    if (cfg.layers == 0) throw ValidationError("model needs at least one layer");
    if (cfg.hidden == 0 || cfg.input_dim == 0) throw ValidationError("model widths must be positive");
    if (cfg.head == HeadKind::Classifier && cfg.classes < 2) throw ValidationError("classifier needs >= 2 classes");
    for (std::size_t t = 1; t <= cfg.layers; ++t) {
        std::size_t in = t == 1 ? cfg.input_dim : cfg.hidden;
        std::string name = "layer" + std::to_string(t);
        Layer l;
        if (cfg.aggregator == Aggregator::GcnMean) {
            l.a = ad::Linear(name + ".self", in, cfg.hidden, seed);
            l.b = ad::Linear(name + ".neighbor", in, cfg.hidden, seed, false);
        } else {
            l.a = ad::Linear(name + ".mlp1", in, cfg.hidden, seed);
            l.b = ad::Linear(name + ".mlp2", cfg.hidden, cfg.hidden, seed);
        }
        layers_.push_back(std::move(l));
    }
    head_ = ad::Linear("head", cfg.hidden, output_dim(), seed);
}

ad::Var constant_arc_weights(ad::Tape& tape, const WeightedGraph& g) {
    std::vector<double> w(g.num_arcs());
    auto edge = g.arc_edge();
    for (std::size_t a = 0; a < w.size(); ++a) w[a] = g.edges()[edge[a]].weight;
    return tape.constant(ad::Tensor::column(std::move(w)));
}

ad::Var GnnModel::layer(ad::Tape& tape, std::size_t t, const WeightedGraph& g, const ad::Var& h,
                        const ad::Var& arc_weights) const {
    if (t < 1 || t > layers_.size()) throw ValidationError("layer index out of range");
    if (arc_weights.rows() != g.num_arcs() || arc_weights.cols() != 1) {
        throw ValidationError("arc weights must be num_arcs × 1");
    }
    const Layer& l = layers_[t - 1];
    const std::size_t n = g.num_vertices();
    auto src = g.arc_source();
    ad::Var weighted = ad::mul(ad::gather_rows(h, g.arc_target()), arc_weights);
    if (cfg_.aggregator == Aggregator::GcnMean) {
        ad::Var deg = ad::scatter_add_rows(arc_weights, src, n);
        // Isolated vertices get an empty mean: divide 0 by 1.
        std::vector<double> pad(n, 0.0);
        for (std::size_t x = 0; x < n; ++x) pad[x] = g.degree(static_cast<VertexId>(x)) == 0 ? 1.0 : 0.0;
        ad::Var inv = ad::reciprocal(ad::add(deg, tape.constant(ad::Tensor::column(std::move(pad)))));
        ad::Var mean = ad::mul(ad::scatter_add_rows(weighted, src, n), inv);
        return ad::relu(ad::add(l.a(tape, h), l.b(tape, mean)));
    }
    ad::Var z = ad::add(h, ad::scatter_add_rows(weighted, src, n));
    return ad::relu(l.b(tape, ad::relu(l.a(tape, z))));
}

ad::Var GnnModel::embed_adaptive(ad::Tape& tape, const WeightedGraph& g, const ad::Var& x, const ad::Var& arc_weights,
                                 const DepthAssignment& depths) const {
    const std::size_t n = g.num_vertices();
    if (depths.size() != n) throw ValidationError("depth assignment length does not match graph");
    if (x.rows() != n || x.cols() != cfg_.input_dim) {
        throw ValidationError("features are " + x.value().shape_string() + ", model expects " + std::to_string(n) +
                              "×" + std::to_string(cfg_.input_dim));
    }
    int deepest = 0;
    for (std::size_t v = 0; v < n; ++v) {
        int t = depths.depth[v];
        if (t < 1) throw ValidationError("depth of vertex " + g.name(static_cast<VertexId>(v)) + " is < 1");
        if (static_cast<std::size_t>(t) > layers_.size()) {
            throw ValidationError("depth " + std::to_string(t) + " of vertex " + g.name(static_cast<VertexId>(v)) +
                                  " exceeds the model's " + std::to_string(layers_.size()) + " layers");
        }
        deepest = std::max(deepest, t);
    }
    // state = h^{(min(t, T))}: vertices past their depth keep the frozen value.
    ad::Var state = layer(tape, 1, g, x, arc_weights);
    for (int t = 2; t <= deepest; ++t) {
        std::vector<double> active(n), frozen(n);
        for (std::size_t v = 0; v < n; ++v) {
            active[v] = depths.depth[v] >= t ? 1.0 : 0.0;
            frozen[v] = 1.0 - active[v];
        }
        ad::Var next = layer(tape, static_cast<std::size_t>(t), g, state, arc_weights);
        state = ad::add(ad::mul(next, tape.constant(ad::Tensor::column(std::move(active)))),
                        ad::mul(state, tape.constant(ad::Tensor::column(std::move(frozen)))));
    }
    return state;
}

ad::Var GnnModel::embed_standard(ad::Tape& tape, const WeightedGraph& g, const ad::Var& x, const ad::Var& arc_weights,
                                 std::size_t n_layers) const {
    if (n_layers < 1 || n_layers > layers_.size()) throw ValidationError("layer count out of range");
    ad::Var h = x;
    for (std::size_t t = 1; t <= n_layers; ++t) h = layer(tape, t, g, h, arc_weights);
    return h;
}

ad::Var GnnModel::head(ad::Tape& tape, const ad::Var& h) const {
    if (h.cols() != cfg_.hidden) throw ValidationError("head input width does not match hidden width");
    return head_(tape, h);
}

std::vector<ad::Parameter*> GnnModel::layer_parameters(std::size_t t) {
    Layer& l = layers_.at(t - 1);
    auto out = l.a.parameters();
    for (auto* p : l.b.parameters()) out.push_back(p);
    return out;
}

std::vector<ad::Parameter*> GnnModel::head_parameters() { return head_.parameters(); }

std::vector<ad::Parameter*> GnnModel::parameters() {
    std::vector<ad::Parameter*> out;
    for (std::size_t t = 1; t <= layers_.size(); ++t) {
        for (auto* p : layer_parameters(t)) out.push_back(p);
    }
    for (auto* p : head_parameters()) out.push_back(p);
    return out;
}

namespace {

std::vector<int> class_labels(std::span<const double> targets, std::span<const char> mask, std::size_t classes) {
    std::vector<int> labels(targets.size(), 0);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!mask[i]) continue;
        double y = targets[i];
        if (!(y >= 0.0) || y != std::floor(y) || y >= static_cast<double>(classes)) {
            throw ValidationError("label " + std::to_string(y) + " at row " + std::to_string(i) +
                                  " is not a class index in [0," + std::to_string(classes) + ")");
        }
        labels[i] = static_cast<int>(y);
    }
    return labels;
}

void check_lengths(std::size_t rows, std::span<const double> targets, std::span<const char> mask) {
    if (targets.size() != rows || mask.size() != rows) {
        throw ValidationError("targets/mask length does not match " + std::to_string(rows) + " outputs");
    }
}

}  // namespace

ad::Var task_loss(const ad::Var& outputs, std::span<const double> targets, std::span<const char> mask, TaskKind kind) {
    check_lengths(outputs.rows(), targets, mask);
    if (kind == TaskKind::Regression) {
        if (outputs.cols() != 1) throw ValidationError("regression outputs must have one column");
        return ad::mse(outputs, targets, mask);
    }
    auto labels = class_labels(targets, mask, outputs.cols());
    return ad::cross_entropy(outputs, labels, mask);
}

double task_metric(const ad::Tensor& outputs, std::span<const double> targets, std::span<const char> mask,
                   TaskKind kind) {
    check_lengths(outputs.rows(), targets, mask);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < outputs.rows(); ++r) {
        if (!mask[r]) continue;
        ++count;
        if (kind == TaskKind::Regression) {
            double d = outputs(r, 0) - targets[r];
            total += d * d;
        } else {
            std::size_t best = 0;
            for (std::size_t c = 1; c < outputs.cols(); ++c) {
                if (outputs(r, c) > outputs(r, best)) best = c;
            }
            total += static_cast<double>(best) == targets[r] ? 1.0 : 0.0;
        }
    }
    return count == 0 ? std::nan("") : total / static_cast<double>(count);
}

}  // namespace curvegnn
