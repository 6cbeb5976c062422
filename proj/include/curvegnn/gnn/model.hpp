#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curvegnn/autodiff/nn.hpp"
#include "curvegnn/gnn/depth.hpp"
#include "curvegnn/graph/graph.hpp"

namespace curvegnn {

enum class Aggregator {
    GcnMean,  // relu(h·W_self + b + mean_w(h_y)·W_nbr)
    GinSum,   // relu(relu((h + Σ_y w·h_y)·W₁ + b₁)·W₂ + b₂)
};

Aggregator parse_aggregator(const std::string& name);
std::string to_string(Aggregator a);

enum class HeadKind { Classifier, Regressor };

struct GnnConfig {
    Aggregator aggregator = Aggregator::GcnMean;
    HeadKind head = HeadKind::Classifier;
    std::size_t input_dim = 1;
    std::size_t hidden = 32;
    std::size_t layers = 3;
    std::size_t classes = 2;  // classifier only
};

/// Message-passing network whose vertices can leave the computation early.
/// All forward functions take arc weights (num_arcs × 1, aligned with
/// g.arc_source()) so learned edge weights flow into the task gradient.
class GnnModel {
public:
    GnnModel() = default;
    GnnModel(const GnnConfig& cfg, std::uint64_t seed);

    const GnnConfig& config() const noexcept { return cfg_; }
    std::size_t num_layers() const noexcept { return layers_.size(); }
    std::size_t output_dim() const noexcept { return cfg_.head == HeadKind::Classifier ? cfg_.classes : 1; }

    /// h^{(t)} = UPD(h^{(t−1)}, AGG(neighbour states)) for layer t ∈ [1, L].
    ad::Var layer(ad::Tape& tape, std::size_t t, const WeightedGraph& g, const ad::Var& h,
                  const ad::Var& arc_weights) const;

    /// Final states h_x^{(T(x))}. Layer t reads neighbour y at depth
    /// min(t−1, T(y)). Throws ValidationError when a depth exceeds the
    /// layer count or is < 1.
    ad::Var embed_adaptive(ad::Tape& tape, const WeightedGraph& g, const ad::Var& x, const ad::Var& arc_weights,
                           const DepthAssignment& depths) const;
    /// Plain stack of the first n_layers layers.
    ad::Var embed_standard(ad::Tape& tape, const WeightedGraph& g, const ad::Var& x, const ad::Var& arc_weights,
                           std::size_t n_layers) const;

    ad::Var head(ad::Tape& tape, const ad::Var& h) const;

    ad::Var forward_adaptive(ad::Tape& tape, const WeightedGraph& g, const ad::Var& x, const ad::Var& arc_weights,
                             const DepthAssignment& depths) const {
        return head(tape, embed_adaptive(tape, g, x, arc_weights, depths));
    }
    ad::Var forward_standard(ad::Tape& tape, const WeightedGraph& g, const ad::Var& x, const ad::Var& arc_weights,
                             std::size_t n_layers) const {
        return head(tape, embed_standard(tape, g, x, arc_weights, n_layers));
    }

    std::vector<ad::Parameter*> parameters();
    std::vector<ad::Parameter*> layer_parameters(std::size_t t);  // t ∈ [1, L]
    std::vector<ad::Parameter*> head_parameters();

private:
    struct Layer {
        ad::Linear a;  // gcn: self map; gin: first MLP layer
        ad::Linear b;  // gcn: neighbour map (no bias); gin: second MLP layer
    };
    GnnConfig cfg_;
    std::vector<Layer> layers_;
    ad::Linear head_;
};

/// Arc weights of g as a constant on the tape.
ad::Var constant_arc_weights(ad::Tape& tape, const WeightedGraph& g);

enum class TaskKind { Classification, Regression };

/// Mean cross-entropy (targets are class indices) or mean squared error over
/// rows with mask != 0. Throws ValidationError for out-of-range or
/// non-integer class labels and for length mismatches.
ad::Var task_loss(const ad::Var& outputs, std::span<const double> targets, std::span<const char> mask, TaskKind kind);

/// Accuracy (classification) or mean squared error (regression) over masked rows.
double task_metric(const ad::Tensor& outputs, std::span<const double> targets, std::span<const char> mask,
                   TaskKind kind);

}  // namespace curvegnn
