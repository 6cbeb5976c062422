#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvegnn/curvature/learn.hpp"
#include "curvegnn/gnn/depth.hpp"
#include "curvegnn/gnn/model.hpp"
#include "curvegnn/graph/graph.hpp"

namespace curvegnn {

enum class Task { NodeClass, NodeReg, GraphClass, GraphReg };

Task parse_task(const std::string& name);  // node-class | node-reg | graph-class | graph-reg
std::string to_string(Task t);
inline bool is_graph_level(Task t) { return t == Task::GraphClass || t == Task::GraphReg; }
inline TaskKind task_kind(Task t) {
    return t == Task::NodeClass || t == Task::GraphClass ? TaskKind::Classification : TaskKind::Regression;
}

struct TrainData {
    const WeightedGraph* graph = nullptr;
    VertexFeatures features;
    std::vector<double> targets;  // one per vertex, or one per graph for graph-level tasks
    std::vector<char> labeled;    // same length as targets
    // Graph-level tasks: vertex -> graph id in [0, n_graphs).
    std::vector<std::uint32_t> membership;
    std::size_t n_graphs = 0;
};

struct Split {
    std::vector<char> train, val, test;
};

/// Shuffles labeled rows with the seed and cuts them train/val/rest.
Split make_split(const std::vector<char>& labeled, double train_fraction, double val_fraction, std::uint64_t seed);

struct TrainConfig {
    Task task = Task::NodeClass;
    std::size_t epochs = 200;
    double learning_rate = 0.01;
    double weight_decay = 5e-4;
    std::uint64_t seed = 0;
    double k = 20.0;
    std::size_t n_functions = 3;
    double lambda = 1.0;
    std::size_t layers = 3;
    std::size_t hidden = 32;
    std::vector<std::size_t> family_hidden{16};
    Aggregator aggregator = Aggregator::GcnMean;
    ThresholdSchedule schedule = ThresholdSchedule::Fixed;
    std::size_t depth_refresh = 1;
    double dt = 1.0;  // reporting only
    KappaMode kappa_mode = KappaMode::Transductive;
    bool train_family = true;
    bool learn_edge_weights = true;
    double train_fraction = 0.48;
    double val_fraction = 0.32;
    std::size_t classes = 0;  // 0: inferred from the largest label

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double task_loss = 0.0;
    double curv_loss = 0.0;
    double train_metric = 0.0;
    double val_metric = 0.0;
    double test_metric = 0.0;
    double mean_depth = 0.0;
};

struct TrainResult {
    GnnModel model;
    FunctionFamily family;
    LearnedCurvature curvature;
    DepthAssignment depths;            // depths used in the final epoch
    std::vector<double> layer_k;       // per-layer thresholds of the schedule
    std::vector<double> kappa_hat;     // final κ̂
    std::vector<double> edge_weights;  // final realised weights
    std::vector<EpochRecord> history;
    Split split;
    std::vector<std::string> warnings;
};

GnnConfig model_config(const TrainData& data, const TrainConfig& cfg);
std::uint64_t model_seed(const TrainConfig& cfg);

/// Minimises 𝓛_task + 𝓛_curv jointly with Adam. Depths are recomputed from
/// the current κ̂ every depth_refresh epochs (rank-based, so gradients reach
/// κ̂ only through 𝓛_curv). Throws NumericalError when the loss diverges.
TrainResult train(const TrainData& data, const TrainConfig& cfg);

}  // namespace curvegnn
