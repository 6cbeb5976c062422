#pragma once

#include <cstdint>
#include <vector>

#include "curvegnn/graph/graph.hpp"

namespace curvegnn {

WeightedGraph path_graph(std::size_t n, double weight = 1.0);
WeightedGraph cycle_graph(std::size_t n, double weight = 1.0);
WeightedGraph complete_graph(std::size_t n, double weight = 1.0);
/// Vertex 0 is the centre.
WeightedGraph star_graph(std::size_t leaves, double weight = 1.0);

struct RandomGraphOptions {
    std::size_t n = 10;
    double edge_probability = 0.3;
    double min_weight = 1.0;
    double max_weight = 1.0;
    bool connected = true;  // resample until connected
};

/// G(n, p) with weights uniform in [min_weight, max_weight].
WeightedGraph random_graph(const RandomGraphOptions& opt, std::uint64_t seed);

/// Random graph whose degrees never exceed max_degree and most vertices reach it
/// (greedy stub matching). Unit weights.
WeightedGraph bounded_degree_graph(std::size_t n, std::size_t max_degree, std::uint64_t seed);

struct BlockModel {
    WeightedGraph graph;
    std::vector<int> block;  // block index per vertex
};

/// Stochastic block model with equal-probability within/between blocks.
BlockModel stochastic_block_model(const std::vector<std::size_t>& sizes, double p_in, double p_out,
                                  std::uint64_t seed);

/// Gaussian features whose mean depends on the class: x = signal·e_{class mod d} + N(0, 1).
VertexFeatures class_features(const std::vector<int>& classes, std::size_t dim, double signal, std::uint64_t seed);

/// i.i.d. standard normal features.
VertexFeatures gaussian_features(std::size_t n, std::size_t dim, std::uint64_t seed);

}  // namespace curvegnn
