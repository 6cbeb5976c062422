#include "curvegnn/graph/generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/rng.hpp"

namespace curvegnn {

WeightedGraph path_graph(std::size_t n, double weight) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({VertexId(i), VertexId(i + 1), weight});
    return WeightedGraph(n, std::move(e));
}

WeightedGraph cycle_graph(std::size_t n, double weight) {
    if (n < 3) throw ValidationError("cycle_graph: need at least 3 vertices");
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i) e.push_back({VertexId(i), VertexId((i + 1) % n), weight});
    return WeightedGraph(n, std::move(e));
}

WeightedGraph complete_graph(std::size_t n, double weight) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) e.push_back({VertexId(i), VertexId(j), weight});
    return WeightedGraph(n, std::move(e));
}

WeightedGraph star_graph(std::size_t leaves, double weight) {
    std::vector<Edge> e;
    for (std::size_t i = 1; i <= leaves; ++i) e.push_back({0, VertexId(i), weight});
    return WeightedGraph(leaves + 1, std::move(e));
}

WeightedGraph random_graph(const RandomGraphOptions& opt, std::uint64_t seed) {
    if (opt.min_weight <= 0.0 || opt.max_weight < opt.min_weight) {
        throw ValidationError("random_graph: need 0 < min_weight <= max_weight");
    }
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng = make_rng(derive_seed(seed, "random_graph"), attempt);
        std::vector<Edge> e;
        for (std::size_t i = 0; i < opt.n; ++i) {
            for (std::size_t j = i + 1; j < opt.n; ++j) {
                if (uniform01(rng) < opt.edge_probability) {
                    double w = opt.min_weight + (opt.max_weight - opt.min_weight) * uniform01(rng);
                    e.push_back({VertexId(i), VertexId(j), w});
                }
            }
        }
        WeightedGraph g(opt.n, std::move(e));
        if (!opt.connected || is_connected(g)) return g;
        if (attempt > 10000) throw ValidationError("random_graph: could not draw a connected graph");
    }
}

WeightedGraph bounded_degree_graph(std::size_t n, std::size_t max_degree, std::uint64_t seed) {
    Rng rng = make_rng(seed, "bounded_degree");
    std::vector<std::size_t> stubs;
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t k = 0; k < max_degree; ++k) stubs.push_back(v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
        std::size_t a = std::min(stubs[i], stubs[i + 1]), b = std::max(stubs[i], stubs[i + 1]);
        if (a == b || !seen.insert({a, b}).second) continue;
        e.push_back({VertexId(a), VertexId(b), 1.0});
    }
    return WeightedGraph(n, std::move(e));
}

BlockModel stochastic_block_model(const std::vector<std::size_t>& sizes, double p_in, double p_out,
                                  std::uint64_t seed) {
    BlockModel out;
    for (std::size_t b = 0; b < sizes.size(); ++b) out.block.insert(out.block.end(), sizes[b], static_cast<int>(b));
    std::size_t n = out.block.size();
    Rng rng = make_rng(seed, "sbm");
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double p = out.block[i] == out.block[j] ? p_in : p_out;
            if (uniform01(rng) < p) e.push_back({VertexId(i), VertexId(j), 1.0});
        }
    }
    out.graph = WeightedGraph(n, std::move(e));
    return out;
}

VertexFeatures class_features(const std::vector<int>& classes, std::size_t dim, double signal, std::uint64_t seed) {
    VertexFeatures x = gaussian_features(classes.size(), dim, derive_seed(seed, "class_features"));
    for (std::size_t v = 0; v < classes.size(); ++v) x(v, static_cast<std::size_t>(classes[v]) % dim) += signal;
    return x;
}

VertexFeatures gaussian_features(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng = make_rng(seed, "gaussian_features");
    std::normal_distribution<double> normal(0.0, 1.0);
    VertexFeatures x(n, dim);
    for (auto& v : x.values) v = normal(rng);
    return x;
}

}  // namespace curvegnn
