#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvegnn/graph/graph.hpp"

namespace curvegnn {

enum class DiffusionModel { IC, LT };
DiffusionModel parse_diffusion_model(const std::string& name);  // ic | lt
std::string to_string(DiffusionModel m);

enum class IcMode {
    WeightedCascade,  // p(u,v) = 1/deg(v)
    Uniform,          // p(u,v) = p
};

struct IcOptions {
    IcMode mode = IcMode::WeightedCascade;
    double p = 0.1;
};

/// Activation probability of the single attempt u → v.
double ic_probability(const WeightedGraph& g, VertexId v, const IcOptions& opts);

struct InfluenceTarget {
    std::vector<double> probability;  // per vertex, seeds are 1
    DiffusionModel model = DiffusionModel::IC;
    std::vector<VertexId> seeds;
    std::size_t runs = 0;
};

/// Monte Carlo IC. Run r draws from its own stream derive_seed(seed, r);
/// per-vertex counts are integers, so the result does not depend on the
/// worker count.
InfluenceTarget simulate_ic(const WeightedGraph& g, const std::vector<VertexId>& seeds, const IcOptions& opts,
                            std::size_t runs, std::uint64_t seed, std::size_t workers = 1);

/// Monte Carlo LT with thresholds ~ U[0,1] per run and influence weights
/// w(u,v)/Σ_z w(z,v).
InfluenceTarget simulate_lt(const WeightedGraph& g, const std::vector<VertexId>& seeds, std::size_t runs,
                            std::uint64_t seed, std::size_t workers = 1);

/// Exact IC activation probabilities by recursion over (active, frontier)
/// states. |V| ≤ 20.
std::vector<double> exact_ic(const WeightedGraph& g, const std::vector<VertexId>& seeds, const IcOptions& opts);

/// Exact LT probabilities through the live-edge form: each vertex keeps one
/// incoming edge with its influence weight; v is active iff its chain of
/// kept edges reaches a seed. Sums over simple paths, |V| ≤ 20.
std::vector<double> exact_lt(const WeightedGraph& g, const std::vector<VertexId>& seeds);

struct InfluenceDataset {
    std::vector<VertexId> seeds;
    InfluenceTarget target;
};

/// round(fraction·|V|) uniformly chosen seeds and the simulated targets.
InfluenceDataset make_influence_dataset(const WeightedGraph& g, double fraction, DiffusionModel model,
                                        std::size_t runs, std::uint64_t seed, const IcOptions& ic = {},
                                        std::size_t workers = 1);

/// Per-vertex inputs for influence regression: seed indicator, degree over
/// max degree, fraction of neighbours that are seeds.
VertexFeatures influence_features(const WeightedGraph& g, const std::vector<VertexId>& seeds);

}  // namespace curvegnn
