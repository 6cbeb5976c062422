#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace curvegnn {

/// How the per-layer threshold k_t is chosen. The stopping rule compares a
/// vertex's curvature rank fraction with the cumulative threshold
/// Σ_{s≤t} k_s / 100; the fixed schedule (k_s = k) gives k·t/100.
enum class ThresholdSchedule {
    Fixed,     // k_s = k
    PowerLaw,  // k_s ~ Pareto(x_m = k/2, α = 2), mean k
    Normal,    // k_s ~ N(k, (k/4)²), clamped to [k/10, 100]
    Linear,    // k_s = k·s
};

ThresholdSchedule parse_schedule(const std::string& name);
std::string to_string(ThresholdSchedule s);

/// Per-layer thresholds k_1..k_L in percent; draws for the random schedules
/// come from `seed`.
std::vector<double> layer_thresholds(ThresholdSchedule schedule, double k, std::size_t max_depth,
                                     std::uint64_t seed);

struct DepthAssignment {
    std::vector<int> depth;  // T(x) ∈ [1, max_depth]
    double k = 100.0;
    std::size_t max_depth = 1;

    std::size_t size() const noexcept { return depth.size(); }
    int max() const;
};

/// T(x) = min{ t : (1/|V|) Σ_y 𝟙(κ(y) ≥ κ(x)) ≤ k·t/100 }, capped at max_depth.
/// −∞ entries rank last. Throws ValidationError for empty input, NaN
/// curvature or k outside (0, 100].
DepthAssignment assign_depths(const std::vector<double>& kappa, double k, std::size_t max_depth);

/// Same rule against cumulative per-layer thresholds.
DepthAssignment assign_depths(const std::vector<double>& kappa, const std::vector<double>& layer_k,
                              std::size_t max_depth);

/// Applies the rule separately inside each group (e.g. each graph of a batch).
DepthAssignment assign_depths_grouped(const std::vector<double>& kappa, const std::vector<std::uint32_t>& group,
                                      std::size_t n_groups, const std::vector<double>& layer_k,
                                      std::size_t max_depth);

/// Smallest depth budget ceil(100/k) that lets every vertex stop under the fixed schedule.
std::size_t saturating_depth(double k);

}  // namespace curvegnn
