#include "curvegnn/gnn/depth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/rng.hpp"

namespace curvegnn {

ThresholdSchedule parse_schedule(const std::string& name) {
    if (name == "fixed") return ThresholdSchedule::Fixed;
    if (name == "power-law") return ThresholdSchedule::PowerLaw;
    if (name == "normal") return ThresholdSchedule::Normal;
    if (name == "linear") return ThresholdSchedule::Linear;
    throw ValidationError("unknown threshold schedule '" + name + "' (fixed|power-law|normal|linear)");
}

std::string to_string(ThresholdSchedule s) {
    switch (s) {
        case ThresholdSchedule::Fixed: return "fixed";
        case ThresholdSchedule::PowerLaw: return "power-law";
        case ThresholdSchedule::Normal: return "normal";
        case ThresholdSchedule::Linear: return "linear";
    }
    return "fixed";
}

namespace {

void check_k(double k) {
    if (!(k > 0.0 && k <= 100.0)) throw ValidationError("k must lie in (0,100]");
}

}  // namespace

std::vector<double> layer_thresholds(ThresholdSchedule schedule, double k, std::size_t max_depth, std::uint64_t seed) {
    check_k(k);
    if (max_depth == 0) throw ValidationError("max depth must be >= 1");
    std::vector<double> ks(max_depth, k);
    Rng rng = make_rng(seed, "threshold_schedule");
    for (std::size_t s = 0; s < max_depth; ++s) {
        switch (schedule) {
            case ThresholdSchedule::Fixed: break;
            case ThresholdSchedule::Linear: ks[s] = std::min(100.0, k * static_cast<double>(s + 1)); break;
            case ThresholdSchedule::Normal: {
                std::normal_distribution<double> normal(k, k / 4.0);
                ks[s] = std::clamp(normal(rng), k / 10.0, 100.0);
                break;
            }
            case ThresholdSchedule::PowerLaw: {
                double u = 1.0 - uniform01(rng);  // (0, 1]
                ks[s] = std::min(100.0, 0.5 * k / std::sqrt(u));
                break;
            }
        }
    }
    return ks;
}

int DepthAssignment::max() const { return depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end()); }

std::size_t saturating_depth(double k) {
    check_k(k);
    auto t = static_cast<std::size_t>(std::ceil(100.0 / k));
    while (t > 1 && k * static_cast<double>(t - 1) >= 100.0) --t;
    return std::max<std::size_t>(t, 1);
}

namespace {

/// count[x] = #{y in members : κ(y) ≥ κ(x)}.
void rank_counts(const std::vector<double>& kappa, const std::vector<std::size_t>& members,
                 std::vector<std::size_t>& count) {
    std::vector<std::size_t> order = members;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return kappa[a] > kappa[b]; });
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && kappa[order[j]] == kappa[order[i]]) ++j;
        for (std::size_t q = i; q < j; ++q) count[order[q]] = j;  // ties share the count
        i = j;
    }
}

int stopping_depth(std::size_t count, std::size_t n, const std::vector<double>& cumulative, std::size_t max_depth) {
    // 100·count ≤ K_t·n keeps integer thresholds exact.
    double lhs = 100.0 * static_cast<double>(count);
    for (std::size_t t = 0; t < max_depth; ++t) {
        if (lhs <= cumulative[t] * static_cast<double>(n)) return static_cast<int>(t + 1);
    }
    return static_cast<int>(max_depth);
}

}  // namespace

DepthAssignment assign_depths_grouped(const std::vector<double>& kappa, const std::vector<std::uint32_t>& group,
                                      std::size_t n_groups, const std::vector<double>& layer_k,
                                      std::size_t max_depth) {
    if (kappa.empty()) throw ValidationError("assign_depths: empty graph");
    if (max_depth == 0) throw ValidationError("max depth must be >= 1");
    if (layer_k.size() < max_depth) throw ValidationError("assign_depths: fewer layer thresholds than layers");
    if (group.size() != kappa.size()) throw ValidationError("assign_depths: group length mismatch");
    for (std::size_t x = 0; x < kappa.size(); ++x) {
        if (std::isnan(kappa[x])) throw ValidationError("assign_depths: NaN curvature at vertex " + std::to_string(x));
        if (kappa[x] == INFINITY) throw ValidationError("assign_depths: +inf curvature at vertex " + std::to_string(x));
    }
    for (double k : layer_k) check_k(k);
    std::vector<double> cumulative(max_depth);
    std::partial_sum(layer_k.begin(), layer_k.begin() + static_cast<std::ptrdiff_t>(max_depth), cumulative.begin());

    std::vector<std::vector<std::size_t>> members(n_groups);
    for (std::size_t x = 0; x < group.size(); ++x) {
        if (group[x] >= n_groups) throw ValidationError("assign_depths: group id out of range");
        members[group[x]].push_back(x);
    }
    DepthAssignment out;
    out.k = layer_k.front();
    out.max_depth = max_depth;
    out.depth.assign(kappa.size(), 1);
    std::vector<std::size_t> count(kappa.size(), 0);
    for (const auto& m : members) {
        if (m.empty()) continue;
        rank_counts(kappa, m, count);
        for (std::size_t x : m) out.depth[x] = stopping_depth(count[x], m.size(), cumulative, max_depth);
    }
    return out;
}

DepthAssignment assign_depths(const std::vector<double>& kappa, const std::vector<double>& layer_k,
                              std::size_t max_depth) {
    return assign_depths_grouped(kappa, std::vector<std::uint32_t>(kappa.size(), 0), 1, layer_k, max_depth);
}

DepthAssignment assign_depths(const std::vector<double>& kappa, double k, std::size_t max_depth) {
    check_k(k);
    if (max_depth == 0) throw ValidationError("max depth must be >= 1");
    return assign_depths(kappa, std::vector<double>(max_depth, k), max_depth);
}

}  // namespace curvegnn
