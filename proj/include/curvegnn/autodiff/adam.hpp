#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "curvegnn/autodiff/tape.hpp"

namespace curvegnn::ad {

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction. Weight decay is decoupled and per group:
/// θ ← θ·(1 − lr·decay) − lr·m̂/(√v̂ + ε), so a zero gradient leaves only the
/// shrinkage.
class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    void add_group(std::span<Parameter* const> params, double weight_decay = 0.0);

    /// One update of every registered parameter. Parameters absent from
    /// `grads` are treated as having zero gradient. Throws NumericalError
    /// naming the parameter when a gradient is non-finite; no parameter is
    /// modified in that case.
    void step(const Gradients& grads);

    std::size_t step_count() const noexcept { return steps_; }
    const AdamConfig& config() const noexcept { return cfg_; }
    void set_learning_rate(double lr) { cfg_.learning_rate = lr; }

    /// Moment accumulators keyed by parameter name.
    const Tensor& first_moment(const std::string& name) const { return state_.at(name).m; }
    const Tensor& second_moment(const std::string& name) const { return state_.at(name).v; }

private:
    struct Slot {
        Parameter* param;
        double weight_decay;
    };
    struct Moments {
        Tensor m, v;
    };

    AdamConfig cfg_;
    std::vector<Slot> slots_;
    std::map<std::string, Moments> state_;
    std::size_t steps_ = 0;
};

}  // namespace curvegnn::ad
