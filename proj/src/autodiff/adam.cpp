#include "curvegnn/autodiff/adam.hpp"

#include <cmath>

#include "curvegnn/common/errors.hpp"

namespace curvegnn::ad {

void Adam::add_group(std::span<Parameter* const> params, double weight_decay) {
    for (Parameter* p : params) {
        if (state_.count(p->name)) throw ValidationError("adam: parameter '" + p->name + "' registered twice");
        slots_.push_back({p, weight_decay});
        Tensor zeros(p->value.shape(), std::vector<double>(p->value.size(), 0.0));
        state_[p->name] = {zeros, zeros};
    }
}

void Adam::step(const Gradients& grads) {
    for (const auto& s : slots_) {
        if (!grads.contains(*s.param)) continue;
        const Tensor& g = grads.at(*s.param);
        if (!g.same_shape(s.param->value)) {
            throw ValidationError("adam: gradient shape " + g.shape_string() + " for parameter '" + s.param->name +
                                  "' of shape " + s.param->value.shape_string());
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!std::isfinite(g[i])) {
                throw NumericalError("adam: non-finite gradient in parameter '" + s.param->name + "' at index " +
                                     std::to_string(i));
            }
        }
    }
    ++steps_;
    double t = static_cast<double>(steps_);
    double bc1 = 1.0 - std::pow(cfg_.beta1, t);
    double bc2 = 1.0 - std::pow(cfg_.beta2, t);
    for (const auto& s : slots_) {
        Tensor& theta = s.param->value;
        Moments& mom = state_.at(s.param->name);
        const Tensor* g = grads.contains(*s.param) ? &grads.at(*s.param) : nullptr;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            double gi = g ? (*g)[i] : 0.0;
            mom.m[i] = cfg_.beta1 * mom.m[i] + (1.0 - cfg_.beta1) * gi;
            mom.v[i] = cfg_.beta2 * mom.v[i] + (1.0 - cfg_.beta2) * gi * gi;
            double mhat = mom.m[i] / bc1;
            double vhat = mom.v[i] / bc2;
            theta[i] *= 1.0 - cfg_.learning_rate * s.weight_decay;
            theta[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
        }
    }
}

}  // namespace curvegnn::ad
