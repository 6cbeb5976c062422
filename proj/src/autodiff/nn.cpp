#include "curvegnn/autodiff/nn.hpp"

#include <cmath>
#include <random>

#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/rng.hpp"

namespace curvegnn::ad {

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed) {
    double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Rng rng(seed);
    Tensor w(fan_in, fan_out);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = a * (2.0 * uniform01(rng) - 1.0);
    return w;
}

Linear::Linear(const std::string& name, std::size_t in, std::size_t out, std::uint64_t seed, bool with_bias)
    : weight{name + ".weight", glorot_uniform(in, out, derive_seed(seed, name + ".weight"))},
      bias{name + ".bias", Tensor(1, out, 0.0)},
      has_bias(with_bias) {}

Var Linear::operator()(Tape& tape, const Var& x) const {
    if (x.cols() != in_features()) {
        throw ValidationError(weight.name + ": input width " + std::to_string(x.cols()) + " != " +
                              std::to_string(in_features()));
    }
    Var y = matmul(x, tape.parameter(weight));
    return has_bias ? add(y, tape.parameter(bias)) : y;
}

Tensor to_tensor(const VertexFeatures& x) { return Tensor::matrix(x.rows, x.cols, x.values); }

SmoothMlp::SmoothMlp(std::string name, std::vector<std::size_t> widths, std::uint64_t seed)
    : name_(std::move(name)), widths_(std::move(widths)) {
    if (widths_.size() < 2) throw ValidationError("SmoothMlp: need at least input and output widths");
    if (widths_.back() != 1) throw ValidationError("SmoothMlp: output width must be 1");
    for (auto w : widths_) {
        if (w == 0) throw ValidationError("SmoothMlp: zero layer width");
    }
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        layers_.emplace_back(name_ + ".layer" + std::to_string(l), widths_[l], widths_[l + 1], seed);
    }
}

Var SmoothMlp::forward(Tape& tape, const Var& x) const {
    if (x.cols() != input_dim()) {
        throw ValidationError(name_ + ": feature dimension " + std::to_string(x.cols()) + " != input width " +
                              std::to_string(input_dim()));
    }
    Var h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        h = layers_[l](tape, h);
        if (l + 1 < layers_.size()) h = sigmoid(h);
    }
    return h;
}

VertexFunction SmoothMlp::forward(const VertexFeatures& x) const {
    Tape tape;
    Var out = forward(tape, tape.constant(to_tensor(x)));
    return VertexFunction(out.value().values());
}

std::vector<Parameter*> SmoothMlp::parameters() {
    std::vector<Parameter*> out;
    for (auto& l : layers_) {
        for (auto* p : l.parameters()) out.push_back(p);
    }
    return out;
}

std::vector<const Parameter*> SmoothMlp::parameters() const {
    std::vector<const Parameter*> out;
    for (const auto& l : layers_) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

}  // namespace curvegnn::ad
