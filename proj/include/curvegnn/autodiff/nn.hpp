#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvegnn/autodiff/ops.hpp"
#include "curvegnn/graph/graph.hpp"

namespace curvegnn::ad {

/// Uniform(−a, a) with a = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed);

/// Affine map x·W + b with W: in×out, b: 1×out (bias optional).
struct Linear {
    Parameter weight;
    Parameter bias;
    bool has_bias = true;

    Linear() = default;
    Linear(const std::string& name, std::size_t in, std::size_t out, std::uint64_t seed, bool with_bias = true);

    std::size_t in_features() const { return weight.value.rows(); }
    std::size_t out_features() const { return weight.value.cols(); }

    Var operator()(Tape& tape, const Var& x) const;
    std::vector<Parameter*> parameters() {
        if (has_bias) return {&weight, &bias};
        return {&weight};
    }
};

/// Features as an n×d tensor.
Tensor to_tensor(const VertexFeatures& x);

/// Scalar vertex function f_θ: ℝ^d → ℝ built from affine layers with
/// sigmoid between them and a linear output. Sigmoid is the only activation
/// this type admits, so every realised function is C^∞ in inputs and
/// parameters.
class SmoothMlp {
public:
    SmoothMlp() = default;
    /// widths = [d_in, h₁, …, 1]; a two-entry list is a single affine layer.
    SmoothMlp(std::string name, std::vector<std::size_t> widths, std::uint64_t seed);

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::size_t>& widths() const noexcept { return widths_; }
    std::size_t input_dim() const { return widths_.front(); }

    /// n×d input to n×1 output, recorded on the input's tape.
    Var forward(Tape& tape, const Var& x) const;
    /// Untaped evaluation over all vertices.
    VertexFunction forward(const VertexFeatures& x) const;

    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;
    std::vector<Linear>& layers() noexcept { return layers_; }

private:
    std::string name_;
    std::vector<std::size_t> widths_;
    std::vector<Linear> layers_;
};

}  // namespace curvegnn::ad
