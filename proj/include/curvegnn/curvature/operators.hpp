#pragma once

#include "curvegnn/autodiff/ops.hpp"
#include "curvegnn/graph/graph.hpp"

namespace curvegnn {

/// Per-vertex values of Δf, Γ(f,h) or Γ₂(f,f).
using OperatorField = VertexFunction;

enum class Gamma2Form {
    /// ½ΔΓ(f,f) − Γ(f,Δf) with the bilinear Γ carrying its ½.
    Operator,
    /// ½ΔΓ(f,f) − Σ_y w(x,y)(f(y)−f(x))(Δf(y)−Δf(x)): the cross term without
    /// the ½. Kept only for comparison; it is not a curvature operator.
    Expanded,
};

/// Δf(x) = Σ_{y∼x} w(x,y)(f(y) − f(x)).
OperatorField laplacian(const WeightedGraph& g, const VertexFunction& f);
/// Γ(f,f)(x) = ½ Σ_{y∼x} w(x,y)(f(y) − f(x))².
OperatorField gamma(const WeightedGraph& g, const VertexFunction& f);
/// Γ(f,h)(x) = ½ Σ_{y∼x} w(x,y)(f(y) − f(x))(h(y) − h(x)).
OperatorField gamma_bilinear(const WeightedGraph& g, const VertexFunction& f, const VertexFunction& h);
/// Γ₂(f,f) = ½ΔΓ(f,f) − Γ(f,Δf).
OperatorField gamma2(const WeightedGraph& g, const VertexFunction& f, Gamma2Form form = Gamma2Form::Operator);

/// Γ(f,f)(x), the squared local gradient |∇f|²(x).
double local_gradient_sq(const WeightedGraph& g, const VertexFunction& f, VertexId x);
/// Γ₂(f,f)(x) evaluated from f on B₂(x) only, in O(Σ_{y∼x} d_y).
double gamma2_at(const WeightedGraph& g, const VertexFunction& f, VertexId x);

/// Operators on taped n×c tensors (each column is one vertex function),
/// differentiable in f and in the per-edge weights.
class TapedOperators {
public:
    /// edge_weights: num_edges × 1, aligned with g.edges().
    TapedOperators(const WeightedGraph& g, const ad::Var& edge_weights);
    /// Fixed weights taken from g.
    TapedOperators(const WeightedGraph& g, ad::Tape& tape);

    ad::Var laplacian(const ad::Var& f) const;
    ad::Var gamma(const ad::Var& f) const { return gamma_bilinear(f, f); }
    ad::Var gamma_bilinear(const ad::Var& f, const ad::Var& h) const;
    ad::Var gamma2(const ad::Var& f, Gamma2Form form = Gamma2Form::Operator) const;

    /// Γ and Γ₂ sharing the intermediate Γ(f,f).
    std::pair<ad::Var, ad::Var> gamma_and_gamma2(const ad::Var& f) const;

    const ad::Var& arc_weights() const noexcept { return arc_weights_; }

private:
    ad::Var differences(const ad::Var& f) const;

    const WeightedGraph* graph_;
    ad::Var arc_weights_;  // num_arcs × 1
};

}  // namespace curvegnn
