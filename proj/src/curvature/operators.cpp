#include "curvegnn/curvature/operators.hpp"

#include "curvegnn/common/errors.hpp"

namespace curvegnn {

namespace {

void check_lengths(const WeightedGraph& g, const VertexFunction& f) {
    if (f.size() != g.num_vertices()) {
        throw ValidationError("operator: function length " + std::to_string(f.size()) + " does not match " +
                              std::to_string(g.num_vertices()) + " vertices");
    }
}

}  // namespace

OperatorField laplacian(const WeightedGraph& g, const VertexFunction& f) {
    check_lengths(g, f);
    OperatorField out(std::vector<double>(f.size(), 0.0));
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
        double s = 0.0;
        for (const auto& y : g.neighbors(x)) s += y.weight * (f[y.id] - f[x]);
        out[x] = s;
    }
    return out;
}

OperatorField gamma_bilinear(const WeightedGraph& g, const VertexFunction& f, const VertexFunction& h) {
    check_lengths(g, f);
    check_lengths(g, h);
    OperatorField out(std::vector<double>(f.size(), 0.0));
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
        double s = 0.0;
        for (const auto& y : g.neighbors(x)) s += y.weight * (f[y.id] - f[x]) * (h[y.id] - h[x]);
        out[x] = 0.5 * s;
    }
    return out;
}

OperatorField gamma(const WeightedGraph& g, const VertexFunction& f) { return gamma_bilinear(g, f, f); }

OperatorField gamma2(const WeightedGraph& g, const VertexFunction& f, Gamma2Form form) {
    OperatorField grad_sq = gamma(g, f);
    OperatorField lap_grad = laplacian(g, grad_sq);
    OperatorField cross = gamma_bilinear(g, f, laplacian(g, f));
    double cross_factor = form == Gamma2Form::Operator ? 1.0 : 2.0;
    OperatorField out(std::vector<double>(f.size(), 0.0));
    for (std::size_t x = 0; x < f.size(); ++x) out[x] = 0.5 * lap_grad[x] - cross_factor * cross[x];
    return out;
}

double local_gradient_sq(const WeightedGraph& g, const VertexFunction& f, VertexId x) {
    check_lengths(g, f);
    double s = 0.0;
    for (const auto& y : g.neighbors(x)) s += y.weight * (f[y.id] - f[x]) * (f[y.id] - f[x]);
    return 0.5 * s;
}

double gamma2_at(const WeightedGraph& g, const VertexFunction& f, VertexId x) {
    check_lengths(g, f);
    auto local = [&](VertexId v, double& lap, double& grad_sq) {
        lap = 0.0;
        grad_sq = 0.0;
        for (const auto& z : g.neighbors(v)) {
            double d = f[z.id] - f[v];
            lap += z.weight * d;
            grad_sq += z.weight * d * d;
        }
        grad_sq *= 0.5;
    };
    double lap_x = 0.0, grad_x = 0.0;
    local(x, lap_x, grad_x);
    double transport = 0.0, cross = 0.0;
    for (const auto& y : g.neighbors(x)) {
        double lap_y = 0.0, grad_y = 0.0;
        local(y.id, lap_y, grad_y);
        transport += y.weight * (grad_y - grad_x);
        cross += y.weight * (f[y.id] - f[x]) * (lap_y - lap_x);
    }
    return 0.5 * transport - 0.5 * cross;
}

TapedOperators::TapedOperators(const WeightedGraph& g, const ad::Var& edge_weights) : graph_(&g) {
    if (edge_weights.rows() != g.num_edges() || edge_weights.cols() != 1) {
        throw ValidationError("TapedOperators: edge weights must be num_edges × 1");
    }
    arc_weights_ = ad::gather_rows(edge_weights, g.arc_edge());
}

TapedOperators::TapedOperators(const WeightedGraph& g, ad::Tape& tape) : graph_(&g) {
    std::vector<double> w(g.num_arcs());
    auto edge = g.arc_edge();
    for (std::size_t a = 0; a < w.size(); ++a) w[a] = g.edges()[edge[a]].weight;
    arc_weights_ = tape.constant(ad::Tensor::column(std::move(w)));
}

ad::Var TapedOperators::differences(const ad::Var& f) const {
    if (f.rows() != graph_->num_vertices()) {
        throw ValidationError("operator: function length " + std::to_string(f.rows()) + " does not match " +
                              std::to_string(graph_->num_vertices()) + " vertices");
    }
    return ad::sub(ad::gather_rows(f, graph_->arc_target()), ad::gather_rows(f, graph_->arc_source()));
}

ad::Var TapedOperators::laplacian(const ad::Var& f) const {
    return ad::scatter_add_rows(ad::mul(arc_weights_, differences(f)), graph_->arc_source(), graph_->num_vertices());
}

ad::Var TapedOperators::gamma_bilinear(const ad::Var& f, const ad::Var& h) const {
    ad::Var df = differences(f);
    ad::Var dh = f.id() == h.id() ? df : differences(h);
    ad::Var prod = ad::mul(arc_weights_, ad::mul(df, dh));
    return ad::scale(ad::scatter_add_rows(prod, graph_->arc_source(), graph_->num_vertices()), 0.5);
}

std::pair<ad::Var, ad::Var> TapedOperators::gamma_and_gamma2(const ad::Var& f) const {
    ad::Var grad_sq = gamma(f);
    ad::Var cross = gamma_bilinear(f, laplacian(f));
    ad::Var g2 = ad::sub(ad::scale(laplacian(grad_sq), 0.5), cross);
    return {grad_sq, g2};
}

ad::Var TapedOperators::gamma2(const ad::Var& f, Gamma2Form form) const {
    ad::Var grad_sq = gamma(f);
    ad::Var cross = gamma_bilinear(f, laplacian(f));
    double factor = form == Gamma2Form::Operator ? 1.0 : 2.0;
    return ad::sub(ad::scale(laplacian(grad_sq), 0.5), ad::scale(cross, factor));
}

}  // namespace curvegnn
