#include "curvegnn/graph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "curvegnn/common/errors.hpp"

namespace curvegnn {

WeightedGraph::WeightedGraph(std::size_t n_vertices, std::vector<Edge> edges, std::vector<std::string> names) {
    if (!names.empty() && names.size() != n_vertices) {
        throw ValidationError("graph: " + std::to_string(names.size()) + " names for " + std::to_string(n_vertices) +
                              " vertices");
    }
    for (auto& e : edges) {
        if (e.u >= n_vertices || e.v >= n_vertices) {
            throw ValidationError("graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") references a vertex outside [0," + std::to_string(n_vertices) + ")");
        }
        if (e.u == e.v) throw ValidationError("graph: self-loop at vertex " + std::to_string(e.u));
        if (!std::isfinite(e.weight) || e.weight <= 0.0) {
            throw ValidationError("graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") has non-positive weight");
        }
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v) {
            throw ValidationError("graph: duplicate edge (" + std::to_string(edges[i].u) + "," +
                                  std::to_string(edges[i].v) + ")");
        }
    }
    edges_ = std::move(edges);

    std::vector<std::size_t> counts(n_vertices, 0);
    for (const auto& e : edges_) {
        ++counts[e.u];
        ++counts[e.v];
    }
    offsets_.assign(n_vertices + 1, 0);
    for (std::size_t x = 0; x < n_vertices; ++x) offsets_[x + 1] = offsets_[x] + counts[x];
    std::size_t arcs = offsets_[n_vertices];
    adjacency_.resize(arcs);
    arc_source_.resize(arcs);
    arc_target_.resize(arcs);
    arc_edge_.resize(arcs);
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    // Edges are sorted by (u, v), so filling in edge order leaves every list sorted
    // except for the lower neighbours of u; sort afterwards for simplicity.
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        std::size_t a = cursor[e.u]++;
        adjacency_[a] = {e.v, e.weight};
        arc_edge_[a] = i;
        std::size_t b = cursor[e.v]++;
        adjacency_[b] = {e.u, e.weight};
        arc_edge_[b] = i;
    }
    for (std::size_t x = 0; x < n_vertices; ++x) {
        std::vector<std::pair<Neighbor, std::uint32_t>> slot;
        for (std::size_t a = offsets_[x]; a < offsets_[x + 1]; ++a) slot.push_back({adjacency_[a], arc_edge_[a]});
        std::sort(slot.begin(), slot.end(), [](const auto& p, const auto& q) { return p.first.id < q.first.id; });
        for (std::size_t k = 0; k < slot.size(); ++k) {
            std::size_t a = offsets_[x] + k;
            adjacency_[a] = slot[k].first;
            arc_edge_[a] = slot[k].second;
            arc_source_[a] = static_cast<VertexId>(x);
            arc_target_[a] = slot[k].first.id;
        }
    }

    if (names.empty()) {
        names.reserve(n_vertices);
        for (std::size_t x = 0; x < n_vertices; ++x) names.push_back(std::to_string(x));
    }
    names_ = std::move(names);
    for (std::size_t x = 0; x < names_.size(); ++x) {
        if (!name_index_.emplace(names_[x], static_cast<VertexId>(x)).second) {
            throw ValidationError("graph: duplicate vertex name '" + names_[x] + "'");
        }
    }
}

void WeightedGraph::check_vertex(VertexId x) const {
    if (x >= num_vertices()) {
        throw ValidationError("vertex id " + std::to_string(x) + " out of range [0," + std::to_string(num_vertices()) +
                              ")");
    }
}

std::span<const Neighbor> WeightedGraph::neighbors(VertexId x) const {
    check_vertex(x);
    return {adjacency_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
}

std::size_t WeightedGraph::degree(VertexId x) const {
    check_vertex(x);
    return offsets_[x + 1] - offsets_[x];
}

double WeightedGraph::weighted_degree(VertexId x) const {
    double d = 0.0;
    for (const auto& nb : neighbors(x)) d += nb.weight;
    return d;
}

std::size_t WeightedGraph::max_degree() const noexcept {
    std::size_t m = 0;
    for (std::size_t x = 0; x + 1 < offsets_.size(); ++x) m = std::max(m, offsets_[x + 1] - offsets_[x]);
    return m;
}

std::optional<double> WeightedGraph::weight(VertexId x, VertexId y) const {
    auto nbs = neighbors(x);
    auto it = std::lower_bound(nbs.begin(), nbs.end(), y, [](const Neighbor& n, VertexId id) { return n.id < id; });
    if (it != nbs.end() && it->id == y) return it->weight;
    return std::nullopt;
}

const std::string& WeightedGraph::name(VertexId x) const {
    check_vertex(x);
    return names_[x];
}

std::optional<VertexId> WeightedGraph::find(const std::string& name) const {
    auto it = name_index_.find(name);
    if (it == name_index_.end()) return std::nullopt;
    return it->second;
}

WeightedGraph WeightedGraph::with_weights(std::span<const double> weights) const {
    if (weights.size() != edges_.size()) {
        throw ValidationError("graph: " + std::to_string(weights.size()) + " weights for " +
                              std::to_string(edges_.size()) + " edges");
    }
    std::vector<Edge> e = edges_;
    for (std::size_t i = 0; i < e.size(); ++i) e[i].weight = weights[i];
    return WeightedGraph(num_vertices(), std::move(e), names_);
}

WeightedGraph WeightedGraph::scaled(double c) const {
    std::vector<double> w;
    w.reserve(edges_.size());
    for (const auto& e : edges_) w.push_back(c * e.weight);
    return with_weights(w);
}

std::vector<VertexId> two_ball(const WeightedGraph& g, VertexId x) {
    std::vector<VertexId> ball{x};
    std::vector<char> seen(g.num_vertices(), 0);
    seen[x] = 1;
    for (const auto& y : g.neighbors(x)) {
        ball.push_back(y.id);
        seen[y.id] = 1;
    }
    std::vector<VertexId> sphere;
    for (std::size_t i = 1; i < ball.size(); ++i) {
        for (const auto& z : g.neighbors(ball[i])) {
            if (!seen[z.id]) {
                seen[z.id] = 1;
                sphere.push_back(z.id);
            }
        }
    }
    std::sort(sphere.begin(), sphere.end());
    ball.insert(ball.end(), sphere.begin(), sphere.end());
    return ball;
}

void check_function(const WeightedGraph& g, const VertexFunction& f, const char* what) {
    if (f.size() != g.num_vertices()) {
        throw ValidationError(std::string(what) + ": length " + std::to_string(f.size()) + " does not match " +
                              std::to_string(g.num_vertices()) + " vertices");
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i])) {
            throw ValidationError(std::string(what) + ": non-finite value at vertex " + std::to_string(i));
        }
    }
}

void check_features(const WeightedGraph& g, const VertexFeatures& x) {
    if (x.rows != g.num_vertices()) {
        throw ValidationError("features: " + std::to_string(x.rows) + " rows for " +
                              std::to_string(g.num_vertices()) + " vertices");
    }
    if (x.values.size() != x.rows * x.cols) throw ValidationError("features: storage size mismatch");
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        if (!std::isfinite(x.values[i])) {
            throw ValidationError("features: non-finite entry at row " + std::to_string(i / x.cols));
        }
    }
}

WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b) {
    auto shift = static_cast<VertexId>(a.num_vertices());
    std::vector<Edge> edges = a.edges();
    for (const auto& e : b.edges()) edges.push_back({e.u + shift, e.v + shift, e.weight});
    return WeightedGraph(a.num_vertices() + b.num_vertices(), std::move(edges));
}

WeightedGraph relabel(const WeightedGraph& g, std::span<const VertexId> perm) {
    if (perm.size() != g.num_vertices()) throw ValidationError("relabel: permutation length mismatch");
    std::vector<Edge> edges;
    edges.reserve(g.num_edges());
    for (const auto& e : g.edges()) edges.push_back({perm[e.u], perm[e.v], e.weight});
    return WeightedGraph(g.num_vertices(), std::move(edges));
}

bool is_connected(const WeightedGraph& g) {
    std::size_t n = g.num_vertices();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::queue<VertexId> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
        VertexId x = q.front();
        q.pop();
        for (const auto& y : g.neighbors(x)) {
            if (!seen[y.id]) {
                seen[y.id] = 1;
                ++count;
                q.push(y.id);
            }
        }
    }
    return count == n;
}

}  // namespace curvegnn
