#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace curvegnn {

using VertexId = std::uint32_t;

struct Neighbor {
    VertexId id;
    double weight;

    bool operator==(const Neighbor&) const = default;
};

/// Undirected edge stored with u < v.
struct Edge {
    VertexId u;
    VertexId v;
    double weight;

    bool operator==(const Edge&) const = default;
};

/// Immutable undirected graph with strictly positive edge weights.
///
/// Adjacency is held in CSR form with each neighbor list sorted by id. Every
/// CSR slot ("arc") is a directed view x -> y of one undirected edge; the
/// arc arrays let vectorised operators gather and scatter over all arcs at
/// once.
class WeightedGraph {
public:
    WeightedGraph() = default;

    /// Validates and builds the graph. Edges may be given in either
    /// orientation; self-loops, non-positive or non-finite weights,
    /// out-of-range ids and duplicate edges are rejected.
    WeightedGraph(std::size_t n_vertices, std::vector<Edge> edges, std::vector<std::string> names = {});

    std::size_t num_vertices() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    std::size_t num_arcs() const noexcept { return arc_target_.size(); }

    /// Edges in canonical (u, v) ascending order.
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    std::span<const Neighbor> neighbors(VertexId x) const;
    std::size_t degree(VertexId x) const;
    double weighted_degree(VertexId x) const;
    std::size_t max_degree() const noexcept;

    /// Weight of edge {x, y}, or nullopt when not adjacent.
    std::optional<double> weight(VertexId x, VertexId y) const;

    // Arc arrays, ordered by (source, target). arc_edge maps to edges().
    std::span<const VertexId> arc_source() const noexcept { return arc_source_; }
    std::span<const VertexId> arc_target() const noexcept { return arc_target_; }
    std::span<const std::uint32_t> arc_edge() const noexcept { return arc_edge_; }
    std::span<const std::size_t> offsets() const noexcept { return offsets_; }

    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(VertexId x) const;
    /// Vertex id for a label; nullopt when unknown.
    std::optional<VertexId> find(const std::string& name) const;

    /// Same topology and names with new per-edge weights (aligned with edges()).
    WeightedGraph with_weights(std::span<const double> weights) const;
    /// Every weight multiplied by c > 0.
    WeightedGraph scaled(double c) const;

    bool operator==(const WeightedGraph& other) const { return edges_ == other.edges_ && num_vertices() == other.num_vertices(); }

private:
    void check_vertex(VertexId x) const;

    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adjacency_;
    std::vector<VertexId> arc_source_;
    std::vector<VertexId> arc_target_;
    std::vector<std::uint32_t> arc_edge_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, VertexId> name_index_;
};

/// {x} ∪ N(x) ∪ N(N(x)) ordered as: x, N(x) ascending, 2-sphere ascending.
std::vector<VertexId> two_ball(const WeightedGraph& g, VertexId x);

/// Number of vertices of B₂(x) that are x or its neighbours (prefix length of two_ball).
inline std::size_t one_ball_size(const WeightedGraph& g, VertexId x) { return 1 + g.degree(x); }

/// Real function on the vertices.
struct VertexFunction {
    std::vector<double> values;

    VertexFunction() = default;
    explicit VertexFunction(std::vector<double> v) : values(std::move(v)) {}
    VertexFunction(std::initializer_list<double> v) : values(v) {}

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// n × d feature matrix, row-major.
struct VertexFeatures {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<std::string> column_names;

    VertexFeatures() = default;
    VertexFeatures(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

/// Throws ValidationError unless f has g's vertex count and finite entries.
void check_function(const WeightedGraph& g, const VertexFunction& f, const char* what = "function");
void check_features(const WeightedGraph& g, const VertexFeatures& x);

/// Disjoint union; vertices of b are shifted by a.num_vertices().
WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b);

/// Graph with vertex v renamed to perm[v].
WeightedGraph relabel(const WeightedGraph& g, std::span<const VertexId> perm);

bool is_connected(const WeightedGraph& g);

}  // namespace curvegnn
