#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curvegnn/graph/graph.hpp"

namespace curvegnn {

/// Edge-list text: one "u v [w]" per line, whitespace separated, '#' starts
/// a comment, w defaults to 1.0. A line holding a single id declares a
/// vertex without edges. Ids are compacted to [0, n): numerically ascending
/// when every id is an integer, otherwise in order of first appearance. The
/// original tokens become vertex names.
WeightedGraph load_graph(const std::string& path);
WeightedGraph parse_graph(std::istream& in, const std::string& source = "<edge-list>");

/// Writes names and weights so that load_graph reproduces g exactly.
void save_graph(const WeightedGraph& g, const std::string& path);
void write_graph(const WeightedGraph& g, std::ostream& out);

/// CSV with a header row; first column holds vertex names, remaining columns are features.
VertexFeatures load_features(const std::string& path, const WeightedGraph& g);

/// Per-vertex labels from a CSV (vertex, label[, ...]). Vertices missing from
/// the file are marked absent.
struct VertexLabels {
    std::vector<double> values;
    std::vector<char> present;
};
VertexLabels load_labels(const std::string& path, const WeightedGraph& g, const std::string& column = "");

/// Reads a two-column (vertex, value) CSV such as curvature output.
/// `column` selects the value column by name; empty means the second column.
VertexFunction load_vertex_values(const std::string& path, const WeightedGraph* g, const std::string& column = "");

/// vertex,<value_name> CSV.
void save_vertex_values(const std::string& path, const WeightedGraph& g, const std::string& value_name,
                        const std::vector<double>& values);

}  // namespace curvegnn
