#include "curvegnn/graph/io.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "curvegnn/common/csv.hpp"
#include "curvegnn/common/errors.hpp"

namespace curvegnn {

namespace {

bool is_integer_token(const std::string& s) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return !s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size() && v >= 0;
}

struct RawEdge {
    std::string u, v;
    double w;
    std::size_t line;
};

}  // namespace

WeightedGraph parse_graph(std::istream& in, const std::string& source) {
    std::vector<RawEdge> raw;
    std::vector<std::string> order;  // first appearance
    std::unordered_map<std::string, std::size_t> seen;
    auto note = [&](const std::string& id) {
        if (seen.emplace(id, order.size()).second) order.push_back(id);
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string t; ss >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() > 3) throw ParseError(source, lineno, "expected 'u v [w]', found " + std::to_string(tok.size()) + " fields");
        if (tok.size() == 1) {
            note(tok[0]);
            continue;
        }
        double w = 1.0;
        if (tok.size() == 3) {
            w = parse_double(tok[2], source, lineno);
            if (!(w > 0.0) || !std::isfinite(w)) throw ParseError(source, lineno, "edge weight must be positive and finite");
        }
        if (tok[0] == tok[1]) throw ParseError(source, lineno, "self-loop at vertex '" + tok[0] + "'");
        note(tok[0]);
        note(tok[1]);
        raw.push_back({tok[0], tok[1], w, lineno});
    }

    std::vector<std::string> names = order;
    if (std::all_of(names.begin(), names.end(), is_integer_token)) {
        std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
            return std::stoull(a) < std::stoull(b);
        });
    }
    std::unordered_map<std::string, VertexId> id;
    for (std::size_t i = 0; i < names.size(); ++i) id[names[i]] = static_cast<VertexId>(i);

    std::unordered_map<std::uint64_t, std::pair<double, std::size_t>> first_seen;
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (const auto& r : raw) {
        VertexId a = id[r.u], b = id[r.v];
        if (a > b) std::swap(a, b);
        std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
        auto [it, inserted] = first_seen.emplace(key, std::make_pair(r.w, r.line));
        if (!inserted) {
            if (it->second.first != r.w) {
                throw ParseError(source, r.line,
                                 "edge (" + r.u + "," + r.v + ") repeats line " + std::to_string(it->second.second) +
                                     " with a conflicting weight");
            }
            throw ParseError(source, r.line,
                             "duplicate edge (" + r.u + "," + r.v + "), first given on line " +
                                 std::to_string(it->second.second));
        }
        edges.push_back({a, b, r.w});
    }
    const std::size_t n = names.size();
    return WeightedGraph(n, std::move(edges), std::move(names));
}

WeightedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open graph file '" + path + "'");
    return parse_graph(in, path);
}

void write_graph(const WeightedGraph& g, std::ostream& out) {
    out << "# vertices " << g.num_vertices() << " edges " << g.num_edges() << "\n";
    // Declare every vertex first so isolated ones survive and the compaction order is kept.
    bool integer_names = std::all_of(g.names().begin(), g.names().end(), is_integer_token);
    bool sorted = true;
    if (integer_names) {
        for (std::size_t i = 1; i < g.num_vertices(); ++i) {
            if (std::stoull(g.names()[i - 1]) >= std::stoull(g.names()[i])) sorted = false;
        }
    }
    if (!integer_names || !sorted) {
        // Order of first appearance must match ids; declare all vertices up front.
        for (std::size_t x = 0; x < g.num_vertices(); ++x) out << g.name(static_cast<VertexId>(x)) << "\n";
    } else {
        for (std::size_t x = 0; x < g.num_vertices(); ++x) {
            if (g.degree(static_cast<VertexId>(x)) == 0) out << g.name(static_cast<VertexId>(x)) << "\n";
        }
    }
    for (const auto& e : g.edges()) {
        out << g.name(e.u) << ' ' << g.name(e.v) << ' ' << format_double(e.weight) << "\n";
    }
}

void save_graph(const WeightedGraph& g, const std::string& path) {
    std::ostringstream ss;
    write_graph(g, ss);
    write_text_file(path, ss.str());
}

namespace {

VertexId lookup_vertex(const WeightedGraph& g, const std::string& name, const std::string& source, std::size_t line) {
    auto v = g.find(name);
    if (!v) throw ParseError(source, line, "unknown vertex '" + name + "'");
    return *v;
}

}  // namespace

VertexFeatures load_features(const std::string& path, const WeightedGraph& g) {
    CsvTable t = read_csv(path);
    if (t.header.size() < 2) throw ValidationError(path + ": features need a vertex column and at least one feature");
    VertexFeatures x(g.num_vertices(), t.header.size() - 1);
    x.column_names.assign(t.header.begin() + 1, t.header.end());
    std::vector<char> filled(g.num_vertices(), 0);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::size_t line = t.line_numbers[r];
        VertexId v = lookup_vertex(g, t.rows[r][0], path, line);
        if (filled[v]) throw ParseError(path, line, "vertex '" + t.rows[r][0] + "' listed twice");
        filled[v] = 1;
        for (std::size_t c = 1; c < t.header.size(); ++c) x(v, c - 1) = parse_double(t.rows[r][c], path, line);
    }
    for (std::size_t v = 0; v < filled.size(); ++v) {
        if (!filled[v]) throw ValidationError(path + ": no feature row for vertex '" + g.name(static_cast<VertexId>(v)) + "'");
    }
    check_features(g, x);
    return x;
}

VertexLabels load_labels(const std::string& path, const WeightedGraph& g, const std::string& column) {
    CsvTable t = read_csv(path);
    if (t.header.size() < 2) throw ValidationError(path + ": labels need a vertex column and a label column");
    std::size_t col = column.empty() ? 1 : t.column(column);
    VertexLabels out;
    out.values.assign(g.num_vertices(), 0.0);
    out.present.assign(g.num_vertices(), 0);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::size_t line = t.line_numbers[r];
        VertexId v = lookup_vertex(g, t.rows[r][0], path, line);
        if (out.present[v]) throw ParseError(path, line, "vertex '" + t.rows[r][0] + "' listed twice");
        out.values[v] = parse_double(t.rows[r][col], path, line);
        out.present[v] = 1;
    }
    return out;
}

VertexFunction load_vertex_values(const std::string& path, const WeightedGraph* g, const std::string& column) {
    CsvTable t = read_csv(path);
    if (t.header.size() < 2) throw ValidationError(path + ": need a vertex column and a value column");
    std::size_t col = column.empty() ? 1 : t.column(column);
    std::size_t n = g ? g->num_vertices() : t.rows.size();
    VertexFunction f(std::vector<double>(n, 0.0));
    std::vector<char> filled(n, 0);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::size_t line = t.line_numbers[r];
        std::size_t v = 0;
        if (g) {
            v = lookup_vertex(*g, t.rows[r][0], path, line);
        } else {
            long long id = parse_int(t.rows[r][0], path, line);
            if (id < 0 || static_cast<std::size_t>(id) >= n) {
                throw ParseError(path, line, "vertex id " + t.rows[r][0] + " outside [0," + std::to_string(n) + ")");
            }
            v = static_cast<std::size_t>(id);
        }
        if (filled[v]) throw ParseError(path, line, "vertex '" + t.rows[r][0] + "' listed twice");
        filled[v] = 1;
        f[v] = parse_double(t.rows[r][col], path, line);
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (!filled[v]) throw ValidationError(path + ": no value for vertex " + std::to_string(v));
    }
    return f;
}

void save_vertex_values(const std::string& path, const WeightedGraph& g, const std::string& value_name,
                        const std::vector<double>& values) {
    std::ostringstream ss;
    ss << "vertex," << value_name << "\n";
    for (std::size_t x = 0; x < values.size(); ++x) {
        ss << g.name(static_cast<VertexId>(x)) << ',' << format_double(values[x]) << "\n";
    }
    write_text_file(path, ss.str());
}

}  // namespace curvegnn
