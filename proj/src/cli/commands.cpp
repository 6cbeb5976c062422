#include "curvegnn/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "curvegnn/autodiff/checkpoint.hpp"
#include "curvegnn/cli/config.hpp"
#include "curvegnn/cli/manifest.hpp"
#include "curvegnn/cli/report.hpp"
#include "curvegnn/common/csv.hpp"
#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/parallel.hpp"
#include "curvegnn/common/rng.hpp"
#include "curvegnn/curvature/exact.hpp"
#include "curvegnn/curvature/learn.hpp"
#include "curvegnn/dynamics/heat.hpp"
#include "curvegnn/dynamics/influence.hpp"
#include "curvegnn/gnn/train.hpp"
#include "curvegnn/graph/generators.hpp"
#include "curvegnn/graph/io.hpp"
#include "json.hpp"

namespace curvegnn::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kDefaultFeatureDim = 8;

/// One leaf command: its CLI11 app, the option values it fills and the
/// function that runs it.
struct Command {
    CLI::App* app = nullptr;
    std::string name;
    std::string config_path;
    std::function<void(Command&)> handler;
    std::vector<std::string> args;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;

    Manifest manifest() const {
        Manifest m;
        m.command = name;
        m.argv = args;
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_lnames().empty()) continue;
            const std::string key = opt->get_lnames().front();
            if (key == "help") continue;
            std::string value;
            if (opt->count() > 0) {
                for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
            } else {
                value = opt->get_default_str();
            }
            m.config[key] = value;
        }
        return m;
    }
};

void require(const std::string& value, const std::string& key) {
    if (value.empty()) throw ValidationError("missing required option --" + key);
}

std::size_t resolve_workers(std::size_t flag) { return flag > 0 ? flag : default_workers(); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

void add_config_option(Command& c) {
    c.app->add_option("--config", c.config_path, "key=value file; command-line flags take precedence");
}

VertexFeatures features_or_default(const WeightedGraph& g, const std::string& path, std::size_t dim,
                                   std::uint64_t seed) {
    if (!path.empty()) return load_features(path, g);
    return gaussian_features(g.num_vertices(), dim, derive_seed(seed, "features"));
}

void write_manifest_for(const Command& c, const std::string& path, std::vector<std::string> inputs,
                        std::vector<std::string> outputs) {
    Manifest m = c.manifest();
    inputs.erase(std::remove(inputs.begin(), inputs.end(), std::string()), inputs.end());
    m.inputs = std::move(inputs);
    m.outputs = std::move(outputs);
    write_manifest(path, m);
}

std::string vertex_csv(const WeightedGraph& g, const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& values) {
    std::ostringstream s;
    s << "vertex";
    for (const auto& c : columns) s << ',' << c;
    s << '\n';
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
        s << g.name(x);
        for (const auto& col : values) s << ',' << col[x];
        s << '\n';
    }
    return s.str();
}

std::vector<std::string> formatted(const std::vector<double>& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (double d : v) out.push_back(format_double(d));
    return out;
}

std::string edge_weight_csv(const WeightedGraph& g, const std::vector<double>& w) {
    std::ostringstream s;
    s << "u,v,weight\n";
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        s << g.name(g.edges()[e].u) << ',' << g.name(g.edges()[e].v) << ',' << format_double(w[e]) << '\n';
    }
    return s.str();
}

std::string sidecar(const std::string& out_file, const std::string& suffix) {
    fs::path p(out_file);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

void check_k(double k) {
    if (!(k > 0.0 && k <= 100.0)) throw ValidationError("k must lie in (0,100]");
}

void check_lambda(double lambda) {
    if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
}

std::vector<VertexId> vertex_list(const WeightedGraph& g, const std::string& path) {
    CsvTable t = read_csv(path);
    std::vector<VertexId> ids;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto id = g.find(t.rows[r][0]);
        if (!id) throw ParseError(path, t.line_numbers[r], "unknown vertex '" + t.rows[r][0] + "'");
        ids.push_back(*id);
    }
    return ids;
}

// ---- curvature -----------------------------------------------------------

struct CurvatureExactOpts {
    std::string graph, out, method = "exact";
    std::size_t samples = 100000, workers = 0;
    std::uint64_t seed = 0;
};

void curvature_exact(Command& c, const CurvatureExactOpts& o) {
    require(o.graph, "graph");
    require(o.out, "out");
    WeightedGraph g = load_graph(o.graph);
    CurvatureEstimate est;
    if (o.method == "exact") {
        est = exact_curvature_all(g, resolve_workers(o.workers));
    } else if (o.method == "sampled") {
        if (o.samples == 0) throw ValidationError("samples must be >= 1");
        est = sampled_curvature_all(g, o.samples, o.seed, resolve_workers(o.workers));
    } else {
        throw ValidationError("unknown method '" + o.method + "' (exact|sampled)");
    }
    std::vector<std::string> prov(g.num_vertices(), to_string(est.provenance));
    write_text_file(o.out, vertex_csv(g, {"kappa", "provenance"}, {formatted(est.kappa), prov}));
    write_manifest_for(c, o.out + ".manifest.json", {o.graph}, {o.out});
    std::size_t unbounded = 0;
    for (double k : est.kappa) unbounded += std::isinf(k) ? 1 : 0;
    *c.out << "wrote " << g.num_vertices() << " curvature values to " << o.out;
    if (unbounded > 0) *c.out << " (" << unbounded << " unbounded below, written as -inf)";
    *c.out << '\n';
}

struct CurvatureLearnOpts {
    std::string graph, features, out, mode = "transductive";
    std::size_t n_functions = 3, epochs = 2000, feature_dim = kDefaultFeatureDim;
    std::vector<std::size_t> hidden{16};
    double lambda = 1.0, lr = 0.01, initial_kappa = 0.0;
    bool learn_weights = false;
    std::uint64_t seed = 0;
};

KappaMode parse_kappa_mode(const std::string& s) {
    if (s == "transductive") return KappaMode::Transductive;
    if (s == "inductive") return KappaMode::Inductive;
    throw ValidationError("unknown kappa mode '" + s + "' (transductive|inductive)");
}

void curvature_learn(Command& c, const CurvatureLearnOpts& o) {
    require(o.graph, "graph");
    require(o.out, "out");
    check_lambda(o.lambda);
    if (o.n_functions == 0) throw ValidationError("N must be >= 1 for curvature estimation");
    if (o.epochs == 0) throw ValidationError("epochs must be positive");
    if (!(o.lr > 0.0)) throw ValidationError("lr must be positive");
    WeightedGraph g = load_graph(o.graph);
    VertexFeatures x = features_or_default(g, o.features, o.feature_dim, o.seed);
    CurvatureLearnConfig cfg;
    cfg.n_functions = o.n_functions;
    cfg.lambda = o.lambda;
    cfg.epochs = o.epochs;
    cfg.learning_rate = o.lr;
    cfg.seed = o.seed;
    cfg.hidden = o.hidden;
    cfg.mode = parse_kappa_mode(o.mode);
    cfg.learn_edge_weights = o.learn_weights;
    cfg.initial_kappa = o.initial_kappa;
    CurvatureLearnResult r = estimate_curvature(g, x, cfg);
    std::vector<std::string> prov(g.num_vertices(), to_string(r.estimate.provenance));
    write_text_file(o.out, vertex_csv(g, {"kappa_hat", "provenance"}, {formatted(r.estimate.kappa), prov}));
    const std::string weights = sidecar(o.out, ".weights.csv");
    write_text_file(weights, edge_weight_csv(g, r.edge_weights));
    write_manifest_for(c, o.out + ".manifest.json", {o.graph, o.features}, {o.out, weights});
    *c.out << "wrote learned curvature for " << g.num_vertices() << " vertices to " << o.out << " (final loss "
           << format_double(r.loss_history.back()) << ")\n";
}

// ---- depth-assign --------------------------------------------------------

struct DepthOpts {
    std::string kappa, out, schedule = "fixed", column;
    double k = 20.0;
    std::size_t layers = 0;
    std::uint64_t seed = 0;
};

void depth_assign(Command& c, const DepthOpts& o) {
    require(o.kappa, "kappa");
    require(o.out, "out");
    check_k(o.k);
    CsvTable t = read_csv(o.kappa);
    std::size_t col = 1;
    if (!o.column.empty()) {
        col = t.column(o.column);
    } else if (t.has_column("kappa")) {
        col = t.column("kappa");
    } else if (t.has_column("kappa_hat")) {
        col = t.column("kappa_hat");
    }
    if (t.header.size() < 2) throw ValidationError(o.kappa + ": expected a vertex column and a curvature column");
    std::vector<double> kappa;
    std::vector<std::string> names;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        names.push_back(t.rows[r][0]);
        kappa.push_back(parse_double(t.rows[r].at(col), o.kappa, t.line_numbers[r]));
        if (std::isnan(kappa.back())) throw ParseError(o.kappa, t.line_numbers[r], "curvature is NaN");
    }
    if (kappa.empty()) throw ValidationError(o.kappa + ": no curvature values (empty graph)");
    std::size_t depth_cap = o.layers > 0 ? o.layers : saturating_depth(o.k);
    auto ks = layer_thresholds(parse_schedule(o.schedule), o.k, depth_cap, derive_seed(o.seed, "schedule"));
    DepthAssignment d = assign_depths(kappa, ks, depth_cap);
    std::ostringstream s;
    s << "vertex,kappa,T\n";
    for (std::size_t i = 0; i < kappa.size(); ++i) s << names[i] << ',' << format_double(kappa[i]) << ',' << d.depth[i] << '\n';
    write_text_file(o.out, s.str());
    write_manifest_for(c, o.out + ".manifest.json", {o.kappa}, {o.out});
    *c.out << "assigned depths 1.." << d.max() << " to " << kappa.size() << " vertices (L = " << depth_cap << ")\n";
}

// ---- train ---------------------------------------------------------------

struct TrainOpts {
    std::string task = "node-class", graph, features, labels, label_column, membership, out;
    std::string aggregator = "gcn-mean", schedule = "fixed", kappa_mode = "transductive";
    std::size_t epochs = 200, n_functions = 3, layers = 3, hidden = 32, depth_refresh = 1;
    std::size_t feature_dim = kDefaultFeatureDim, classes = 0;
    std::vector<std::size_t> family_hidden{16};
    double lr = 0.01, weight_decay = 5e-4, k = 20.0, lambda = 1.0, dt = 1.0;
    double train_fraction = 0.48, val_fraction = 0.32;
    bool learn_weights = true, train_family = true;
    std::uint64_t seed = 0;
    std::vector<std::string> sweep_L, sweep_k, sweep_N;
};

TrainConfig train_config(const TrainOpts& o) {
    TrainConfig cfg;
    cfg.task = parse_task(o.task);
    cfg.epochs = o.epochs;
    cfg.learning_rate = o.lr;
    cfg.weight_decay = o.weight_decay;
    cfg.seed = o.seed;
    cfg.k = o.k;
    cfg.n_functions = o.n_functions;
    cfg.lambda = o.lambda;
    cfg.layers = o.layers;
    cfg.hidden = o.hidden;
    cfg.family_hidden = o.family_hidden;
    cfg.aggregator = parse_aggregator(o.aggregator);
    cfg.schedule = parse_schedule(o.schedule);
    cfg.depth_refresh = o.depth_refresh;
    cfg.dt = o.dt;
    cfg.kappa_mode = parse_kappa_mode(o.kappa_mode);
    cfg.train_family = o.train_family;
    cfg.learn_edge_weights = o.learn_weights;
    cfg.train_fraction = o.train_fraction;
    cfg.val_fraction = o.val_fraction;
    cfg.classes = o.classes;
    check_k(cfg.k);
    check_lambda(cfg.lambda);
    cfg.validate();
    return cfg;
}

TrainData load_train_data(const WeightedGraph& g, const TrainOpts& o, Task task) {
    TrainData d;
    d.graph = &g;
    d.features = features_or_default(g, o.features, o.feature_dim, o.seed);
    if (!is_graph_level(task)) {
        VertexLabels labels = load_labels(o.labels, g, o.label_column);
        d.targets = labels.values;
        d.labeled = labels.present;
        return d;
    }
    require(o.membership, "membership");
    // membership: vertex,graph ; labels: graph,label
    CsvTable m = read_csv(o.membership);
    std::map<std::string, std::uint32_t> graph_ids;
    std::vector<std::string> graph_names;
    d.membership.assign(g.num_vertices(), 0);
    std::vector<char> assigned(g.num_vertices(), 0);
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        if (m.rows[r].size() < 2) throw ParseError(o.membership, m.line_numbers[r], "expected vertex,graph");
        auto v = g.find(m.rows[r][0]);
        if (!v) throw ParseError(o.membership, m.line_numbers[r], "unknown vertex '" + m.rows[r][0] + "'");
        auto [it, fresh] = graph_ids.emplace(m.rows[r][1], static_cast<std::uint32_t>(graph_names.size()));
        if (fresh) graph_names.push_back(m.rows[r][1]);
        d.membership[*v] = it->second;
        assigned[*v] = 1;
    }
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        if (!assigned[v]) throw ValidationError(o.membership + ": vertex '" + g.name(v) + "' has no graph");
    }
    d.n_graphs = graph_names.size();
    d.targets.assign(d.n_graphs, 0.0);
    d.labeled.assign(d.n_graphs, 0);
    CsvTable l = read_csv(o.labels);
    std::size_t col = o.label_column.empty() ? 1 : l.column(o.label_column);
    for (std::size_t r = 0; r < l.rows.size(); ++r) {
        auto it = graph_ids.find(l.rows[r][0]);
        if (it == graph_ids.end()) throw ParseError(o.labels, l.line_numbers[r], "unknown graph '" + l.rows[r][0] + "'");
        d.targets[it->second] = parse_double(l.rows[r].at(col), o.labels, l.line_numbers[r]);
        d.labeled[it->second] = 1;
    }
    return d;
}

std::vector<std::string> write_train_outputs(const std::string& dir, const WeightedGraph& g, TrainResult& r,
                                             const TrainConfig& cfg) {
    ensure_dir(dir);
    std::ostringstream h;
    h << "epoch,L_task,L_curv,metric,val_metric,test_metric,mean_depth\n";
    for (const auto& e : r.history) {
        h << e.epoch << ',' << format_double(e.task_loss) << ',' << format_double(e.curv_loss) << ','
          << format_double(e.train_metric) << ',' << format_double(e.val_metric) << ','
          << format_double(e.test_metric) << ',' << format_double(e.mean_depth) << '\n';
    }
    std::ostringstream d;
    d << "vertex,kappa_hat,T\n";
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
        d << g.name(x) << ',' << format_double(r.kappa_hat[x]) << ',' << r.depths.depth[x] << '\n';
    }
    const auto history = join_path(dir, "history.csv");
    const auto depths = join_path(dir, "depths.csv");
    const auto weights = join_path(dir, "weights.csv");
    const auto checkpoint = join_path(dir, "checkpoint.json");
    const auto summary = join_path(dir, "summary.json");
    write_text_file(history, h.str());
    write_text_file(depths, d.str());
    write_text_file(weights, edge_weight_csv(g, r.edge_weights));

    std::vector<const ad::Parameter*> params;
    for (auto* p : r.model.parameters()) params.push_back(p);
    for (auto* p : r.family.parameters()) params.push_back(p);
    for (auto* p : r.curvature.parameters()) params.push_back(p);
    ad::save_checkpoint(checkpoint, params);

    const auto& last = r.history.back();
    Json s;
    s["task"] = to_string(cfg.task);
    s["epochs"] = r.history.size();
    s["final_metric"] = last.train_metric;
    s["final_val_metric"] = last.val_metric;
    s["final_test_metric"] = last.test_metric;
    s["metric"] = task_kind(cfg.task) == TaskKind::Classification ? "accuracy" : "mse";
    s["layer_thresholds"] = r.layer_k;
    s["max_depth_used"] = r.depths.max();
    s["warnings"] = r.warnings;
    write_text_file(summary, s.dump(2) + "\n");
    return {history, depths, weights, checkpoint, summary};
}

void train_command(Command& c, const TrainOpts& o) {
    require(o.graph, "graph");
    require(o.labels, "labels");
    require(o.out, "out");
    TrainConfig base = train_config(o);
    WeightedGraph g = load_graph(o.graph);
    TrainData data = load_train_data(g, o, base.task);
    std::vector<std::string> inputs{o.graph, o.features, o.labels, o.membership, c.config_path};

    int sweeps = !o.sweep_L.empty() + !o.sweep_k.empty() + !o.sweep_N.empty();
    if (sweeps > 1) throw ValidationError("only one of --sweep-L, --sweep-k, --sweep-N may be given");
    if (sweeps == 0) {
        TrainResult r = train(data, base);
        for (const auto& w : r.warnings) *c.err << "warning: " << w << '\n';
        auto outputs = write_train_outputs(o.out, g, r, base);
        write_manifest_for(c, join_path(o.out, "manifest.json"), inputs, outputs);
        *c.out << "trained " << r.history.size() << " epochs; final train metric "
               << format_double(r.history.back().train_metric) << ", test metric "
               << format_double(r.history.back().test_metric) << '\n';
        return;
    }

    const std::string param = !o.sweep_L.empty() ? "L" : !o.sweep_k.empty() ? "k" : "N";
    const auto& values = !o.sweep_L.empty() ? o.sweep_L : !o.sweep_k.empty() ? o.sweep_k : o.sweep_N;
    ensure_dir(o.out);
    Json sweep;
    sweep["parameter"] = param;
    sweep["runs"] = Json::array();
    std::vector<std::string> outputs;
    for (const auto& v : values) {
        TrainConfig cfg = base;
        double x = parse_double(v, "--sweep-" + param, 0);
        if (param == "k") {
            check_k(x);
            cfg.k = x;
        } else {
            if (!(x >= 0.0) || x != std::floor(x)) throw ValidationError("--sweep-" + param + " values must be integers");
            if (param == "L") cfg.layers = static_cast<std::size_t>(x);
            if (param == "N") cfg.n_functions = static_cast<std::size_t>(x);
        }
        cfg.validate();
        TrainResult r = train(data, cfg);
        for (const auto& w : r.warnings) *c.err << "warning (" << param << "=" << v << "): " << w << '\n';
        const std::string sub = param + "-" + v;
        auto files = write_train_outputs(join_path(o.out, sub), g, r, cfg);
        outputs.insert(outputs.end(), files.begin(), files.end());
        sweep["runs"].push_back({{"value", v}, {"dir", sub}});
        *c.out << param << "=" << v << ": final train metric " << format_double(r.history.back().train_metric)
               << '\n';
    }
    const auto sweep_file = join_path(o.out, "sweep.json");
    write_text_file(sweep_file, sweep.dump(2) + "\n");
    outputs.push_back(sweep_file);
    write_manifest_for(c, join_path(o.out, "manifest.json"), inputs, outputs);
}

// ---- heat flow and mixing ------------------------------------------------

struct HeatOpts {
    std::string graph, f0, out;
    double t_max = 2.0, dt = 0.01;
    std::size_t steps = 20, dense_cap = 2000, workers = 0;
    bool euler = false;
    std::uint64_t seed = 0;
};

VertexFunction initial_function(const WeightedGraph& g, const std::string& path, std::uint64_t seed) {
    if (!path.empty()) return load_vertex_values(path, &g);
    Rng rng = make_rng(seed, "f0");
    std::normal_distribution<double> normal;
    std::vector<double> v(g.num_vertices());
    for (auto& a : v) a = normal(rng);
    return VertexFunction(std::move(v));
}

bool curvature_defined(const WeightedGraph& g) {
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
        if (g.degree(x) == 0) return false;
    }
    return g.num_vertices() > 0;
}

double min_curvature(const CurvatureEstimate& est) { return *std::min_element(est.kappa.begin(), est.kappa.end()); }

void heatflow_command(Command& c, const HeatOpts& o) {
    require(o.graph, "graph");
    require(o.out, "out");
    WeightedGraph g = load_graph(o.graph);
    VertexFunction f0 = initial_function(g, o.f0, o.seed);
    HeatFlowOptions opts{o.dense_cap, o.euler, o.dt};
    auto times = time_grid(o.t_max, o.steps);
    HeatFlowResult flow = heat_flow(g, f0, times, opts);
    ensure_dir(o.out);
    std::ostringstream s;
    s << "t,vertex,value,gamma\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (VertexId x = 0; x < g.num_vertices(); ++x) {
            s << format_double(times[i]) << ',' << g.name(x) << ',' << format_double(flow.values[i][x]) << ','
              << format_double(flow.gamma[i][x]) << '\n';
        }
    }
    const auto heat_csv = join_path(o.out, "heat.csv");
    const auto summary = join_path(o.out, "summary.json");
    write_text_file(heat_csv, s.str());

    Json j;
    j["method"] = o.euler ? "euler" : "spectral";
    double mass0 = 0.0, mass_end = 0.0;
    for (std::size_t x = 0; x < f0.size(); ++x) {
        mass0 += f0[x];
        mass_end += flow.values.back()[x];
    }
    j["mass_initial"] = mass0;
    j["mass_final"] = mass_end;
    if (curvature_defined(g)) {
        double kmin = min_curvature(exact_curvature_all(g, resolve_workers(o.workers)));
        SemigroupReport rep = semigroup_gradient_check(g, kmin, f0, times, 1e-6, opts);
        j["kappa_min"] = kmin;
        j["semigroup_check"]["passed"] = rep.passed;
        j["semigroup_check"]["rows"] = Json::array();
        for (const auto& r : rep.rows) {
            j["semigroup_check"]["rows"].push_back(
                {{"t", r.t}, {"max_gamma", r.max_gamma}, {"bound", r.bound}, {"margin", r.margin}, {"pass", r.pass}});
        }
        *c.out << "semigroup gradient check " << (rep.passed ? "passed" : "FAILED") << " (kappa_min "
               << format_double(kmin) << ")\n";
    } else {
        j["semigroup_check"] = "skipped: graph has an isolated vertex";
    }
    write_text_file(summary, j.dump(2) + "\n");
    write_manifest_for(c, join_path(o.out, "manifest.json"), {o.graph, o.f0, c.config_path}, {heat_csv, summary});
}

struct MixingOpts {
    std::string graph, vertex, out;
    double eps = 0.01, t_max = 5.0;
    std::size_t steps = 500, probes = 32, workers = 0;
    std::uint64_t seed = 0;
};

void mixing_command(Command& c, const MixingOpts& o) {
    require(o.graph, "graph");
    require(o.out, "out");
    if (!(o.eps > 0.0 && o.eps < 1.0)) throw ValidationError("eps must lie in (0,1)");
    WeightedGraph g = load_graph(o.graph);
    if (!curvature_defined(g)) throw ValidationError("mixing: every vertex needs a neighbour");
    CurvatureEstimate est = exact_curvature_all(g, resolve_workers(o.workers));
    double kmin = min_curvature(est);
    auto times = time_grid(o.t_max, o.steps);
    std::vector<VertexId> targets;
    if (o.vertex.empty()) {
        for (VertexId x = 0; x < g.num_vertices(); ++x) targets.push_back(x);
    } else {
        auto v = g.find(o.vertex);
        if (!v) throw ValidationError("unknown vertex '" + o.vertex + "'");
        targets.push_back(*v);
    }
    std::vector<MixingResult> results(targets.size());
    parallel_for(targets.size(), resolve_workers(o.workers), [&](std::size_t i) {
        VertexId x = targets[i];
        auto probes = default_probes(g, x, derive_seed(o.seed, static_cast<std::uint64_t>(x)), o.probes);
        results[i] = mixing_time(g, x, o.eps, est.kappa[x], probes, times);
    });
    const double global_bound = mixing_bound(o.eps, kmin);
    std::ostringstream s;
    s << "vertex,kappa,tau_empirical,bound,bound_kappa_min,within_global_bound\n";
    Json j;
    j["eps"] = o.eps;
    j["kappa_min"] = kmin;
    j["grid_step"] = o.t_max / static_cast<double>(o.steps);
    bool all_ok = true;
    std::size_t per_vertex_violations = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        VertexId x = targets[i];
        const auto& r = results[i];
        bool ok = std::isnan(global_bound) || r.empirical <= global_bound;
        all_ok = all_ok && ok;
        if (r.bound_defined && r.empirical > r.bound) ++per_vertex_violations;
        s << g.name(x) << ',' << format_double(est.kappa[x]) << ',' << format_double(r.empirical) << ','
          << format_double(r.bound) << ',' << format_double(global_bound) << ',' << (ok ? "true" : "false") << '\n';
    }
    j["global_bound"] = std::isnan(global_bound) ? Json(nullptr) : Json(global_bound);
    j["global_bound_defined"] = !std::isnan(global_bound);
    j["within_global_bound"] = all_ok;
    j["per_vertex_bound_exceeded"] = per_vertex_violations;
    const auto csv = join_path(o.out, "mixing.csv");
    const auto summary = join_path(o.out, "summary.json");
    ensure_dir(o.out);
    write_text_file(csv, s.str());
    write_text_file(summary, j.dump(2) + "\n");
    write_manifest_for(c, join_path(o.out, "manifest.json"), {o.graph, c.config_path}, {csv, summary});
    *c.out << "mixing times for " << targets.size() << " vertices; global bound "
           << (std::isnan(global_bound) ? std::string("undefined (kappa_min <= 0)") : format_double(global_bound))
           << (all_ok ? "" : " EXCEEDED") << '\n';
}

// ---- diffusion -----------------------------------------------------------

struct DiffusionOpts {
    std::string graph, model = "ic", seeds, p_mode = "wc", out;
    double fraction = 0.10, p = 0.1;
    std::size_t runs = 10000, workers = 0;
    std::uint64_t seed = 0;
    bool exact = false;
};

void diffusion_command(Command& c, const DiffusionOpts& o) {
    require(o.graph, "graph");
    require(o.out, "out");
    WeightedGraph g = load_graph(o.graph);
    DiffusionModel model = parse_diffusion_model(o.model);
    IcOptions ic;
    if (o.p_mode == "wc") {
        ic.mode = IcMode::WeightedCascade;
    } else if (o.p_mode == "uniform") {
        ic.mode = IcMode::Uniform;
        ic.p = o.p;
    } else {
        throw ValidationError("unknown p-mode '" + o.p_mode + "' (wc|uniform)");
    }
    if (o.runs == 0) throw ValidationError("runs must be >= 1");
    const std::size_t workers = resolve_workers(o.workers);
    InfluenceTarget target;
    if (!o.seeds.empty()) {
        auto seeds = vertex_list(g, o.seeds);
        target = model == DiffusionModel::IC ? simulate_ic(g, seeds, ic, o.runs, o.seed, workers)
                                             : simulate_lt(g, seeds, o.runs, o.seed, workers);
    } else {
        target = make_influence_dataset(g, o.fraction, model, o.runs, o.seed, ic, workers).target;
    }
    std::vector<std::string> is_seed(g.num_vertices(), "0");
    for (VertexId s : target.seeds) is_seed[s] = "1";
    std::vector<std::string> cols{"probability", "seed"};
    std::vector<std::vector<std::string>> vals{formatted(target.probability), is_seed};
    if (o.exact) {
        auto ex = model == DiffusionModel::IC ? exact_ic(g, target.seeds, ic) : exact_lt(g, target.seeds);
        cols.push_back("exact");
        vals.push_back(formatted(ex));
    }
    ensure_dir(o.out);
    const auto csv = join_path(o.out, "influence.csv");
    const auto summary = join_path(o.out, "summary.json");
    write_text_file(csv, vertex_csv(g, cols, vals));
    Json j;
    j["model"] = to_string(model);
    j["p_mode"] = model == DiffusionModel::IC ? o.p_mode : "normalized-weights";
    j["runs"] = target.runs;
    std::vector<std::string> seed_names;
    for (VertexId s : target.seeds) seed_names.push_back(g.name(s));
    j["seeds"] = seed_names;
    j["three_sigma_max"] = 3.0 * 0.5 / std::sqrt(static_cast<double>(target.runs));
    double mean = 0.0;
    for (double p : target.probability) mean += p;
    j["mean_probability"] = mean / static_cast<double>(g.num_vertices());
    write_text_file(summary, j.dump(2) + "\n");
    write_manifest_for(c, join_path(o.out, "manifest.json"), {o.graph, o.seeds, c.config_path}, {csv, summary});
    *c.out << "simulated " << target.runs << " " << to_string(model) << " cascades from " << target.seeds.size()
           << " seeds\n";
}

// ---- ops eval ------------------------------------------------------------

struct OpsOpts {
    std::string graph, function, op = "all", form = "operator", out;
};

void ops_eval(Command& c, const OpsOpts& o) {
    require(o.graph, "graph");
    require(o.function, "f");
    require(o.out, "out");
    WeightedGraph g = load_graph(o.graph);
    VertexFunction f = load_vertex_values(o.function, &g);
    Gamma2Form form;
    if (o.form == "operator") {
        form = Gamma2Form::Operator;
    } else if (o.form == "expanded") {
        form = Gamma2Form::Expanded;
    } else {
        throw ValidationError("unknown form '" + o.form + "' (operator|expanded)");
    }
    std::vector<std::string> cols;
    std::vector<std::vector<std::string>> vals;
    bool any = false;
    if (o.op == "all" || o.op == "laplacian") {
        cols.push_back("laplacian");
        vals.push_back(formatted(laplacian(g, f).values));
        any = true;
    }
    if (o.op == "all" || o.op == "gamma") {
        cols.push_back("gamma");
        vals.push_back(formatted(gamma(g, f).values));
        any = true;
    }
    if (o.op == "all" || o.op == "gamma2") {
        cols.push_back("gamma2");
        vals.push_back(formatted(gamma2(g, f, form).values));
        any = true;
    }
    if (!any) throw ValidationError("unknown op '" + o.op + "' (all|laplacian|gamma|gamma2)");
    write_text_file(o.out, vertex_csv(g, cols, vals));
    write_manifest_for(c, o.out + ".manifest.json", {o.graph, o.function}, {o.out});
    *c.out << "wrote " << cols.size() << " operator field(s) to " << o.out << '\n';
}

// ---- generate ------------------------------------------------------------

struct GenerateOpts {
    std::string out;
    std::vector<std::size_t> sizes{100, 100};
    double p_in = 0.1, p_out = 0.01, signal = 1.0, edge_p = 0.1, min_weight = 1.0, max_weight = 1.0;
    double fraction = 0.10;
    std::size_t dim = kDefaultFeatureDim, n = 100, runs = 10000;
    std::string model = "ic";
    std::uint64_t seed = 0;
};

void write_features(const std::string& path, const WeightedGraph& g, const VertexFeatures& x) {
    std::ostringstream s;
    s << "vertex";
    for (std::size_t j = 0; j < x.cols; ++j) {
        s << ',' << (j < x.column_names.size() ? x.column_names[j] : "x" + std::to_string(j));
    }
    s << '\n';
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        s << g.name(v);
        for (std::size_t j = 0; j < x.cols; ++j) s << ',' << format_double(x(v, j));
        s << '\n';
    }
    write_text_file(path, s.str());
}

void generate_sbm(Command& c, const GenerateOpts& o) {
    require(o.out, "out");
    BlockModel bm = stochastic_block_model(o.sizes, o.p_in, o.p_out, o.seed);
    VertexFeatures x = class_features(bm.block, o.dim, o.signal, derive_seed(o.seed, "features"));
    ensure_dir(o.out);
    const auto graph = join_path(o.out, "graph.txt");
    const auto feats = join_path(o.out, "features.csv");
    const auto labels = join_path(o.out, "labels.csv");
    save_graph(bm.graph, graph);
    write_features(feats, bm.graph, x);
    std::vector<std::string> lab;
    for (int b : bm.block) lab.push_back(std::to_string(b));
    write_text_file(labels, vertex_csv(bm.graph, {"label"}, {lab}));
    write_manifest_for(c, join_path(o.out, "manifest.json"), {}, {graph, feats, labels});
    *c.out << "wrote SBM with " << bm.graph.num_vertices() << " vertices and " << bm.graph.num_edges()
           << " edges to " << o.out << '\n';
}

void generate_random(Command& c, const GenerateOpts& o) {
    require(o.out, "out");
    RandomGraphOptions opt;
    opt.n = o.n;
    opt.edge_probability = o.edge_p;
    opt.min_weight = o.min_weight;
    opt.max_weight = o.max_weight;
    WeightedGraph g = random_graph(opt, o.seed);
    ensure_dir(o.out);
    const auto graph = join_path(o.out, "graph.txt");
    save_graph(g, graph);
    write_manifest_for(c, join_path(o.out, "manifest.json"), {}, {graph});
    *c.out << "wrote random graph with " << g.num_vertices() << " vertices and " << g.num_edges() << " edges\n";
}

void generate_influence(Command& c, const GenerateOpts& o) {
    require(o.out, "out");
    RandomGraphOptions opt;
    opt.n = o.n;
    opt.edge_probability = o.edge_p;
    WeightedGraph g = random_graph(opt, o.seed);
    InfluenceDataset d = make_influence_dataset(g, o.fraction, parse_diffusion_model(o.model), o.runs,
                                                derive_seed(o.seed, "influence"));
    ensure_dir(o.out);
    const auto graph = join_path(o.out, "graph.txt");
    const auto feats = join_path(o.out, "features.csv");
    const auto labels = join_path(o.out, "labels.csv");
    save_graph(g, graph);
    write_features(feats, g, influence_features(g, d.seeds));
    write_text_file(labels, vertex_csv(g, {"probability"}, {formatted(d.target.probability)}));
    write_manifest_for(c, join_path(o.out, "manifest.json"), {}, {graph, feats, labels});
    *c.out << "wrote influence dataset with " << d.seeds.size() << " seeds to " << o.out << '\n';
}

// ---- report --------------------------------------------------------------

void report_command(Command& c, const std::string& dir) {
    require(dir, "run");
    auto written = write_report(dir);
    write_manifest_for(c, join_path(dir, "report.manifest.json"), {}, written);
    for (const auto& w : written) *c.out << "wrote " << w << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Curvature-guided adaptive-depth graph neural networks"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    std::vector<std::unique_ptr<Command>> commands;
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, const std::string& full) {
        auto c = std::make_unique<Command>();
        c->app = parent->add_subcommand(name, help);
        c->name = full;
        c->args = args;
        c->out = &out;
        c->err = &err;
        add_config_option(*c);
        commands.push_back(std::move(c));
        return commands.back().get();
    };
    auto workers_option = [](Command* c, std::size_t& w) {
        c->app->add_option("--workers", w, "worker threads (default: CURVEGNN_WORKERS or 1)");
    };

    // curvature exact / learn
    CLI::App* curvature = app.add_subcommand("curvature", "per-vertex curvature");
    curvature->require_subcommand(1);
    CurvatureExactOpts ce;
    {
        Command* c = leaf(curvature, "exact", "exact curvature by the reduced eigenvalue problem", "curvature exact");
        c->app->add_option("--graph", ce.graph, "edge-list file");
        c->app->add_option("--out", ce.out, "output CSV (vertex,kappa,provenance)");
        c->app->add_option("--method", ce.method, "exact|sampled");
        c->app->add_option("--samples", ce.samples, "random functions per vertex for --method sampled");
        c->app->add_option("--seed", ce.seed);
        workers_option(c, ce.workers);
        c->handler = [&](Command& cmd) { curvature_exact(cmd, ce); };
    }
    CurvatureLearnOpts cl;
    {
        Command* c = leaf(curvature, "learn", "learned curvature upper estimate", "curvature learn");
        c->app->add_option("--graph", cl.graph, "edge-list file");
        c->app->add_option("--features", cl.features, "feature CSV (default: seeded Gaussian features)");
        c->app->add_option("--feature-dim", cl.feature_dim, "width of default features");
        c->app->add_option("--out", cl.out, "output CSV (vertex,kappa_hat,provenance)");
        c->app->add_option("--N,--n-functions", cl.n_functions, "function family size");
        c->app->add_option("--lambda", cl.lambda, "weight of the -lambda*kappa term");
        c->app->add_option("--epochs", cl.epochs);
        c->app->add_option("--lr", cl.lr);
        c->app->add_option("--hidden", cl.hidden, "family hidden widths")->delimiter(',');
        c->app->add_option("--mode", cl.mode, "transductive|inductive");
        c->app->add_option("--learn-weights", cl.learn_weights, "train log edge weights as well");
        c->app->add_option("--initial-kappa", cl.initial_kappa);
        c->app->add_option("--seed", cl.seed);
        c->handler = [&](Command& cmd) { curvature_learn(cmd, cl); };
    }

    DepthOpts dp;
    {
        Command* c = leaf(&app, "depth-assign", "stopping depths from curvature ranks", "depth-assign");
        c->app->add_option("--kappa", dp.kappa, "curvature CSV (vertex, kappa)");
        c->app->add_option("--column", dp.column, "curvature column name");
        c->app->add_option("--k", dp.k, "threshold percent in (0,100]");
        c->app->add_option("--L", dp.layers, "depth cap (default ceil(100/k))");
        c->app->add_option("--schedule", dp.schedule, "fixed|power-law|normal|linear");
        c->app->add_option("--seed", dp.seed);
        c->app->add_option("--out", dp.out, "output CSV (vertex,kappa,T)");
        c->handler = [&](Command& cmd) { depth_assign(cmd, dp); };
    }

    TrainOpts tr;
    {
        Command* c = leaf(&app, "train", "joint training of the adaptive-depth network and curvature", "train");
        auto* a = c->app;
        a->add_option("--task", tr.task, "node-class|node-reg|graph-class|graph-reg");
        a->add_option("--graph", tr.graph, "edge-list file");
        a->add_option("--features", tr.features, "feature CSV (default: seeded Gaussian features)");
        a->add_option("--feature-dim", tr.feature_dim, "width of default features");
        a->add_option("--labels", tr.labels, "label CSV (vertex,label) or (graph,label)");
        a->add_option("--label-column", tr.label_column);
        a->add_option("--membership", tr.membership, "vertex,graph CSV for graph-level tasks");
        a->add_option("--classes", tr.classes, "class count (default: largest label + 1)");
        a->add_option("--out", tr.out, "output directory");
        a->add_option("--epochs", tr.epochs);
        a->add_option("--lr", tr.lr);
        a->add_option("--weight-decay", tr.weight_decay);
        a->add_option("--k", tr.k, "threshold percent in (0,100]");
        a->add_option("--N,--n-functions", tr.n_functions, "function family size");
        a->add_option("--lambda", tr.lambda);
        a->add_option("--L", tr.layers, "layer count");
        a->add_option("--hidden", tr.hidden);
        a->add_option("--family-hidden", tr.family_hidden)->delimiter(',');
        a->add_option("--aggregator", tr.aggregator, "gcn-mean|gin-sum");
        a->add_option("--schedule", tr.schedule, "fixed|power-law|normal|linear");
        a->add_option("--depth-refresh", tr.depth_refresh, "epochs between depth recomputations");
        a->add_option("--dt", tr.dt, "step scale recorded for reporting");
        a->add_option("--kappa-mode", tr.kappa_mode, "transductive|inductive");
        a->add_option("--learn-weights", tr.learn_weights);
        a->add_option("--train-family", tr.train_family);
        a->add_option("--train-fraction", tr.train_fraction);
        a->add_option("--val-fraction", tr.val_fraction);
        a->add_option("--seed", tr.seed);
        a->add_option("--sweep-L", tr.sweep_L, "one run per layer count")->delimiter(',');
        a->add_option("--sweep-k", tr.sweep_k, "one run per threshold")->delimiter(',');
        a->add_option("--sweep-N", tr.sweep_N, "one run per family size")->delimiter(',');
        c->handler = [&](Command& cmd) { train_command(cmd, tr); };
    }

    HeatOpts ht;
    {
        Command* c = leaf(&app, "heatflow", "heat semigroup and gradient decay check", "heatflow");
        c->app->add_option("--graph", ht.graph);
        c->app->add_option("--f0", ht.f0, "initial function CSV (default: seeded Gaussian)");
        c->app->add_option("--t-max", ht.t_max);
        c->app->add_option("--steps", ht.steps, "grid intervals");
        c->app->add_option("--euler", ht.euler, "explicit Euler instead of the eigendecomposition");
        c->app->add_option("--dt", ht.dt, "Euler step");
        c->app->add_option("--dense-cap", ht.dense_cap);
        c->app->add_option("--seed", ht.seed);
        c->app->add_option("--out", ht.out, "output directory");
        workers_option(c, ht.workers);
        c->handler = [&](Command& cmd) { heatflow_command(cmd, ht); };
    }

    MixingOpts mx;
    {
        Command* c = leaf(&app, "mixing", "empirical local mixing times against the curvature bound", "mixing");
        c->app->add_option("--graph", mx.graph);
        c->app->add_option("--vertex", mx.vertex, "single vertex (default: all)");
        c->app->add_option("--eps", mx.eps);
        c->app->add_option("--t-max", mx.t_max);
        c->app->add_option("--steps", mx.steps, "grid intervals");
        c->app->add_option("--probes", mx.probes, "random probe functions per vertex");
        c->app->add_option("--seed", mx.seed);
        c->app->add_option("--out", mx.out, "output directory");
        workers_option(c, mx.workers);
        c->handler = [&](Command& cmd) { mixing_command(cmd, mx); };
    }

    CLI::App* diffusion = app.add_subcommand("diffusion", "influence diffusion");
    diffusion->require_subcommand(1);
    DiffusionOpts df;
    {
        Command* c = leaf(diffusion, "simulate", "Monte Carlo IC/LT activation probabilities", "diffusion simulate");
        c->app->add_option("--graph", df.graph);
        c->app->add_option("--model", df.model, "ic|lt");
        c->app->add_option("--seeds", df.seeds, "CSV whose first column lists seed vertices");
        c->app->add_option("--fraction", df.fraction, "random seed fraction when --seeds is absent");
        c->app->add_option("--runs", df.runs);
        c->app->add_option("--p-mode", df.p_mode, "wc|uniform");
        c->app->add_option("--p", df.p, "activation probability for --p-mode uniform");
        c->app->add_option("--exact", df.exact, "add the exact enumeration column (<= 20 vertices)");
        c->app->add_option("--seed", df.seed);
        c->app->add_option("--out", df.out, "output directory");
        workers_option(c, df.workers);
        c->handler = [&](Command& cmd) { diffusion_command(cmd, df); };
    }

    CLI::App* ops = app.add_subcommand("ops", "graph operators");
    ops->require_subcommand(1);
    OpsOpts op;
    {
        Command* c = leaf(ops, "eval", "Laplacian, gradient and iterated gradient fields", "ops eval");
        c->app->add_option("--graph", op.graph);
        c->app->add_option("--f", op.function, "function CSV (vertex,value)");
        c->app->add_option("--op", op.op, "all|laplacian|gamma|gamma2");
        c->app->add_option("--form", op.form, "operator|expanded");
        c->app->add_option("--out", op.out, "output CSV");
        c->handler = [&](Command& cmd) { ops_eval(cmd, op); };
    }

    CLI::App* generate = app.add_subcommand("generate", "synthetic inputs");
    generate->require_subcommand(1);
    GenerateOpts gs, gr, gi;
    {
        Command* c = leaf(generate, "sbm", "two-block (or more) stochastic block model", "generate sbm");
        c->app->add_option("--sizes", gs.sizes, "block sizes")->delimiter(',');
        c->app->add_option("--p-in", gs.p_in);
        c->app->add_option("--p-out", gs.p_out);
        c->app->add_option("--dim", gs.dim, "feature width");
        c->app->add_option("--signal", gs.signal, "class separation of the features");
        c->app->add_option("--seed", gs.seed);
        c->app->add_option("--out", gs.out, "output directory");
        c->handler = [&](Command& cmd) { generate_sbm(cmd, gs); };
    }
    {
        Command* c = leaf(generate, "random", "connected random graph", "generate random");
        c->app->add_option("--n", gr.n);
        c->app->add_option("--p", gr.edge_p, "edge probability");
        c->app->add_option("--min-weight", gr.min_weight);
        c->app->add_option("--max-weight", gr.max_weight);
        c->app->add_option("--seed", gr.seed);
        c->app->add_option("--out", gr.out, "output directory");
        c->handler = [&](Command& cmd) { generate_random(cmd, gr); };
    }
    {
        Command* c = leaf(generate, "influence", "random graph with influence-regression targets", "generate influence");
        c->app->add_option("--n", gi.n);
        c->app->add_option("--p", gi.edge_p, "edge probability");
        c->app->add_option("--model", gi.model, "ic|lt");
        c->app->add_option("--fraction", gi.fraction, "seed fraction");
        c->app->add_option("--runs", gi.runs);
        c->app->add_option("--seed", gi.seed);
        c->app->add_option("--out", gi.out, "output directory");
        c->handler = [&](Command& cmd) { generate_influence(cmd, gi); };
    }

    std::string report_dir;
    {
        Command* c = leaf(&app, "report", "summary JSON and plot-ready CSVs for a run directory", "report");
        c->app->add_option("--run", report_dir, "run directory");
        c->handler = [&](Command& cmd) { report_command(cmd, report_dir); };
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        for (auto& c : commands) {
            if (!c->app->parsed()) continue;
            if (!c->config_path.empty()) apply_config(*c->app, read_config(c->config_path));
            c->handler(*c);
            return 0;
        }
        err << "error: no command selected\n";
        return 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace curvegnn::cli
