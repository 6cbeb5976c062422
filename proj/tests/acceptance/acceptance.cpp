// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "curvegnn/common/rng.hpp"
#include "curvegnn/curvature/exact.hpp"
#include "curvegnn/curvature/learn.hpp"
#include "curvegnn/curvature/operators.hpp"
#include "curvegnn/dynamics/heat.hpp"
#include "curvegnn/dynamics/influence.hpp"
#include "curvegnn/gnn/depth.hpp"
#include "curvegnn/gnn/model.hpp"
#include "curvegnn/gnn/train.hpp"
#include "curvegnn/graph/generators.hpp"

using namespace curvegnn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

VertexFunction random_function(std::size_t n, std::uint64_t seed) {
    Rng rng = make_rng(seed, "function");
    std::normal_distribution<double> normal;
    VertexFunction f{std::vector<double>(n)};
    for (auto& v : f.values) v = normal(rng);
    return f;
}

std::size_t random_size(std::uint64_t seed, std::size_t lo, std::size_t hi) {
    Rng rng = make_rng(seed, "size");
    return lo + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hi - lo + 1));
}

WeightedGraph random_weighted(std::uint64_t seed, std::size_t max_n, double p = 0.4) {
    return random_graph({.n = random_size(seed, 3, max_n), .edge_probability = p, .min_weight = 0.5, .max_weight = 2.0},
                        seed);
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); }

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return num / den;
}

Outcome closed_forms() {
    double k2 = exact_curvature(complete_graph(2), 0);
    double p3 = exact_curvature(path_graph(3), 1);
    bool ok = std::abs(k2 - 2.0) <= 1e-9 && std::abs(p3 - 0.5) <= 1e-9;
    for (double c : {0.5, 3.0}) ok = ok && std::abs(exact_curvature(complete_graph(2, c), 0) - 2.0 * c) <= 1e-9;
    return {ok, fmt("K2 %.15g, P3 centre %.15g", k2, p3)};
}

Outcome oracle_dominance() {
    auto t0 = Clock::now();
    std::size_t vertices = 0, within = 0, violations = 0;
    double worst_gap = 0.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        WeightedGraph g = random_weighted(1000 + s, 12);
        auto exact = exact_curvature_all(g, workers());
        auto sampled = sampled_curvature_all(g, 100000, s, workers());
        for (VertexId x = 0; x < g.num_vertices(); ++x) {
            ++vertices;
            double e = exact.kappa[x], m = sampled.kappa[x];
            if (m < e - 1e-9) ++violations;
            double gap = m - e;
            worst_gap = std::max(worst_gap, gap / std::max(std::abs(e), 1e-12));
            if (gap <= 0.05 * std::abs(e)) ++within;
        }
    }
    double secs = seconds_since(t0);
    double frac = static_cast<double>(within) / static_cast<double>(vertices);
    bool ok = violations == 0 && frac >= 0.9 && secs < 60.0;
    return {ok, fmt("%zu vertices, %zu dominance violations, gap <= 5%% on %.1f%% (need 90%%), worst relative gap %.3g, "
                    "%.1f s",
                    vertices, violations, 100.0 * frac, worst_gap, secs)};
}

Outcome learned_upper_bound() {
    auto t0 = Clock::now();
    std::vector<WeightedGraph> graphs{complete_graph(2), path_graph(3)};
    for (std::uint64_t s = 0; s < 10; ++s) {
        graphs.push_back(random_graph({.n = random_size(2000 + s, 3, 10), .edge_probability = 0.4}, 2000 + s));
    }
    std::size_t checked = 0, below = 0;
    double worst = INFINITY;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const WeightedGraph& g = graphs[i];
        auto exact = exact_curvature_all(g);
        for (std::uint64_t seed : {0u, 1u, 2u}) {
            CurvatureLearnConfig cfg;
            cfg.n_functions = 3;
            cfg.lambda = 1.0;
            cfg.epochs = 2000;
            cfg.seed = seed;
            auto r = estimate_curvature(g, gaussian_features(g.num_vertices(), 4, derive_seed(seed, i)), cfg);
            for (VertexId x = 0; x < g.num_vertices(); ++x) {
                ++checked;
                double margin = r.estimate.kappa[x] - exact.kappa[x];
                worst = std::min(worst, margin);
                if (margin < -0.05) ++below;
            }
        }
    }
    double secs = seconds_since(t0);
    return {below == 0 && secs < 300.0,
            fmt("%zu vertex estimates, %zu below exact-0.05, min(kappa_hat - kappa) %.4g, %.1f s", checked, below,
                worst, secs)};
}

Outcome operator_identities() {
    std::size_t failures = 0;
    double worst = 0.0;
    auto check = [&](double a, double b) {
        double err = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
        worst = std::max(worst, err);
        if (err > 1e-12) ++failures;
    };
    for (std::uint64_t s = 0; s < 100; ++s) {
        WeightedGraph g = random_weighted(3000 + s, 12);
        const std::size_t n = g.num_vertices();
        VertexFunction f = random_function(n, s);
        auto gam = gamma(g, f);
        auto g2 = gamma2(g, f);
        VertexFunction shifted = f;
        for (auto& v : shifted.values) v += 1.75;
        auto gs = gamma(g, shifted), g2s = gamma2(g, shifted);
        const double c = 1.5 + static_cast<double>(s % 5);
        WeightedGraph gc = g.scaled(c);
        auto gamc = gamma(gc, f), g2c = gamma2(gc, f);
        VertexFunction sq = f;
        for (auto& v : sq.values) v *= v;
        auto lsq = laplacian(g, sq), lf = laplacian(g, f);
        for (VertexId x = 0; x < n; ++x) {
            check(gs[x], gam[x]);
            check(g2s[x], g2[x]);
            check(gamc[x], c * gam[x]);
            check(g2c[x], c * c * g2[x]);
            check(0.5 * (lsq[x] - 2.0 * f[x] * lf[x]), gam[x]);
        }
        // Locality: perturb f outside B₁(x) (Γ) and outside B₂(x) (Γ₂).
        const VertexId x = static_cast<VertexId>(s % n);
        auto ball2 = two_ball(g, x);
        const std::size_t b1 = one_ball_size(g, x);
        VertexFunction far1 = f, far2 = f;
        for (VertexId v = 0; v < n; ++v) {
            bool in1 = std::find(ball2.begin(), ball2.begin() + static_cast<std::ptrdiff_t>(b1), v) !=
                       ball2.begin() + static_cast<std::ptrdiff_t>(b1);
            bool in2 = std::find(ball2.begin(), ball2.end(), v) != ball2.end();
            if (!in1) far1[v] += 5.0 + v;
            if (!in2) far2[v] -= 3.0 + v;
        }
        check(gamma(g, far1)[x], gam[x]);
        check(gamma2(g, far2)[x], g2[x]);
    }
    return {failures == 0, fmt("%zu comparisons over tolerance, worst relative error %.3g", failures, worst)};
}

Outcome autodiff_total_loss() {
    double worst = 0.0;
    std::string where;
    for (auto agg : {Aggregator::GcnMean, Aggregator::GinSum}) {
        for (const auto& ge : fixture::total_loss_gradient(agg, 2, 11, 6)) {
            if (ge.rel_error > worst) {
                worst = ge.rel_error;
                where = to_string(agg) + ":" + ge.name;
            }
        }
    }
    return {worst < 1e-4, fmt("worst group relative error %.3g (%s)", worst, where.c_str())};
}

Outcome depth_mechanism() {
    Rng rng = make_rng(6, "kappa vectors");
    std::size_t mismatches = 0, monotone = 0, k100 = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 50);
        std::vector<double> kappa(n);
        bool ties = trial % 2 == 0;
        for (auto& k : kappa) k = ties ? std::round(uniform01(rng) * 10.0) - 3.0 : 6.0 * uniform01(rng) - 3.0;
        for (int k : {5, 10, 20, 100}) {
            std::size_t cap = saturating_depth(k);
            auto d = assign_depths(kappa, static_cast<double>(k), cap);
            if (d.depth != oracle::depths(kappa, k, static_cast<int>(cap))) ++mismatches;
            for (std::size_t x = 0; x < n; ++x) {
                for (std::size_t y = 0; y < n; ++y) {
                    if (kappa[x] > kappa[y] && d.depth[x] > d.depth[y]) ++monotone;
                }
            }
            if (k == 100 && d.max() != 1) ++k100;
        }
    }
    return {mismatches + monotone + k100 == 0,
            fmt("%zu brute-force mismatches, %zu monotonicity violations, %zu k=100 violations", mismatches, monotone,
                k100)};
}

Outcome adaptive_equivalence() {
    double worst = 0.0;
    for (std::size_t L : {1u, 2u, 4u}) {
        for (std::uint64_t p = 0; p < 20; ++p) {
            std::uint64_t seed = 7000 + 100 * L + p;
            WeightedGraph g = random_weighted(seed, 15, 0.3);
            const std::size_t n = g.num_vertices();
            GnnModel m({.aggregator = p % 2 ? Aggregator::GinSum : Aggregator::GcnMean, .input_dim = 5, .hidden = 8,
                        .layers = L, .classes = 3},
                       seed);
            ad::Tape t;
            ad::Var x = t.constant(ad::to_tensor(gaussian_features(n, 5, seed)));
            ad::Var w = constant_arc_weights(t, g);
            DepthAssignment d;
            d.depth.assign(n, static_cast<int>(L));
            d.max_depth = L;
            auto a = m.forward_adaptive(t, g, x, w, d).value();
            auto b = m.forward_standard(t, g, x, w, L).value();
            for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
        }
    }
    return {worst <= 1e-12, fmt("60 parameterisations, max |adaptive - standard| %.3g", worst)};
}

std::vector<WeightedGraph> dynamics_graphs() {
    std::vector<WeightedGraph> out;
    for (std::uint64_t s = 0; s < 20; ++s) out.push_back(random_weighted(8000 + s, 15));
    return out;
}

double min_curvature(const WeightedGraph& g) {
    auto k = exact_curvature_all(g).kappa;
    return *std::min_element(k.begin(), k.end());
}

Outcome mixing_numerics() {
    WeightedGraph k2 = complete_graph(2);
    const double h = 1e-3;
    auto times = time_grid(3.0, 3000);
    auto m = mixing_time(k2, 0, 0.01, exact_curvature(k2, 0), default_probes(k2, 0, 0), times);
    const double expected = std::log(100.0) / 4.0;
    bool tau_ok = std::abs(m.empirical - expected) <= h && m.empirical <= m.bound;
    std::size_t failed = 0;
    double min_margin = INFINITY;
    for (const auto& g : dynamics_graphs()) {
        auto rep = semigroup_gradient_check(g, min_curvature(g), random_function(g.num_vertices(), 3),
                                            time_grid(5.0, 100));
        if (!rep.passed) ++failed;
        for (const auto& r : rep.rows) min_margin = std::min(min_margin, r.margin);
    }
    return {tau_ok && failed == 0,
            fmt("K2 tau %.4f (expected %.4f, bound %.4f); semigroup check failed on %zu/20 graphs, min margin %.3g",
                m.empirical, expected, m.bound, failed, min_margin)};
}

Outcome decay_numerics() {
    const double dt = 0.05;
    std::size_t graphs_failed = 0, checks = 0, violations = 0;
    double worst_ratio = 0.0;
    for (const auto& g : dynamics_graphs()) {
        const double kmin = min_curvature(g);
        auto layers = euler_heat_steps(g, random_function(g.num_vertices(), 4), dt, 40);
        auto gamma0 = gamma(g, layers[0]);
        bool graph_ok = true;
        for (VertexId x = 0; x < g.num_vertices(); ++x) {
            if (!(gamma0[x] > 1e-8)) continue;
            for (std::size_t l = 1; l <= 40; ++l) {
                auto d = feature_decay(g, layers, x, l, kmin, dt);
                ++checks;
                double limit = std::exp(-kmin * static_cast<double>(l) * dt) * (1.0 + 1e-3);
                worst_ratio = std::max(worst_ratio, d.distinctiveness / limit);
                if (d.distinctiveness > limit) {
                    ++violations;
                    graph_ok = false;
                }
            }
        }
        if (!graph_ok) ++graphs_failed;
    }
    return {violations == 0, fmt("%zu (x,l) checks, %zu above the bound on %zu/20 graphs, worst D/bound %.3g", checks,
                                 violations, graphs_failed, worst_ratio)};
}

Outcome diffusion_targets() {
    const std::size_t runs = 10000;
    auto k2 = simulate_ic(complete_graph(2), {0}, {.mode = IcMode::Uniform, .p = 0.5}, runs, 1, workers());
    bool k2_ok = std::abs(k2.probability[1] - 0.5) <= 0.015;

    std::size_t compared = 0, outside = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        WeightedGraph g = random_graph({.n = random_size(9000 + s, 3, 10), .edge_probability = 0.35}, 9000 + s);
        std::vector<VertexId> seeds{0};
        auto check = [&](const std::vector<double>& mc, const std::vector<double>& ex) {
            for (VertexId v = 0; v < g.num_vertices(); ++v) {
                ++compared;
                double sigma = std::sqrt(ex[v] * (1.0 - ex[v]) / runs);
                if (std::abs(mc[v] - ex[v]) > 3.0 * sigma + 1e-12) ++outside;
            }
        };
        check(simulate_ic(g, seeds, {}, runs, s, workers()).probability, exact_ic(g, seeds, {}));
        check(simulate_lt(g, seeds, runs, s, workers()).probability, exact_lt(g, seeds));
    }

    auto star = simulate_lt(star_graph(2), {1}, runs, 2, workers());
    bool star_ok = std::abs(star.probability[0] - 0.5) <= 3.0 * std::sqrt(0.25 / runs);

    // Mean absolute error against the exact values as the run count grows.
    WeightedGraph g = random_graph({.n = 10, .edge_probability = 0.3}, 77);
    auto exact = exact_ic(g, {0}, {});
    std::vector<double> run_counts{100, 400, 1600, 6400, 25600}, mae;
    for (double r : run_counts) {
        double total = 0.0;
        const int reps = 20;
        for (int rep = 0; rep < reps; ++rep) {
            auto mc = simulate_ic(g, {0}, {}, static_cast<std::size_t>(r), 100 + rep, workers());
            for (VertexId v = 1; v < 10; ++v) total += std::abs(mc.probability[v] - exact[v]);
        }
        mae.push_back(total / (reps * 9.0));
    }
    double slope = loglog_slope(run_counts, mae);
    bool slope_ok = std::abs(slope + 0.5) <= 0.1;
    return {k2_ok && outside == 0 && star_ok && slope_ok,
            fmt("K2 %.4f; %zu/%zu MC values outside 3 sigma of exact; LT star centre %.4f; MAE slope %.3f (target -0.5)",
                k2.probability[1], outside, compared, star.probability[0], slope)};
}

Outcome end_to_end() {
    std::string detail;
    bool ok = true;
    for (std::uint64_t seed : {0u, 1u, 2u}) {
        auto t0 = Clock::now();
        BlockModel bm = stochastic_block_model({100, 100}, 0.1, 0.01, seed);
        TrainData data;
        data.graph = &bm.graph;
        data.features = class_features(bm.block, 8, 1.0, derive_seed(seed, "features"));
        for (int b : bm.block) data.targets.push_back(b);
        data.labeled.assign(200, 1);
        TrainConfig cfg;
        cfg.seed = seed;
        auto r = train(data, cfg);
        double secs = seconds_since(t0);
        const auto& last = r.history.back();
        bool run_ok = last.train_metric > 0.9 && last.test_metric > 0.5 && secs < 120.0;
        ok = ok && run_ok;
        detail += fmt("seed %d train %.3f test %.3f %.1fs; ", static_cast<int>(seed), last.train_metric,
                      last.test_metric, secs);
    }
    WeightedGraph g = random_graph({.n = 100, .edge_probability = 0.05}, 12);
    auto ds = make_influence_dataset(g, 0.1, DiffusionModel::IC, 10000, 12, {}, workers());
    TrainData data;
    data.graph = &g;
    data.features = influence_features(g, ds.seeds);
    data.targets = ds.target.probability;
    data.labeled.assign(100, 1);
    TrainConfig cfg;
    cfg.task = Task::NodeReg;
    cfg.epochs = 10;
    auto r = train(data, cfg);
    bool monotone = true;
    for (std::size_t e = 1; e < r.history.size(); ++e) {
        monotone = monotone && r.history[e].train_metric < r.history[e - 1].train_metric;
    }
    ok = ok && monotone;
    detail += fmt("IC regression MSE %.4g -> %.4g %s", r.history.front().train_metric, r.history.back().train_metric,
                  monotone ? "monotone" : "NOT monotone");
    return {ok, detail};
}

double time_curvature_loss(const WeightedGraph& g, std::size_t n_functions) {
    VertexFeatures x = gaussian_features(g.num_vertices(), 8, 1);
    FunctionFamily family(n_functions, 8, {16}, 2);
    LearnedCurvature curv(g, 8, KappaMode::Transductive, {16}, 3);
    double best = INFINITY;
    for (int rep = 0; rep < 5; ++rep) {
        auto t0 = Clock::now();
        ad::Tape tape;
        ad::Var xv = tape.constant(ad::to_tensor(x));
        TapedOperators ops(g, curv.edge_weights(tape));
        auto loss = curvature_loss(ops, family, curv.kappa_hat(tape, xv), xv, 1.0).loss;
        tape.backward(loss);
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

Outcome complexity() {
    WeightedGraph g = bounded_degree_graph(600, 8, 1);
    std::vector<double> ns{1, 3, 5}, tn;
    for (double n : ns) tn.push_back(time_curvature_loss(g, static_cast<std::size_t>(n)));
    double slope_n = loglog_slope(ns, tn);
    std::vector<double> ds{4, 8, 16}, td;
    for (double d : ds) td.push_back(time_curvature_loss(bounded_degree_graph(600, static_cast<std::size_t>(d), 2), 3));
    double slope_d = loglog_slope(ds, td);
    return {slope_n >= 0.5 && slope_n <= 2.0 && slope_d <= 4.0,
            fmt("time vs N slope %.2f (need [0.5,2]), vs d_max slope %.2f (need <= 4); N times %.3g/%.3g/%.3g s",
                slope_n, slope_d, tn[0], tn[1], tn[2])};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"exact curvature closed forms", closed_forms},
        {"sampled oracle dominance and gap", oracle_dominance},
        {"learned curvature upper bound", learned_upper_bound},
        {"operator identities", operator_identities},
        {"total loss gradient", autodiff_total_loss},
        {"depth mechanism", depth_mechanism},
        {"adaptive forward equivalence", adaptive_equivalence},
        {"mixing time and gradient semigroup bound", mixing_numerics},
        {"layer feature decay bound", decay_numerics},
        {"diffusion targets", diffusion_targets},
        {"end-to-end training", end_to_end},
        {"complexity scaling", complexity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
