#include "curvegnn/dynamics/influence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/parallel.hpp"
#include "curvegnn/common/rng.hpp"

namespace curvegnn {

DiffusionModel parse_diffusion_model(const std::string& name) {
    if (name == "ic") return DiffusionModel::IC;
    if (name == "lt") return DiffusionModel::LT;
    throw ValidationError("unknown diffusion model '" + name + "' (ic|lt)");
}

std::string to_string(DiffusionModel m) { return m == DiffusionModel::IC ? "ic" : "lt"; }

double ic_probability(const WeightedGraph& g, VertexId v, const IcOptions& opts) {
    if (opts.mode == IcMode::Uniform) return opts.p;
    return 1.0 / static_cast<double>(g.degree(v));
}

namespace {

void check_seeds(const WeightedGraph& g, const std::vector<VertexId>& seeds) {
    if (seeds.empty()) throw ValidationError("diffusion: seed set is empty");
    for (VertexId s : seeds) {
        if (s >= g.num_vertices()) throw ValidationError("diffusion: seed " + std::to_string(s) + " out of range");
    }
}

void check_runs(std::size_t runs) {
    if (runs == 0) throw ValidationError("diffusion: runs must be >= 1");
}

void check_ic(const IcOptions& opts) {
    if (opts.mode == IcMode::Uniform && !(opts.p >= 0.0 && opts.p <= 1.0)) {
        throw ValidationError("diffusion: p must lie in [0,1]");
    }
}

template <class RunFn>
InfluenceTarget monte_carlo(const WeightedGraph& g, const std::vector<VertexId>& seeds, std::size_t runs,
                            std::uint64_t seed, std::size_t workers, DiffusionModel model, RunFn run_once) {
    const std::size_t n = g.num_vertices();
    const std::size_t blocks = std::max<std::size_t>(1, std::min(workers, runs));
    std::vector<std::vector<std::uint64_t>> counts(blocks, std::vector<std::uint64_t>(n, 0));
    parallel_for(blocks, workers, [&](std::size_t b) {
        std::vector<char> active(n);
        for (std::size_t r = b * runs / blocks; r < (b + 1) * runs / blocks; ++r) {
            Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
            std::fill(active.begin(), active.end(), 0);
            run_once(rng, active);
            for (std::size_t v = 0; v < n; ++v) counts[b][v] += active[v] ? 1 : 0;
        }
    });
    InfluenceTarget t;
    t.model = model;
    t.seeds = seeds;
    t.runs = runs;
    t.probability.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        std::uint64_t c = 0;
        for (const auto& blk : counts) c += blk[v];
        t.probability[v] = static_cast<double>(c) / static_cast<double>(runs);
    }
    return t;
}

/// LT influence weight of u on v.
double lt_weight(const WeightedGraph& g, VertexId u, VertexId v) {
    return *g.weight(u, v) / g.weighted_degree(v);
}

}  // namespace

InfluenceTarget simulate_ic(const WeightedGraph& g, const std::vector<VertexId>& seeds, const IcOptions& opts,
                            std::size_t runs, std::uint64_t seed, std::size_t workers) {
    check_seeds(g, seeds);
    check_runs(runs);
    check_ic(opts);
    return monte_carlo(g, seeds, runs, seed, workers, DiffusionModel::IC, [&](Rng& rng, std::vector<char>& active) {
        std::vector<VertexId> frontier;
        for (VertexId s : seeds) {
            if (!active[s]) frontier.push_back(s);
            active[s] = 1;
        }
        std::vector<VertexId> next;
        while (!frontier.empty()) {
            next.clear();
            for (VertexId u : frontier) {
                for (const auto& nb : g.neighbors(u)) {
                    if (active[nb.id]) continue;
                    if (uniform01(rng) < ic_probability(g, nb.id, opts)) {
                        active[nb.id] = 1;
                        next.push_back(nb.id);
                    }
                }
            }
            frontier.swap(next);
        }
    });
}

InfluenceTarget simulate_lt(const WeightedGraph& g, const std::vector<VertexId>& seeds, std::size_t runs,
                            std::uint64_t seed, std::size_t workers) {
    check_seeds(g, seeds);
    check_runs(runs);
    const std::size_t n = g.num_vertices();
    return monte_carlo(g, seeds, runs, seed, workers, DiffusionModel::LT, [&](Rng& rng, std::vector<char>& active) {
        std::vector<double> threshold(n), mass(n, 0.0);
        for (auto& t : threshold) t = uniform01(rng);
        std::vector<VertexId> frontier;
        for (VertexId s : seeds) {
            if (!active[s]) frontier.push_back(s);
            active[s] = 1;
        }
        std::vector<VertexId> next;
        while (!frontier.empty()) {
            next.clear();
            for (VertexId u : frontier) {
                for (const auto& nb : g.neighbors(u)) {
                    if (active[nb.id]) continue;
                    mass[nb.id] += lt_weight(g, u, nb.id);
                    if (mass[nb.id] >= threshold[nb.id]) {
                        active[nb.id] = 1;
                        next.push_back(nb.id);
                    }
                }
            }
            frontier.swap(next);
        }
    });
}

namespace {

constexpr std::size_t kExactCap = 20;

struct IcExact {
    const WeightedGraph& g;
    const IcOptions& opts;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<double>> memo;

    // P(v ends active | active set, frontier) for all v.
    const std::vector<double>& solve(std::uint32_t active, std::uint32_t frontier) {
        auto key = std::make_pair(active, frontier);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const std::size_t n = g.num_vertices();
        std::vector<double> out(n, 0.0);
        for (std::size_t v = 0; v < n; ++v) out[v] = (active >> v) & 1U ? 1.0 : 0.0;
        if (frontier != 0) {
            // Inactive vertices reachable from the frontier and their activation chances.
            std::vector<VertexId> cand;
            std::vector<double> prob;
            for (VertexId v = 0; v < n; ++v) {
                if ((active >> v) & 1U) continue;
                double miss = 1.0;
                bool touched = false;
                for (const auto& nb : g.neighbors(v)) {
                    if ((frontier >> nb.id) & 1U) {
                        miss *= 1.0 - ic_probability(g, v, opts);
                        touched = true;
                    }
                }
                if (touched) {
                    cand.push_back(v);
                    prob.push_back(1.0 - miss);
                }
            }
            std::fill(out.begin(), out.end(), 0.0);
            for (std::uint32_t mask = 0; mask < (1U << cand.size()); ++mask) {
                double p = 1.0;
                std::uint32_t fresh = 0;
                for (std::size_t i = 0; i < cand.size(); ++i) {
                    if ((mask >> i) & 1U) {
                        p *= prob[i];
                        fresh |= 1U << cand[i];
                    } else {
                        p *= 1.0 - prob[i];
                    }
                }
                if (p == 0.0) continue;
                const std::vector<double>& sub = solve(active | fresh, fresh);
                for (std::size_t v = 0; v < n; ++v) out[v] += p * sub[v];
            }
        }
        return memo.emplace(key, std::move(out)).first->second;
    }
};

void check_exact_size(const WeightedGraph& g) {
    if (g.num_vertices() > kExactCap) {
        throw ValidationError("exact diffusion: only graphs with <= 20 vertices are enumerable");
    }
}

}  // namespace

std::vector<double> exact_ic(const WeightedGraph& g, const std::vector<VertexId>& seeds, const IcOptions& opts) {
    check_seeds(g, seeds);
    check_exact_size(g);
    check_ic(opts);
    std::uint32_t s = 0;
    for (VertexId v : seeds) s |= 1U << v;
    IcExact ex{g, opts, {}};
    return ex.solve(s, s);
}

std::vector<double> exact_lt(const WeightedGraph& g, const std::vector<VertexId>& seeds) {
    check_seeds(g, seeds);
    check_exact_size(g);
    const std::size_t n = g.num_vertices();
    std::vector<char> is_seed(n, 0);
    for (VertexId v : seeds) is_seed[v] = 1;
    std::vector<double> out(n, 0.0);
    // Walk kept edges backwards from v: v keeps edge (u,v) with weight b(u,v).
    auto walk = [&](auto&& self, VertexId v, std::uint32_t visited, double p) -> double {
        if (is_seed[v]) return p;
        double total = 0.0;
        for (const auto& nb : g.neighbors(v)) {
            if ((visited >> nb.id) & 1U) continue;
            total += self(self, nb.id, visited | (1U << nb.id), p * lt_weight(g, nb.id, v));
        }
        return total;
    };
    for (VertexId v = 0; v < n; ++v) out[v] = walk(walk, v, 1U << v, 1.0);
    return out;
}

InfluenceDataset make_influence_dataset(const WeightedGraph& g, double fraction, DiffusionModel model,
                                        std::size_t runs, std::uint64_t seed, const IcOptions& ic,
                                        std::size_t workers) {
    const std::size_t n = g.num_vertices();
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("seed fraction must lie in (0,1]");
    auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (count < 1) throw ValidationError("seed fraction selects no vertices");
    std::vector<VertexId> order(n);
    for (VertexId v = 0; v < n; ++v) order[v] = v;
    Rng rng = make_rng(seed, "influence_seeds");
    for (std::size_t i = 0; i < count; ++i) {
        auto j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - i));
        std::swap(order[i], order[std::min(j, n - 1)]);
    }
    InfluenceDataset d;
    d.seeds.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(d.seeds.begin(), d.seeds.end());
    std::uint64_t run_seed = derive_seed(seed, "influence_runs");
    d.target = model == DiffusionModel::IC ? simulate_ic(g, d.seeds, ic, runs, run_seed, workers)
                                           : simulate_lt(g, d.seeds, runs, run_seed, workers);
    return d;
}

VertexFeatures influence_features(const WeightedGraph& g, const std::vector<VertexId>& seeds) {
    check_seeds(g, seeds);
    const std::size_t n = g.num_vertices();
    std::vector<char> is_seed(n, 0);
    for (VertexId s : seeds) is_seed[s] = 1;
    VertexFeatures x(n, 3);
    x.column_names = {"seed", "degree", "seed_neighbors"};
    const double dmax = std::max<double>(1.0, static_cast<double>(g.max_degree()));
    for (VertexId v = 0; v < n; ++v) {
        std::size_t hits = 0;
        for (const auto& nb : g.neighbors(v)) hits += is_seed[nb.id] ? 1 : 0;
        x(v, 0) = is_seed[v] ? 1.0 : 0.0;
        x(v, 1) = static_cast<double>(g.degree(v)) / dmax;
        x(v, 2) = g.degree(v) == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(g.degree(v));
    }
    return x;
}

}  // namespace curvegnn
