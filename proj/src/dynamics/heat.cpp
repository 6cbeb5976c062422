#include "curvegnn/dynamics/heat.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/rng.hpp"
#include "curvegnn/curvature/operators.hpp"

namespace curvegnn {

Eigen::MatrixXd laplacian_matrix(const WeightedGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.num_vertices());
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : g.edges()) {
        l(e.u, e.v) -= e.weight;
        l(e.v, e.u) -= e.weight;
        l(e.u, e.u) += e.weight;
        l(e.v, e.v) += e.weight;
    }
    return l;
}

HeatKernel::HeatKernel(const WeightedGraph& g, std::size_t dense_cap) {
    if (g.num_vertices() > dense_cap) {
        throw ValidationError("heat flow: " + std::to_string(g.num_vertices()) + " vertices exceed the dense cap " +
                              std::to_string(dense_cap) + "; use --euler --dt");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian_matrix(g));
    if (solver.info() != Eigen::Success) throw NumericalError("heat flow: eigendecomposition failed");
    u_ = solver.eigenvectors();
    lambda_ = solver.eigenvalues();
}

VertexFunction HeatKernel::apply(const VertexFunction& f0, double t) const {
    Eigen::Map<const Eigen::VectorXd> f(f0.values.data(), static_cast<Eigen::Index>(f0.size()));
    if (t == 0.0) return f0;
    Eigen::VectorXd c = u_.transpose() * f;
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::exp(-t * std::max(lambda_[i], 0.0));
    Eigen::VectorXd ft = u_ * c;
    return VertexFunction(std::vector<double>(ft.data(), ft.data() + ft.size()));
}

namespace {

void check_grid(const std::vector<double>& times) {
    if (times.empty() || times.front() != 0.0) throw ValidationError("time grid must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1]) || !std::isfinite(times[i])) {
            throw ValidationError("time grid must be finite and strictly increasing");
        }
    }
}

VertexFunction euler_step(const WeightedGraph& g, const VertexFunction& f, double h) {
    VertexFunction lap = laplacian(g, f);
    VertexFunction out = f;
    for (std::size_t i = 0; i < f.size(); ++i) out[i] += h * lap[i];
    return out;
}

}  // namespace

std::vector<VertexFunction> euler_heat_steps(const WeightedGraph& g, const VertexFunction& f0, double dt,
                                             std::size_t steps) {
    check_function(g, f0, "initial function");
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    std::vector<VertexFunction> out{f0};
    for (std::size_t s = 0; s < steps; ++s) out.push_back(euler_step(g, out.back(), dt));
    return out;
}

HeatFlowResult heat_flow(const WeightedGraph& g, const VertexFunction& f0, const std::vector<double>& times,
                         const HeatFlowOptions& opts) {
    check_function(g, f0, "initial function");
    check_grid(times);
    HeatFlowResult r;
    r.times = times;
    r.f0 = f0;
    if (opts.euler) {
        if (!(opts.dt > 0.0)) throw ValidationError("dt must be positive");
        VertexFunction f = f0;
        double now = 0.0;
        for (double t : times) {
            while (now + opts.dt <= t + 1e-12 * std::max(1.0, t)) {
                f = euler_step(g, f, opts.dt);
                now += opts.dt;
            }
            if (t > now) {
                f = euler_step(g, f, t - now);
                now = t;
            }
            r.values.push_back(f);
        }
    } else {
        HeatKernel kernel(g, opts.dense_cap);
        for (double t : times) r.values.push_back(kernel.apply(f0, t));
    }
    for (const auto& f : r.values) r.gamma.push_back(gamma(g, f).values);
    return r;
}

std::vector<double> time_grid(double t_max, std::size_t intervals) {
    if (!(t_max > 0.0) || intervals == 0) throw ValidationError("time grid needs t_max > 0 and >= 1 interval");
    std::vector<double> t(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) t[i] = t_max * static_cast<double>(i) / static_cast<double>(intervals);
    return t;
}

std::vector<VertexFunction> default_probes(const WeightedGraph& g, VertexId x, std::uint64_t seed,
                                           std::size_t n_random) {
    const std::size_t n = g.num_vertices();
    std::vector<VertexFunction> probes;
    Rng rng = make_rng(seed, "probes");
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < n_random; ++i) {
        std::vector<double> v(n);
        double norm = 0.0;
        for (auto& a : v) {
            a = normal(rng);
            norm += a * a;
        }
        norm = std::sqrt(norm);
        for (auto& a : v) a /= norm;
        probes.emplace_back(std::move(v));
    }
    for (const auto& nb : g.neighbors(x)) {
        std::vector<double> v(n, 0.0);
        v[nb.id] = 1.0;
        v[x] = -1.0;
        probes.emplace_back(std::move(v));
    }
    return probes;
}

double mixing_bound(double eps, double kappa) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in (0,1]");
    if (!(kappa > 0.0)) return std::nan("");
    return std::log(1.0 / eps) / kappa;
}

MixingResult mixing_time(const WeightedGraph& g, VertexId x, double eps, double kappa_x,
                         const std::vector<VertexFunction>& probes, const std::vector<double>& times,
                         const HeatFlowOptions& opts) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in (0,1]");
    if (x >= g.num_vertices()) throw ValidationError("vertex out of range");
    check_grid(times);
    MixingResult r;
    r.bound = mixing_bound(eps, kappa_x);
    r.bound_defined = kappa_x > 0.0;

    std::vector<char> all_ok(times.size(), 1);
    std::unique_ptr<HeatKernel> kernel;
    if (!opts.euler) kernel = std::make_unique<HeatKernel>(g, opts.dense_cap);
    for (const auto& f0 : probes) {
        check_function(g, f0, "probe");
        double g0 = local_gradient_sq(g, f0, x);
        if (!(g0 > 0.0)) {
            ++r.probes_skipped;
            continue;
        }
        ++r.probes_used;
        if (kernel) {
            for (std::size_t i = 0; i < times.size(); ++i) {
                if (local_gradient_sq(g, kernel->apply(f0, times[i]), x) > eps * g0) all_ok[i] = 0;
            }
        } else {
            HeatFlowResult flow = heat_flow(g, f0, times, opts);
            for (std::size_t i = 0; i < times.size(); ++i) {
                if (flow.gamma[i][x] > eps * g0) all_ok[i] = 0;
            }
        }
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (all_ok[i]) {
            r.empirical = times[i];
            break;
        }
    }
    return r;
}

SemigroupReport semigroup_gradient_check(const WeightedGraph& g, double kappa_min, const VertexFunction& f0,
                                         const std::vector<double>& times, double tol,
                                         const HeatFlowOptions& opts) {
    HeatFlowResult flow = heat_flow(g, f0, times, opts);
    SemigroupReport rep;
    const double g0 = *std::max_element(flow.gamma[0].begin(), flow.gamma[0].end());
    for (std::size_t i = 0; i < times.size(); ++i) {
        SemigroupRow row;
        row.t = times[i];
        row.max_gamma = *std::max_element(flow.gamma[i].begin(), flow.gamma[i].end());
        row.bound = std::exp(-2.0 * kappa_min * times[i]) * g0;
        row.margin = row.bound * (1.0 + tol) - row.max_gamma;
        row.pass = row.margin >= 0.0;
        rep.passed = rep.passed && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

DecayValue feature_decay(const WeightedGraph& g, const std::vector<VertexFunction>& layers, VertexId x,
                         std::size_t l, double kappa_x, double dt, double min_gamma) {
    if (l >= layers.size()) throw ValidationError("feature_decay: layer index beyond the feature stack");
    if (x >= g.num_vertices()) throw ValidationError("vertex out of range");
    DecayValue d;
    d.bound = std::exp(-kappa_x * static_cast<double>(l) * dt);
    double g0 = local_gradient_sq(g, layers[0], x);
    if (!(g0 > min_gamma)) return d;
    d.defined = true;
    d.distinctiveness = local_gradient_sq(g, layers[l], x) / g0;
    return d;
}

double layer_budget(double eps, double kappa, double dt) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in (0,1]");
    if (!(kappa > 0.0) || !(dt > 0.0)) return std::numeric_limits<double>::infinity();
    return std::floor(std::log(1.0 / eps) / (kappa * dt));
}

}  // namespace curvegnn
