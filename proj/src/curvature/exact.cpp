#include "curvegnn/curvature/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>

#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/parallel.hpp"
#include "curvegnn/common/rng.hpp"
#include "curvegnn/curvature/operators.hpp"

namespace curvegnn {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Exact: return "exact";
        case Provenance::Sampled: return "sampled";
        case Provenance::Learned: return "learned";
    }
    return "unknown";
}

LocalFormPair build_local_forms(const WeightedGraph& g, VertexId x) {
    LocalFormPair out;
    out.x = x;
    out.basis = two_ball(g, x);
    out.n_neighbors = g.degree(x);
    const std::size_t m = out.basis.size();

    VertexFunction f(std::vector<double>(g.num_vertices(), 0.0));
    auto eval = [&](auto&& form, std::size_t i, std::size_t j) {
        f[out.basis[i]] += 1.0;
        f[out.basis[j]] += 1.0;
        double q = form();
        f[out.basis[i]] = 0.0;
        f[out.basis[j]] = 0.0;
        return q;
    };
    auto q2 = [&] { return gamma2_at(g, f, x); };
    auto q1 = [&] { return local_gradient_sq(g, f, x); };

    // Q(e_i) = Q(2e_i)/4, so the diagonal comes from the same evaluator.
    std::vector<double> diag_a(m), diag_b(m);
    for (std::size_t i = 0; i < m; ++i) {
        diag_a[i] = 0.25 * eval(q2, i, i);
        diag_b[i] = 0.25 * eval(q1, i, i);
    }
    out.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    out.B = out.A;
    const std::size_t ball1 = 1 + out.n_neighbors;
    for (std::size_t i = 0; i < m; ++i) {
        out.A(i, i) = diag_a[i];
        out.B(i, i) = diag_b[i];
        for (std::size_t j = i + 1; j < m; ++j) {
            double a = 0.5 * (eval(q2, i, j) - diag_a[i] - diag_a[j]);
            out.A(i, j) = out.A(j, i) = a;
            if (i < ball1 && j < ball1) {
                double b = 0.5 * (eval(q1, i, j) - diag_b[i] - diag_b[j]);
                out.B(i, j) = out.B(j, i) = b;
            }
        }
    }
    return out;
}

ReducedPencil reduce_local_forms(const LocalFormPair& forms) {
    using Eigen::Index;
    const Index d = static_cast<Index>(forms.n_neighbors);
    const Index s = static_cast<Index>(forms.basis.size()) - 1 - d;
    ReducedPencil out;
    // Gauge fix f(x) = 0: drop row/column 0.
    Eigen::MatrixXd ann = forms.A.block(1, 1, d, d);
    out.B_diag = forms.B.block(1, 1, d, d).diagonal();
    if (s > 0) {
        Eigen::MatrixXd ans = forms.A.block(1, 1 + d, d, s);
        Eigen::MatrixXd ass = forms.A.block(1 + d, 1 + d, s, s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ass);
        const Eigen::VectorXd& lam = eig.eigenvalues();
        const Eigen::MatrixXd& vec = eig.eigenvectors();
        double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
        double tol = 1e-12 * scale;
        Eigen::MatrixXd projected = ans * vec;  // coupling in the eigenbasis
        Eigen::MatrixXd correction = Eigen::MatrixXd::Zero(d, d);
        for (Index k = 0; k < s; ++k) {
            if (lam(k) < -tol) {
                out.unbounded = true;
                break;
            }
            if (lam(k) <= tol) {
                // Null direction of the sphere block: bounded only if uncoupled.
                if (projected.col(k).cwiseAbs().maxCoeff() > 1e-9 * scale) {
                    out.unbounded = true;
                    break;
                }
                continue;
            }
            correction += projected.col(k) * projected.col(k).transpose() / lam(k);
        }
        ann -= correction;
    }
    out.A = 0.5 * (ann + ann.transpose());
    return out;
}

double exact_curvature(const WeightedGraph& g, VertexId x) {
    if (g.degree(x) == 0) {
        throw ValidationError("curvature undefined at isolated vertex " + g.name(x));
    }
    ReducedPencil p = reduce_local_forms(build_local_forms(g, x));
    if (p.unbounded) return -std::numeric_limits<double>::infinity();
    Eigen::VectorXd inv_sqrt = p.B_diag.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd m = inv_sqrt.asDiagonal() * p.A * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

CurvatureEstimate exact_curvature_all(const WeightedGraph& g, std::size_t workers) {
    CurvatureEstimate est;
    est.provenance = Provenance::Exact;
    est.kappa.assign(g.num_vertices(), 0.0);
    std::vector<std::string> failures(g.num_vertices());
    parallel_for(g.num_vertices(), workers, [&](std::size_t x) {
        try {
            est.kappa[x] = exact_curvature(g, static_cast<VertexId>(x));
        } catch (const ValidationError& e) {
            failures[x] = e.what();
        }
    });
    std::string msg;
    std::size_t count = 0;
    for (std::size_t x = 0; x < failures.size(); ++x) {
        if (failures[x].empty()) continue;
        if (count++ < 10) msg += (msg.empty() ? "" : "; ") + failures[x];
    }
    if (count) throw ValidationError(std::to_string(count) + " vertex failure(s): " + msg);
    return est;
}

double sampled_curvature(const WeightedGraph& g, VertexId x, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw ValidationError("sampled_curvature: n_samples must be >= 1");
    auto ball = two_ball(g, x);
    Rng rng = make_rng(derive_seed(seed, "sampled_curvature"), x);
    std::normal_distribution<double> normal(0.0, 1.0);
    VertexFunction f(std::vector<double>(g.num_vertices(), 0.0));
    double best = std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (std::size_t i = 1; i < ball.size(); ++i) f[ball[i]] = normal(rng);
        double grad_sq = local_gradient_sq(g, f, x);
        if (grad_sq < 1e-12) continue;
        ++used;
        best = std::min(best, gamma2_at(g, f, x) / grad_sq);
    }
    if (used == 0) {
        throw NumericalError("sampled_curvature: all " + std::to_string(n_samples) + " draws degenerate at vertex " +
                             g.name(x));
    }
    return best;
}

CurvatureEstimate sampled_curvature_all(const WeightedGraph& g, std::size_t n_samples, std::uint64_t seed,
                                        std::size_t workers) {
    CurvatureEstimate est;
    est.provenance = Provenance::Sampled;
    est.samples = n_samples;
    est.kappa.assign(g.num_vertices(), 0.0);
    parallel_for(g.num_vertices(), workers, [&](std::size_t x) {
        est.kappa[x] = sampled_curvature(g, static_cast<VertexId>(x), n_samples, seed);
    });
    return est;
}

}  // namespace curvegnn
