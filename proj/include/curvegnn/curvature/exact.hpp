#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "curvegnn/curvature/estimate.hpp"
#include "curvegnn/graph/graph.hpp"

namespace curvegnn {

/// Matrices of the quadratic forms f ↦ Γ₂(f,f)(x) (A) and f ↦ Γ(f,f)(x)
/// (B) in the basis two_ball(g, x): x first, then N(x), then the 2-sphere.
struct LocalFormPair {
    VertexId x = 0;
    std::vector<VertexId> basis;
    std::size_t n_neighbors = 0;
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
};

/// Assembles A and B by polarisation of gamma2_at / local_gradient_sq on the
/// canonical basis vectors.
LocalFormPair build_local_forms(const WeightedGraph& g, VertexId x);

/// The pencil on the neighbour coordinates after fixing f(x) = 0 and
/// minimising Γ₂ over the 2-sphere coordinates (Schur complement).
struct ReducedPencil {
    Eigen::MatrixXd A;       // d_x × d_x
    Eigen::VectorXd B_diag;  // ½ w(x, y)
    bool unbounded = false;  // 2-sphere block not bounded below
};

ReducedPencil reduce_local_forms(const LocalFormPair& forms);

/// κ(x) = inf { Γ₂(f,f)(x) / Γ(f,f)(x) : Γ(f,f)(x) > 0 } via the smallest
/// eigenvalue of B^{-1/2} A_red B^{-1/2}. Returns −∞ when the form is
/// unbounded below. Throws ValidationError for an isolated vertex.
double exact_curvature(const WeightedGraph& g, VertexId x);

/// exact_curvature for every vertex; parallel over vertices. Failures
/// (isolated vertices) are collected and reported in one ValidationError.
CurvatureEstimate exact_curvature_all(const WeightedGraph& g, std::size_t workers = 1);

/// Minimum of Γ₂/Γ at x over n_samples functions with i.i.d. N(0,1) values
/// on B₂(x) \ {x} and f(x) = 0. Draws with Γ < 1e-12 are skipped; throws
/// NumericalError when every draw is skipped.
double sampled_curvature(const WeightedGraph& g, VertexId x, std::size_t n_samples, std::uint64_t seed);

CurvatureEstimate sampled_curvature_all(const WeightedGraph& g, std::size_t n_samples, std::uint64_t seed,
                                        std::size_t workers = 1);

}  // namespace curvegnn
