#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "curvegnn/graph/graph.hpp"

namespace curvegnn {

struct HeatFlowOptions {
    std::size_t dense_cap = 2000;  // largest |V| for the eigendecomposition
    bool euler = false;            // explicit Euler steps instead
    double dt = 0.01;              // Euler step
};

struct HeatFlowResult {
    std::vector<double> times;
    VertexFunction f0;
    std::vector<VertexFunction> values;     // f_t per time
    std::vector<std::vector<double>> gamma;  // Γ(f_t,f_t)(x) per time
};

/// Spectral heat kernel of L = −Δ: f_t = U·e^{−tΛ}·Uᵀ·f₀.
class HeatKernel {
public:
    explicit HeatKernel(const WeightedGraph& g, std::size_t dense_cap = 2000);
    VertexFunction apply(const VertexFunction& f0, double t) const;
    const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }

private:
    Eigen::MatrixXd u_;
    Eigen::VectorXd lambda_;
};

/// Dense L = D − W.
Eigen::MatrixXd laplacian_matrix(const WeightedGraph& g);

/// Heat flow on a grid that starts at 0 and strictly increases. Throws
/// ValidationError for a bad grid or when |V| exceeds the dense cap without
/// the Euler fallback.
HeatFlowResult heat_flow(const WeightedGraph& g, const VertexFunction& f0, const std::vector<double>& times,
                         const HeatFlowOptions& opts = {});

/// f_{l+1} = f_l + dt·Δf_l; returns f_0..f_steps.
std::vector<VertexFunction> euler_heat_steps(const WeightedGraph& g, const VertexFunction& f0, double dt,
                                             std::size_t steps);

/// Uniform grid 0, h, 2h, ..., t_max.
std::vector<double> time_grid(double t_max, std::size_t intervals);

/// 32 random unit-norm functions (seeded) followed by e_y − e_x for each y ∼ x.
std::vector<VertexFunction> default_probes(const WeightedGraph& g, VertexId x, std::uint64_t seed,
                                           std::size_t n_random = 32);

struct MixingResult {
    double empirical = std::numeric_limits<double>::infinity();  // +inf: not reached on the grid
    double bound = std::numeric_limits<double>::quiet_NaN();     // NaN when κ ≤ 0
    bool bound_defined = false;
    std::size_t probes_used = 0;     // probes with Γ(f₀)(x) > 0
    std::size_t probes_skipped = 0;  // zero initial gradient at x
};

/// First grid time with Γ(f_t)(x) ≤ eps·Γ(f₀)(x) for every probe, next to
/// log(1/eps)/κ. eps must lie in (0,1].
MixingResult mixing_time(const WeightedGraph& g, VertexId x, double eps, double kappa_x,
                         const std::vector<VertexFunction>& probes, const std::vector<double>& times,
                         const HeatFlowOptions& opts = {});

double mixing_bound(double eps, double kappa);

struct SemigroupRow {
    double t = 0.0;
    double max_gamma = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound·(1+tol) − max_gamma
    bool pass = true;
};

struct SemigroupReport {
    std::vector<SemigroupRow> rows;
    bool passed = true;
};

/// max_x Γ(f_t)(x) ≤ e^{−2κ_min t}·max_x Γ(f₀)(x)·(1 + tol) at every grid time.
SemigroupReport semigroup_gradient_check(const WeightedGraph& g, double kappa_min, const VertexFunction& f0,
                                         const std::vector<double>& times, double tol = 1e-6,
                                         const HeatFlowOptions& opts = {});

struct DecayValue {
    double distinctiveness = std::numeric_limits<double>::quiet_NaN();  // D(x,l); NaN when undefined
    double bound = 0.0;                                                 // e^{−κ·l·dt}
    bool defined = false;
};

/// D(x,l) = Γ(f_l)(x)/Γ(f_0)(x) for layer features f_0..f_l.
DecayValue feature_decay(const WeightedGraph& g, const std::vector<VertexFunction>& layers, VertexId x,
                         std::size_t l, double kappa_x, double dt, double min_gamma = 0.0);

/// Largest layer count l with e^{−κ·l·dt} ≥ eps (floor of log(1/eps)/(κ·dt)).
double layer_budget(double eps, double kappa, double dt);

}  // namespace curvegnn
