#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvegnn/autodiff/adam.hpp"
#include "curvegnn/autodiff/nn.hpp"
#include "curvegnn/curvature/estimate.hpp"
#include "curvegnn/curvature/operators.hpp"
#include "curvegnn/graph/graph.hpp"

namespace curvegnn {

/// Hinge penalty max{0, κ̂·Γ − Γ₂}: zero exactly when Γ₂ ≥ κ̂·Γ.
double penalty(double kappa_hat, double gamma_x, double gamma2_x);

/// Candidate family ℱ = {f_θ₁, …, f_θN} of smooth MLP vertex functions.
class FunctionFamily {
public:
    FunctionFamily() = default;
    /// N members with widths [input_dim, hidden..., 1], independently initialised.
    FunctionFamily(std::size_t n_members, std::size_t input_dim, const std::vector<std::size_t>& hidden,
                   std::uint64_t seed);

    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    const ad::SmoothMlp& member(std::size_t i) const { return members_.at(i); }
    ad::SmoothMlp& member(std::size_t i) { return members_.at(i); }

    std::vector<ad::Parameter*> parameters();
    std::vector<const ad::Parameter*> parameters() const;

private:
    std::vector<ad::SmoothMlp> members_;
};

enum class KappaMode {
    Transductive,  // one free scalar per vertex
    Inductive,     // κ̂ = MLP(vertex features), shared across graphs
};

/// Trainable κ̂ and log edge weights.
class LearnedCurvature {
public:
    LearnedCurvature() = default;
    LearnedCurvature(const WeightedGraph& g, std::size_t feature_dim, KappaMode mode,
                     const std::vector<std::size_t>& hidden, std::uint64_t seed, double initial_kappa = 0.0);

    KappaMode mode() const noexcept { return mode_; }

    /// n×1 κ̂ on the tape.
    ad::Var kappa_hat(ad::Tape& tape, const ad::Var& features) const;
    /// κ̂ values without a tape.
    std::vector<double> kappa_values(const VertexFeatures& features) const;

    /// num_edges × 1 realised weights exp(log w) on the tape.
    ad::Var edge_weights(ad::Tape& tape) const;
    std::vector<double> realized_weights() const;

    /// Sets transductive κ̂ values directly.
    void set_kappa(const std::vector<double>& values);

    std::vector<ad::Parameter*> kappa_parameters();
    ad::Parameter& log_weights() noexcept { return log_weights_; }
    std::vector<const ad::Parameter*> parameters() const;

private:
    KappaMode mode_ = KappaMode::Transductive;
    ad::Parameter kappa_;  // transductive
    ad::SmoothMlp kappa_net_;  // inductive
    ad::Parameter log_weights_;
};

struct CurvatureLossTerms {
    ad::Var loss;           // Σ_x (Σ_f 𝓛(κ̂(x), f) − λ κ̂(x))
    ad::Var penalty_total;  // Σ_x Σ_f 𝓛(κ̂(x), f)
};

/// 𝓛_curv on the tape. Gradients reach κ̂, every family member and the
/// weights behind `ops`. Throws NumericalError naming the first vertex with
/// a non-finite penalty.
CurvatureLossTerms curvature_loss(const TapedOperators& ops, const FunctionFamily& family, const ad::Var& kappa_hat,
                                  const ad::Var& features, double lambda, Gamma2Form form = Gamma2Form::Operator);

struct CurvatureLearnConfig {
    std::size_t n_functions = 3;
    double lambda = 1.0;
    std::size_t epochs = 2000;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden{16};
    KappaMode mode = KappaMode::Transductive;
    bool train_family = true;
    bool learn_edge_weights = false;
    double initial_kappa = 0.0;
    Gamma2Form form = Gamma2Form::Operator;
};

struct CurvatureLearnResult {
    CurvatureEstimate estimate;       // provenance learned
    std::vector<double> edge_weights;  // realised weights the estimate refers to
    std::vector<double> loss_history;
};

/// Alternating sup-inf realised as joint Adam steps on 𝓛_curv: κ̂ rises
/// through −λκ̂ until held by the hinge, family members descend their
/// penalty. Deterministic for a given seed.
CurvatureLearnResult estimate_curvature(const WeightedGraph& g, const VertexFeatures& features,
                                        const CurvatureLearnConfig& cfg);

}  // namespace curvegnn
