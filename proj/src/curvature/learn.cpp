#include "curvegnn/curvature/learn.hpp"

#include <cmath>
#include <tuple>

#include "curvegnn/common/errors.hpp"
#include "curvegnn/common/rng.hpp"

namespace curvegnn {

double penalty(double kappa_hat, double gamma_x, double gamma2_x) {
    return std::max(0.0, kappa_hat * gamma_x - gamma2_x);
}

FunctionFamily::FunctionFamily(std::size_t n_members, std::size_t input_dim, const std::vector<std::size_t>& hidden,
                               std::uint64_t seed) {
    std::vector<std::size_t> widths{input_dim};
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(1);
    for (std::size_t i = 0; i < n_members; ++i) {
        members_.emplace_back("family" + std::to_string(i), widths, derive_seed(seed, i));
    }
}

std::vector<ad::Parameter*> FunctionFamily::parameters() {
    std::vector<ad::Parameter*> out;
    for (auto& m : members_) {
        auto p = m.parameters();
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

std::vector<const ad::Parameter*> FunctionFamily::parameters() const {
    std::vector<const ad::Parameter*> out;
    for (const auto& m : members_) {
        auto p = m.parameters();
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

LearnedCurvature::LearnedCurvature(const WeightedGraph& g, std::size_t feature_dim, KappaMode mode,
                                   const std::vector<std::size_t>& hidden, std::uint64_t seed, double initial_kappa)
    : mode_(mode) {
    if (mode_ == KappaMode::Transductive) {
        kappa_ = {"kappa_hat", ad::Tensor(g.num_vertices(), 1, initial_kappa)};
    } else {
        std::vector<std::size_t> widths{feature_dim};
        widths.insert(widths.end(), hidden.begin(), hidden.end());
        widths.push_back(1);
        kappa_net_ = ad::SmoothMlp("kappa_net", widths, derive_seed(seed, "kappa_net"));
        kappa_net_.layers().back().bias.value[0] = initial_kappa;
    }
    std::vector<double> logw;
    logw.reserve(g.num_edges());
    for (const auto& e : g.edges()) logw.push_back(std::log(e.weight));
    log_weights_ = {"log_edge_weights", ad::Tensor::column(std::move(logw))};
}

ad::Var LearnedCurvature::kappa_hat(ad::Tape& tape, const ad::Var& features) const {
    if (mode_ == KappaMode::Transductive) {
        if (features.rows() != kappa_.value.rows()) {
            throw ValidationError("kappa_hat: " + std::to_string(features.rows()) + " feature rows for " +
                                  std::to_string(kappa_.value.rows()) + " transductive parameters");
        }
        return tape.parameter(kappa_);
    }
    return kappa_net_.forward(tape, features);
}

std::vector<double> LearnedCurvature::kappa_values(const VertexFeatures& features) const {
    if (mode_ == KappaMode::Transductive) return kappa_.value.values();
    return kappa_net_.forward(features).values;
}

ad::Var LearnedCurvature::edge_weights(ad::Tape& tape) const { return ad::exp(tape.parameter(log_weights_)); }

std::vector<double> LearnedCurvature::realized_weights() const {
    std::vector<double> w(log_weights_.value.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights_.value[i]);
    return w;
}

void LearnedCurvature::set_kappa(const std::vector<double>& values) {
    if (mode_ != KappaMode::Transductive) throw ValidationError("set_kappa: only transductive κ̂ can be set");
    if (values.size() != kappa_.value.size()) throw ValidationError("set_kappa: length mismatch");
    kappa_.value = ad::Tensor::column(values);
}

std::vector<ad::Parameter*> LearnedCurvature::kappa_parameters() {
    if (mode_ == KappaMode::Transductive) return {&kappa_};
    return kappa_net_.parameters();
}

std::vector<const ad::Parameter*> LearnedCurvature::parameters() const {
    std::vector<const ad::Parameter*> out;
    if (mode_ == KappaMode::Transductive) {
        out.push_back(&kappa_);
    } else {
        auto p = kappa_net_.parameters();
        out.insert(out.end(), p.begin(), p.end());
    }
    out.push_back(&log_weights_);
    return out;
}

CurvatureLossTerms curvature_loss(const TapedOperators& ops, const FunctionFamily& family, const ad::Var& kappa_hat,
                                  const ad::Var& features, double lambda, Gamma2Form form) {
    ad::Tape& tape = kappa_hat.tape();
    ad::Var penalties = tape.constant(ad::Tensor(kappa_hat.rows(), 1, 0.0));
    for (std::size_t i = 0; i < family.size(); ++i) {
        ad::Var f = family.member(i).forward(tape, features);
        ad::Var grad_sq, g2;
        if (form == Gamma2Form::Operator) {
            std::tie(grad_sq, g2) = ops.gamma_and_gamma2(f);
        } else {
            grad_sq = ops.gamma(f);
            g2 = ops.gamma2(f, form);
        }
        penalties = ad::add(penalties, ad::relu(ad::sub(ad::mul(kappa_hat, grad_sq), g2)));
    }
    const ad::Tensor& pv = penalties.value();
    for (std::size_t x = 0; x < pv.size(); ++x) {
        if (!std::isfinite(pv[x])) {
            throw NumericalError("curvature loss: non-finite penalty at vertex " + std::to_string(x));
        }
    }
    ad::Var penalty_total = ad::sum(penalties);
    ad::Var loss = ad::sub(penalty_total, ad::scale(ad::sum(kappa_hat), lambda));
    return {loss, penalty_total};
}

CurvatureLearnResult estimate_curvature(const WeightedGraph& g, const VertexFeatures& features,
                                        const CurvatureLearnConfig& cfg) {
    check_features(g, features);
    if (cfg.n_functions == 0) throw ValidationError("estimate_curvature: family must have at least one member");
    if (cfg.lambda < 0.0) throw ValidationError("estimate_curvature: lambda must be >= 0");
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
        if (g.degree(x) == 0) throw ValidationError("estimate_curvature: isolated vertex " + g.name(x));
    }

    FunctionFamily family(cfg.n_functions, features.cols, cfg.hidden, derive_seed(cfg.seed, "family"));
    LearnedCurvature params(g, features.cols, cfg.mode, cfg.hidden, derive_seed(cfg.seed, "kappa"), cfg.initial_kappa);

    ad::Adam adam(ad::AdamConfig{.learning_rate = cfg.learning_rate});
    adam.add_group(params.kappa_parameters());
    if (cfg.train_family) adam.add_group(family.parameters());
    if (cfg.learn_edge_weights) {
        ad::Parameter* lw = &params.log_weights();
        adam.add_group(std::span<ad::Parameter* const>(&lw, 1));
    }

    const ad::Tensor x_tensor = ad::to_tensor(features);
    CurvatureLearnResult result;
    result.loss_history.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        ad::Tape tape;
        ad::Var x = tape.constant(x_tensor);
        ad::Var kappa = params.kappa_hat(tape, x);
        TapedOperators ops = cfg.learn_edge_weights ? TapedOperators(g, params.edge_weights(tape))
                                                    : TapedOperators(g, tape);
        auto terms = curvature_loss(ops, family, kappa, x, cfg.lambda, cfg.form);
        double loss = terms.loss.value().item();
        if (!std::isfinite(loss)) {
            throw NumericalError("estimate_curvature: loss diverged at epoch " + std::to_string(epoch));
        }
        result.loss_history.push_back(loss);
        adam.step(tape.backward(terms.loss));
    }

    result.estimate.provenance = Provenance::Learned;
    result.estimate.kappa = params.kappa_values(features);
    result.edge_weights = cfg.learn_edge_weights ? params.realized_weights() : [&] {
        std::vector<double> w;
        for (const auto& e : g.edges()) w.push_back(e.weight);
        return w;
    }();
    return result;
}

}  // namespace curvegnn
