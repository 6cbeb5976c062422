#include "curvegnn/autodiff/tape.hpp"

#include <numeric>

#include "curvegnn/common/errors.hpp"

namespace curvegnn::ad {

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    std::size_t n = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    if (n != data_.size()) {
        throw ValidationError("tensor: shape " + shape_string() + " needs " + std::to_string(n) + " values, got " +
                              std::to_string(data_.size()));
    }
}

Tensor Tensor::column(std::vector<double> v) {
    std::size_t n = v.size();
    return Tensor({n, 1}, std::move(v));
}

Tensor Tensor::row(std::vector<double> v) {
    std::size_t n = v.size();
    return Tensor({1, n}, std::move(v));
}

double Tensor::item() const {
    if (data_.size() != 1) throw ValidationError("tensor: item() on shape " + shape_string());
    return data_[0];
}

std::string Tensor::shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

const Tensor& Var::value() const {
    if (!tape_) throw ValidationError("autodiff: use of an empty Var");
    return tape_->value(id_);
}

bool Var::requires_grad() const { return tape_ && tape_->requires_grad(id_); }

const Tensor& Gradients::at(const Parameter& p) const {
    auto it = grads_.find(&p);
    if (it == grads_.end()) {
        throw ValidationError("autodiff: parameter '" + p.name + "' is detached (not on the tape)");
    }
    return it->second;
}

Var Tape::parameter(const Parameter& p) {
    Node n;
    n.value = p.value;
    n.requires_grad = true;
    n.parameter = &p;
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Tensor value) {
    Node n;
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::record(Tensor value, std::vector<std::uint32_t> parents, BackwardFn backward) {
    Node n;
    n.value = std::move(value);
    for (auto p : parents) n.requires_grad = n.requires_grad || nodes_.at(p).requires_grad;
    if (n.requires_grad) {
        n.parents = std::move(parents);
        n.backward = std::move(backward);
    }
    nodes_.push_back(std::move(n));
    return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Tensor& Tape::grad(std::uint32_t id) {
    Node& n = nodes_.at(id);
    if (!n.has_grad) {
        n.grad = Tensor(n.value.shape(), std::vector<double>(n.value.size(), 0.0));
        n.has_grad = true;
    }
    return n.grad;
}

Gradients Tape::backward(const Var& loss) {
    if (&loss.tape() != this) throw ValidationError("autodiff: loss belongs to another tape");
    const Tensor& lv = value(loss.id());
    if (lv.size() != 1) throw ValidationError("autodiff: backward needs a scalar loss, got shape " + lv.shape_string());

    grad(loss.id())[0] = 1.0;
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.has_grad || !n.requires_grad || !n.backward) continue;
        n.backward(*this, static_cast<std::uint32_t>(i));
    }

    Gradients out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        Node& n = nodes_[i];
        if (!n.parameter) continue;
        Tensor g = n.has_grad ? std::move(n.grad) : Tensor(n.value.shape(), std::vector<double>(n.value.size(), 0.0));
        if (out.contains(*n.parameter)) {
            // Parameter bound more than once: gradients add.
            Tensor acc = out.at(*n.parameter);
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += g[k];
            out.set(*n.parameter, std::move(acc));
        } else {
            out.set(*n.parameter, std::move(g));
        }
    }
    clear();
    return out;
}

void Tape::clear() { nodes_.clear(); }

}  // namespace curvegnn::ad
