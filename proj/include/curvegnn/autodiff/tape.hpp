#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "curvegnn/autodiff/tensor.hpp"

namespace curvegnn::ad {

/// Named trainable array. Lives outside any tape; each training step binds
/// it to a fresh tape with Tape::parameter.
struct Parameter {
    std::string name;
    Tensor value;
};

class Tape;

/// Handle to a node on a tape. Invalidated when the tape is cleared.
class Var {
public:
    Var() = default;

    const Tensor& value() const;
    Tape& tape() const { return *tape_; }
    std::uint32_t id() const noexcept { return id_; }
    bool valid() const noexcept { return tape_ != nullptr; }
    bool requires_grad() const;

    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }

private:
    friend class Tape;
    Var(Tape* t, std::uint32_t id) : tape_(t), id_(id) {}

    Tape* tape_ = nullptr;
    std::uint32_t id_ = 0;
};

/// Gradients of one backward pass, keyed by parameter.
class Gradients {
public:
    /// Gradient of a parameter that was bound to the tape. Throws
    /// ValidationError for a parameter that never took part (detached leaf).
    const Tensor& at(const Parameter& p) const;
    bool contains(const Parameter& p) const { return grads_.count(&p) != 0; }
    std::size_t size() const noexcept { return grads_.size(); }

    void set(const Parameter& p, Tensor g) { grads_[&p] = std::move(g); }

private:
    std::map<const Parameter*, Tensor> grads_;
};

/// Define-by-run reverse-mode tape. Nodes are appended in evaluation order,
/// so reverse insertion order is a valid topological order for backward.
class Tape {
public:
    using BackwardFn = std::function<void(Tape&, std::uint32_t self)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Leaf whose gradient is reported by backward().
    Var parameter(const Parameter& p);
    /// Leaf without gradient.
    Var constant(Tensor value);

    /// Appends an operator result; backward is called with this node's id
    /// once its gradient is complete.
    Var record(Tensor value, std::vector<std::uint32_t> parents, BackwardFn backward);

    /// Accumulated gradient buffer of node id (allocated on first use).
    Tensor& grad(std::uint32_t id);
    const Tensor& value(std::uint32_t id) const { return nodes_.at(id).value; }
    bool requires_grad(std::uint32_t id) const { return nodes_.at(id).requires_grad; }

    /// Propagates d(loss)/d(node) for a 1×1 loss, returns parameter
    /// gradients and clears the tape. Throws ValidationError for a
    /// non-scalar loss or a loss from another tape.
    Gradients backward(const Var& loss);

    std::size_t size() const noexcept { return nodes_.size(); }
    void clear();

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool has_grad = false;
        bool requires_grad = false;
        const Parameter* parameter = nullptr;
        std::vector<std::uint32_t> parents;
        BackwardFn backward;
    };

    std::deque<Node> nodes_;
};

}  // namespace curvegnn::ad
