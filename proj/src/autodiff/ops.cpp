#include "curvegnn/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>

#include "curvegnn/common/errors.hpp"

namespace curvegnn::ad {

namespace {

struct Broadcast {
    std::size_t rows, cols;
};

Broadcast broadcast_shape(const Tensor& a, const Tensor& b, const char* op) {
    auto dim = [&](std::size_t x, std::size_t y) {
        if (x == y || y == 1) return x;
        if (x == 1) return y;
        throw ValidationError(std::string("autodiff: ") + op + " shape mismatch " + a.shape_string() + " vs " +
                              b.shape_string());
    };
    return {dim(a.rows(), b.rows()), dim(a.cols(), b.cols())};
}

inline double at_broadcast(const Tensor& t, std::size_t r, std::size_t c) {
    return t(t.rows() == 1 ? 0 : r, t.cols() == 1 ? 0 : c);
}

/// grad_out (rows×cols) summed down to the shape of target.
void accumulate_reduced(Tensor& target_grad, const Tensor& grad_out, double factor = 1.0) {
    std::size_t tr = target_grad.rows(), tc = target_grad.cols();
    for (std::size_t r = 0; r < grad_out.rows(); ++r) {
        for (std::size_t c = 0; c < grad_out.cols(); ++c) {
            target_grad(tr == 1 ? 0 : r, tc == 1 ? 0 : c) += factor * grad_out(r, c);
        }
    }
}

template <class F>
Tensor map_values(const Tensor& a, F f) {
    Tensor out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
    return out;
}

/// Unary elementwise op whose derivative is expressed through input x and output y.
template <class F, class D>
Var unary(const Var& a, F f, D dfdx) {
    Tape& t = a.tape();
    Tensor y = map_values(a.value(), f);
    std::uint32_t ia = a.id();
    return t.record(std::move(y), {ia}, [ia, dfdx](Tape& tp, std::uint32_t self) {
        const Tensor& g = tp.grad(self);
        const Tensor& x = tp.value(ia);
        const Tensor& y = tp.value(self);
        Tensor& ga = tp.grad(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * dfdx(x[i], y[i]);
    });
}

void same_tape(const Var& a, const Var& b) {
    if (&a.tape() != &b.tape()) throw ValidationError("autodiff: operands live on different tapes");
}

}  // namespace

Var add(const Var& a, const Var& b) {
    same_tape(a, b);
    const Tensor &va = a.value(), &vb = b.value();
    auto s = broadcast_shape(va, vb, "add");
    Tensor out(s.rows, s.cols);
    for (std::size_t r = 0; r < s.rows; ++r)
        for (std::size_t c = 0; c < s.cols; ++c) out(r, c) = at_broadcast(va, r, c) + at_broadcast(vb, r, c);
    std::uint32_t ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::uint32_t self) {
        const Tensor g = t.grad(self);
        if (t.requires_grad(ia)) accumulate_reduced(t.grad(ia), g);
        if (t.requires_grad(ib)) accumulate_reduced(t.grad(ib), g);
    });
}

Var sub(const Var& a, const Var& b) {
    same_tape(a, b);
    const Tensor &va = a.value(), &vb = b.value();
    auto s = broadcast_shape(va, vb, "sub");
    Tensor out(s.rows, s.cols);
    for (std::size_t r = 0; r < s.rows; ++r)
        for (std::size_t c = 0; c < s.cols; ++c) out(r, c) = at_broadcast(va, r, c) - at_broadcast(vb, r, c);
    std::uint32_t ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::uint32_t self) {
        const Tensor g = t.grad(self);
        if (t.requires_grad(ia)) accumulate_reduced(t.grad(ia), g);
        if (t.requires_grad(ib)) accumulate_reduced(t.grad(ib), g, -1.0);
    });
}

Var mul(const Var& a, const Var& b) {
    same_tape(a, b);
    const Tensor &va = a.value(), &vb = b.value();
    auto s = broadcast_shape(va, vb, "mul");
    Tensor out(s.rows, s.cols);
    for (std::size_t r = 0; r < s.rows; ++r)
        for (std::size_t c = 0; c < s.cols; ++c) out(r, c) = at_broadcast(va, r, c) * at_broadcast(vb, r, c);
    std::uint32_t ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::uint32_t self) {
        const Tensor g = t.grad(self);
        const Tensor& va = t.value(ia);
        const Tensor& vb = t.value(ib);
        if (t.requires_grad(ia)) {
            Tensor ga(g.rows(), g.cols());
            for (std::size_t r = 0; r < g.rows(); ++r)
                for (std::size_t c = 0; c < g.cols(); ++c) ga(r, c) = g(r, c) * at_broadcast(vb, r, c);
            accumulate_reduced(t.grad(ia), ga);
        }
        if (t.requires_grad(ib)) {
            Tensor gb(g.rows(), g.cols());
            for (std::size_t r = 0; r < g.rows(); ++r)
                for (std::size_t c = 0; c < g.cols(); ++c) gb(r, c) = g(r, c) * at_broadcast(va, r, c);
            accumulate_reduced(t.grad(ib), gb);
        }
    });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var scale(const Var& a, double s) {
    return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Var add_scalar(const Var& a, double s) {
    return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Var matmul(const Var& a, const Var& b) {
    same_tape(a, b);
    const Tensor &va = a.value(), &vb = b.value();
    if (va.cols() != vb.rows()) {
        throw ValidationError("autodiff: matmul shape mismatch " + va.shape_string() + " x " + vb.shape_string());
    }
    std::size_t n = va.rows(), k = va.cols(), m = vb.cols();
    Tensor out(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            double aip = va(i, p);
            if (aip == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) out(i, j) += aip * vb(p, j);
        }
    std::uint32_t ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), {ia, ib}, [ia, ib, n, k, m](Tape& t, std::uint32_t self) {
        const Tensor g = t.grad(self);
        const Tensor& va = t.value(ia);
        const Tensor& vb = t.value(ib);
        if (t.requires_grad(ia)) {
            Tensor& ga = t.grad(ia);  // g · bᵀ
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < m; ++j) s += g(i, j) * vb(p, j);
                    ga(i, p) += s;
                }
        }
        if (t.requires_grad(ib)) {
            Tensor& gb = t.grad(ib);  // aᵀ · g
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    double aip = va(i, p);
                    if (aip == 0.0) continue;
                    for (std::size_t j = 0; j < m; ++j) gb(p, j) += aip * g(i, j);
                }
        }
    });
}

Var sigmoid(const Var& a) {
    return unary(
        a,
        [](double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); },
        [](double, double y) { return y * (1.0 - y); });
}

Var relu(const Var& a) {
    return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var exp(const Var& a) {
    return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
    return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var square(const Var& a) {
    return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var reciprocal(const Var& a) {
    return unary(a, [](double x) { return 1.0 / x; }, [](double, double y) { return -y * y; });
}

Var sum(const Var& a) {
    double s = 0.0;
    for (double v : a.value().data()) s += v;
    std::uint32_t ia = a.id();
    return a.tape().record(Tensor::scalar(s), {ia}, [ia](Tape& t, std::uint32_t self) {
        double g = t.grad(self)[0];
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
    });
}

Var mean(const Var& a) {
    std::size_t n = a.value().size();
    if (n == 0) throw ValidationError("autodiff: mean of an empty tensor");
    return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var gather_rows(const Var& a, std::span<const std::uint32_t> index) {
    const Tensor& va = a.value();
    std::size_t c = va.cols();
    Tensor out(index.size(), c);
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= va.rows()) throw ValidationError("autodiff: gather_rows index out of range");
        for (std::size_t j = 0; j < c; ++j) out(i, j) = va(index[i], j);
    }
    std::vector<std::uint32_t> idx(index.begin(), index.end());
    std::uint32_t ia = a.id();
    return a.tape().record(std::move(out), {ia}, [ia, idx = std::move(idx), c](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < c; ++j) ga(idx[i], j) += g(i, j);
    });
}

Var scatter_add_rows(const Var& a, std::span<const std::uint32_t> index, std::size_t n_out) {
    const Tensor& va = a.value();
    if (index.size() != va.rows()) throw ValidationError("autodiff: scatter_add_rows index length mismatch");
    std::size_t c = va.cols();
    Tensor out(n_out, c);
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= n_out) throw ValidationError("autodiff: scatter_add_rows index out of range");
        for (std::size_t j = 0; j < c; ++j) out(index[i], j) += va(i, j);
    }
    std::vector<std::uint32_t> idx(index.begin(), index.end());
    std::uint32_t ia = a.id();
    return a.tape().record(std::move(out), {ia}, [ia, idx = std::move(idx), c](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < c; ++j) ga(i, j) += g(idx[i], j);
    });
}

Var segment_mean_rows(const Var& a, std::span<const std::uint32_t> segment, std::size_t n_segments) {
    if (segment.size() != a.value().rows()) throw ValidationError("autodiff: segment ids length mismatch");
    std::vector<double> counts(n_segments, 0.0);
    for (auto s : segment) {
        if (s >= n_segments) throw ValidationError("autodiff: segment id out of range");
        counts[s] += 1.0;
    }
    std::vector<double> inv(segment.size());
    for (std::size_t i = 0; i < segment.size(); ++i) inv[i] = 1.0 / counts[segment[i]];
    Var weights = a.tape().constant(Tensor::column(std::move(inv)));
    return scatter_add_rows(mul(a, weights), segment, n_segments);
}

Var column(const Var& a, std::size_t j) {
    const Tensor& va = a.value();
    if (j >= va.cols()) throw ValidationError("autodiff: column index out of range");
    Tensor out(va.rows(), 1);
    for (std::size_t r = 0; r < va.rows(); ++r) out(r, 0) = va(r, j);
    std::uint32_t ia = a.id();
    return a.tape().record(std::move(out), {ia}, [ia, j](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        Tensor& ga = t.grad(ia);
        for (std::size_t r = 0; r < g.rows(); ++r) ga(r, j) += g(r, 0);
    });
}

Var cross_entropy(const Var& logits, std::span<const int> labels, std::span<const char> mask) {
    const Tensor& z = logits.value();
    std::size_t n = z.rows(), k = z.cols();
    if (labels.size() != n || mask.size() != n) throw ValidationError("cross_entropy: label/mask length mismatch");
    Tensor prob(n, k);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < n; ++r) {
        double mx = z(r, 0);
        for (std::size_t c = 1; c < k; ++c) mx = std::max(mx, z(r, c));
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c) s += std::exp(z(r, c) - mx);
        double lse = mx + std::log(s);
        for (std::size_t c = 0; c < k; ++c) prob(r, c) = std::exp(z(r, c) - lse);
        if (!mask[r]) continue;
        if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= k) {
            throw ValidationError("cross_entropy: label " + std::to_string(labels[r]) + " at row " +
                                  std::to_string(r) + " outside [0," + std::to_string(k) + ")");
        }
        total += lse - z(r, static_cast<std::size_t>(labels[r]));
        ++count;
    }
    if (count == 0) throw ValidationError("cross_entropy: empty mask");
    double inv = 1.0 / static_cast<double>(count);
    std::vector<int> lab(labels.begin(), labels.end());
    std::vector<char> msk(mask.begin(), mask.end());
    std::uint32_t iz = logits.id();
    return logits.tape().record(
        Tensor::scalar(total * inv), {iz},
        [iz, prob = std::move(prob), lab = std::move(lab), msk = std::move(msk), inv](Tape& t, std::uint32_t self) {
            double g = t.grad(self)[0] * inv;
            Tensor& gz = t.grad(iz);
            for (std::size_t r = 0; r < prob.rows(); ++r) {
                if (!msk[r]) continue;
                for (std::size_t c = 0; c < prob.cols(); ++c) {
                    double y = static_cast<std::size_t>(lab[r]) == c ? 1.0 : 0.0;
                    gz(r, c) += g * (prob(r, c) - y);
                }
            }
        });
}

Var mse(const Var& pred, std::span<const double> target, std::span<const char> mask) {
    const Tensor& p = pred.value();
    if (p.cols() != 1 || target.size() != p.rows() || mask.size() != p.rows()) {
        throw ValidationError("mse: prediction must be n×1 with matching target and mask");
    }
    std::vector<double> m(mask.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        m[i] = mask[i] ? 1.0 : 0.0;
        count += mask[i] ? 1 : 0;
    }
    if (count == 0) throw ValidationError("mse: empty mask");
    Tape& t = pred.tape();
    Var diff = sub(pred, t.constant(Tensor::column(std::vector<double>(target.begin(), target.end()))));
    Var masked = mul(square(diff), t.constant(Tensor::column(std::move(m))));
    return scale(sum(masked), 1.0 / static_cast<double>(count));
}

}  // namespace curvegnn::ad
