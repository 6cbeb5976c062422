#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "curvegnn/autodiff/tape.hpp"

namespace curvegnn::ad {

// Elementwise binary ops broadcast along any dimension of size 1
// (scalar, row vector, column vector against a matrix).
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }

Var neg(const Var& a);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);

Var matmul(const Var& a, const Var& b);

Var sigmoid(const Var& a);
Var relu(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var square(const Var& a);
Var reciprocal(const Var& a);

/// Sum of all entries (1×1).
Var sum(const Var& a);
Var mean(const Var& a);

/// Rows a[index[i]] stacked into an index.size() × cols tensor.
Var gather_rows(const Var& a, std::span<const std::uint32_t> index);
/// out[index[i]] += a[i]; out has n_out rows.
Var scatter_add_rows(const Var& a, std::span<const std::uint32_t> index, std::size_t n_out);
/// Per-segment mean of rows; segment ids in [0, n_segments), every segment non-empty.
Var segment_mean_rows(const Var& a, std::span<const std::uint32_t> segment, std::size_t n_segments);

/// Column j as an n×1 tensor.
Var column(const Var& a, std::size_t j);

/// Mean softmax cross-entropy over rows with mask[r] != 0; labels are class
/// indices in [0, cols).
Var cross_entropy(const Var& logits, std::span<const int> labels, std::span<const char> mask);
/// Mean squared error over rows with mask[r] != 0 of an n×1 prediction.
Var mse(const Var& pred, std::span<const double> target, std::span<const char> mask);

}  // namespace curvegnn::ad
