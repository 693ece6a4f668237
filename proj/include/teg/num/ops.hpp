#pragma once

#include <vector>

#include "teg/num/tensor.hpp"

// Differentiable ops over rank-1/2 tensors. Each op computes its value
// eagerly and, when grad is enabled, records parents plus a backprop closure
// on the output node. Shapes are validated up front; mismatches throw
// ShapeError naming both shapes.
namespace teg::num::ops {

TensorPtr add(const TensorPtr& a, const TensorPtr& b);
TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(const TensorPtr& a, const TensorPtr& b);
// y = m*x + c, elementwise with scalar constants.
TensorPtr affine(const TensorPtr& x, double m, double c);
TensorPtr smul(const TensorPtr& x, double s);
TensorPtr relu(const TensorPtr& x);
TensorPtr sigmoid(const TensorPtr& x);
TensorPtr clamp_min(const TensorPtr& x, double lo);
TensorPtr log(const TensorPtr& x);
TensorPtr sum_all(const TensorPtr& x);
TensorPtr mean_all(const TensorPtr& x);

// c[m,n] = a[m,k] b[k,n]
TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);
// c[m,n] = a[m,k] b[n,k]^T
TensorPtr matmul_nt(const TensorPtr& a, const TensorPtr& b);
TensorPtr transpose(const TensorPtr& x);

TensorPtr softmax_rows(const TensorPtr& x);
// axis 0: down columns; axis 1 (or -1): along rows.
TensorPtr softmax(const TensorPtr& x, int axis);
// Per-row layer norm with learned gain/bias over the column dimension.
TensorPtr layernorm_rows(const TensorPtr& x, const TensorPtr& gain, const TensorPtr& bias,
                         double eps = 1e-5);

TensorPtr concat_cols(const std::vector<TensorPtr>& parts);
TensorPtr concat_rows(const std::vector<TensorPtr>& parts);
TensorPtr slice_cols(const TensorPtr& x, int c0, int c1);
TensorPtr slice_rows(const TensorPtr& x, int r0, int r1);

// y[i,:] = x[ids[i],:]  (embedding lookup)
TensorPtr gather_rows(const TensorPtr& x, const std::vector<int>& ids);
// y[i,0] = x[i, ids[i]]  (per-step picked probability)
TensorPtr select_per_row(const TensorPtr& x, const std::vector<int>& ids);
// y[r, ids[j]] += alpha[r, j]  (copy distribution over a vocab of `cols`)
TensorPtr scatter_add_cols(const TensorPtr& alpha, const std::vector<int>& ids, int cols);

// y[i,j] = x[i,j] * v[i]    with v of shape {rows} or {rows,1}
TensorPtr mul_colvec(const TensorPtr& x, const TensorPtr& v);
// y[i,j] = x[i,j] + v[j]    with v of shape {cols} or {1,cols}
TensorPtr add_rowvec(const TensorPtr& x, const TensorPtr& v);
// y[i,:] = mean over rows of x  -> shape {1, cols}
TensorPtr mean_rows(const TensorPtr& x);
// y[i,j] = x[i,j] / sum_k x[i,k]; a zero-sum row stays zero (no gradient).
TensorPtr normalize_rows(const TensorPtr& x);

// Per-row cosine similarity of paired rows -> {rows, 1}; 0 when either norm
// is below 1e-12 (with zero gradient there).
TensorPtr cosine_rows(const TensorPtr& a, const TensorPtr& b);
// Per-row (x - min)/(max - min); a row with max == min maps to zeros.
TensorPtr minmax_rows(const TensorPtr& x);
// Row gate: out row i = v row i when r[i] > phi else zeros. The comparison is
// treated as a constant during backprop: gradient flows to v on open rows
// only, and r receives none.
TensorPtr gate_rows(const TensorPtr& r, const TensorPtr& v, double phi);

// out[r,c] = sum_j probs[j] * bank[j + r, c], r in [0, ell). probs has
// bank_rows - ell + 1 entries. Soft selection over all contiguous slices.
TensorPtr soft_slice_mix(const TensorPtr& bank, const TensorPtr& probs, int ell);

TensorPtr reshape(const TensorPtr& x, std::vector<int> shape);

}  // namespace teg::num::ops
