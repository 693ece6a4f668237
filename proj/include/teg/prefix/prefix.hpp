#pragma once

#include <vector>

#include "teg/num/tensor.hpp"

namespace teg::prefix {

// Length of the bank slice used for n topics: ceil(L_base * n / n_max).
int subprefix_length(int n, int l_base, int n_max);

struct Selection {
    int n = 0;         // topic count
    int ell = 0;       // slice length
    int idx = 0;       // argmax start (hard mode; informative in soft mode)
    bool hard = false;
    num::TensorPtr probs;  // {1, L_base - ell + 1} over start positions
};

// Predicts a start-position distribution from h0 with the selector linear
// map, masked to the valid range, and slices each bank sheet. Soft mode
// returns the probability-weighted mixture of every valid slice (keeps
// gradients flowing to bank and selector); hard mode slices at the argmax.
// Sheets are (key, value) tensors per encoder layer, each {L_base, d_model}.
struct SelectedPrefix {
    Selection sel;
    std::vector<num::TensorPtr> k;  // one {ell, d_model} per layer
    std::vector<num::TensorPtr> v;
};

SelectedPrefix select_subprefix(const num::TensorPtr& h0, int n,
                                const std::vector<num::TensorPtr>& bank_k,
                                const std::vector<num::TensorPtr>& bank_v,
                                const num::TensorPtr& selector_w,
                                const num::TensorPtr& selector_b, int n_max, bool hard);

// Fixed-length variant (no selector): the full bank, idx 0.
SelectedPrefix full_prefix(const std::vector<num::TensorPtr>& bank_k,
                           const std::vector<num::TensorPtr>& bank_v);

}  // namespace teg::prefix
