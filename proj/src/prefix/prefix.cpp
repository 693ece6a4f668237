#include "teg/prefix/prefix.hpp"

#include <cmath>

#include "teg/num/ops.hpp"
#include "teg/util/errors.hpp"

namespace teg::prefix {

namespace ops = num::ops;

int subprefix_length(int n, int l_base, int n_max) {
    if (n < 1 || n > n_max)
        throw DataError("topic count " + std::to_string(n) + " outside [1, " +
                        std::to_string(n_max) + "]");
    return (int)std::ceil((double)l_base * n / n_max);
}

SelectedPrefix select_subprefix(const num::TensorPtr& h0, int n,
                                const std::vector<num::TensorPtr>& bank_k,
                                const std::vector<num::TensorPtr>& bank_v,
                                const num::TensorPtr& selector_w,
                                const num::TensorPtr& selector_b, int n_max, bool hard) {
    int l_base = bank_k.at(0)->rows();
    int ell = subprefix_length(n, l_base, n_max);
    int starts = l_base - ell + 1;

    // logits over all L_base start positions, truncated to the valid range
    auto logits = ops::add_rowvec(ops::matmul_nt(h0, selector_w), selector_b);
    auto valid = ops::slice_cols(logits, 0, starts);
    auto probs = ops::softmax_rows(valid);

    int idx = 0;
    for (int j = 1; j < starts; ++j)
        if (probs->data[(size_t)j] > probs->data[(size_t)idx]) idx = j;

    SelectedPrefix out;
    out.sel = {n, ell, idx, hard, probs};
    for (size_t layer = 0; layer < bank_k.size(); ++layer) {
        if (hard) {
            out.k.push_back(ops::slice_rows(bank_k[layer], idx, idx + ell));
            out.v.push_back(ops::slice_rows(bank_v[layer], idx, idx + ell));
        } else {
            out.k.push_back(ops::soft_slice_mix(bank_k[layer], probs, ell));
            out.v.push_back(ops::soft_slice_mix(bank_v[layer], probs, ell));
        }
    }
    return out;
}

SelectedPrefix full_prefix(const std::vector<num::TensorPtr>& bank_k,
                           const std::vector<num::TensorPtr>& bank_v) {
    SelectedPrefix out;
    int l_base = bank_k.at(0)->rows();
    out.sel = {0, l_base, 0, true, nullptr};
    for (size_t layer = 0; layer < bank_k.size(); ++layer) {
        // a length-L slice of an L-row sheet is the sheet itself, but the
        // slice keeps the graph edge so the bank still receives gradients
        out.k.push_back(ops::slice_rows(bank_k[layer], 0, l_base));
        out.v.push_back(ops::slice_rows(bank_v[layer], 0, l_base));
    }
    return out;
}

}  // namespace teg::prefix
