#pragma once

#include <vector>

#include "teg/num/tensor.hpp"

namespace teg::csc {

// Copy head with content selection, computed for all decoder steps at once.
// Inputs per step t (row t of each matrix):
//   alpha: attention over real source positions, each row on the simplex
//   states: encoder states (source_len x d_model)
//   s: decoder hidden states (T x d_model)
// The returned mixture is p_gen * p_vocab + (1 - p_gen) * p_copy, where
// p_copy scatters alpha onto source token ids and p_gen comes from the
// learned gate over [c_t; ri_t; ro_t].
struct HeadOutput {
    num::TensorPtr c;       // context vectors       (T x d)
    num::TensorPtr r;       // cosine relevance      (T x 1)
    num::TensorPtr ri;      // selected encoder info (T x d)
    num::TensorPtr ro;      // selected decoder info (T x d)
    num::TensorPtr p_gen;   // gate                  (T x 1)
    num::TensorPtr p_copy;  // copy distribution     (T x V)
    num::TensorPtr p_final; // mixture               (T x V)
};

HeadOutput run_head(const num::TensorPtr& alpha, const num::TensorPtr& states,
                    const num::TensorPtr& s, const num::TensorPtr& p_vocab,
                    const std::vector<int>& source_ids, const num::TensorPtr& gate_w,
                    const num::TensorPtr& gate_b, double phi);

// Plain-vector forms of the individual head operations, used by unit oracles
// and by callers outside the training graph.
std::vector<double> context_vector(const std::vector<double>& alpha,
                                   const std::vector<std::vector<double>>& states);
double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v);
std::vector<double> threshold_filter(double r, const std::vector<double>& v, double phi);
std::vector<double> minmax_normalize(const std::vector<double>& v);
std::vector<double> select_encoder_info(double r, const std::vector<double>& h_bar, double phi);
std::vector<double> select_decoder_info(double r, const std::vector<double>& s, double phi);
double generation_gate(const std::vector<double>& c, const std::vector<double>& ri,
                       const std::vector<double>& ro, const std::vector<double>& w, double b);
std::vector<double> copy_distribution(const std::vector<double>& alpha,
                                      const std::vector<int>& source_ids, int vocab_size);
// Validates both inputs are on the simplex within 1e-6 before mixing.
std::vector<double> mix_distributions(double p_gen, const std::vector<double>& p_vocab,
                                      const std::vector<double>& p_copy);

}  // namespace teg::csc
