#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "teg/csc/head.hpp"
#include "teg/model/config.hpp"
#include "teg/num/tensor.hpp"
#include "teg/prefix/prefix.hpp"

namespace teg::model {

struct EncodeResult {
    num::TensorPtr states;         // (S, d) hidden states of real source positions
    num::TensorPtr h0;             // (1, d) mean of raw token embeddings
    std::vector<int> source_ids;   // real source token ids (never prefix slots)
    num::TensorPtr cross_k_extra;  // (ell, d) prefix rows visible to cross attention
    num::TensorPtr cross_v_extra;  // (ell, d), both null when no prefix is active
    prefix::Selection sel;         // selector outcome when the improved prefix ran
};

struct DecodeResult {
    num::TensorPtr s;           // (T, d) decoder hidden states
    num::TensorPtr alpha_full;  // (T, ell+S) head-averaged final-layer cross attention
    num::TensorPtr alpha;       // (T, S) renormalized over real source columns
    num::TensorPtr p_vocab;     // (T, V) softmax over maskable vocabulary
};

struct ForwardResult {
    EncodeResult enc;
    DecodeResult dec;
    csc::HeadOutput head;    // only populated when the copy head is active
    num::TensorPtr p_final;  // (T, V)
};

// Transformer encoder-decoder with the copy/content-selection head and the
// prefix bank. All parameters live in one named registry so freezing,
// checkpointing and the optimizer can address them uniformly.
class TegModel {
public:
    ModelConfig cfg;

    static TegModel init(const ModelConfig& cfg, uint64_t seed);

    const std::vector<std::pair<std::string, num::TensorPtr>>& named_params() const {
        return params_;
    }
    num::TensorPtr param(const std::string& name) const;

    // Sets requires_grad so exactly the mode's trainable set participates in
    // optimization, and returns that set.
    std::vector<std::pair<std::string, num::TensorPtr>> set_trainable(Mode mode);

    // soft_prefix selects the differentiable mixture (training) versus the
    // argmax slice (inference) in GCS-IPT mode.
    EncodeResult encode(const std::vector<int>& source_ids, int n_topics, Mode mode,
                        bool soft_prefix) const;
    DecodeResult decode(const std::vector<int>& decoder_input_ids,
                        const EncodeResult& enc) const;
    ForwardResult forward(const std::vector<int>& source_ids, int n_topics,
                          const std::vector<int>& decoder_input_ids, Mode mode,
                          bool soft_prefix) const;

    // Distribution over the next token given the tokens decoded so far
    // (starting with BOS). Runs without recording gradients.
    std::vector<double> next_distribution(const EncodeResult& enc,
                                          const std::vector<int>& decoder_input_ids,
                                          Mode mode) const;

    // FNV over every parameter's raw bytes, for freeze-contract checks.
    uint64_t params_checksum(const std::string& name_prefix = "") const;

private:
    std::vector<std::pair<std::string, num::TensorPtr>> params_;
    std::unordered_map<std::string, num::TensorPtr> by_name_;
    num::TensorPtr pos_table_;     // (max_len, d) sinusoidal, constant
    num::TensorPtr logit_mask_;    // (1, V): -1e30 on pad/bos/sep

    num::TensorPtr add_param(const std::string& name, std::vector<int> shape);
    void build_constants();
};

}  // namespace teg::model
