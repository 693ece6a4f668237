#pragma once

#include <string>
#include <vector>

#include "teg/model/model.hpp"
#include "teg/text/vocab.hpp"

namespace teg::gen {

struct GenResult {
    std::vector<int> tokens;  // generated ids, BOS excluded, EOS kept when reached
    double cum_logp = 0.0;    // sum of per-token log-probabilities
    double norm_score = 0.0;  // cum_logp / token count
    bool truncated = false;   // no hypothesis reached EOS within max_len
};

// Beam search over the model's next-token distribution. Hypotheses that
// reach EOS are frozen and compete by length-normalized score. Ties break by
// score, then extending token id, then hypothesis index.
GenResult generate(const model::TegModel& m, const std::vector<int>& source_ids,
                   int n_topics, model::Mode mode, int width, int max_len);

// Stepwise argmax decoding, the width-1 reference path.
GenResult greedy_generate(const model::TegModel& m, const std::vector<int>& source_ids,
                          int n_topics, model::Mode mode, int max_len);

// Renders generated ids as text: drops the trailing EOS, joins tokens with
// script-aware spacing.
std::string to_text(const std::vector<int>& tokens, const text::Vocab& vocab);

} // namespace teg::gen
