#pragma once

#include <string>
#include <vector>

#include "teg/num/tensor.hpp"
#include "teg/text/vocab.hpp"

namespace teg::metrics {

using Tokens = std::vector<std::string>;

// Corpus-level BLEU-4 in [0,100]: geometric mean of clipped n-gram precisions
// (n=1..4, add-one smoothing on zero-match counts) times the brevity penalty.
double bleu(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references);

// 100 x distinct bigrams / total bigrams across all essays.
double dist2(const std::vector<Tokens>& essays);

// 100 x mean over topics of the best essay-token cosine against the topic
// embedding (mean of token embeddings for multi-token topics), floored at 0.
// Empty essays score 0. The table is the model's input embedding matrix.
double consistency(const Tokens& essay, const std::vector<std::string>& topics,
                   const text::Vocab& vocab, const num::TensorPtr& embed_table);

struct NoveltyRecord {
    Tokens tokens;
    std::vector<std::string> topics;
};

// Per-essay novelty term: 1 - max bigram Jaccard against training essays that
// share at least one topic (whole corpus when none does).
double novelty_term(const NoveltyRecord& generated, const std::vector<NoveltyRecord>& corpus);

// 100 x mean novelty term over the generated essays.
double novelty(const std::vector<NoveltyRecord>& generated,
               const std::vector<NoveltyRecord>& corpus);

} // namespace teg::metrics
