#pragma once

#include <string>
#include <vector>

#include "teg/text/vocab.hpp"

namespace teg::train {

// One topic-to-essay pair as stored in the jsonl corpus files.
struct Example {
    std::vector<std::string> topics;
    std::string essay;
};

// Token-level view of an example: encoder input (topics joined by the
// separator token) and the full decoder target (BOS ... EOS).
struct EncodedExample {
    std::vector<int> source;
    std::vector<int> target;
    int n_topics = 0;
};

std::vector<Example> load_jsonl(const std::string& path);
void save_jsonl(const std::string& path, const std::vector<Example>& examples);

text::Vocab build_vocab(const std::vector<Example>& examples, size_t max_size = 0,
                        size_t min_count = 1);

// Encoder input for a bare topic set: topic tokens joined by the separator.
std::vector<int> encode_topics(const std::vector<std::string>& topics,
                               const text::Vocab& vocab, int n_max);

EncodedExample encode_example(const Example& ex, const text::Vocab& vocab, int n_max,
                              int max_len);

std::vector<EncodedExample> encode_dataset(const std::vector<Example>& examples,
                                           const text::Vocab& vocab, int n_max,
                                           int max_len);

} // namespace teg::train
