#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace teg::data {

// Words = whitespace-separated chunks containing a non-CJK word character,
// plus one per CJK ideograph (CJK punctuation never counts).
int word_count(const std::string& text);

// Splits a document on blank lines; single newlines are soft wraps.
std::vector<std::string> split_paragraphs(const std::string& doc);

std::vector<std::string> filter_paragraphs(const std::vector<std::string>& paragraphs,
                                           int min_words = 50, int max_words = 200);

// Single-word keyphrase extraction with the classic statistical features:
// frequency, earliest-position bias, sentence dispersion, and left/right
// context diversity. Lower score is better; ties break lexicographically.
// Returns at most k terms, deduplicated, possibly fewer when the text has
// few content words.
std::vector<std::string> extract_keyphrases(const std::string& text, int k = 5);

struct PipelineConfig {
    int min_words = 50;
    int max_words = 200;
    int topics_per_text = 5;
    int top_topics = 100;
    size_t train_size = 18000;
    size_t test_size = 1400;
    uint64_t seed = 0;
};

struct PipelineStats {
    size_t documents = 0;
    size_t paragraphs = 0;
    size_t length_kept = 0;
    size_t no_topic_dropped = 0;
    size_t retained = 0;
    size_t train_written = 0;
    size_t test_written = 0;
    std::vector<std::pair<std::string, long long>> topic_histogram;
};

// filter -> extract -> top-topic retention -> seeded shuffle -> split.
// Writes train.jsonl, test.jsonl, topics.txt and manifest.json into out_dir.
// Reruns with identical inputs and config produce byte-identical files.
PipelineStats build_dataset(const std::string& corpus_dir, const std::string& out_dir,
                            const PipelineConfig& cfg);

} // namespace teg::data
