#include "teg/train/dataset.hpp"

#include <fstream>

#include <json.hpp>

#include "teg/util/errors.hpp"

namespace teg::train {

using nlohmann::json;

std::vector<Example> load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::vector<Example> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": bad json: " + e.what());
        }
        if (!j.contains("topics") || !j["topics"].is_array() || !j.contains("essay") ||
            !j["essay"].is_string())
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": expected {\"topics\": [...], \"essay\": \"...\"}");
        Example ex;
        for (const auto& t : j["topics"]) {
            if (!t.is_string())
                throw DataError(path + ":" + std::to_string(lineno) + ": topic is not a string");
            ex.topics.push_back(t.get<std::string>());
        }
        ex.essay = j["essay"].get<std::string>();
        if (ex.topics.empty())
            throw DataError(path + ":" + std::to_string(lineno) + ": empty topic list");
        out.push_back(std::move(ex));
    }
    return out;
}

void save_jsonl(const std::string& path, const std::vector<Example>& examples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset file: " + path);
    for (const auto& ex : examples) {
        json j;
        j["topics"] = ex.topics;
        j["essay"] = ex.essay;
        out << j.dump() << "\n";
    }
}

text::Vocab build_vocab(const std::vector<Example>& examples, size_t max_size,
                        size_t min_count) {
    std::vector<std::vector<std::string>> seqs;
    seqs.reserve(examples.size() * 2);
    for (const auto& ex : examples) {
        for (const auto& t : ex.topics) seqs.push_back(text::tokenize(t));
        seqs.push_back(text::tokenize(ex.essay));
    }
    return text::Vocab::build(seqs, max_size, min_count);
}

std::vector<int> encode_topics(const std::vector<std::string>& topics,
                               const text::Vocab& vocab, int n_max) {
    if (topics.empty()) throw DataError("no topics given");
    if ((int)topics.size() > n_max)
        throw DataError("got " + std::to_string(topics.size()) + " topics, limit is " +
                        std::to_string(n_max));
    std::vector<int> source;
    for (size_t i = 0; i < topics.size(); ++i) {
        if (i > 0) source.push_back(text::kSep);
        auto ids = vocab.encode(text::tokenize(topics[i]));
        if (ids.empty()) throw DataError("topic tokenizes to nothing: \"" + topics[i] + "\"");
        source.insert(source.end(), ids.begin(), ids.end());
    }
    return source;
}

EncodedExample encode_example(const Example& ex, const text::Vocab& vocab, int n_max,
                              int max_len) {
    EncodedExample enc;
    enc.n_topics = (int)ex.topics.size();
    enc.source = encode_topics(ex.topics, vocab, n_max);

    auto essay_ids = vocab.encode(text::tokenize(ex.essay));
    // decoder input is target minus the trailing token, so cap the essay at
    // max_len - 1 tokens to keep the input within the positional table
    if ((int)essay_ids.size() > max_len - 1) essay_ids.resize((size_t)(max_len - 1));
    enc.target.push_back(text::kBos);
    enc.target.insert(enc.target.end(), essay_ids.begin(), essay_ids.end());
    enc.target.push_back(text::kEos);
    return enc;
}

std::vector<EncodedExample> encode_dataset(const std::vector<Example>& examples,
                                           const text::Vocab& vocab, int n_max,
                                           int max_len) {
    std::vector<EncodedExample> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) out.push_back(encode_example(ex, vocab, n_max, max_len));
    return out;
}

} // namespace teg::train
