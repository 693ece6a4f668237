#include "teg/data/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "teg/text/vocab.hpp"
#include "teg/train/dataset.hpp"
#include "teg/util/errors.hpp"
#include "teg/util/fnv.hpp"
#include "teg/util/rng.hpp"
#include "teg/util/utf8.hpp"

namespace teg::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> set = {
        // English function words
        "a", "an", "the", "and", "or", "but", "if", "then", "else", "when", "while",
        "of", "at", "by", "for", "with", "about", "against", "between", "into",
        "through", "during", "before", "after", "above", "below", "to", "from", "up",
        "down", "in", "out", "on", "off", "over", "under", "again", "further", "once",
        "here", "there", "where", "why", "how", "all", "any", "both", "each", "few",
        "more", "most", "other", "some", "such", "no", "nor", "not", "only", "own",
        "same", "so", "than", "too", "very", "can", "will", "just", "should", "now",
        "is", "am", "are", "was", "were", "be", "been", "being", "have", "has", "had",
        "having", "do", "does", "did", "doing", "would", "could", "i", "you", "he",
        "she", "it", "we", "they", "them", "his", "her", "hers", "its", "our", "ours",
        "their", "theirs", "this", "that", "these", "those", "as", "until", "because",
        "what", "which", "who", "whom", "me", "him", "us", "my", "your", "mine",
        "yours", "itself", "also",
        // common CJK function characters
        "的", "了", "是", "在", "和", "有", "我", "你", "他", "她", "它", "们", "这",
        "那", "就", "不", "也", "都", "而", "及", "与", "或", "等", "被", "把", "让",
        "向", "往", "从", "于", "对", "还", "又", "很", "更", "最", "只", "已", "经",
        "着", "过", "吗", "呢", "吧", "啊", "个", "之", "其", "并", "但", "如", "若",
        "因", "为", "所", "以", "能", "会", "要", "可", "没", "无"};
    return set;
}

bool is_digits(const std::string& tok) {
    return !tok.empty() &&
           std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// content-word candidate: a CJK ideograph token or a Latin word of two or
// more characters, not a stopword, not a number
bool is_candidate(const std::string& tok) {
    if (stopwords().count(tok)) return false;
    if (text::is_cjk_token(tok)) {
        auto cps = util::codepoints(tok);
        return cps.size() == 1 && util::is_cjk_ideograph(cps[0]);
    }
    if (tok.size() < 2 || is_digits(tok)) return false;
    return util::is_word_char((uint32_t)(unsigned char)tok[0]);
}

bool is_word_token(const std::string& tok) {
    if (text::is_cjk_token(tok)) {
        auto cps = util::codepoints(tok);
        return cps.size() == 1 && util::is_cjk_ideograph(cps[0]);
    }
    return !tok.empty() && util::is_word_char((uint32_t)(unsigned char)tok[0]);
}

std::vector<std::vector<std::string>> split_sentences(const std::string& text) {
    std::vector<std::vector<std::string>> sentences;
    std::string current;
    auto flush = [&]() {
        auto toks = text::tokenize(current);
        std::vector<std::string> words;
        for (auto& t : toks)
            if (is_word_token(t)) words.push_back(std::move(t));
        if (!words.empty()) sentences.push_back(std::move(words));
        current.clear();
    };
    size_t pos = 0;
    while (pos < text.size()) {
        auto cp = util::decode_utf8(text, pos);
        current.append(text, pos, cp.byte_len);
        if (cp.value == '.' || cp.value == '!' || cp.value == '?' || cp.value == ';' ||
            cp.value == '\n' || cp.value == 0x3002 || cp.value == 0xFF01 ||
            cp.value == 0xFF1F || cp.value == 0xFF1B)
            flush();
        pos += cp.byte_len;
    }
    flush();
    return sentences;
}

} // namespace

int word_count(const std::string& text) {
    int count = 0;
    bool in_chunk = false, chunk_has_word = false;
    size_t pos = 0;
    while (pos < text.size()) {
        auto cp = util::decode_utf8(text, pos);
        pos += cp.byte_len;
        if (util::is_space_cp(cp.value)) {
            if (in_chunk && chunk_has_word) ++count;
            in_chunk = chunk_has_word = false;
            continue;
        }
        in_chunk = true;
        if (util::is_cjk_ideograph(cp.value)) {
            ++count; // each ideograph is one word on its own
        } else if (util::is_word_char(cp.value)) {
            chunk_has_word = true;
        }
    }
    if (in_chunk && chunk_has_word) ++count;
    return count;
}

std::vector<std::string> split_paragraphs(const std::string& doc) {
    std::vector<std::string> out;
    std::string para;
    auto flush = [&]() {
        // trim and collapse soft line wraps into single spaces
        std::string trimmed;
        bool pending_space = false;
        for (char c : para) {
            if (c == '\n' || c == '\r' || c == ' ' || c == '\t') {
                pending_space = !trimmed.empty();
                continue;
            }
            if (pending_space) trimmed.push_back(' ');
            pending_space = false;
            trimmed.push_back(c);
        }
        if (!trimmed.empty()) out.push_back(std::move(trimmed));
        para.clear();
    };
    size_t pos = 0;
    while (pos <= doc.size()) {
        size_t nl = doc.find('\n', pos);
        std::string line = doc.substr(pos, nl == std::string::npos ? nl : nl - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = line.find_first_not_of(" \t") == std::string::npos;
        if (blank)
            flush();
        else
            para += line + "\n";
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    flush();
    return out;
}

std::vector<std::string> filter_paragraphs(const std::vector<std::string>& paragraphs,
                                           int min_words, int max_words) {
    std::vector<std::string> kept;
    for (const auto& p : paragraphs) {
        int n = word_count(p);
        if (n >= min_words && n <= max_words) kept.push_back(p);
    }
    return kept;
}

std::vector<std::string> extract_keyphrases(const std::string& text, int k) {
    if (k < 1) throw DataError("keyphrase count must be >= 1");
    auto sentences = split_sentences(text);

    struct Term {
        long long tf = 0;
        std::vector<int> sentence_idx;
        std::unordered_set<std::string> left, right;
        long long sentences_seen = 0;
    };
    std::map<std::string, Term> terms; // ordered for deterministic iteration
    long long max_tf = 0;

    for (size_t si = 0; si < sentences.size(); ++si) {
        const auto& words = sentences[si];
        std::unordered_set<std::string> seen_here;
        for (size_t wi = 0; wi < words.size(); ++wi) {
            const auto& w = words[wi];
            if (!is_candidate(w)) continue;
            auto& t = terms[w];
            ++t.tf;
            max_tf = std::max(max_tf, t.tf);
            t.sentence_idx.push_back((int)si);
            if (wi > 0) t.left.insert(words[wi - 1]);
            if (wi + 1 < words.size()) t.right.insert(words[wi + 1]);
            if (seen_here.insert(w).second) ++t.sentences_seen;
        }
    }
    if (terms.empty()) return {};

    double mean_tf = 0;
    for (const auto& [w, t] : terms) mean_tf += (double)t.tf;
    mean_tf /= (double)terms.size();
    double var = 0;
    for (const auto& [w, t] : terms) {
        double d = (double)t.tf - mean_tf;
        var += d * d;
    }
    double std_tf = std::sqrt(var / (double)terms.size());
    double n_sentences = (double)std::max<size_t>(sentences.size(), 1);

    std::vector<std::pair<double, std::string>> scored;
    for (const auto& [w, t] : terms) {
        auto mid = t.sentence_idx.begin() + (ptrdiff_t)(t.sentence_idx.size() / 2);
        double median_pos = (double)*mid;
        double t_pos = std::log(std::log(3.0 + median_pos));
        double tf_norm = (double)t.tf / (mean_tf + std_tf);
        double t_sent = (double)t.sentences_seen / n_sentences;
        double diversity =
            ((double)t.left.size() + (double)t.right.size()) / (2.0 * (double)t.tf);
        double t_rel = 1.0 + diversity * ((double)t.tf / (double)max_tf);
        double score = (t_pos * t_rel) / (tf_norm / t_rel + t_sent / t_rel);
        scored.emplace_back(score, w);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    if ((int)scored.size() > k) scored.resize((size_t)k);
    std::vector<std::string> topics;
    for (auto& [s, w] : scored) topics.push_back(std::move(w));
    return topics;
}

PipelineStats build_dataset(const std::string& corpus_dir, const std::string& out_dir,
                            const PipelineConfig& cfg) {
    if (!fs::is_directory(corpus_dir)) throw DataError("corpus dir not found: " + corpus_dir);
    if (cfg.min_words > cfg.max_words) throw DataError("min_words exceeds max_words");
    if (cfg.topics_per_text < 1 || cfg.top_topics < 1)
        throw DataError("topic counts must be >= 1");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(corpus_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end()); // stable document key = file name
    if (files.empty()) throw DataError("no .txt files in corpus dir: " + corpus_dir);

    PipelineStats stats;
    stats.documents = files.size();
    std::vector<train::Example> examples;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw DataError("cannot read corpus file: " + f.string());
        std::string doc((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
        auto paras = split_paragraphs(doc);
        stats.paragraphs += paras.size();
        for (auto& p : filter_paragraphs(paras, cfg.min_words, cfg.max_words)) {
            ++stats.length_kept;
            auto topics = extract_keyphrases(p, cfg.topics_per_text);
            if (topics.empty()) {
                ++stats.no_topic_dropped;
                continue;
            }
            examples.push_back({std::move(topics), std::move(p)});
        }
    }

    // frequency of each topic over all length-kept examples
    std::map<std::string, long long> freq;
    for (const auto& ex : examples)
        for (const auto& t : ex.topics) ++freq[t];
    std::vector<std::pair<std::string, long long>> by_freq(freq.begin(), freq.end());
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::unordered_set<std::string> top;
    for (size_t i = 0; i < by_freq.size() && (int)i < cfg.top_topics; ++i)
        top.insert(by_freq[i].first);

    std::vector<train::Example> retained;
    for (auto& ex : examples) {
        bool keep = std::any_of(ex.topics.begin(), ex.topics.end(),
                                [&](const std::string& t) { return top.count(t) > 0; });
        if (keep) retained.push_back(std::move(ex));
    }
    stats.retained = retained.size();

    if (retained.size() < cfg.train_size + cfg.test_size)
        throw DataError("need " + std::to_string(cfg.train_size + cfg.test_size) +
                        " examples for the requested split but only " +
                        std::to_string(retained.size()) + " are available");

    rng::Stream shuffle_rng(rng::derive_seed(cfg.seed, 3));
    shuffle_rng.shuffle(retained);
    std::vector<train::Example> train_set(retained.begin(),
                                          retained.begin() + (ptrdiff_t)cfg.train_size);
    std::vector<train::Example> test_set(
        retained.begin() + (ptrdiff_t)cfg.train_size,
        retained.begin() + (ptrdiff_t)(cfg.train_size + cfg.test_size));
    stats.train_written = train_set.size();
    stats.test_written = test_set.size();

    // emitted topic list covers every topic of an emitted example
    std::map<std::string, long long> emitted_freq;
    for (const auto* set : {&train_set, &test_set})
        for (const auto& ex : *set)
            for (const auto& t : ex.topics) ++emitted_freq[t];
    stats.topic_histogram.assign(emitted_freq.begin(), emitted_freq.end());
    std::sort(stats.topic_histogram.begin(), stats.topic_histogram.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });

    fs::create_directories(out_dir);
    train::save_jsonl((fs::path(out_dir) / "train.jsonl").string(), train_set);
    train::save_jsonl((fs::path(out_dir) / "test.jsonl").string(), test_set);
    {
        std::ofstream topics_out(fs::path(out_dir) / "topics.txt", std::ios::binary);
        for (const auto& [t, c] : stats.topic_histogram) topics_out << t << "\n";
    }

    json config{{"min_words", cfg.min_words},
                {"max_words", cfg.max_words},
                {"topics_per_text", cfg.topics_per_text},
                {"top_topics", cfg.top_topics},
                {"train_size", cfg.train_size},
                {"test_size", cfg.test_size},
                {"seed", cfg.seed}};
    json hist = json::array();
    for (const auto& [t, c] : stats.topic_histogram) hist.push_back({t, c});
    json manifest{{"config", config},
                  {"config_hash", util::fnv_hex(util::fnv1a64(config.dump()))},
                  {"counts",
                   {{"documents", stats.documents},
                    {"paragraphs", stats.paragraphs},
                    {"length_kept", stats.length_kept},
                    {"no_topic_dropped", stats.no_topic_dropped},
                    {"retained", stats.retained},
                    {"train", stats.train_written},
                    {"test", stats.test_written}}},
                  {"topic_histogram", hist}};
    std::ofstream mf(fs::path(out_dir) / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";
    return stats;
}

} // namespace teg::data
