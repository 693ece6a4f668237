#include "teg/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "teg/util/errors.hpp"

namespace teg::metrics {

namespace {

// joins an n-gram into a single key; 0x1f never appears inside a token
std::string ngram_key(const Tokens& toks, size_t start, size_t n) {
    std::string key;
    for (size_t i = 0; i < n; ++i) {
        if (i) key.push_back('\x1f');
        key += toks[start + i];
    }
    return key;
}

std::unordered_map<std::string, long long> ngram_counts(const Tokens& toks, size_t n) {
    std::unordered_map<std::string, long long> counts;
    if (toks.size() >= n)
        for (size_t i = 0; i + n <= toks.size(); ++i) ++counts[ngram_key(toks, i, n)];
    return counts;
}

std::unordered_set<std::string> bigram_set(const Tokens& toks) {
    std::unordered_set<std::string> set;
    for (size_t i = 0; i + 2 <= toks.size(); ++i) set.insert(ngram_key(toks, i, 2));
    return set;
}

double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    size_t uni = a.size() + b.size() - inter;
    return (double)inter / (double)uni;
}

double cosine(const double* a, const double* b, int d) {
    double dot = 0, na = 0, nb = 0;
    for (int i = 0; i < d; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na < 1e-24 || nb < 1e-24) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace

double bleu(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references) {
    if (candidates.size() != references.size())
        throw ShapeError("bleu: " + std::to_string(candidates.size()) + " candidates vs " +
                         std::to_string(references.size()) + " references");
    if (candidates.empty()) throw DataError("bleu: empty corpus");

    long long cand_len = 0, ref_len = 0;
    long long matched[4] = {0, 0, 0, 0}, total[4] = {0, 0, 0, 0};
    for (size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        const auto& r = references[i];
        cand_len += (long long)c.size();
        ref_len += (long long)r.size();
        for (size_t n = 1; n <= 4; ++n) {
            if (c.size() < n) continue;
            auto cc = ngram_counts(c, n);
            auto rc = ngram_counts(r, n);
            for (const auto& [key, count] : cc) {
                auto it = rc.find(key);
                long long clip = it == rc.end() ? 0 : std::min(count, it->second);
                matched[n - 1] += clip;
                total[n - 1] += count;
            }
        }
    }
    if (cand_len == 0) return 0.0;

    double log_sum = 0.0;
    for (int n = 0; n < 4; ++n) {
        double p = matched[n] > 0 ? (double)matched[n] / (double)total[n]
                                  : (double)(matched[n] + 1) / (double)(total[n] + 1);
        log_sum += std::log(p);
    }
    double geo = std::exp(log_sum / 4.0);
    double bp = cand_len > ref_len ? 1.0 : std::exp(1.0 - (double)ref_len / (double)cand_len);
    return 100.0 * geo * bp;
}

double dist2(const std::vector<Tokens>& essays) {
    long long total = 0;
    std::unordered_set<std::string> distinct;
    for (const auto& e : essays) {
        for (size_t i = 0; i + 2 <= e.size(); ++i) {
            distinct.insert(ngram_key(e, i, 2));
            ++total;
        }
    }
    if (total == 0) throw DataError("dist2: no essay has two or more tokens");
    return 100.0 * (double)distinct.size() / (double)total;
}

double consistency(const Tokens& essay, const std::vector<std::string>& topics,
                   const text::Vocab& vocab, const num::TensorPtr& embed_table) {
    if (topics.empty()) throw DataError("consistency: no topics");
    if (vocab.size() != embed_table->rows())
        throw ShapeError("consistency: embedding table rows do not match the vocabulary");
    if (essay.empty()) return 0.0;

    int d = embed_table->cols();
    const double* table = embed_table->data.data();
    auto token_row = [&](const std::string& tok) { return table + (size_t)vocab.id(tok) * d; };

    double sum = 0.0;
    for (const auto& topic : topics) {
        auto words = text::tokenize(topic);
        std::vector<double> t(d, 0.0);
        if (!words.empty()) {
            for (const auto& w : words) {
                const double* row = token_row(w);
                for (int i = 0; i < d; ++i) t[(size_t)i] += row[i];
            }
            for (int i = 0; i < d; ++i) t[(size_t)i] /= (double)words.size();
        }
        double best = 0.0; // negative similarities floor at zero
        for (const auto& w : essay) best = std::max(best, cosine(t.data(), token_row(w), d));
        sum += best;
    }
    return 100.0 * sum / (double)topics.size();
}

double novelty_term(const NoveltyRecord& generated, const std::vector<NoveltyRecord>& corpus) {
    if (corpus.empty()) throw DataError("novelty: empty training corpus");
    std::unordered_set<std::string> topics(generated.topics.begin(), generated.topics.end());
    auto g = bigram_set(generated.tokens);

    double best = -1.0;
    auto consider = [&](const NoveltyRecord& d) {
        best = std::max(best, jaccard(g, bigram_set(d.tokens)));
    };
    for (const auto& d : corpus) {
        bool shares = std::any_of(d.topics.begin(), d.topics.end(),
                                  [&](const std::string& t) { return topics.count(t) > 0; });
        if (shares) consider(d);
    }
    if (best < 0.0)
        for (const auto& d : corpus) consider(d);
    return 1.0 - best;
}

double novelty(const std::vector<NoveltyRecord>& generated,
               const std::vector<NoveltyRecord>& corpus) {
    if (generated.empty()) throw DataError("novelty: nothing generated");
    double sum = 0.0;
    for (const auto& g : generated) sum += novelty_term(g, corpus);
    return 100.0 * sum / (double)generated.size();
}

} // namespace teg::metrics
