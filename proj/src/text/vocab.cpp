#include "teg/text/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "teg/util/errors.hpp"
#include "teg/util/fnv.hpp"
#include "teg/util/utf8.hpp"

namespace teg::text {

namespace {
const char* kSpecialNames[kNumSpecials] = {"<pad>", "<bos>", "<eos>", "<sep>", "<unk>"};
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            out.push_back(word);
            word.clear();
        }
    };
    size_t pos = 0;
    while (pos < text.size()) {
        util::Codepoint cp = util::decode_utf8(text, pos);
        pos += cp.byte_len;
        uint32_t v = cp.value;
        if (util::is_space_cp(v)) {
            flush();
        } else if (util::is_cjk_ideograph(v) || util::is_cjk_punct(v)) {
            flush();
            out.push_back(util::encode_utf8(v));
        } else if (util::is_word_char(v)) {
            if (v >= 'A' && v <= 'Z') v += 'a' - 'A';
            word += util::encode_utf8(v);
        } else {
            flush();
            out.push_back(util::encode_utf8(v));
        }
    }
    flush();
    return out;
}

bool is_cjk_token(const std::string& token) {
    if (token.empty()) return false;
    util::Codepoint cp = util::decode_utf8(token, 0);
    return util::is_cjk_ideograph(cp.value) || util::is_cjk_punct(cp.value);
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    bool prev_cjk = true;  // no leading space
    for (size_t i = 0; i < tokens.size(); ++i) {
        bool cjk = is_cjk_token(tokens[i]);
        if (i > 0 && !prev_cjk && !cjk) out += ' ';
        out += tokens[i];
        prev_cjk = cjk;
    }
    return out;
}

Vocab::Vocab() {
    for (const char* s : kSpecialNames) tokens_.emplace_back(s);
    reindex();
}

void Vocab::reindex() {
    index_.clear();
    for (size_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = (int)i;
}

Vocab Vocab::build(const std::vector<std::vector<std::string>>& token_seqs, size_t max_size,
                   size_t min_count) {
    std::map<std::string, size_t> counts;
    for (auto& seq : token_seqs)
        for (auto& t : seq) ++counts[t];
    for (const char* s : kSpecialNames) counts.erase(s);

    std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab v;
    for (auto& [tok, n] : ranked) {
        if (n < min_count) continue;
        if (max_size && v.tokens_.size() >= max_size) break;
        v.tokens_.push_back(tok);
    }
    v.reindex();
    return v;
}

int Vocab::id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
    if (id < 0 || id >= (int)tokens_.size())
        throw DataError("token id " + std::to_string(id) + " outside vocabulary of " +
                        std::to_string(tokens_.size()));
    return tokens_[(size_t)id];
}

std::vector<int> Vocab::encode(const std::vector<std::string>& tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (auto& t : tokens) ids.push_back(id(t));
    return ids;
}

std::vector<std::string> Vocab::decode(const std::vector<int>& ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int i : ids) out.push_back(token(i));
    return out;
}

void Vocab::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write vocabulary file " + path);
    for (auto& t : tokens_) f << t << '\n';
}

Vocab Vocab::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read vocabulary file " + path);
    Vocab v;
    v.tokens_.clear();
    std::string line;
    while (std::getline(f, line)) v.tokens_.push_back(line);
    if (v.tokens_.size() < kNumSpecials)
        throw DataError("vocabulary file " + path + " too short");
    for (int i = 0; i < kNumSpecials; ++i)
        if (v.tokens_[(size_t)i] != kSpecialNames[i])
            throw DataError("vocabulary file " + path + " has wrong special token at id " +
                            std::to_string(i));
    v.reindex();
    return v;
}

uint64_t Vocab::hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (auto& t : tokens_) {
        h = util::fnv1a64(t.data(), t.size(), h);
        h = util::fnv1a64("\n", 1, h);
    }
    return h;
}

}  // namespace teg::text
