#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace teg::text {

// Special token ids, fixed for every vocabulary.
inline constexpr int kPad = 0;
inline constexpr int kBos = 1;
inline constexpr int kEos = 2;
inline constexpr int kSep = 3;
inline constexpr int kUnk = 4;
inline constexpr int kNumSpecials = 5;

// Mixed-script tokenizer: CJK ideographs and CJK punctuation become single
// characters; Latin-script runs of letters/digits/apostrophes become
// lowercased words; any other visible character is its own token.
std::vector<std::string> tokenize(const std::string& text);

// Inverse-ish of tokenize: joins with a space unless either neighbor is a
// CJK character, so retokenizing the result gives back the same tokens.
std::string join_tokens(const std::vector<std::string>& tokens);

bool is_cjk_token(const std::string& token);

class Vocab {
public:
    Vocab();

    // Frequency-sorted build: tokens ordered by count desc, then token asc.
    // max_size of 0 means unlimited; counts below min_count are dropped.
    static Vocab build(const std::vector<std::vector<std::string>>& token_seqs,
                       size_t max_size = 0, size_t min_count = 1);

    int id(const std::string& token) const;  // kUnk when absent
    const std::string& token(int id) const;
    int size() const { return (int)tokens_.size(); }

    std::vector<int> encode(const std::vector<std::string>& tokens) const;
    std::vector<std::string> decode(const std::vector<int>& ids) const;

    // One token per line, specials first. Hash covers the full line list.
    void save(const std::string& path) const;
    static Vocab load(const std::string& path);
    uint64_t hash() const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
    void reindex();
};

}  // namespace teg::text
