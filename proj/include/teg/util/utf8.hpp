#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace teg::util {

// Minimal UTF-8 decoding; malformed bytes decode to U+FFFD one byte at a time.
struct Codepoint {
    uint32_t value = 0;
    size_t byte_len = 1;
};

Codepoint decode_utf8(std::string_view text, size_t pos);

std::string encode_utf8(uint32_t cp);

std::vector<uint32_t> codepoints(std::string_view text);

// CJK ideographs (URO + extension A + compatibility block)
bool is_cjk_ideograph(uint32_t cp);

// CJK symbols/punctuation and fullwidth forms
bool is_cjk_punct(uint32_t cp);

bool is_space_cp(uint32_t cp);

bool is_word_char(uint32_t cp);  // ASCII letters, digits, apostrophe

}  // namespace teg::util
