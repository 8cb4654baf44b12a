#include "textclf/tokenize.hpp"

#include "textclf/unicode.hpp"

namespace textclf {

TokenSeq tokenize(std::string_view text) {
    TokenSeq tokens;
    std::string current;

    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = uni::decode_cp(text, i);
        if (uni::is_token_separator(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        const char32_t folded = (cp >= U'A' && cp <= U'Z') ? cp + 0x20 : cp;
        uni::encode_cp(folded, current);
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

} // namespace textclf
