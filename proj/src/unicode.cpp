#include "textclf/unicode.hpp"

#include "textclf/error.hpp"

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>

#include <array>

namespace textclf::uni {

char32_t decode_cp(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }

    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacement;
    }
    if (i + len > s.size()) {
        ++i;
        return kReplacement;
    }
    for (int k = 1; k < len; ++k) {
        const unsigned char b = byte(i + k);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // reject overlong forms, surrogates and out-of-range values
    static constexpr std::array<char32_t, 5> kMin = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return kReplacement;
    }
    i += len;
    return cp;
}

void encode_cp(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::vector<char32_t> to_codepoints(std::string_view s) {
    std::vector<char32_t> cps;
    cps.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) cps.push_back(decode_cp(s, i));
    return cps;
}

std::string from_codepoints(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size() * 3);
    for (char32_t cp : cps) encode_cp(cp, out);
    return out;
}

bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t before = i;
        if (decode_cp(s, i) == kReplacement) {
            // kReplacement is also a legitimate code point; re-check the bytes
            if (i - before != 3 || s.substr(before, 3) != "\xEF\xBF\xBD") return false;
        }
    }
    return true;
}

bool is_whitespace(char32_t cp) {
    return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

bool is_separator_punct(char32_t cp) {
    if (cp == kDanda || cp == kDoubleDanda) return true;
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
}

bool is_token_separator(char32_t cp) {
    return is_whitespace(cp) || is_separator_punct(cp);
}

namespace {

struct Range {
    char32_t lo;
    char32_t hi;
};

// Blocks stripped by cleaning. Keep this list in sync with the README.
constexpr std::array<Range, 16> kEmojiBlocks = {{
    {0x2600, 0x26FF},   // Miscellaneous Symbols
    {0x2700, 0x27BF},   // Dingbats
    {0xFE00, 0xFE0F},   // Variation Selectors
    {0x1F000, 0x1F02F}, // Mahjong Tiles, Domino Tiles
    {0x1F0A0, 0x1F0FF}, // Playing Cards
    {0x1F100, 0x1F1FF}, // Enclosed Alphanumeric Supplement (regional indicators)
    {0x1F200, 0x1F2FF}, // Enclosed Ideographic Supplement
    {0x1F300, 0x1F5FF}, // Miscellaneous Symbols and Pictographs
    {0x1F600, 0x1F64F}, // Emoticons
    {0x1F680, 0x1F6FF}, // Transport and Map Symbols
    {0x1F700, 0x1F77F}, // Alchemical Symbols
    {0x1F780, 0x1F7FF}, // Geometric Shapes Extended
    {0x1F800, 0x1F8FF}, // Supplemental Arrows-C
    {0x1F900, 0x1F9FF}, // Supplemental Symbols and Pictographs
    {0x1FA00, 0x1FA6F}, // Chess Symbols
    {0x1FA70, 0x1FAFF}, // Symbols and Pictographs Extended-A
}};

} // namespace

bool is_emoji(char32_t cp) {
    for (const auto& r : kEmojiBlocks)
        if (cp >= r.lo && cp <= r.hi) return true;
    return false;
}

bool is_combining_mark(char32_t cp) {
    const auto cat = u_charType(static_cast<UChar32>(cp));
    return cat == U_NON_SPACING_MARK || cat == U_COMBINING_SPACING_MARK ||
           cat == U_ENCLOSING_MARK;
}

std::string nfc(std::string_view s) {
    if (s.empty()) return {};

    UErrorCode ec = U_ZERO_ERROR;
    const UNormalizer2* norm = unorm2_getNFCInstance(&ec);
    if (U_FAILURE(ec)) throw Error("unicode normalizer unavailable");

    std::vector<UChar> u16(s.size() + 1);
    int32_t u16_len = 0;
    ec = U_ZERO_ERROR;
    u_strFromUTF8WithSub(u16.data(), static_cast<int32_t>(u16.size()), &u16_len,
                         s.data(), static_cast<int32_t>(s.size()),
                         kReplacement, nullptr, &ec);
    if (U_FAILURE(ec)) throw Error("UTF-8 to UTF-16 conversion failed");
    u16.resize(u16_len);

    std::vector<UChar> out(u16.size() + 16);
    ec = U_ZERO_ERROR;
    int32_t out_len = unorm2_normalize(norm, u16.data(), u16_len, out.data(),
                                       static_cast<int32_t>(out.size()), &ec);
    if (ec == U_BUFFER_OVERFLOW_ERROR) {
        out.resize(out_len);
        ec = U_ZERO_ERROR;
        out_len = unorm2_normalize(norm, u16.data(), u16_len, out.data(),
                                   static_cast<int32_t>(out.size()), &ec);
    }
    if (U_FAILURE(ec)) throw Error("unicode normalization failed");

    std::string result(out_len * 3 + 1, '\0');
    int32_t res_len = 0;
    ec = U_ZERO_ERROR;
    u_strToUTF8(result.data(), static_cast<int32_t>(result.size()), &res_len,
                out.data(), out_len, &ec);
    if (U_FAILURE(ec)) throw Error("UTF-16 to UTF-8 conversion failed");
    result.resize(res_len);
    return result;
}

} // namespace textclf::uni
