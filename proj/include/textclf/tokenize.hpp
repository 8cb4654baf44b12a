#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace textclf {

using TokenSeq = std::vector<std::string>;

// Splits cleaned text into word tokens on whitespace and punctuation
// separators (ASCII punctuation, danda, double danda). Combining marks,
// vowel signs and joiners stay attached to their base characters; ASCII
// letters are lowercased; Bengali passes through unchanged.
TokenSeq tokenize(std::string_view text);

} // namespace textclf
