#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ragdesk {

enum class SplitRule { unicode_word };

struct TokenizerConfig {
    bool lowercase = true;
    SplitRule split_rule = SplitRule::unicode_word;
    std::unordered_set<std::string> stopwords;
};

/// Byte range [begin, end) of one token inside the tokenized string.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Maximal runs of Unicode letters and decimal digits, in order. Bytes that
/// do not decode as UTF-8 act as separators.
std::vector<TokenSpan> token_spans(std::string_view text);

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

/// Token count without stopword removal; this is the unit of every chunk budget.
std::size_t count_tokens(std::string_view text);

std::string to_lower_utf8(std::string_view text);

bool is_valid_utf8(std::string_view text);

}  // namespace ragdesk
