#include "ragdesk/tokenizer.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace ragdesk {
namespace {

bool is_word_char(UChar32 c) {
    return c >= 0 && (u_isalpha(c) || u_isdigit(c));
}

template <typename Fn>
void for_each_span(std::string_view text, Fn&& fn) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    int32_t start = -1;
    while (i < length) {
        const int32_t at = i;
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        if (is_word_char(c)) {
            if (start < 0) {
                start = at;
            }
        } else if (start >= 0) {
            fn(TokenSpan{static_cast<std::size_t>(start), static_cast<std::size_t>(at)});
            start = -1;
        }
    }
    if (start >= 0) {
        fn(TokenSpan{static_cast<std::size_t>(start), text.size()});
    }
}

}  // namespace

std::vector<TokenSpan> token_spans(std::string_view text) {
    std::vector<TokenSpan> spans;
    for_each_span(text, [&](TokenSpan span) { spans.push_back(span); });
    return spans;
}

std::size_t count_tokens(std::string_view text) {
    std::size_t n = 0;
    for_each_span(text, [&](TokenSpan) { ++n; });
    return n;
}

std::string to_lower_utf8(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t at = i;
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        if (c < 0) {
            out.append(text.substr(static_cast<std::size_t>(at), static_cast<std::size_t>(i - at)));
            continue;
        }
        const UChar32 lower = u_tolower(c);
        uint8_t buf[U8_MAX_LENGTH];
        int32_t n = 0;
        U8_APPEND_UNSAFE(buf, n, lower);
        out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
    std::vector<std::string> tokens;
    for_each_span(text, [&](TokenSpan span) {
        auto raw = text.substr(span.begin, span.end - span.begin);
        std::string token = config.lowercase ? to_lower_utf8(raw) : std::string(raw);
        if (!config.stopwords.empty() && config.stopwords.contains(token)) {
            return;
        }
        tokens.push_back(std::move(token));
    });
    return tokens;
}

bool is_valid_utf8(std::string_view text) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        if (c < 0) {
            return false;
        }
    }
    return true;
}

}  // namespace ragdesk
