#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragdesk/tokenizer.hpp"

namespace ragdesk {

struct Embedding {
    std::vector<float> values;  // unit length
    bool truncated = false;     // input exceeded max_input_tokens
};

/// Maps text into the shared vector space used for both chunks and queries.
/// Implementations must be deterministic and safe to call concurrently.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string provider_id() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::size_t max_input_tokens() const = 0;

    /// Throws ErrorCode::invalid_argument for text that is empty after
    /// cleaning and ErrorCode::transport when a remote provider is unreachable.
    virtual std::vector<Embedding> embed_batch(std::span<const std::string> texts) const = 0;

    Embedding embed(const std::string& text) const;
};

/// Offline provider: each token maps to a seeded pseudo-random +-1 vector and
/// a text embeds as the normalized sum over its (truncated) token counts.
/// An optional synonym table rewrites tokens before projection so that
/// paraphrases land near each other.
class HashingEmbedder final : public EmbeddingProvider {
public:
    struct Options {
        std::size_t dimension = 512;
        std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
        std::size_t max_input_tokens = 8192;
        std::unordered_map<std::string, std::string> synonyms;
        TokenizerConfig tokenizer;
    };

    HashingEmbedder();
    explicit HashingEmbedder(Options options);

    std::string provider_id() const override;
    std::size_t dimension() const override { return options_.dimension; }
    std::size_t max_input_tokens() const override { return options_.max_input_tokens; }
    std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;

private:
    Embedding embed_one(const std::string& text) const;

    Options options_;
};

/// Remote provider speaking `POST {texts: [string]} -> {vectors: [[real]]}`.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    struct Options {
        std::string url;
        std::size_t dimension = 512;
        std::size_t max_input_tokens = 8192;
        std::chrono::milliseconds timeout{30000};
        std::string api_key;
    };

    explicit HttpEmbeddingProvider(Options options);

    std::string provider_id() const override { return "http:" + options_.url; }
    std::size_t dimension() const override { return options_.dimension; }
    std::size_t max_input_tokens() const override { return options_.max_input_tokens; }
    std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;

private:
    Options options_;
};

/// Cuts text after its first max_tokens tokens. Returns true when it did.
bool truncate_to_tokens(std::string& text, std::size_t max_tokens);

}  // namespace ragdesk
