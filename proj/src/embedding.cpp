#include "ragdesk/embedding.hpp"

#include <unordered_map>

#include "http_client.hpp"
#include "ragdesk/common.hpp"
#include "ragdesk/corpus.hpp"
#include "ragdesk/dense_index.hpp"

namespace ragdesk {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void require_text(const std::string& text) {
    if (clean_text(text).empty()) {
        throw Error(ErrorCode::invalid_argument, "cannot embed text that is empty after cleaning");
    }
}

}  // namespace

Embedding EmbeddingProvider::embed(const std::string& text) const {
    std::vector<Embedding> out = embed_batch(std::span<const std::string>(&text, 1));
    return std::move(out.front());
}

bool truncate_to_tokens(std::string& text, std::size_t max_tokens) {
    const auto spans = token_spans(text);
    if (spans.size() <= max_tokens) return false;
    text.resize(max_tokens == 0 ? 0 : spans[max_tokens - 1].end);
    return true;
}

HashingEmbedder::HashingEmbedder() : HashingEmbedder(Options{}) {}

HashingEmbedder::HashingEmbedder(Options options) : options_(std::move(options)) {
    if (options_.dimension == 0 || options_.max_input_tokens == 0) {
        throw Error(ErrorCode::invalid_argument, "hashing embedder needs positive dimension and token limit");
    }
}

std::string HashingEmbedder::provider_id() const {
    return "hashing-d" + std::to_string(options_.dimension) + "-s" + std::to_string(options_.seed) +
           (options_.synonyms.empty() ? "" : "-syn" + std::to_string(options_.synonyms.size()));
}

Embedding HashingEmbedder::embed_one(const std::string& text) const {
    require_text(text);
    Embedding out;
    std::vector<std::string> tokens = tokenize(text, options_.tokenizer);
    if (tokens.size() > options_.max_input_tokens) {
        tokens.resize(options_.max_input_tokens);
        out.truncated = true;
    }
    if (tokens.empty()) {
        // Punctuation-only text still needs a unit vector.
        tokens.emplace_back("\x01<empty>");
    }

    std::unordered_map<std::string, int> counts;
    for (std::string& token : tokens) {
        const auto syn = options_.synonyms.find(token);
        ++counts[syn == options_.synonyms.end() ? token : syn->second];
    }

    std::vector<double> acc(options_.dimension, 0.0);
    for (const auto& [token, count] : counts) {
        std::uint64_t state = options_.seed ^ fnv1a(token);
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < options_.dimension; ++i) {
            if (i % 64 == 0) bits = splitmix64(state);
            acc[i] += (bits & 1) ? count : -count;
            bits >>= 1;
        }
    }

    out.values.assign(acc.begin(), acc.end());
    normalize(out.values);
    return out;
}

std::vector<Embedding> HashingEmbedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) out.push_back(embed_one(text));
    return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(Options options) : options_(std::move(options)) {
    if (options_.url.empty()) throw Error(ErrorCode::invalid_argument, "embedding provider URL is empty");
}

std::vector<Embedding> HttpEmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
    std::vector<Embedding> out(texts.size());
    nlohmann::json request = {{"texts", nlohmann::json::array()}};
    for (std::size_t i = 0; i < texts.size(); ++i) {
        require_text(texts[i]);
        std::string text = texts[i];
        out[i].truncated = truncate_to_tokens(text, options_.max_input_tokens);
        request["texts"].push_back(std::move(text));
    }

    std::vector<std::pair<std::string, std::string>> headers;
    if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);
    const nlohmann::json reply = detail::post_json(options_.url, request, options_.timeout, headers);

    const auto vectors = reply.find("vectors");
    if (vectors == reply.end() || !vectors->is_array() || vectors->size() != texts.size()) {
        throw Error(ErrorCode::transport, "embedding provider reply lacks one vector per text");
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto& row = (*vectors)[i];
        if (!row.is_array() || row.size() != options_.dimension) {
            throw Error(ErrorCode::transport, "embedding provider returned a vector of the wrong dimension");
        }
        out[i].values.reserve(options_.dimension);
        for (const auto& x : row) {
            if (!x.is_number()) throw Error(ErrorCode::transport, "embedding provider returned a non-numeric value");
            out[i].values.push_back(x.get<float>());
        }
        try {
            normalize(out[i].values);
        } catch (const Error&) {
            throw Error(ErrorCode::transport, "embedding provider returned a zero vector");
        }
    }
    return out;
}

}  // namespace ragdesk
