#pragma once

#include <atomic>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragdesk/service.hpp"

namespace ragdesk::testing {

/// Clock that advances by `step` on every call, starting at `start`.
Clock stepping_clock(Timestamp start = Timestamp{std::chrono::milliseconds(1'700'000'000'000)},
                     std::chrono::milliseconds step = std::chrono::milliseconds(1));

/// In-memory store, stepping clock, retries without sleeping.
ServiceOptions memory_options();

Providers mock_providers(std::size_t dimension = 256,
                         std::unordered_map<std::string, std::string> synonyms = {});

/// n words drawn uniformly from vocab, joined by single spaces.
std::string random_words(std::mt19937_64& rng, const std::vector<std::string>& vocab, std::size_t n);

/// Synthetic vocabulary "w0".."w{n-1}" with letter prefixes.
std::vector<std::string> make_vocab(std::size_t n, const std::string& prefix = "w");

std::vector<float> random_unit_vector(std::mt19937_64& rng, std::size_t dimension);

/// Embedding provider that fails every call with the given code.
class FailingEmbedder final : public EmbeddingProvider {
public:
    FailingEmbedder(std::size_t dimension, ErrorCode code) : dimension_(dimension), code_(code) {}
    std::string provider_id() const override { return "failing"; }
    std::size_t dimension() const override { return dimension_; }
    std::size_t max_input_tokens() const override { return 8192; }
    std::vector<Embedding> embed_batch(std::span<const std::string>) const override {
        throw Error(code_, "embedding provider unavailable");
    }

private:
    std::size_t dimension_;
    ErrorCode code_;
};

/// Delegates to an inner provider until `fail` is set.
class SwitchableEmbedder final : public EmbeddingProvider {
public:
    explicit SwitchableEmbedder(std::shared_ptr<const EmbeddingProvider> inner) : inner_(std::move(inner)) {}
    std::string provider_id() const override { return inner_->provider_id(); }
    std::size_t dimension() const override { return inner_->dimension(); }
    std::size_t max_input_tokens() const override { return inner_->max_input_tokens(); }
    std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override {
        if (fail) throw Error(ErrorCode::transport, "embedding provider unreachable");
        return inner_->embed_batch(texts);
    }
    mutable std::atomic<bool> fail{false};

private:
    std::shared_ptr<const EmbeddingProvider> inner_;
};

/// Throws `code` for the first `failures` calls, then answers like the mock.
class FlakyLlm final : public LlmClient {
public:
    FlakyLlm(int failures, ErrorCode code) : failures_(failures), code_(code) {}
    std::string model_id() const override { return "flaky"; }
    std::string complete(const PromptBundle& bundle) override {
        ++calls;
        last_bundle = bundle;
        if (failures_ > 0) {
            --failures_;
            throw Error(code_, "injected failure");
        }
        return MockLlmClient().complete(bundle);
    }
    int calls = 0;
    PromptBundle last_bundle;

private:
    int failures_;
    ErrorCode code_;
};

}  // namespace ragdesk::testing
