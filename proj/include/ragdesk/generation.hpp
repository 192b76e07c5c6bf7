#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragdesk/bot_config.hpp"
#include "ragdesk/retrieval.hpp"

namespace ragdesk {

inline constexpr std::string_view kBaseInstruction =
    "You are a knowledgeable and patient teaching assistant. Refer to the previous conversation "
    "when answering, and politely decline if a question is outside your knowledge. Be concise.";

inline constexpr std::string_view kClosedClause =
    "Answer ONLY from the provided context; if the context is insufficient, say you do not know.";

inline constexpr std::string_view kBlendedClause =
    "Prefer the provided context; you may add general knowledge when the context is insufficient.";

inline constexpr std::size_t kHistoryTurns = 10;

struct Turn {
    std::string role;  // "system", "user" or "assistant"
    std::string text;

    bool operator==(const Turn&) const = default;
};

struct PromptPassage {
    ChunkId chunk;
    std::string heading;
    std::string body;

    bool operator==(const PromptPassage&) const = default;
};

struct PromptBundle {
    std::string system_text;
    std::string context_block;
    std::vector<Turn> history;
    std::string user_text;
    int openness = 0;
    std::vector<PromptPassage> passages;  // the numbered passages, in order

    bool operator==(const PromptBundle&) const = default;
};

/// 0 restricts to context, 1-99 blends, 100 adds no clause (empty view).
std::string_view openness_clause(int openness);

/// History keeps the most recent kHistoryTurns entries; passages are numbered
/// [1..n] in the given (reranked) order.
PromptBundle build_prompt(std::string_view query, std::span<const ContextPassage> passages,
                          std::span<const Turn> history, const BotConfig& bot);

/// Chat-completion message list: system (instructions + context), history,
/// then the user question.
std::vector<Turn> chat_messages(const PromptBundle& bundle);

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string model_id() const = 0;

    /// One completion. Throws ErrorCode::rate_limited, ErrorCode::unauthorized
    /// or ErrorCode::transport.
    virtual std::string complete(const PromptBundle& bundle) = 0;
};

/// Deterministic stand-in: "[MOCK] " + first sentence of the first passage, or
/// a fixed refusal when there is no context and openness is 0.
class MockLlmClient final : public LlmClient {
public:
    static constexpr std::string_view kRefusal =
        "I'm sorry, I don't know the answer to that based on the provided materials.";
    static constexpr std::string_view kNoContext = "[MOCK] No relevant context was found.";

    std::string model_id() const override { return "mock"; }
    std::string complete(const PromptBundle& bundle) override;
};

/// OpenAI-compatible `POST {base_url}/chat/completions` client.
class ChatCompletionClient final : public LlmClient {
public:
    struct Options {
        std::string base_url = "https://api.openai.com/v1";
        std::string model = "gpt-4o-mini";
        std::string api_key;
        std::chrono::milliseconds timeout{30000};
    };

    explicit ChatCompletionClient(Options options);

    std::string model_id() const override { return options_.model; }
    std::string complete(const PromptBundle& bundle) override;

private:
    Options options_;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
    double multiplier = 2.0;
    std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

struct GenerationResult {
    std::string answer_text;
    std::vector<ChunkId> passages_used;
    bool degraded = false;
    std::int64_t latency_ms = 0;
    int attempts = 0;
};

/// Calls the client once, retrying only rate-limit failures with exponential
/// backoff up to max_attempts in total.
GenerationResult generate(const PromptBundle& bundle, LlmClient& client, const RetryPolicy& retry = {});

std::string first_sentence(std::string_view text);

}  // namespace ragdesk
