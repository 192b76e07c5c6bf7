#include "ragdesk/generation.hpp"

#include <thread>

#include "http_client.hpp"

namespace ragdesk {

void BotConfig::validate() const {
    if (clean_text(name).empty()) throw Error(ErrorCode::invalid_argument, "bot name must not be empty");
    if (openness < kMinOpenness || openness > kMaxOpenness) {
        throw Error(ErrorCode::invalid_argument, "openness must lie in [0, 100], got " + std::to_string(openness));
    }
    retrieval.validate();
}

std::string_view openness_clause(int openness) {
    if (openness <= kMinOpenness) return kClosedClause;
    if (openness >= kMaxOpenness) return {};
    return kBlendedClause;
}

PromptBundle build_prompt(std::string_view query, std::span<const ContextPassage> passages,
                          std::span<const Turn> history, const BotConfig& bot) {
    PromptBundle bundle;
    bundle.openness = bot.openness;
    bundle.system_text = std::string(kBaseInstruction);
    if (const auto clause = openness_clause(bot.openness); !clause.empty()) {
        bundle.system_text.append("\n").append(clause);
    }

    for (std::size_t i = 0; i < passages.size(); ++i) {
        const ContextPassage& p = passages[i];
        if (i > 0) bundle.context_block.append("\n\n");
        bundle.context_block.append("[").append(std::to_string(i + 1)).append("] ");
        if (!p.heading.empty()) bundle.context_block.append(p.heading).append("\n");
        bundle.context_block.append(p.body);
        bundle.passages.push_back({p.chunk, p.heading, p.body});
    }

    const std::size_t keep = std::min(history.size(), kHistoryTurns);
    bundle.history.assign(history.end() - static_cast<std::ptrdiff_t>(keep), history.end());
    bundle.user_text = std::string(query);
    return bundle;
}

std::vector<Turn> chat_messages(const PromptBundle& bundle) {
    std::vector<Turn> messages;
    std::string system = bundle.system_text;
    if (bundle.context_block.empty()) {
        system.append("\n\nNo context passages were retrieved for this question.");
    } else {
        system.append("\n\nContext passages (cite them by number):\n").append(bundle.context_block);
    }
    messages.push_back({"system", std::move(system)});
    messages.insert(messages.end(), bundle.history.begin(), bundle.history.end());
    messages.push_back({"user", bundle.user_text});
    return messages;
}

std::string first_sentence(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || text[i + 1] == ' ')) {
            return std::string(text.substr(0, i + 1));
        }
    }
    return std::string(text);
}

std::string MockLlmClient::complete(const PromptBundle& bundle) {
    if (bundle.passages.empty()) {
        return std::string(bundle.openness == 0 ? kRefusal : kNoContext);
    }
    return "[MOCK] " + first_sentence(bundle.passages.front().body);
}

ChatCompletionClient::ChatCompletionClient(Options options) : options_(std::move(options)) {
    if (options_.base_url.empty()) throw Error(ErrorCode::invalid_argument, "LLM base URL is empty");
    while (!options_.base_url.empty() && options_.base_url.back() == '/') options_.base_url.pop_back();
}

std::string ChatCompletionClient::complete(const PromptBundle& bundle) {
    nlohmann::json request = {{"model", options_.model}, {"messages", nlohmann::json::array()}};
    for (const Turn& m : chat_messages(bundle)) {
        request["messages"].push_back({{"role", m.role}, {"content", m.text}});
    }
    std::vector<std::pair<std::string, std::string>> headers;
    if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);

    const nlohmann::json reply =
        detail::post_json(options_.base_url + "/chat/completions", request, options_.timeout, headers);
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::transport, "chat completion reply has no choices[0].message.content");
    }
}

GenerationResult generate(const PromptBundle& bundle, LlmClient& client, const RetryPolicy& retry) {
    const auto started = std::chrono::steady_clock::now();
    GenerationResult result;
    auto backoff = retry.initial_backoff;
    const int max_attempts = std::max(1, retry.max_attempts);

    for (int attempt = 1;; ++attempt) {
        result.attempts = attempt;
        try {
            result.answer_text = client.complete(bundle);
            break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::rate_limited || attempt >= max_attempts) throw;
        }
        if (retry.sleep) {
            retry.sleep(backoff);
        } else {
            std::this_thread::sleep_for(backoff);
        }
        backoff = std::chrono::milliseconds(static_cast<std::int64_t>(backoff.count() * retry.multiplier));
    }

    for (const PromptPassage& p : bundle.passages) result.passages_used.push_back(p.chunk);
    result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - started)
                            .count();
    return result;
}

}  // namespace ragdesk
