#include "ragdesk/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ragdesk {
namespace {

void check_keys(const nlohmann::json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "config: " + where + " must be an object");
    const std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!names.contains(key)) {
            throw Error(ErrorCode::invalid_argument, "config: unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end()) it->get_to(out);
}

}  // namespace

ServiceConfig parse_config(const std::string& json_text) {
    ServiceConfig cfg;
    try {
        const nlohmann::json j = nlohmann::json::parse(json_text);
        check_keys(j, "top level",
                   {"listen", "data_dir", "instructor_token_env", "embedding", "llm", "reranker",
                    "max_chunk_tokens", "ann_threshold"});
        if (const auto it = j.find("listen"); it != j.end()) {
            check_keys(*it, "listen", {"host", "port"});
            read(*it, "host", cfg.listen_host);
            read(*it, "port", cfg.listen_port);
        }
        read(j, "data_dir", cfg.data_dir);
        read(j, "instructor_token_env", cfg.instructor_token_env);
        read(j, "max_chunk_tokens", cfg.max_chunk_tokens);
        read(j, "ann_threshold", cfg.ann_threshold);
        if (const auto it = j.find("embedding"); it != j.end()) {
            check_keys(*it, "embedding",
                       {"kind", "dimension", "seed", "max_input_tokens", "synonyms", "url", "api_key_env",
                        "timeout_ms"});
            auto& e = cfg.embedding;
            read(*it, "kind", e.kind);
            read(*it, "dimension", e.dimension);
            read(*it, "seed", e.seed);
            read(*it, "max_input_tokens", e.max_input_tokens);
            read(*it, "synonyms", e.synonyms);
            read(*it, "url", e.url);
            read(*it, "api_key_env", e.api_key_env);
            read(*it, "timeout_ms", e.timeout_ms);
        }
        if (const auto it = j.find("llm"); it != j.end()) {
            check_keys(*it, "llm", {"kind", "base_url", "model", "api_key_env", "timeout_ms"});
            auto& l = cfg.llm;
            read(*it, "kind", l.kind);
            read(*it, "base_url", l.base_url);
            read(*it, "model", l.model);
            read(*it, "api_key_env", l.api_key_env);
            read(*it, "timeout_ms", l.timeout_ms);
        }
        if (const auto it = j.find("reranker"); it != j.end()) {
            check_keys(*it, "reranker", {"kind", "url", "timeout_ms"});
            read(*it, "kind", cfg.reranker.kind);
            read(*it, "url", cfg.reranker.url);
            read(*it, "timeout_ms", cfg.reranker.timeout_ms);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("config: ") + e.what());
    }
    if (cfg.listen_port < 0 || cfg.listen_port > 65535) {
        throw Error(ErrorCode::invalid_argument, "config: listen.port must lie in [0, 65535]");
    }
    if (cfg.embedding.kind != "hashing" && cfg.embedding.kind != "http") {
        throw Error(ErrorCode::invalid_argument, "config: embedding.kind must be 'hashing' or 'http'");
    }
    if (cfg.llm.kind != "mock" && cfg.llm.kind != "openai") {
        throw Error(ErrorCode::invalid_argument, "config: llm.kind must be 'mock' or 'openai'");
    }
    if (cfg.reranker.kind != "none" && cfg.reranker.kind != "http") {
        throw Error(ErrorCode::invalid_argument, "config: reranker.kind must be 'none' or 'http'");
    }
    if (cfg.max_chunk_tokens < kMinChunkTokens) {
        throw Error(ErrorCode::invalid_argument,
                    "config: max_chunk_tokens must be at least " + std::to_string(kMinChunkTokens));
    }
    return cfg;
}

ServiceConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot read config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string env_or_empty(const std::string& name) {
    if (name.empty()) return {};
    const char* value = std::getenv(name.c_str());
    return value ? value : "";
}

Providers make_providers(const ServiceConfig& cfg) {
    Providers p;
    const auto& e = cfg.embedding;
    if (e.kind == "hashing") {
        HashingEmbedder::Options o;
        o.dimension = e.dimension;
        o.seed = e.seed;
        o.max_input_tokens = e.max_input_tokens;
        o.synonyms = e.synonyms;
        p.embedder = std::make_shared<HashingEmbedder>(std::move(o));
    } else if (e.kind == "http") {
        p.embedder = std::make_shared<HttpEmbeddingProvider>(HttpEmbeddingProvider::Options{
            e.url, e.dimension, e.max_input_tokens, std::chrono::milliseconds(e.timeout_ms),
            env_or_empty(e.api_key_env)});
    } else {
        throw Error(ErrorCode::invalid_argument, "config: embedding.kind must be 'hashing' or 'http'");
    }

    const auto& l = cfg.llm;
    if (l.kind == "mock") {
        p.llm = std::make_shared<MockLlmClient>();
    } else if (l.kind == "openai") {
        p.llm = std::make_shared<ChatCompletionClient>(ChatCompletionClient::Options{
            l.base_url, l.model, env_or_empty(l.api_key_env), std::chrono::milliseconds(l.timeout_ms)});
    } else {
        throw Error(ErrorCode::invalid_argument, "config: llm.kind must be 'mock' or 'openai'");
    }

    if (cfg.reranker.kind == "http") {
        if (cfg.reranker.url.empty()) throw Error(ErrorCode::invalid_argument, "config: reranker.url is empty");
        p.reranker =
            std::make_shared<HttpCrossEncoder>(cfg.reranker.url, std::chrono::milliseconds(cfg.reranker.timeout_ms));
    } else if (cfg.reranker.kind != "none") {
        throw Error(ErrorCode::invalid_argument, "config: reranker.kind must be 'none' or 'http'");
    }
    return p;
}

ServiceOptions make_service_options(const ServiceConfig& cfg) {
    ServiceOptions o;
    o.database = cfg.data_dir == ":memory:" ? ":memory:"
                                            : (std::filesystem::path(cfg.data_dir) / "ragdesk.db").string();
    o.chunker.max_chunk_tokens = cfg.max_chunk_tokens;
    o.ann_threshold = cfg.ann_threshold;
    return o;
}

}  // namespace ragdesk
