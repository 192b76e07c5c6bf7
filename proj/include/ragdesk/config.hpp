#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "ragdesk/service.hpp"

namespace ragdesk {

struct ServiceConfig {
    std::string listen_host = "127.0.0.1";
    int listen_port = 8080;
    std::string data_dir = "ragdesk-data";
    std::string instructor_token_env = "RAGDESK_TOKEN";

    struct Embedding {
        std::string kind = "hashing";  // hashing | http
        std::size_t dimension = 512;
        std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
        std::size_t max_input_tokens = 8192;
        std::unordered_map<std::string, std::string> synonyms;
        std::string url;
        std::string api_key_env;
        std::int64_t timeout_ms = 30000;
    } embedding;

    struct Llm {
        std::string kind = "mock";  // mock | openai
        std::string base_url = "https://api.openai.com/v1";
        std::string model = "gpt-4o-mini";
        std::string api_key_env = "OPENAI_API_KEY";
        std::int64_t timeout_ms = 30000;
    } llm;

    struct RerankerEndpoint {
        std::string kind = "none";  // none | http
        std::string url;
        std::int64_t timeout_ms = 30000;
    } reranker;

    std::size_t max_chunk_tokens = 384;
    std::size_t ann_threshold = DenseIndex::kDefaultExactThreshold;
};

/// Reads a JSON config file; unknown keys are rejected. An empty path yields
/// the defaults.
ServiceConfig load_config(const std::string& path);
ServiceConfig parse_config(const std::string& json_text);

Providers make_providers(const ServiceConfig& config);
ServiceOptions make_service_options(const ServiceConfig& config);

/// Value of the environment variable, or "" when unset.
std::string env_or_empty(const std::string& name);

}  // namespace ragdesk
